//! Writes a synthetic ground-truth CSV simulated at fixed (K, T).
//!
//! Usage: synth_truth DICT K T N_WORDS SAMPLES SEED > ground_truth.csv
//!
//! Words are every `len / N_WORDS`-th dictionary entry, plus `train`,
//! `eerie` and `query` when present. Percentages are rounded to integers.

use std::io::Write;

use chrono::{Days, NaiveDate};
use cogsim_core::ingest::GROUND_TRUTH_HEADER;
use cogsim_core::{load_dictionary, Hyperparams, RngSeed, Simulator, Weighting, Word};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.len() != 6 {
        eprintln!("usage: synth_truth DICT K T N_WORDS SAMPLES SEED");
        std::process::exit(2);
    }
    let dict = load_dictionary(&args[0])?;
    let hp = Hyperparams::new(args[1].parse()?, args[2].parse()?)?;
    let n_words: usize = args[3].parse()?;
    let samples: usize = args[4].parse()?;
    let seed = RngSeed::new(args[5].parse()?);

    let mut words: Vec<Word> = Vec::new();
    for extra in ["train", "eerie", "query"] {
        let w = Word::parse(extra)?;
        if dict.contains(w) {
            words.push(w);
        }
    }
    let stride = (dict.len() / n_words.max(1)).max(1);
    for w in dict.words().step_by(stride) {
        if words.len() >= n_words {
            break;
        }
        if !words.contains(&w) {
            words.push(w);
        }
    }

    let sim = Simulator::new(&dict, Weighting::Cap);
    let start = NaiveDate::from_ymd_opt(2022, 1, 7).expect("valid date");
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", GROUND_TRUTH_HEADER.join(","))?;
    for (i, &w) in words.iter().enumerate() {
        let dist = sim.trial_distribution(w, &hp, samples, seed)?;
        let pct: Vec<String> = dist.mass().iter().map(|m| format!("{}", (m * 100.0).round())).collect();
        let date = start + Days::new(i as u64);
        writeln!(out, "{},{},{},{}", date.format("%Y-%m-%d"), w, samples, pct.join(","))?;
    }
    Ok(())
}
