use std::path::{Path, PathBuf};

use cogsim_core::evaluation::{difficulty_histogram, fold_assignment, fold_entries, kfold_evaluate, FoldEntry};
use cogsim_core::features::{write_features_csv, FEATURE_NAMES, FEATURE_SET_VERSION};
use cogsim_core::ingest::split_known;
use cogsim_core::optimizer::{coordinate_search_with, Step};
use cogsim_core::projection::{fpca_project_labeled, replicate_band};
use cogsim_core::wasserstein::{difficulty, ground_truth_baseline};
use cogsim_core::{
    load_dictionary, load_ground_truth, Dictionary, Simulator, TrialDistribution, Weighting, Word, WordRecord,
};
use serde::Serialize;

use crate::config::{Settings, DEFAULT_PROJECT_WORD};
use crate::error::CliError;
use crate::output::Staged;

fn date_string(r: &WordRecord) -> String {
    r.date.format("%Y-%m-%d").to_string()
}

fn parse_word(s: &str, what: &str) -> Result<Word, CliError> {
    Word::parse(s).map_err(|e| CliError::usage(format!("{what}: {e}")))
}

fn out_dir(s: &Settings) -> PathBuf {
    s.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

/// Prints a summary line. A closed stdout (e.g. piped into `head`) is not
/// an error: the outputs are already on disk.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

fn check_exists(path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::data(format!("input file not found: {}", path.display())))
    }
}

/// Checks that every configured input exists before anything is loaded.
fn check_inputs(s: &Settings, need_truth: bool) -> Result<(), CliError> {
    check_exists(s.require_dict()?)?;
    if need_truth {
        check_exists(s.require_truth()?)?;
    } else if let Some(t) = &s.truth {
        check_exists(t)?;
    }
    Ok(())
}

fn load_truth(s: &Settings, dict: &Dictionary) -> Result<Option<Vec<WordRecord>>, CliError> {
    match &s.truth {
        Some(p) => Ok(Some(load_ground_truth(p, dict)?)),
        None => Ok(None),
    }
}

fn print_written(paths: &[PathBuf]) {
    for p in paths {
        say!("wrote {}", p.display());
    }
}

#[derive(Serialize)]
struct DictionaryReport {
    path: PathBuf,
    words: usize,
    top_word: Word,
    max_freq: f64,
}

#[derive(Serialize)]
struct TruthReport {
    path: PathBuf,
    records: usize,
    known_records: usize,
    unknown_words: Vec<Word>,
    first_date: Option<String>,
    last_date: Option<String>,
    baseline: String,
    baseline_present: bool,
}

#[derive(Serialize)]
struct ValidationReport {
    dictionary: DictionaryReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    truth: Option<TruthReport>,
}

pub fn validate(s: &Settings) -> Result<(), CliError> {
    check_inputs(s, false)?;
    let dict = load_dictionary(s.require_dict()?)?;
    let baseline = s.baseline.clone().unwrap_or_default();
    let truth = match load_truth(s, &dict)? {
        Some(records) => {
            let (known, unknown) = split_known(&records, &dict);
            let present = Word::parse(&baseline).map(|b| records.iter().any(|r| r.word == b)).unwrap_or(false);
            Some(TruthReport {
                path: s.truth.clone().expect("truth loaded"),
                records: records.len(),
                known_records: known.len(),
                unknown_words: unknown,
                first_date: records.first().map(date_string),
                last_date: records.last().map(date_string),
                baseline,
                baseline_present: present,
            })
        }
        None => None,
    };
    let top = dict.entries()[0];
    let report = ValidationReport {
        dictionary: DictionaryReport {
            path: s.require_dict()?.to_path_buf(),
            words: dict.len(),
            top_word: top.word,
            max_freq: top.freq,
        },
        truth,
    };
    say!("dictionary: {} words", report.dictionary.words);
    if let Some(t) = &report.truth {
        say!(
            "ground truth: {} records ({} usable), baseline present: {}",
            t.records,
            t.known_records,
            t.baseline_present
        );
    }
    let mut staged = Staged::new(&out_dir(s))?;
    staged.add_json("validation.json", &report, s)?;
    print_written(&staged.commit()?);
    Ok(())
}

#[derive(Serialize)]
struct FitOutput<'a> {
    k: usize,
    t: f64,
    objective: f64,
    converged: bool,
    iterations: usize,
    evaluations: usize,
    seed: u64,
    weighting: Weighting,
    n_samples: usize,
    n_records: usize,
    excluded_words: &'a [Word],
    trajectory: &'a [Step],
    #[serde(skip_serializing_if = "Option::is_none")]
    advisory: Option<&'static str>,
}

const PLAIN_ADVISORY: &str =
    "plain weighting scales every candidate by T, so T does not change the simulation and T* is the first grid value";

pub fn fit(s: &Settings) -> Result<(), CliError> {
    check_inputs(s, true)?;
    let cfg = s.fit_config()?;
    cfg.grids()?;
    let dict = load_dictionary(s.require_dict()?)?;
    let records = load_ground_truth(s.require_truth()?, &dict)?;
    let (known, excluded) = split_known(&records, &dict);
    let advisory = (cfg.weighting == Weighting::Plain).then_some(PLAIN_ADVISORY);
    if let Some(msg) = advisory {
        log::warn!("{msg}");
    }
    let sim = Simulator::new(&dict, cfg.weighting);
    let res = coordinate_search_with(&cfg, &known, &sim)?;
    say!("K* = {}, T* = {:.6}, objective = {:.6}", res.k_star, res.t_star, res.objective);
    let body = FitOutput {
        k: res.k_star,
        t: res.t_star,
        objective: res.objective,
        converged: res.converged,
        iterations: res.iterations,
        evaluations: res.evaluations,
        seed: cfg.seed.seed,
        weighting: cfg.weighting,
        n_samples: cfg.n_samples,
        n_records: known.len(),
        excluded_words: &excluded,
        trajectory: &res.trajectory,
        advisory,
    };
    let mut staged = Staged::new(&out_dir(s))?;
    staged.add_json("params.json", &body, s)?;
    print_written(&staged.commit()?);
    Ok(())
}

#[derive(Serialize)]
struct SimulateOutput {
    word: Word,
    k: usize,
    t: f64,
    weighting: Weighting,
    n_samples: usize,
    seed: u64,
    distribution: TrialDistribution,
    mean_trials: f64,
}

pub fn simulate(s: &Settings, word: &str) -> Result<(), CliError> {
    let word = parse_word(word, "--word")?;
    let hp = s.hyperparams()?;
    check_inputs(s, false)?;
    let dict = load_dictionary(s.require_dict()?)?;
    let sim = Simulator::new(&dict, s.weighting());
    let dist = sim.trial_distribution(word, &hp, s.samples(), s.seed())?;
    say!("{word}: {:?} (mean {:.4})", dist.mass(), dist.mean_position());
    let body = SimulateOutput {
        word,
        k: hp.k(),
        t: hp.t(),
        weighting: s.weighting(),
        n_samples: s.samples(),
        seed: s.seed().seed,
        distribution: dist,
        mean_trials: dist.mean_position(),
    };
    let mut staged = Staged::new(&out_dir(s))?;
    staged.add_json("dist.json", &body, s)?;
    print_written(&staged.commit()?);
    Ok(())
}

#[derive(Serialize)]
struct DifficultyOutput {
    word: Word,
    difficulty: f64,
    predicted_distribution: TrialDistribution,
    baseline: Word,
    baseline_source: &'static str,
    baseline_distribution: TrialDistribution,
    k: usize,
    t: f64,
    weighting: Weighting,
    n_samples: usize,
    seed: u64,
}

pub fn difficulty_cmd(s: &Settings, word: &str) -> Result<(), CliError> {
    let word = parse_word(word, "--word")?;
    let baseline = parse_word(s.baseline.as_deref().unwrap_or_default(), "--baseline")?;
    let hp = s.hyperparams()?;
    let source = match s.baseline_source.as_deref() {
        Some("truth") => "truth",
        Some("simulated") => "simulated",
        Some(other) => return Err(CliError::usage(format!("unknown baseline source {other:?}"))),
        None if s.truth.is_some() => "truth",
        None => "simulated",
    };
    check_inputs(s, source == "truth")?;
    let dict = load_dictionary(s.require_dict()?)?;
    let sim = Simulator::new(&dict, s.weighting());
    let baseline_dist = if source == "truth" {
        let records = load_ground_truth(s.require_truth()?, &dict)?;
        ground_truth_baseline(&records, baseline)?
    } else {
        sim.trial_distribution(baseline, &hp, s.samples(), s.seed())?
    };
    let predicted = sim.trial_distribution(word, &hp, s.samples(), s.seed())?;
    let d = difficulty(&predicted, &baseline_dist);
    say!("{word}: difficulty {d:.6} against {baseline} ({source})");
    let body = DifficultyOutput {
        word,
        difficulty: d,
        predicted_distribution: predicted,
        baseline,
        baseline_source: source,
        baseline_distribution: baseline_dist,
        k: hp.k(),
        t: hp.t(),
        weighting: s.weighting(),
        n_samples: s.samples(),
        seed: s.seed().seed,
    };
    let mut staged = Staged::new(&out_dir(s))?;
    staged.add_json("difficulty.json", &body, s)?;
    print_written(&staged.commit()?);
    Ok(())
}

#[derive(Serialize)]
struct FoldsOutput<'a> {
    folds: usize,
    seed: u64,
    procedure: &'static str,
    assignments: &'a [FoldEntry],
}

#[derive(Serialize)]
struct FeaturesMeta {
    feature_set_version: u32,
    features: [&'static str; FEATURE_NAMES.len()],
}

#[derive(Serialize)]
struct EvalOutput<'a, R: Serialize> {
    baseline: Word,
    excluded_words: &'a [Word],
    features: FeaturesMeta,
    #[serde(flatten)]
    report: &'a R,
}

pub fn evaluate(s: &Settings) -> Result<(), CliError> {
    check_inputs(s, true)?;
    let cfg = s.fit_config()?;
    cfg.grids()?;
    let folds = s.folds.unwrap_or(cogsim_core::evaluation::DEFAULT_FOLDS);
    let baseline = parse_word(s.baseline.as_deref().unwrap_or_default(), "--baseline")?;
    let dict = load_dictionary(s.require_dict()?)?;
    let records = load_ground_truth(s.require_truth()?, &dict)?;
    let (known, excluded) = split_known(&records, &dict);
    let base = ground_truth_baseline(&records, baseline)?;

    let assignment = fold_assignment(&known, folds, cfg.seed)?;
    let entries = fold_entries(&known, &assignment);
    let mut features = Vec::new();
    let words: Vec<Word> = known.iter().map(|r| r.word).collect();
    write_features_csv(&words, &dict, &mut features)?;

    let report = kfold_evaluate(&known, &dict, &cfg, folds, Some(&base))?;
    say!(
        "mean W1 {:.6}, MSE {:.6} (probability) / {:.4} (percent), accuracy {:.4}",
        report.metrics.mean_w1,
        report.metrics.mse_probability,
        report.metrics.mse_percent,
        report.metrics.mean_accuracy
    );

    let histogram = difficulty_histogram(&records, baseline)?;
    let mut csv = String::from("word,difficulty\n");
    for (w, d) in &histogram {
        csv.push_str(&format!("{w},{d}\n"));
    }

    let mut staged = Staged::new(&out_dir(s))?;
    let body = EvalOutput {
        baseline,
        excluded_words: &excluded,
        features: FeaturesMeta { feature_set_version: FEATURE_SET_VERSION, features: FEATURE_NAMES },
        report: &report,
    };
    staged.add_json("eval_report.json", &body, s)?;
    staged.add("difficulty_histogram.csv", csv.as_bytes())?;
    let folds_body = FoldsOutput {
        folds,
        seed: cfg.seed.seed,
        procedure: "records sorted by (date, word), shuffled with the seed, dealt round-robin",
        assignments: &entries,
    };
    staged.add_json("folds.json", &folds_body, s)?;
    staged.add("features.csv", &features)?;
    print_written(&staged.commit()?);
    Ok(())
}

#[derive(Serialize)]
struct ProjectionMeta<'a> {
    basis_source: &'static str,
    basis: &'a [[f64; 7]; 2],
    center: &'a [f64; 7],
    explained_variance: &'a [f64; 2],
    total_variance: f64,
}

#[derive(Serialize)]
struct BandOutput<'a> {
    word: Word,
    level: f64,
    n_replicates: usize,
    n_samples: usize,
    k: usize,
    t: f64,
    weighting: Weighting,
    seed: u64,
    mean: &'a [f64; 7],
    lower: &'a [f64; 7],
    upper: &'a [f64; 7],
    #[serde(skip_serializing_if = "Option::is_none")]
    truth: Option<TrialDistribution>,
    projection: ProjectionMeta<'a>,
}

pub fn project(s: &Settings) -> Result<(), CliError> {
    let word = parse_word(s.word.as_deref().unwrap_or(DEFAULT_PROJECT_WORD), "--word")?;
    let hp = s.hyperparams()?;
    let replicates = s.replicates.unwrap_or(cogsim_core::projection::DEFAULT_REPLICATES);
    let level = s.level.unwrap_or(cogsim_core::projection::DEFAULT_LEVEL);
    check_inputs(s, false)?;
    let dict = load_dictionary(s.require_dict()?)?;
    let truth = match load_truth(s, &dict)? {
        Some(records) => records.iter().filter(|r| r.word == word).min_by_key(|r| r.date).map(|r| r.dist),
        None => None,
    };
    let sim = Simulator::new(&dict, s.weighting());
    let band = replicate_band(word, &sim, &hp, replicates, s.samples(), level, s.seed())?;

    let width = replicates.to_string().len();
    let mut labeled: Vec<(String, TrialDistribution)> =
        band.replicates.iter().enumerate().map(|(i, d)| (format!("sim-{i:0width$}"), *d)).collect();
    if let Some(d) = truth {
        labeled.push((format!("truth-{word}"), d));
    }
    let pooled = fpca_project_labeled(&labeled)?;
    let basis_source = if truth.is_some() { "pooled" } else { "simulated" };

    let mut csv = String::from("id,x,y\n");
    for p in &pooled.points {
        csv.push_str(&format!("{},{},{}\n", p.id, p.x, p.y));
    }
    let body = BandOutput {
        word,
        level,
        n_replicates: replicates,
        n_samples: s.samples(),
        k: hp.k(),
        t: hp.t(),
        weighting: s.weighting(),
        seed: s.seed().seed,
        mean: &band.mean,
        lower: &band.lower,
        upper: &band.upper,
        truth,
        projection: ProjectionMeta {
            basis_source,
            basis: &pooled.basis,
            center: &pooled.center,
            explained_variance: &pooled.explained_variance,
            total_variance: pooled.total_variance,
        },
    };
    say!("{word}: band over {replicates} replicates at level {level}");
    let mut staged = Staged::new(&out_dir(s))?;
    staged.add_json("band.json", &body, s)?;
    staged.add("fpca.csv", csv.as_bytes())?;
    print_written(&staged.commit()?);
    Ok(())
}
