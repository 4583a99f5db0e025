use chrono::NaiveDate;
use cogsim_core::optimizer::{coordinate_search_with, Axis, KRange, Objective, TRange};
use cogsim_core::{
    coordinate_search, objective, w1_distance, Dictionary, FitConfig, FitError, Hyperparams, RngSeed, Simulator,
    TrialDistribution, Weighting, Word, WordRecord,
};

fn w(s: &str) -> Word {
    Word::parse(s).unwrap()
}

fn five_words() -> Dictionary {
    Dictionary::from_weights(
        [("about", 5.0), ("train", 4.0), ("eerie", 3.0), ("query", 2.0), ("melee", 1.0)].map(|(s, f)| (w(s), f)),
    )
    .unwrap()
}

fn record(day: u32, word: Word, dist: TrialDistribution) -> WordRecord {
    WordRecord { date: NaiveDate::from_ymd_opt(2022, 2, day).unwrap(), word, num_reported: 100, dist }
}

fn simulated(sim: &Simulator<'_>, words: &[Word], hp: &Hyperparams, n: usize, seed: RngSeed) -> Vec<WordRecord> {
    words
        .iter()
        .enumerate()
        .map(|(i, &word)| record(i as u32 + 1, word, sim.trial_distribution(word, hp, n, seed).unwrap()))
        .collect()
}

fn small_config(seed: RngSeed) -> FitConfig {
    FitConfig {
        k_range: KRange { start: 1, end: 5, step: 1 },
        t_range: TRange { lo: 0.1, hi: 1.0 },
        t_grid: 10,
        n_samples: 200,
        seed,
        ..FitConfig::default()
    }
}

#[test]
fn self_generated_records_have_zero_objective() {
    let d = five_words();
    let sim = Simulator::new(&d, Weighting::Cap);
    let hp = Hyperparams::new(3, 0.4).unwrap();
    let seed = RngSeed::new(17);
    let words: Vec<Word> = d.words().collect();
    let records = simulated(&sim, &words, &hp, 200, seed);
    assert_eq!(objective(&hp, &records, &d, Weighting::Cap, 200, seed).unwrap(), 0.0);
}

#[test]
fn k_one_objective_by_hand() {
    // K = 1 solves melee in exactly three guesses (about, eerie, melee)
    let d = five_words();
    let truth = TrialDistribution::new([0.0, 0.2, 0.5, 0.3, 0.0, 0.0, 0.0]).unwrap();
    let records = [record(1, w("melee"), truth)];
    let hp = Hyperparams::new(1, 0.5).unwrap();
    let f = objective(&hp, &records, &d, Weighting::Cap, 100, RngSeed::new(0)).unwrap();
    // CDF gaps against the point mass at 3: |0.2 - 0| + |0.7 - 1| = 0.5
    assert!((f - 0.5).abs() < 1e-12);
    assert!((f - w1_distance(&truth, &TrialDistribution::point_mass(3))).abs() < 1e-15);
}

#[test]
fn objective_is_mean_over_records() {
    let d = five_words();
    let sim = Simulator::new(&d, Weighting::Cap);
    let hp = Hyperparams::new(2, 0.7).unwrap();
    let seed = RngSeed::new(3);
    let records = [
        record(1, w("eerie"), TrialDistribution::new([0.1, 0.2, 0.3, 0.2, 0.1, 0.05, 0.05]).unwrap()),
        record(2, w("query"), TrialDistribution::point_mass(4)),
    ];
    let mut obj = Objective::new(&sim, &records, 150, seed).unwrap();
    let per = obj.per_record(&hp).unwrap();
    let expected: Vec<f64> = records
        .iter()
        .map(|r| w1_distance(&r.dist, &sim.trial_distribution(r.word, &hp, 150, seed).unwrap()))
        .collect();
    assert_eq!(per, expected);
    assert!((obj.value(&hp).unwrap() - (expected[0] + expected[1]) / 2.0).abs() < 1e-15);
}

#[test]
fn fixed_point_converges_in_one_iteration() {
    let d = five_words();
    let sim = Simulator::new(&d, Weighting::Cap);
    let seed = RngSeed::new(21);
    let cfg = FitConfig { k0: Some(3), t0: Some(0.5), ..small_config(seed) };
    let start = cfg.grids().unwrap().2;
    let words: Vec<Word> = d.words().collect();
    let records = simulated(&sim, &words, &start, cfg.n_samples, seed);
    let fit = coordinate_search_with(&cfg, &records, &sim).unwrap();
    assert_eq!(fit.objective, 0.0);
    assert_eq!(fit.iterations, 1);
    assert!(fit.converged);
    assert_eq!(fit.trajectory[0].axis, Axis::Init);
    assert_eq!(fit.trajectory[0].objective, 0.0);
}

#[test]
fn trajectory_never_increases_and_is_deterministic() {
    let d = five_words();
    let sim = Simulator::new(&d, Weighting::Cap);
    let words: Vec<Word> = d.words().collect();
    let records = simulated(&sim, &words, &Hyperparams::new(4, 0.3).unwrap(), 300, RngSeed::new(1));
    let cfg = FitConfig { k0: Some(1), t0: Some(1.0), ..small_config(RngSeed::new(2)) };
    let a = coordinate_search(&cfg, &records, &d).unwrap();
    let b = coordinate_search(&cfg, &records, &d).unwrap();
    assert_eq!(a, b);
    assert!(a.trajectory.windows(2).all(|p| p[1].objective <= p[0].objective));
    let last = a.trajectory.last().unwrap();
    assert_eq!((last.k, last.t, last.objective), (a.k_star, a.t_star, a.objective));
}

#[test]
fn plain_weighting_objective_is_flat_in_t() {
    let d = five_words();
    let sim = Simulator::new(&d, Weighting::Plain);
    let words: Vec<Word> = d.words().collect();
    let records = simulated(
        &Simulator::new(&d, Weighting::Cap),
        &words,
        &Hyperparams::new(3, 0.3).unwrap(),
        200,
        RngSeed::new(4),
    );
    let mut obj = Objective::new(&sim, &records, 200, RngSeed::new(5)).unwrap();
    let values: Vec<f64> = TRange { lo: 0.01, hi: 2.0 }
        .grid(25)
        .unwrap()
        .into_iter()
        .map(|t| obj.value(&Hyperparams::new(3, t).unwrap()).unwrap())
        .collect();
    assert!(values.iter().all(|v| v.to_bits() == values[0].to_bits()));
}

#[test]
fn errors() {
    let d = five_words();
    let cfg = small_config(RngSeed::new(0));
    assert_eq!(coordinate_search(&cfg, &[], &d), Err(FitError::NoRecords));
    let bad = FitConfig { k_range: KRange { start: 5, end: 1, step: 1 }, ..cfg.clone() };
    let rec = [record(1, w("eerie"), TrialDistribution::point_mass(2))];
    assert!(matches!(coordinate_search(&bad, &rec, &d), Err(FitError::InfeasibleRange(_))));
    let stranger = [record(1, w("zesty"), TrialDistribution::point_mass(2))];
    assert!(matches!(coordinate_search(&cfg, &stranger, &d), Err(FitError::Sim(_))));
}
