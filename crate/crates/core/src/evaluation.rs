//! K-fold evaluation of fitted simulators and per-word difficulty.
//!
//! Metric definitions:
//! - `mean_w1`: mean W1 distance between predicted and observed
//!   distributions.
//! - `mse_probability`: mean over words and the seven categories of the
//!   squared error between probability vectors.
//! - `mse_percent`: the same with both vectors on the 0–100 percentage
//!   scale, i.e. `mse_probability * 10^4`.
//! - `mean_accuracy`: fraction of words whose predicted most-likely
//!   category equals the observed one (ties go to the lower category).

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use chrono::NaiveDate;

use crate::ingest::{Dictionary, WordRecord};
use crate::optimizer::{coordinate_search_with, FitConfig, FitError};
use crate::simulator::{RngSeed, SimError, Simulator};
use crate::wasserstein::{difficulty, ground_truth_baseline, w1_distance, MetricError, TrialDistribution, CATEGORIES};
use crate::word::Word;

pub const DEFAULT_FOLDS: usize = 5;

/// Stream tag for the fold shuffle, so it never collides with simulation
/// streams drawn from the same seed.
const FOLD_SHUFFLE_TAG: u64 = 0xF01D;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("need at least {folds} records for {folds}-fold evaluation, got {records}")]
    TooFewRecords { records: usize, folds: usize },
    #[error("fold count must be >= 2, got {0}")]
    InvalidFolds(usize),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Prediction and metrics for one held-out word.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordEval {
    pub date: NaiveDate,
    pub word: Word,
    pub fold: usize,
    pub w1: f64,
    pub squared_error: f64,
    pub correct: bool,
    pub predicted: TrialDistribution,
    pub truth: TrialDistribution,
    /// W1 from the baseline distribution to the prediction, when a baseline
    /// is available.
    pub difficulty: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldMetrics {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub k: usize,
    pub t: f64,
    pub train_objective: f64,
    pub converged: bool,
    #[serde(flatten)]
    pub metrics: Metrics,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub mean_w1: f64,
    pub mse_probability: f64,
    pub mse_percent: f64,
    pub mean_accuracy: f64,
}

/// Names the definition behind every number in an [`EvalReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricDefinitions {
    pub mean_w1: &'static str,
    pub mse_probability: &'static str,
    pub mse_percent: &'static str,
    pub mean_accuracy: &'static str,
    pub aggregation: &'static str,
}

pub const METRIC_DEFINITIONS: MetricDefinitions = MetricDefinitions {
    mean_w1: "mean over held-out words of W1(observed, predicted) on support 1..6, X=7",
    mse_probability: "mean over words and 7 categories of (predicted - observed)^2, probability scale",
    mse_percent: "mean over words and 7 categories of (predicted - observed)^2, 0-100 percentage scale",
    mean_accuracy: "fraction of words with argmax(predicted) == argmax(observed), ties to the lower category",
    aggregation: "top-level metrics average over all held-out words; per-fold metrics average over that fold's words",
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub folds: usize,
    #[serde(flatten)]
    pub metrics: Metrics,
    pub per_fold: Vec<FoldMetrics>,
    pub per_word: Vec<WordEval>,
    pub metric_definitions: MetricDefinitions,
}

/// Squared error summed over the seven categories, probability scale.
pub fn squared_error(predicted: &TrialDistribution, truth: &TrialDistribution) -> f64 {
    predicted.mass().iter().zip(truth.mass()).map(|(p, q)| (p - q).powi(2)).sum()
}

pub fn same_mode(predicted: &TrialDistribution, truth: &TrialDistribution) -> bool {
    predicted.argmax_category() == truth.argmax_category()
}

/// Aggregates `(predicted, observed)` pairs.
pub fn metrics(pairs: &[(TrialDistribution, TrialDistribution)]) -> Metrics {
    let n = pairs.len() as f64;
    let (mut w1, mut se, mut hits) = (0.0, 0.0, 0usize);
    for (p, q) in pairs {
        w1 += w1_distance(q, p);
        se += squared_error(p, q);
        hits += same_mode(p, q) as usize;
    }
    let mse_probability = se / (n * CATEGORIES as f64);
    Metrics { mean_w1: w1 / n, mse_probability, mse_percent: mse_probability * 1e4, mean_accuracy: hits as f64 / n }
}

/// Fold index for each record. Records are put in (date, word) order,
/// shuffled with a stream derived from `seed`, then dealt round-robin, so
/// the assignment does not depend on input order.
pub fn fold_assignment(records: &[WordRecord], folds: usize, seed: RngSeed) -> Result<Vec<usize>, EvalError> {
    if folds < 2 {
        return Err(EvalError::InvalidFolds(folds));
    }
    if records.len() < folds {
        return Err(EvalError::TooFewRecords { records: records.len(), folds });
    }
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (&records[a], &records[b]);
        ra.date.cmp(&rb.date).then(ra.word.cmp(&rb.word)).then(a.cmp(&b))
    });
    order.shuffle(&mut seed.substream(FOLD_SHUFFLE_TAG).rng());
    let mut assignment = vec![0; records.len()];
    for (slot, &record) in order.iter().enumerate() {
        assignment[record] = slot % folds;
    }
    Ok(assignment)
}

/// One row of the exported fold file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldEntry {
    pub date: NaiveDate,
    pub word: Word,
    pub fold: usize,
}

pub fn fold_entries(records: &[WordRecord], assignment: &[usize]) -> Vec<FoldEntry> {
    records.iter().zip(assignment).map(|(r, &fold)| FoldEntry { date: r.date, word: r.word, fold }).collect()
}

/// Fits on each training split and predicts the held-out words.
///
/// Every record word must be in `dict`. `baseline`, when given, is used to
/// attach a difficulty to each prediction.
pub fn kfold_evaluate(
    records: &[WordRecord],
    dict: &Dictionary,
    cfg: &FitConfig,
    folds: usize,
    baseline: Option<&TrialDistribution>,
) -> Result<EvalReport, EvalError> {
    let assignment = fold_assignment(records, folds, cfg.seed)?;
    let sim = Simulator::new(dict, cfg.weighting);

    let fold_results: Vec<(FoldMetrics, Vec<WordEval>)> = (0..folds)
        .into_par_iter()
        .map(|fold| evaluate_fold(fold, records, &assignment, &sim, cfg, baseline))
        .collect::<Result<_, _>>()?;

    let mut per_fold = Vec::with_capacity(folds);
    let mut per_word = Vec::with_capacity(records.len());
    for (m, words) in fold_results {
        per_fold.push(m);
        per_word.extend(words);
    }
    per_word.sort_by(|a, b| a.date.cmp(&b.date).then(a.word.cmp(&b.word)));
    let pairs: Vec<_> = per_word.iter().map(|w| (w.predicted, w.truth)).collect();
    Ok(EvalReport { folds, metrics: metrics(&pairs), per_fold, per_word, metric_definitions: METRIC_DEFINITIONS })
}

fn evaluate_fold(
    fold: usize,
    records: &[WordRecord],
    assignment: &[usize],
    sim: &Simulator<'_>,
    cfg: &FitConfig,
    baseline: Option<&TrialDistribution>,
) -> Result<(FoldMetrics, Vec<WordEval>), EvalError> {
    let (test, train): (Vec<_>, Vec<_>) = records.iter().zip(assignment).partition(|(_, &f)| f == fold);
    let train: Vec<WordRecord> = train.into_iter().map(|(r, _)| *r).collect();
    let test: Vec<WordRecord> = test.into_iter().map(|(r, _)| *r).collect();

    let fit = coordinate_search_with(cfg, &train, sim)?;
    let hp = fit.hyperparams();
    let words: Vec<WordEval> = test
        .par_iter()
        .map(|r| {
            let predicted = sim.trial_distribution(r.word, &hp, cfg.n_samples, cfg.seed)?;
            Ok(WordEval {
                date: r.date,
                word: r.word,
                fold,
                w1: w1_distance(&r.dist, &predicted),
                squared_error: squared_error(&predicted, &r.dist),
                correct: same_mode(&predicted, &r.dist),
                predicted,
                truth: r.dist,
                difficulty: baseline.map(|b| difficulty(&predicted, b)),
            })
        })
        .collect::<Result<_, SimError>>()?;
    let pairs: Vec<_> = words.iter().map(|w| (w.predicted, w.truth)).collect();
    Ok((
        FoldMetrics {
            fold,
            n_train: train.len(),
            n_test: test.len(),
            k: fit.k_star,
            t: fit.t_star,
            train_objective: fit.objective,
            converged: fit.converged,
            metrics: metrics(&pairs),
        },
        words,
    ))
}

/// Difficulty of every record against the observed distribution of
/// `baseline`, sorted ascending (ties by word).
pub fn difficulty_histogram(records: &[WordRecord], baseline: Word) -> Result<Vec<(Word, f64)>, MetricError> {
    let base = ground_truth_baseline(records, baseline)?;
    let mut out: Vec<(Word, f64)> = records.iter().map(|r| (r.word, difficulty(&r.dist, &base))).collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(day: u32, word: &str, mass: [f64; 7]) -> WordRecord {
        WordRecord {
            date: NaiveDate::from_ymd_opt(2022, 3, day).unwrap(),
            word: Word::parse(word).unwrap(),
            num_reported: 100,
            dist: TrialDistribution::from_weights(mass).unwrap(),
        }
    }

    #[test]
    fn perfect_prediction() {
        let p = TrialDistribution::from_weights([1., 5., 20., 34., 26., 12., 2.]).unwrap();
        let m = metrics(&[(p, p), (p, p)]);
        assert_eq!(m.mean_w1, 0.0);
        assert_eq!(m.mse_probability, 0.0);
        assert_eq!(m.mean_accuracy, 1.0);
    }

    #[test]
    fn two_word_hand_mse() {
        let p1 = TrialDistribution::new([0.0, 0.1, 0.2, 0.4, 0.2, 0.1, 0.0]).unwrap();
        let t1 = TrialDistribution::new([0.0, 0.0, 0.3, 0.4, 0.2, 0.1, 0.0]).unwrap();
        let p2 = TrialDistribution::point_mass(2);
        let t2 = TrialDistribution::point_mass(3);
        // word 1: 0.1^2 + 0.1^2 = 0.02; word 2: 1 + 1 = 2
        let m = metrics(&[(p1, t1), (p2, t2)]);
        let expected = (0.02 + 2.0) / 14.0;
        assert!((m.mse_probability - expected).abs() < 1e-12);
        assert!((m.mse_percent - expected * 1e4).abs() < 1e-8);
        // word 1: both modes at category 4; word 2 differs
        assert_eq!(m.mean_accuracy, 0.5);
        // W1: word 1 CDFs differ only at k=2 (by 0.1); word 2 by 1
        assert!((m.mean_w1 - (0.1 + 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn folds_partition_and_ignore_input_order() {
        let recs: Vec<_> = (1..=12)
            .map(|d| record(d, ["about", "train", "eerie"][d as usize % 3], [0., 0., 1., 0., 0., 0., 0.]))
            .collect();
        let a = fold_assignment(&recs, 5, RngSeed::new(3)).unwrap();
        let mut sizes = [0; 5];
        for &f in &a {
            sizes[f] += 1;
        }
        assert_eq!(sizes.iter().sum::<usize>(), 12);
        assert!(sizes.iter().all(|&s| s == 2 || s == 3));

        let mut reversed = recs.clone();
        reversed.reverse();
        let b = fold_assignment(&reversed, 5, RngSeed::new(3)).unwrap();
        for (i, r) in recs.iter().enumerate() {
            let j = reversed.iter().position(|x| x == r).unwrap();
            assert_eq!(a[i], b[j]);
        }
    }

    #[test]
    fn fold_errors() {
        let recs = vec![record(1, "about", [1., 0., 0., 0., 0., 0., 0.])];
        assert_eq!(fold_assignment(&recs, 1, RngSeed::new(0)), Err(EvalError::InvalidFolds(1)));
        assert_eq!(fold_assignment(&recs, 5, RngSeed::new(0)), Err(EvalError::TooFewRecords { records: 1, folds: 5 }));
    }

    #[test]
    fn histogram() {
        let recs = vec![
            record(1, "eerie", [0., 0., 0., 0., 1., 0., 0.]),
            record(2, "train", [0., 1., 0., 0., 0., 0., 0.]),
            record(3, "about", [1., 0., 0., 0., 0., 0., 0.]),
        ];
        let h = difficulty_histogram(&recs, Word::parse("train").unwrap()).unwrap();
        let words: Vec<_> = h.iter().map(|(w, _)| w.to_string()).collect();
        assert_eq!(words, ["train", "about", "eerie"]);
        assert_eq!(h.iter().map(|x| x.1).collect::<Vec<_>>(), [0.0, 1.0, 3.0]);
        assert!(matches!(
            difficulty_histogram(&recs, Word::parse("query").unwrap()),
            Err(MetricError::BaselineUnavailable(_))
        ));
    }
}
