//! Trial distributions over the seven Wordle outcomes and the Wasserstein-1
//! distance between them.
//!
//! Outcomes are the guess counts 1 through 6 plus the failure bucket X. They
//! sit on the real line at positions 1..6 and, by default, X at 7. On an
//! ordered one-dimensional support the optimal transport cost reduces to
//! the area between the two CDFs, which is what [`w1_distance`] computes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::WordRecord;
use crate::word::Word;

/// Number of outcome categories: 1, 2, 3, 4, 5, 6, X.
pub const CATEGORIES: usize = 7;

/// Accepted deviation of a distribution's total mass from 1.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Default support coordinate of the X (failed) bucket.
pub const DEFAULT_X_POSITION: f64 = 7.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("invalid trial distribution: {0}")]
    InvalidDistribution(String),
    #[error("sample lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("sample lists must be non-empty")]
    EmptySamples,
    #[error("no distribution available for baseline word {0:?}")]
    BaselineUnavailable(String),
    #[error("invalid X position {0}: must be finite and greater than 6")]
    InvalidSupport(f64),
}

/// Probability vector over the outcomes `[1, 2, 3, 4, 5, 6, X]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct TrialDistribution([f64; CATEGORIES]);

impl TrialDistribution {
    /// Wraps a probability vector. Rejects negative or non-finite entries
    /// and vectors whose sum is off from 1 by more than [`MASS_TOLERANCE`].
    pub fn new(mass: [f64; CATEGORIES]) -> Result<Self, MetricError> {
        if let Some(v) = mass.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(MetricError::InvalidDistribution(format!("component {v} is negative or not finite")));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(MetricError::InvalidDistribution(format!("components sum to {total}, expected 1")));
        }
        Ok(TrialDistribution(mass))
    }

    /// Normalizes nonnegative weights (e.g. percentages) to a distribution.
    pub fn from_weights(weights: [f64; CATEGORIES]) -> Result<Self, MetricError> {
        if let Some(v) = weights.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(MetricError::InvalidDistribution(format!("weight {v} is negative or not finite")));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(MetricError::InvalidDistribution("weights sum to zero".into()));
        }
        Ok(TrialDistribution(weights.map(|w| w / total)))
    }

    pub fn from_counts(counts: &[u64; CATEGORIES]) -> Result<Self, MetricError> {
        Self::from_weights(counts.map(|c| c as f64))
    }

    /// All mass on one category, numbered 1..=7 (7 is X).
    pub fn point_mass(category: usize) -> Self {
        assert!((1..=CATEGORIES).contains(&category), "category {category} out of range");
        let mut mass = [0.0; CATEGORIES];
        mass[category - 1] = 1.0;
        TrialDistribution(mass)
    }

    pub fn mass(&self) -> &[f64; CATEGORIES] {
        &self.0
    }

    pub fn cdf(&self) -> [f64; CATEGORIES] {
        let mut acc = 0.0;
        self.0.map(|m| {
            acc += m;
            acc
        })
    }

    /// Expected support position, with X counted at [`DEFAULT_X_POSITION`].
    pub fn mean_position(&self) -> f64 {
        self.0.iter().enumerate().map(|(i, m)| (i + 1) as f64 * m).sum()
    }

    /// Most likely category (1..=7); ties go to the lower category.
    pub fn argmax_category(&self) -> usize {
        let mut best = 0;
        for (i, &m) in self.0.iter().enumerate() {
            if m > self.0[best] {
                best = i;
            }
        }
        best + 1
    }
}

impl<'de> Deserialize<'de> for TrialDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let mass = <[f64; CATEGORIES]>::deserialize(deserializer)?;
        TrialDistribution::new(mass).map_err(serde::de::Error::custom)
    }
}

/// Positions of the seven outcome categories on the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    x_position: f64,
}

impl Support {
    pub fn with_x_position(x_position: f64) -> Result<Self, MetricError> {
        if !x_position.is_finite() || x_position <= 6.0 {
            return Err(MetricError::InvalidSupport(x_position));
        }
        Ok(Support { x_position })
    }

    pub fn x_position(&self) -> f64 {
        self.x_position
    }

    fn gaps(&self) -> [f64; CATEGORIES - 1] {
        [1.0, 1.0, 1.0, 1.0, 1.0, self.x_position - 6.0]
    }
}

impl Default for Support {
    fn default() -> Self {
        Support { x_position: DEFAULT_X_POSITION }
    }
}

/// Wasserstein-1 distance on the default unit-spaced support 1..7.
pub fn w1_distance(p: &TrialDistribution, q: &TrialDistribution) -> f64 {
    w1_distance_on(p, q, &Support::default())
}

/// Wasserstein-1 distance with a custom X coordinate: the sum over the six
/// inner gaps of |F_p - F_q| times the gap width.
pub fn w1_distance_on(p: &TrialDistribution, q: &TrialDistribution, support: &Support) -> f64 {
    let (fp, fq) = (p.cdf(), q.cdf());
    support.gaps().iter().enumerate().map(|(k, gap)| (fp[k] - fq[k]).abs() * gap).sum()
}

/// Wasserstein-1 distance between two equal-size samples, i.e. between
/// their uniform empirical measures: the mean absolute difference of the
/// sorted values.
pub fn w1_samples(xs: &[f64], ys: &[f64]) -> Result<f64, MetricError> {
    if xs.len() != ys.len() {
        return Err(MetricError::LengthMismatch { left: xs.len(), right: ys.len() });
    }
    if xs.is_empty() {
        return Err(MetricError::EmptySamples);
    }
    let mut xs = xs.to_vec();
    let mut ys = ys.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let total: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - y).abs()).sum();
    Ok(total / xs.len() as f64)
}

/// Difficulty of a word relative to the baseline ("easiest") word: the W1
/// distance from the baseline's trial distribution to the word's.
pub fn difficulty(word_dist: &TrialDistribution, baseline_dist: &TrialDistribution) -> f64 {
    w1_distance(baseline_dist, word_dist)
}

/// Looks up the observed distribution of `baseline` among ground-truth
/// records. The earliest record wins if the word appears more than once.
pub fn ground_truth_baseline(records: &[WordRecord], baseline: Word) -> Result<TrialDistribution, MetricError> {
    records
        .iter()
        .filter(|r| r.word == baseline)
        .min_by_key(|r| r.date)
        .map(|r| r.dist)
        .ok_or_else(|| MetricError::BaselineUnavailable(baseline.to_string()))
}
