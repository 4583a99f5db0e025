//! Two-dimensional functional PCA of trial distributions and empirical
//! bands over simulated replicates.
//!
//! Each distribution is a curve sampled at the seven outcome positions, so
//! functional PCA on this grid is ordinary PCA of the 7-vectors.

use nalgebra::{SMatrix, SVector};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::simulator::{Hyperparams, RngSeed, SimError, Simulator};
use crate::wasserstein::{TrialDistribution, CATEGORIES};
use crate::word::Word;

pub const DEFAULT_REPLICATES: usize = 200;
pub const DEFAULT_LEVEL: f64 = 0.95;

const REPLICATE_TAG: u64 = 0xBA4D;

type Vec7 = SVector<f64, CATEGORIES>;
type Mat7 = SMatrix<f64, CATEGORIES, CATEGORIES>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectionError {
    #[error("need at least 3 distributions to project, got {0}")]
    TooFewInputs(usize),
    #[error("confidence level must be in (0, 1), got {0}")]
    InvalidLevel(f64),
    #[error(transparent)]
    Sim(#[from] SimError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectedPoint {
    pub id: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projection2D {
    /// Rows are the first and second principal directions.
    pub basis: [[f64; CATEGORIES]; 2],
    pub center: [f64; CATEGORIES],
    pub explained_variance: [f64; 2],
    /// Trace of the sample covariance.
    pub total_variance: f64,
    pub points: Vec<ProjectedPoint>,
}

/// Projects distributions labeled by their index.
pub fn fpca_project(dists: &[TrialDistribution]) -> Result<Projection2D, ProjectionError> {
    let labeled: Vec<(String, TrialDistribution)> =
        dists.iter().enumerate().map(|(i, d)| (i.to_string(), *d)).collect();
    fpca_project_labeled(&labeled)
}

/// Top-two principal components of the sample covariance (divisor n-1).
/// Each component is signed so its largest-magnitude loading is positive.
/// Identical inputs give zero variance and every point at the origin.
pub fn fpca_project_labeled(dists: &[(String, TrialDistribution)]) -> Result<Projection2D, ProjectionError> {
    let n = dists.len();
    if n < 3 {
        return Err(ProjectionError::TooFewInputs(n));
    }
    let vectors: Vec<Vec7> = dists.iter().map(|(_, d)| Vec7::from_column_slice(d.mass())).collect();
    let center = vectors.iter().fold(Vec7::zeros(), |acc, v| acc + v) / n as f64;
    let cov = vectors
        .iter()
        .map(|v| {
            let d = v - center;
            d * d.transpose()
        })
        .fold(Mat7::zeros(), |acc, m| acc + m)
        / (n - 1) as f64;

    let eig = cov.symmetric_eigen();
    let mut order: Vec<usize> = (0..CATEGORIES).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let mut basis = [[0.0; CATEGORIES]; 2];
    let mut explained = [0.0; 2];
    for (slot, &idx) in order.iter().take(2).enumerate() {
        let mut v: Vec7 = eig.eigenvectors.column(idx).into_owned();
        let lead = v.iter().copied().fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best });
        if lead < 0.0 {
            v = -v;
        }
        basis[slot].copy_from_slice(v.as_slice());
        explained[slot] = eig.eigenvalues[idx].max(0.0);
    }

    let b0 = Vec7::from_column_slice(&basis[0]);
    let b1 = Vec7::from_column_slice(&basis[1]);
    let points = dists
        .iter()
        .zip(&vectors)
        .map(|((id, _), v)| {
            let d = v - center;
            ProjectedPoint { id: id.clone(), x: d.dot(&b0), y: d.dot(&b1) }
        })
        .collect();

    Ok(Projection2D {
        basis,
        center: center.into(),
        explained_variance: explained,
        total_variance: cov.trace(),
        points,
    })
}

/// Nearest-rank empirical quantile of sorted values: the
/// `ceil(p * n)`-th smallest, clamped to `1..=n`.
pub fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    // slack absorbs representation error in p * n, e.g. 0.025 * 200
    let rank = (p * n as f64 - 1e-9).ceil().clamp(1.0, n as f64) as usize;
    sorted[rank - 1]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateBand {
    pub word: Word,
    pub level: f64,
    pub mean: [f64; CATEGORIES],
    pub lower: [f64; CATEGORIES],
    pub upper: [f64; CATEGORIES],
    pub replicates: Vec<TrialDistribution>,
    pub projection: Projection2D,
}

/// Simulates `n_replicates` independent trial distributions of `word` and
/// summarizes them per category by the mean and the central `level`
/// nearest-rank interval. The mean can sit above the interval in a category
/// that is non-zero in fewer than `(1 - level) / 2` of the replicates.
pub fn replicate_band(
    word: Word,
    sim: &Simulator<'_>,
    hp: &Hyperparams,
    n_replicates: usize,
    n_samples: usize,
    level: f64,
    seed: RngSeed,
) -> Result<ReplicateBand, ProjectionError> {
    if !(level > 0.0 && level < 1.0) {
        return Err(ProjectionError::InvalidLevel(level));
    }
    if n_replicates < 3 {
        return Err(ProjectionError::TooFewInputs(n_replicates));
    }
    let base = seed.substream(REPLICATE_TAG);
    let replicates: Vec<TrialDistribution> = (0..n_replicates as u64)
        .into_par_iter()
        .map(|r| sim.trial_distribution(word, hp, n_samples, base.substream(r)))
        .collect::<Result<_, _>>()?;

    let tail = (1.0 - level) / 2.0;
    let mut mean = [0.0; CATEGORIES];
    let mut lower = [0.0; CATEGORIES];
    let mut upper = [0.0; CATEGORIES];
    for k in 0..CATEGORIES {
        let mut column: Vec<f64> = replicates.iter().map(|d| d.mass()[k]).collect();
        mean[k] = column.iter().sum::<f64>() / n_replicates as f64;
        column.sort_by(f64::total_cmp);
        lower[k] = nearest_rank(&column, tail);
        upper[k] = nearest_rank(&column, 1.0 - tail);
    }
    let projection = fpca_project(&replicates)?;
    Ok(ReplicateBand { word, level, mean, lower, upper, replicates, projection })
}
