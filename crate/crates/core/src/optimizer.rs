//! Fitting `(K, T)` to observed trial distributions.
//!
//! The objective is the mean W1 distance between each observed
//! distribution and the simulated one. Every evaluation reuses the same
//! random streams (see [`RngSeed::for_sample`]), so the objective is a
//! deterministic function of the hyperparameters and exhaustive per-axis
//! grid minimization can never increase it.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{Dictionary, WordRecord};
use crate::simulator::{Hyperparams, RngSeed, SimError, Simulator, Weighting, DEFAULT_SAMPLES};
use crate::wasserstein::w1_distance;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("infeasible range: {0}")]
    InfeasibleRange(String),
    #[error("invalid fit configuration: {0}")]
    InvalidConfig(String),
    #[error("no records to fit")]
    NoRecords,
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Inclusive integer grid `start, start+step, ..., <= end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KRange {
    pub start: usize,
    pub end: usize,
    pub step: usize,
}

impl KRange {
    pub fn values(&self) -> Result<Vec<usize>, FitError> {
        if self.start == 0 || self.step == 0 || self.start > self.end {
            return Err(FitError::InfeasibleRange(format!("K range {self} is empty or includes 0")));
        }
        Ok((self.start..=self.end).step_by(self.step).collect())
    }
}

impl fmt::Display for KRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.step)
    }
}

impl FromStr for KRange {
    type Err = String;

    /// `start:end[:step]`, step defaulting to 1.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| p.trim().parse::<usize>().map_err(|_| format!("bad K range {s:?}"));
        match parts.as_slice() {
            [a, b] => Ok(KRange { start: num(a)?, end: num(b)?, step: 1 }),
            [a, b, c] => Ok(KRange { start: num(a)?, end: num(b)?, step: num(c)? }),
            _ => Err(format!("bad K range {s:?}, expected start:end[:step]")),
        }
    }
}

/// Closed real interval for `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TRange {
    pub lo: f64,
    pub hi: f64,
}

impl TRange {
    /// `points` evenly spaced values from `lo` to `hi` inclusive.
    pub fn grid(&self, points: usize) -> Result<Vec<f64>, FitError> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo > 0.0 && self.lo <= self.hi) {
            return Err(FitError::InfeasibleRange(format!("T range {self} must satisfy 0 < lo <= hi")));
        }
        if points == 0 {
            return Err(FitError::InfeasibleRange("T grid needs at least one point".into()));
        }
        if points == 1 {
            return Ok(vec![self.lo]);
        }
        let span = self.hi - self.lo;
        let last = (points - 1) as f64;
        Ok((0..points).map(|i| if i + 1 == points { self.hi } else { self.lo + span * i as f64 / last }).collect())
    }
}

impl fmt::Display for TRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

impl FromStr for TRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("bad T range {s:?}, expected lo:hi"))?;
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("bad T range {s:?}"));
        Ok(TRange { lo: num(a)?, hi: num(b)? })
    }
}

/// Search space and stopping rule for [`coordinate_search`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub k_range: KRange,
    pub t_range: TRange,
    pub t_grid: usize,
    /// Starting K; snapped to the nearest grid value. Defaults to the
    /// middle of the K grid.
    pub k0: Option<usize>,
    /// Starting T; snapped to the nearest grid value. Defaults to the
    /// middle of the T grid.
    pub t0: Option<f64>,
    pub max_iter: usize,
    /// Stop once an iteration improves the objective by no more than this.
    pub tol: f64,
    pub n_samples: usize,
    pub seed: RngSeed,
    pub weighting: Weighting,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            k_range: KRange { start: 10, end: 2000, step: 10 },
            t_range: TRange { lo: 0.01, hi: 2.0 },
            t_grid: 50,
            k0: None,
            t0: None,
            max_iter: 10,
            tol: 0.0,
            n_samples: DEFAULT_SAMPLES,
            seed: RngSeed::new(0),
            weighting: Weighting::Cap,
        }
    }
}

impl FitConfig {
    /// The K grid, T grid and snapped starting point.
    pub fn grids(&self) -> Result<(Vec<usize>, Vec<f64>, Hyperparams), FitError> {
        let ks = self.k_range.values()?;
        let ts = self.t_range.grid(self.t_grid)?;
        if self.max_iter == 0 {
            return Err(FitError::InvalidConfig("max_iter must be >= 1".into()));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(FitError::InvalidConfig(format!("tol must be >= 0, got {}", self.tol)));
        }
        if self.n_samples == 0 {
            return Err(FitError::InvalidConfig("n_samples must be >= 1".into()));
        }
        let k0 = match self.k0 {
            Some(k) => nearest(&ks, |&v| (v as f64 - k as f64).abs()),
            None => ks[(ks.len() - 1) / 2],
        };
        let t0 = match self.t0 {
            Some(t) => nearest(&ts, |&v| (v - t).abs()),
            None => ts[(ts.len() - 1) / 2],
        };
        let start = Hyperparams::new(k0, t0)?;
        Ok((ks, ts, start))
    }
}

/// First grid value minimizing `dist`; grids are ascending so ties go low.
fn nearest<T: Copy>(grid: &[T], dist: impl Fn(&T) -> f64) -> T {
    *grid.iter().min_by(|a, b| dist(a).total_cmp(&dist(b))).expect("grids are non-empty")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Init,
    K,
    T,
}

/// One entry of the search trajectory, recorded after each axis update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub iteration: usize,
    pub axis: Axis,
    pub k: usize,
    pub t: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub k_star: usize,
    pub t_star: f64,
    pub objective: f64,
    pub trajectory: Vec<Step>,
    pub converged: bool,
    pub iterations: usize,
    /// Distinct (K, T) points evaluated.
    pub evaluations: usize,
}

impl FitResult {
    pub fn hyperparams(&self) -> Hyperparams {
        Hyperparams::new(self.k_star, self.t_star).expect("fitted values come from a valid grid")
    }
}

/// Mean W1 discrepancy between observed and simulated distributions, with
/// memoization keyed by `(K, T)`.
pub struct Objective<'a> {
    sim: &'a Simulator<'a>,
    records: &'a [WordRecord],
    n_samples: usize,
    seed: RngSeed,
    cache: HashMap<(usize, u64), f64>,
}

impl<'a> Objective<'a> {
    pub fn new(
        sim: &'a Simulator<'a>,
        records: &'a [WordRecord],
        n_samples: usize,
        seed: RngSeed,
    ) -> Result<Self, FitError> {
        if records.is_empty() {
            return Err(FitError::NoRecords);
        }
        let dict = sim.dictionary();
        if let Some(r) = records.iter().find(|r| !dict.contains(r.word)) {
            return Err(SimError::TargetNotInDictionary(r.word.to_string()).into());
        }
        Ok(Objective { sim, records, n_samples, seed, cache: HashMap::new() })
    }

    /// Per-record W1 values in record order.
    pub fn per_record(&self, hp: &Hyperparams) -> Result<Vec<f64>, FitError> {
        self.records
            .par_iter()
            .map(|r| {
                let sim = self.sim.trial_distribution(r.word, hp, self.n_samples, self.seed)?;
                Ok(w1_distance(&r.dist, &sim))
            })
            .collect()
    }

    fn compute(&self, hp: &Hyperparams) -> Result<f64, FitError> {
        let per = self.per_record(hp)?;
        Ok(per.iter().sum::<f64>() / per.len() as f64)
    }

    pub fn value(&mut self, hp: &Hyperparams) -> Result<f64, FitError> {
        let key = (hp.k(), hp.t().to_bits());
        if let Some(&v) = self.cache.get(&key) {
            return Ok(v);
        }
        let v = self.compute(hp)?;
        self.cache.insert(key, v);
        Ok(v)
    }

    /// Evaluates every point, computing cache misses in parallel. Results
    /// come back in input order.
    pub fn values(&mut self, points: &[Hyperparams]) -> Result<Vec<f64>, FitError> {
        let missing: Vec<Hyperparams> =
            points.iter().filter(|hp| !self.cache.contains_key(&(hp.k(), hp.t().to_bits()))).copied().collect();
        let fresh: Vec<f64> = missing.par_iter().map(|hp| self.compute(hp)).collect::<Result<_, _>>()?;
        for (hp, v) in missing.iter().zip(fresh) {
            self.cache.insert((hp.k(), hp.t().to_bits()), v);
        }
        Ok(points.iter().map(|hp| self.cache[&(hp.k(), hp.t().to_bits())]).collect())
    }

    pub fn evaluations(&self) -> usize {
        self.cache.len()
    }
}

/// Mean W1 discrepancy at `hp` over `records`.
pub fn objective(
    hp: &Hyperparams,
    records: &[WordRecord],
    dict: &Dictionary,
    weighting: Weighting,
    n_samples: usize,
    seed: RngSeed,
) -> Result<f64, FitError> {
    let sim = Simulator::new(dict, weighting);
    Objective::new(&sim, records, n_samples, seed)?.value(hp)
}

/// Alternating exhaustive grid minimization: all of K at fixed T, then all
/// of T at the new K, until an iteration gains no more than `tol` or
/// `max_iter` iterations have run. Ties go to the smaller value.
pub fn coordinate_search(cfg: &FitConfig, records: &[WordRecord], dict: &Dictionary) -> Result<FitResult, FitError> {
    let sim = Simulator::new(dict, cfg.weighting);
    coordinate_search_with(cfg, records, &sim)
}

/// [`coordinate_search`] reusing an existing simulator.
pub fn coordinate_search_with(
    cfg: &FitConfig,
    records: &[WordRecord],
    sim: &Simulator<'_>,
) -> Result<FitResult, FitError> {
    let (ks, ts, start) = cfg.grids()?;
    let mut obj = Objective::new(sim, records, cfg.n_samples, cfg.seed)?;

    let (mut k, mut t) = (start.k(), start.t());
    let mut best = obj.value(&start)?;
    let mut trajectory = vec![Step { iteration: 0, axis: Axis::Init, k, t, objective: best }];
    let mut converged = false;
    let mut iterations = 0;

    for iteration in 1..=cfg.max_iter {
        iterations = iteration;
        let previous = best;

        let along_k: Vec<Hyperparams> = ks.iter().map(|&kk| Hyperparams::new(kk, t)).collect::<Result<_, _>>()?;
        let (i, f) = argmin(&obj.values(&along_k)?);
        k = ks[i];
        trajectory.push(Step { iteration, axis: Axis::K, k, t, objective: f });

        let along_t: Vec<Hyperparams> = ts.iter().map(|&tt| Hyperparams::new(k, tt)).collect::<Result<_, _>>()?;
        let (i, f) = argmin(&obj.values(&along_t)?);
        t = ts[i];
        trajectory.push(Step { iteration, axis: Axis::T, k, t, objective: f });
        best = f;

        log::debug!("iteration {iteration}: K={k} T={t} objective={best}");
        if previous - best <= cfg.tol {
            converged = true;
            break;
        }
    }

    Ok(FitResult {
        k_star: k,
        t_star: t,
        objective: best,
        trajectory,
        converged,
        iterations,
        evaluations: obj.evaluations(),
    })
}

/// Index and value of the first minimum.
fn argmin(values: &[f64]) -> (usize, f64) {
    values.iter().copied().enumerate().fold((0, f64::INFINITY), |best, (i, v)| if v < best.1 { (i, v) } else { best })
}
