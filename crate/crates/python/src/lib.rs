//! Python bindings. Heavy calls release the GIL while they run.

use std::str::FromStr;

use chrono::NaiveDate;
use cogsim_core::optimizer::{KRange, TRange};
use cogsim_core::projection::{self, DEFAULT_LEVEL, DEFAULT_REPLICATES};
use cogsim_core::simulator::DEFAULT_SAMPLES;
use cogsim_core::wasserstein::CATEGORIES;
use cogsim_core::{self as core, FitConfig, RngSeed, Simulator, TrialDistribution, Weighting, Word};
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn word(s: &str) -> PyResult<Word> {
    Word::parse(s).map_err(value_err)
}

fn weighting(s: &str) -> PyResult<Weighting> {
    Weighting::from_str(s).map_err(value_err)
}

fn dist(mass: [f64; CATEGORIES]) -> PyResult<TrialDistribution> {
    TrialDistribution::new(mass).map_err(value_err)
}

/// Word list with relative frequencies, most frequent first.
#[pyclass(name = "Dictionary", frozen)]
pub struct PyDictionary(core::Dictionary);

#[pymethods]
impl PyDictionary {
    /// Builds from `(word, weight)` pairs; weights are normalized.
    #[new]
    fn new(pairs: Vec<(String, f64)>) -> PyResult<Self> {
        let parsed = pairs.iter().map(|(s, f)| Ok((word(s)?, *f))).collect::<PyResult<Vec<_>>>()?;
        core::Dictionary::from_weights(parsed).map(PyDictionary).map_err(value_err)
    }

    /// Reads a `word,frequency` CSV.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        core::load_dictionary(path).map(PyDictionary).map_err(value_err)
    }

    fn words(&self) -> Vec<String> {
        self.0.words().map(|w| w.to_string()).collect()
    }

    fn freq(&self, w: &str) -> PyResult<f64> {
        self.0.freq(word(w)?).ok_or_else(|| PyKeyError::new_err(w.to_string()))
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __contains__(&self, w: &str) -> bool {
        Word::parse(w).is_ok_and(|w| self.0.contains(w))
    }

    fn __repr__(&self) -> String {
        format!("Dictionary({} words)", self.0.len())
    }
}

#[pyclass(name = "Hyperparams", frozen)]
pub struct PyHyperparams(core::Hyperparams);

#[pymethods]
impl PyHyperparams {
    #[new]
    fn new(k: usize, t: f64) -> PyResult<Self> {
        core::Hyperparams::new(k, t).map(PyHyperparams).map_err(value_err)
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.k()
    }

    #[getter]
    fn t(&self) -> f64 {
        self.0.t()
    }

    fn __repr__(&self) -> String {
        format!("Hyperparams(k={}, t={})", self.0.k(), self.0.t())
    }
}

/// One ground-truth day.
#[pyclass(name = "WordRecord", frozen, get_all, from_py_object)]
#[derive(Clone)]
pub struct PyWordRecord {
    date: String,
    word: String,
    num_reported: u64,
    dist: [f64; CATEGORIES],
}

#[pymethods]
impl PyWordRecord {
    #[new]
    #[pyo3(signature = (word, dist, date = "2022-01-01".to_string(), num_reported = 0))]
    fn new(word: String, dist: [f64; CATEGORIES], date: String, num_reported: u64) -> Self {
        PyWordRecord { date, word, num_reported, dist }
    }

    fn __repr__(&self) -> String {
        format!("WordRecord({} {})", self.date, self.word)
    }
}

impl PyWordRecord {
    fn to_core(&self) -> PyResult<core::WordRecord> {
        Ok(core::WordRecord {
            date: NaiveDate::parse_from_str(&self.date, "%Y-%m-%d").map_err(value_err)?,
            word: word(&self.word)?,
            num_reported: self.num_reported,
            dist: dist(self.dist)?,
        })
    }
}

fn core_records(records: &[PyWordRecord]) -> PyResult<Vec<core::WordRecord>> {
    records.iter().map(PyWordRecord::to_core).collect()
}

/// Clue for `guess` against `target`, e.g. `"-G-YG"`.
#[pyfunction]
fn score_guess(guess: &str, target: &str) -> PyResult<String> {
    Ok(core::score_guess(word(guess)?, word(target)?).to_string())
}

/// Words of `dict` that would give the same `clue` for `guess`.
#[pyfunction]
fn filter(dict: &PyDictionary, guess: &str, clue: &str) -> PyResult<PyDictionary> {
    let fb = core::Feedback::from_str(clue).map_err(value_err)?;
    Ok(PyDictionary(core::filter_dictionary(&dict.0, word(guess)?, fb)))
}

#[pyfunction]
#[pyo3(signature = (dict, word, hp, n_samples = DEFAULT_SAMPLES, seed = 0, weighting = "cap"))]
fn trial_distribution(
    py: Python<'_>,
    dict: &PyDictionary,
    word: &str,
    hp: &PyHyperparams,
    n_samples: usize,
    seed: u64,
    weighting: &str,
) -> PyResult<[f64; CATEGORIES]> {
    let (target, w) = (self::word(word)?, self::weighting(weighting)?);
    let d = py
        .detach(|| Simulator::new(&dict.0, w).trial_distribution(target, &hp.0, n_samples, RngSeed::new(seed)))
        .map_err(value_err)?;
    Ok(*d.mass())
}

#[pyfunction]
fn w1_distance(p: [f64; CATEGORIES], q: [f64; CATEGORIES]) -> PyResult<f64> {
    Ok(core::w1_distance(&dist(p)?, &dist(q)?))
}

#[pyfunction]
fn w1_samples(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<f64> {
    core::w1_samples(&xs, &ys).map_err(value_err)
}

/// W1 distance from the baseline distribution to the word's.
#[pyfunction]
fn difficulty(word_dist: [f64; CATEGORIES], baseline_dist: [f64; CATEGORIES]) -> PyResult<f64> {
    Ok(core::difficulty(&dist(word_dist)?, &dist(baseline_dist)?))
}

#[pyfunction]
fn load_ground_truth(path: &str, dict: &PyDictionary) -> PyResult<Vec<PyWordRecord>> {
    let records = core::load_ground_truth(path, &dict.0).map_err(value_err)?;
    Ok(records
        .into_iter()
        .map(|r| PyWordRecord {
            date: r.date.to_string(),
            word: r.word.to_string(),
            num_reported: r.num_reported,
            dist: *r.dist.mass(),
        })
        .collect())
}

/// Mean W1 discrepancy over `records` at `hp`.
#[pyfunction]
#[pyo3(signature = (hp, records, dict, n_samples = DEFAULT_SAMPLES, seed = 0, weighting = "cap"))]
fn objective(
    py: Python<'_>,
    hp: &PyHyperparams,
    records: Vec<PyWordRecord>,
    dict: &PyDictionary,
    n_samples: usize,
    seed: u64,
    weighting: &str,
) -> PyResult<f64> {
    let records = core_records(&records)?;
    let w = self::weighting(weighting)?;
    py.detach(|| core::objective(&hp.0, &records, &dict.0, w, n_samples, RngSeed::new(seed))).map_err(value_err)
}

#[pyclass(name = "FitResult", frozen, get_all)]
pub struct PyFitResult {
    k: usize,
    t: f64,
    objective: f64,
    converged: bool,
    iterations: usize,
    evaluations: usize,
    /// `(iteration, axis, k, t, objective)` per accepted step.
    trajectory: Vec<(usize, String, usize, f64, f64)>,
}

#[pymethods]
impl PyFitResult {
    fn hyperparams(&self) -> PyResult<PyHyperparams> {
        PyHyperparams::new(self.k, self.t)
    }

    fn __repr__(&self) -> String {
        format!("FitResult(k={}, t={}, objective={:.6})", self.k, self.t, self.objective)
    }
}

#[pyfunction]
#[pyo3(signature = (
    records, dict, k_range = "10:2000:10", t_range = "0.01:2.0", t_grid = 50, k0 = None, t0 = None,
    max_iter = 10, tol = 0.0, n_samples = DEFAULT_SAMPLES, seed = 0, weighting = "cap"
))]
#[allow(clippy::too_many_arguments)]
fn coordinate_search(
    py: Python<'_>,
    records: Vec<PyWordRecord>,
    dict: &PyDictionary,
    k_range: &str,
    t_range: &str,
    t_grid: usize,
    k0: Option<usize>,
    t0: Option<f64>,
    max_iter: usize,
    tol: f64,
    n_samples: usize,
    seed: u64,
    weighting: &str,
) -> PyResult<PyFitResult> {
    let cfg = FitConfig {
        k_range: KRange::from_str(k_range).map_err(value_err)?,
        t_range: TRange::from_str(t_range).map_err(value_err)?,
        t_grid,
        k0,
        t0,
        max_iter,
        tol,
        n_samples,
        seed: RngSeed::new(seed),
        weighting: self::weighting(weighting)?,
    };
    let records = core_records(&records)?;
    let fit = py.detach(|| core::coordinate_search(&cfg, &records, &dict.0)).map_err(value_err)?;
    Ok(PyFitResult {
        k: fit.k_star,
        t: fit.t_star,
        objective: fit.objective,
        converged: fit.converged,
        iterations: fit.iterations,
        evaluations: fit.evaluations,
        trajectory: fit
            .trajectory
            .iter()
            .map(|s| (s.iteration, format!("{:?}", s.axis).to_lowercase(), s.k, s.t, s.objective))
            .collect(),
    })
}

#[pyclass(name = "Projection", frozen, get_all)]
pub struct PyProjection {
    basis: [[f64; CATEGORIES]; 2],
    center: [f64; CATEGORIES],
    explained_variance: [f64; 2],
    total_variance: f64,
    /// `(x, y)` per input, in input order.
    points: Vec<(f64, f64)>,
}

impl From<projection::Projection2D> for PyProjection {
    fn from(p: projection::Projection2D) -> Self {
        PyProjection {
            basis: p.basis,
            center: p.center,
            explained_variance: p.explained_variance,
            total_variance: p.total_variance,
            points: p.points.iter().map(|pt| (pt.x, pt.y)).collect(),
        }
    }
}

/// Two-component principal projection of trial distributions.
#[pyfunction]
fn fpca_project(dists: Vec<[f64; CATEGORIES]>) -> PyResult<PyProjection> {
    let dists = dists.into_iter().map(dist).collect::<PyResult<Vec<_>>>()?;
    projection::fpca_project(&dists).map(PyProjection::from).map_err(value_err)
}

#[pyclass(name = "ReplicateBand", frozen, get_all)]
pub struct PyReplicateBand {
    word: String,
    level: f64,
    mean: [f64; CATEGORIES],
    lower: [f64; CATEGORIES],
    upper: [f64; CATEGORIES],
    replicates: Vec<[f64; CATEGORIES]>,
    projection: Py<PyProjection>,
}

#[pyfunction]
#[pyo3(signature = (
    dict, word, hp, n_replicates = DEFAULT_REPLICATES, n_samples = DEFAULT_SAMPLES, level = DEFAULT_LEVEL,
    seed = 0, weighting = "cap"
))]
#[allow(clippy::too_many_arguments)]
fn replicate_band(
    py: Python<'_>,
    dict: &PyDictionary,
    word: &str,
    hp: &PyHyperparams,
    n_replicates: usize,
    n_samples: usize,
    level: f64,
    seed: u64,
    weighting: &str,
) -> PyResult<PyReplicateBand> {
    let (target, w) = (self::word(word)?, self::weighting(weighting)?);
    let band = py
        .detach(|| {
            let sim = Simulator::new(&dict.0, w);
            projection::replicate_band(target, &sim, &hp.0, n_replicates, n_samples, level, RngSeed::new(seed))
        })
        .map_err(value_err)?;
    Ok(PyReplicateBand {
        word: band.word.to_string(),
        level: band.level,
        mean: band.mean,
        lower: band.lower,
        upper: band.upper,
        replicates: band.replicates.iter().map(|d| *d.mass()).collect(),
        projection: Py::new(py, PyProjection::from(band.projection))?,
    })
}

#[pymodule]
fn cogsim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDictionary>()?;
    m.add_class::<PyHyperparams>()?;
    m.add_class::<PyWordRecord>()?;
    m.add_class::<PyFitResult>()?;
    m.add_class::<PyProjection>()?;
    m.add_class::<PyReplicateBand>()?;
    m.add_function(wrap_pyfunction!(score_guess, m)?)?;
    m.add_function(wrap_pyfunction!(filter, m)?)?;
    m.add_function(wrap_pyfunction!(trial_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(w1_distance, m)?)?;
    m.add_function(wrap_pyfunction!(w1_samples, m)?)?;
    m.add_function(wrap_pyfunction!(difficulty, m)?)?;
    m.add_function(wrap_pyfunction!(load_ground_truth, m)?)?;
    m.add_function(wrap_pyfunction!(objective, m)?)?;
    m.add_function(wrap_pyfunction!(coordinate_search, m)?)?;
    m.add_function(wrap_pyfunction!(fpca_project, m)?)?;
    m.add_function(wrap_pyfunction!(replicate_band, m)?)?;
    Ok(())
}
