//! Effective settings, merged from command-line flags, a fit's
//! `params.json`, the TOML config file and built-in defaults, in that order
//! of precedence.

use std::fs;
use std::path::{Path, PathBuf};

use cogsim_core::evaluation::DEFAULT_FOLDS;
use cogsim_core::optimizer::{KRange, TRange};
use cogsim_core::projection::{DEFAULT_LEVEL, DEFAULT_REPLICATES};
use cogsim_core::simulator::DEFAULT_SAMPLES;
use cogsim_core::{FitConfig, Hyperparams, RngSeed, Weighting};
use serde::{Deserialize, Serialize};

use crate::args::{BaselineSource, DataArgs, GlobalArgs, HyperparamArgs, SearchArgs, WeightingArg};
use crate::error::CliError;

pub const DEFAULT_BASELINE: &str = "train";
pub const DEFAULT_PROJECT_WORD: &str = "eerie";

/// Every field is optional so layers can be merged field by field.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dict: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<PathBuf>,
    // output location and thread count never change results, so they are
    // kept out of the echoed config
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing)]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weighting: Option<Weighting>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_range: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_range: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k0: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub folds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicates: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
}

macro_rules! merge_fields {
    ($hi:expr, $lo:expr, $($f:ident),+ $(,)?) => {
        Settings { $($f: $hi.$f.or($lo.$f)),+ }
    };
}

impl Settings {
    /// Fields set in `self` win over `lower`.
    pub fn over(self, lower: Settings) -> Settings {
        merge_fields!(
            self,
            lower,
            dict,
            truth,
            params,
            out,
            threads,
            seed,
            weighting,
            word,
            baseline,
            baseline_source,
            k,
            t,
            k_range,
            t_range,
            t_grid,
            k0,
            t0,
            max_iter,
            tol,
            samples,
            folds,
            replicates,
            level,
        )
    }

    pub fn from_toml_file(path: &Path) -> Result<Settings, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::usage(format!("invalid config {}: {}", path.display(), e.message())))
    }

    pub fn from_global(g: &GlobalArgs) -> Settings {
        Settings {
            out: g.out.clone(),
            threads: g.threads,
            seed: g.seed,
            weighting: g.weighting.map(|w| match w {
                WeightingArg::Cap => Weighting::Cap,
                WeightingArg::Plain => Weighting::Plain,
            }),
            ..Settings::default()
        }
    }

    pub fn with_data(mut self, d: &DataArgs) -> Settings {
        self.dict = d.dict.clone();
        self.truth = d.truth.clone();
        self
    }

    pub fn with_search(mut self, s: &SearchArgs) -> Settings {
        self.k_range = s.k_range.clone();
        self.t_range = s.t_range.clone();
        self.t_grid = s.t_grid;
        self.k0 = s.k0;
        self.t0 = s.t0;
        self.max_iter = s.max_iter;
        self.tol = s.tol;
        self.samples = s.samples;
        self
    }

    pub fn with_hp(mut self, h: &HyperparamArgs) -> Settings {
        self.k = h.k;
        self.t = h.t;
        self.params = h.params.clone();
        self
    }

    pub fn with_baseline_source(mut self, s: Option<BaselineSource>) -> Settings {
        self.baseline_source = s.map(|s| match s {
            BaselineSource::Truth => "truth".to_string(),
            BaselineSource::Simulated => "simulated".to_string(),
        });
        self
    }

    /// Fills every unset field that has a built-in default.
    pub fn with_defaults(self) -> Settings {
        let fit = FitConfig::default();
        self.over(Settings {
            seed: Some(0),
            weighting: Some(Weighting::default()),
            baseline: Some(DEFAULT_BASELINE.to_string()),
            k_range: Some(fit.k_range.to_string()),
            t_range: Some(fit.t_range.to_string()),
            t_grid: Some(fit.t_grid),
            max_iter: Some(fit.max_iter),
            tol: Some(fit.tol),
            samples: Some(DEFAULT_SAMPLES),
            folds: Some(DEFAULT_FOLDS),
            replicates: Some(DEFAULT_REPLICATES),
            level: Some(DEFAULT_LEVEL),
            ..Settings::default()
        })
    }

    pub fn seed(&self) -> RngSeed {
        RngSeed::new(self.seed.unwrap_or(0))
    }

    pub fn weighting(&self) -> Weighting {
        self.weighting.unwrap_or_default()
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(DEFAULT_SAMPLES)
    }

    pub fn require_dict(&self) -> Result<&Path, CliError> {
        self.dict.as_deref().ok_or_else(|| CliError::usage("a dictionary is required (--dict or `dict` in the config)"))
    }

    pub fn require_truth(&self) -> Result<&Path, CliError> {
        self.truth
            .as_deref()
            .ok_or_else(|| CliError::usage("ground truth is required (--truth or `truth` in the config)"))
    }

    pub fn hyperparams(&self) -> Result<Hyperparams, CliError> {
        match (self.k, self.t) {
            (Some(k), Some(t)) => Ok(Hyperparams::new(k, t)?),
            _ => Err(CliError::usage("K and T are required (--k/--t, `k`/`t` in the config, or --params)")),
        }
    }

    pub fn fit_config(&self) -> Result<FitConfig, CliError> {
        let d = FitConfig::default();
        let k_range = match &self.k_range {
            Some(s) => s.parse::<KRange>().map_err(|e| CliError::usage(format!("--k-range: {e}")))?,
            None => d.k_range,
        };
        let t_range = match &self.t_range {
            Some(s) => s.parse::<TRange>().map_err(|e| CliError::usage(format!("--t-range: {e}")))?,
            None => d.t_range,
        };
        Ok(FitConfig {
            k_range,
            t_range,
            t_grid: self.t_grid.unwrap_or(d.t_grid),
            k0: self.k0,
            t0: self.t0,
            max_iter: self.max_iter.unwrap_or(d.max_iter),
            tol: self.tol.unwrap_or(d.tol),
            n_samples: self.samples(),
            seed: self.seed(),
            weighting: self.weighting(),
        })
    }
}

/// The parts of a fit's `params.json` that later commands reuse.
#[derive(Debug, Deserialize)]
struct ParamsFile {
    k: usize,
    t: f64,
    seed: u64,
    weighting: Weighting,
    n_samples: usize,
    #[serde(default)]
    config: Settings,
}

/// Settings recorded by a previous fit: its hyperparameters, sampling
/// settings and input paths.
pub fn settings_from_params(path: &Path) -> Result<Settings, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    let p: ParamsFile = serde_json::from_str(&text)
        .map_err(|e| CliError::data(format!("invalid params file {}: {e}", path.display())))?;
    Ok(Settings {
        dict: p.config.dict,
        truth: p.config.truth,
        k: Some(p.k),
        t: Some(p.t),
        seed: Some(p.seed),
        weighting: Some(p.weighting),
        samples: Some(p.n_samples),
        ..Settings::default()
    })
}

/// Merges flags, the optional params file and the optional TOML file.
pub fn resolve(flags: Settings, config_path: Option<&Path>) -> Result<Settings, CliError> {
    let file = match config_path {
        Some(p) => Settings::from_toml_file(p)?,
        None => Settings::default(),
    };
    let params = match flags.params.clone().or_else(|| file.params.clone()) {
        Some(p) => settings_from_params(&p)?,
        None => Settings::default(),
    };
    Ok(flags.over(params).over(file).with_defaults())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let flags = Settings { seed: Some(7), ..Settings::default() };
        let file: Settings = toml::from_str("seed = 3\nsamples = 10\nk_range = \"10:50:10\"").unwrap();
        let merged = flags.over(file).with_defaults();
        assert_eq!(merged.seed, Some(7));
        assert_eq!(merged.samples, Some(10));
        assert_eq!(merged.k_range.as_deref(), Some("10:50:10"));
        assert_eq!(merged.folds, Some(DEFAULT_FOLDS));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<Settings>("sampels = 10").is_err());
    }

    #[test]
    fn weighting_from_toml() {
        let s: Settings = toml::from_str("weighting = \"plain\"").unwrap();
        assert_eq!(s.weighting(), Weighting::Plain);
    }

    #[test]
    fn fit_config_defaults_match_library() {
        let cfg = Settings::default().with_defaults().fit_config().unwrap();
        assert_eq!(cfg, FitConfig::default());
    }

    #[test]
    fn echo_skips_out_and_threads() {
        let s = Settings { out: Some("x".into()), threads: Some(4), seed: Some(1), ..Settings::default() };
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v, serde_json::json!({"seed": 1}));
    }
}
