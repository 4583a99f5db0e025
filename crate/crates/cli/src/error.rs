use std::fmt;

use cogsim_core::evaluation::EvalError;
use cogsim_core::features::FeatureError;
use cogsim_core::projection::ProjectionError;
use cogsim_core::{FitError, IngestError, MetricError, SimError};
use serde::Serialize;

/// Failure classes with fixed process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Usage,
    Data,
    Compute,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Usage => 2,
            ErrorKind::Data => 3,
            ErrorKind::Compute => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Usage, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Data, message: message.into() }
    }

    pub fn compute(message: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Compute, message: message.into() }
    }

    /// Single-line JSON for stderr.
    pub fn to_json_line(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            error: ErrorKind,
            exit_code: i32,
            message: &'a str,
        }
        let message = self.message.replace(['\n', '\r'], " ");
        serde_json::to_string(&Line { error: self.kind, exit_code: self.kind.exit_code(), message: &message })
            .expect("error line serializes")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::data(e.to_string())
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        match e {
            MetricError::InvalidSupport(_) => CliError::usage(e.to_string()),
            _ => CliError::data(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidHyperparams(_) | SimError::ZeroSamples => CliError::usage(e.to_string()),
            SimError::EmptyDictionary | SimError::TargetNotInDictionary(_) => CliError::data(e.to_string()),
        }
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        match e {
            FitError::InfeasibleRange(_) | FitError::InvalidConfig(_) => CliError::usage(e.to_string()),
            FitError::NoRecords => CliError::data(e.to_string()),
            FitError::Sim(inner) => inner.into(),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::InvalidFolds(_) => CliError::usage(e.to_string()),
            EvalError::TooFewRecords { .. } => CliError::data(e.to_string()),
            EvalError::Fit(inner) => inner.into(),
            EvalError::Sim(inner) => inner.into(),
            EvalError::Metric(inner) => inner.into(),
        }
    }
}

impl From<ProjectionError> for CliError {
    fn from(e: ProjectionError) -> Self {
        match e {
            ProjectionError::InvalidLevel(_) => CliError::usage(e.to_string()),
            ProjectionError::TooFewInputs(_) => CliError::usage(e.to_string()),
            ProjectionError::Sim(inner) => inner.into(),
        }
    }
}

impl From<FeatureError> for CliError {
    fn from(e: FeatureError) -> Self {
        CliError::compute(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_line_is_single_line() {
        let line = CliError::data("bad\nrow").to_json_line();
        assert!(!line.contains('\n'));
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["error"], "data");
        assert_eq!(v["exit_code"], 3);
    }

    #[test]
    fn exit_codes_by_kind() {
        assert_eq!(CliError::from(SimError::ZeroSamples).kind.exit_code(), 2);
        assert_eq!(CliError::from(SimError::EmptyDictionary).kind.exit_code(), 3);
        let feature = FeatureError::WordNotInDictionary("zzzzz".into());
        assert_eq!(CliError::from(feature).kind.exit_code(), 4);
        assert_eq!(CliError::from(EvalError::InvalidFolds(1)).kind.exit_code(), 2);
    }
}
