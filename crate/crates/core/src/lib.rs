//! Simulated Wordle populations with two cognitive hyperparameters.
//!
//! Players are modeled as frequency-biased samplers over a word list: at
//! each guess they recall the `K` most frequent words still consistent with
//! the clues and draw one with weights shaped by the scale factor `T`. The
//! crate fits `(K, T)` to observed trial distributions by coordinate search
//! on the mean Wasserstein-1 discrepancy, and scores word difficulty as the
//! W1 distance from an easy baseline word.

pub mod evaluation;
pub mod features;
pub mod ingest;
pub mod optimizer;
pub mod projection;
pub mod simulator;
pub mod wasserstein;
pub mod word;
pub mod wordle;

pub use ingest::{load_dictionary, load_ground_truth, Dictionary, Entry, IngestError, WordRecord};
pub use optimizer::{coordinate_search, objective, FitConfig, FitError, FitResult};
pub use simulator::{Hyperparams, RngSeed, SimError, Simulator, Weighting};
pub use wasserstein::{difficulty, w1_distance, w1_samples, MetricError, TrialDistribution};
pub use word::Word;
pub use wordle::{filter_dictionary, score_guess, Color, Feedback};
