//! Scenario runner: configuration, training and scoring of single models and
//! ensembles, accuracy and report tables, and a synthetic corpus generator.

mod config;
mod metrics;
mod models;
mod report;
mod run;
pub mod synth;

use thiserror::Error;

use crate::corpus::CorpusError;
use crate::ensemble::EnsembleError;
use crate::features::FeatureError;
use crate::linear::LinearError;
use crate::ngram_lm::LmError;

pub use config::{ModelKind, RunConfig, ScenarioChoice, Seeds, CONFIG_ENV};
pub use metrics::{accuracy, correct_count, macro_average, round_half_away};
pub use models::TrainedModel;
pub use report::{MemberSummary, Report, ScenarioReport};
pub use run::{run, run_on_corpus, run_scenario, slug, Resources, ScenarioOutcome};

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad or missing settings, detected before any training.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("key mismatch: {0}")]
    KeyMismatch(String),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Lm(#[from] LmError),
    #[error(transparent)]
    Linear(#[from] LinearError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
