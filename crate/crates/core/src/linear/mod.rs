//! Linear classifiers over sparse feature vectors: logistic regression and a
//! Bernoulli naive Bayes baseline.

mod logreg;
mod nb;
mod persist;

use thiserror::Error;

use crate::corpus::Label;
use crate::fingerprint::Fingerprint;

pub use logreg::{gradient, objective, sigmoid, LinearModel, TrainConfig};
pub use nb::NBModel;

#[derive(Debug, Error)]
pub enum LinearError {
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("training data needs both labels")]
    SingleClassInput,
    #[error("vector from feature space {found}, model trained on {expected}")]
    FingerprintMismatch {
        expected: Fingerprint,
        found: Fingerprint,
    },
    #[error("corrupt model file: {0}")]
    CorruptModelFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Regression target for a label: `F` is the positive class.
pub fn label_target(label: Label) -> f64 {
    match label {
        Label::F => 1.0,
        Label::M => 0.0,
    }
}
