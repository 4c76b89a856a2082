//! Word n-gram language models with interpolated modified Kneser-Ney
//! smoothing, singleton pruning, and the two-model gender classifier.

mod arpa;
mod counts;
mod dual;
mod kn;
mod vocab;

use thiserror::Error;

pub use counts::{count_ngrams, prune_singletons, CountTable, GramStats, MAX_ORDER};
pub use dual::{train_lm, DualLMClassifier, LmConfig, DEFAULT_ORDER};
pub use kn::{estimate_kn, Discounts, NGramLM, CONTEXT_ONLY_LOGPROB, FALLBACK_DISCOUNT};
pub use vocab::{Vocab, BOS, BOS_STR, EOS, EOS_STR, UNK, UNK_STR};

#[derive(Debug, Error)]
pub enum LmError {
    #[error("no sentences to count")]
    EmptyInput,
    #[error("order {0} outside 1..=8")]
    OrderOutOfRange(usize),
    #[error("reserved symbol `{0}` in training text")]
    ReservedToken(String),
    #[error("order {0} has no n-grams")]
    DegenerateCounts(usize),
    #[error("paragraph has no sentences")]
    EmptyParagraph,
    #[error("both labels need training text")]
    SingleClassInput,
    #[error("language model orders differ ({0} vs {1})")]
    OrderMismatch(usize, usize),
    #[error("corrupt model file: {0}")]
    CorruptModelFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
