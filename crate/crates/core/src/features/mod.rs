//! Feature families and sparse document vectors.
//!
//! Families are namespaced so they can be combined freely:
//!
//! | family | namespace | value |
//! |---|---|---|
//! | word unigrams | `w1:<token>` | count |
//! | character trigrams | `c3:<gram>` | count |
//! | cluster unigrams | `cl:CL_<id>` or `cl:<token>` | count |
//! | male lexicon | `lexM` | count |
//! | female lexicon | `lexF` | count |
//! | diminutives | `dim` | count |
//!
//! Cluster, lexicon and diminutive matching always look at the lowercase
//! form of a token, whatever the tokenizer's casing.

mod clusters;
mod embedding;
mod extract;
mod space;

use thiserror::Error;

pub use clusters::{
    build_clusters, default_k, map_to_clusters, ClusterMap, KMeansConfig, DEFAULT_MAX_CLUSTER_SIZE,
};
pub use embedding::EmbeddingTable;
pub use extract::{
    diminutive_count, extract_char_ngrams, extract_word_ngrams, lexicon_count, Counts,
    DiminutiveRule, Lexicon, FEMALE_WORDS, MALE_WORDS,
};
pub use space::{FeatureConfig, FeatureFamily, FeatureSpace, SparseVector};

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("need at least k={k} distinct words to cluster, have {words}")]
    TooFewWords { words: usize, k: usize },
    #[error("embedding for `{0}` has a non-finite component")]
    NonFiniteEmbedding(String),
    #[error("embedding file: {0}")]
    Embedding(String),
    #[error("cluster file: {0}")]
    ClusterFile(String),
    #[error("lexicon: {0}")]
    Lexicon(String),
    #[error("feature config: {0}")]
    Config(String),
    #[error("feature space mismatch: {0}")]
    ConfigMismatch(String),
    #[error("corrupt feature space file: {0}")]
    CorruptFile(String),
    #[error("empty input")]
    EmptyInput,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
