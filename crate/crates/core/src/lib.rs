//! Cross-genre gender profiling toolkit.

pub mod corpus;
pub mod ensemble;
pub mod features;
pub mod fingerprint;
pub mod harness;
pub mod linear;
pub mod ngram_lm;
pub mod textproc;
