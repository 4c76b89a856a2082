//! The guide's chapters, compiled so their examples run as doc-tests.

#[doc = include_str!("../../../book/src/overview.md")]
pub mod overview {}

#[doc = include_str!("../../../book/src/corpus.md")]
pub mod corpus {}

#[doc = include_str!("../../../book/src/features.md")]
pub mod features {}

#[doc = include_str!("../../../book/src/language-models.md")]
pub mod language_models {}

#[doc = include_str!("../../../book/src/linear-models.md")]
pub mod linear_models {}

#[doc = include_str!("../../../book/src/ensemble.md")]
pub mod ensemble {}

#[doc = include_str!("../../../book/src/harness.md")]
pub mod harness {}
