use std::collections::HashSet;

use unicode_normalization::UnicodeNormalization;

use super::Corpus;
use crate::textproc::collapse_whitespace;

/// NFC-normalized text with whitespace runs collapsed to one space.
pub fn normalize_text(text: &str) -> String {
    collapse_whitespace(&text.nfc().collect::<String>())
}

/// Drops every external document whose normalized text equals the normalized
/// text of some provided document. Order is kept.
pub fn dedupe_external(provided: &Corpus, external: &Corpus) -> Corpus {
    let seen: HashSet<String> = provided
        .documents()
        .iter()
        .map(|d| normalize_text(&d.text))
        .collect();
    let kept = external
        .documents()
        .iter()
        .filter(|d| !seen.contains(&normalize_text(&d.text)))
        .cloned()
        .collect();
    Corpus::new(kept, external.provenance()).expect("subset of a valid corpus")
}
