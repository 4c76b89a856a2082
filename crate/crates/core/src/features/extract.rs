//! Raw feature extractors. All of them are pure functions over tokens or
//! text; multisets come back as insertion-ordered count maps so that callers
//! get a deterministic first-seen order for free.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use indexmap::IndexMap;

use super::FeatureError;
use crate::textproc::collapse_whitespace;

pub type Counts = IndexMap<String, usize>;

/// Contiguous token n-grams, joined with a single space.
pub fn extract_word_ngrams<S: AsRef<str>>(tokens: &[S], n: usize) -> Counts {
    assert!(n >= 1, "n-gram order must be positive");
    let mut out = Counts::new();
    for window in tokens.windows(n) {
        let gram = window
            .iter()
            .map(AsRef::as_ref)
            .collect::<Vec<_>>()
            .join(" ");
        *out.entry(gram).or_insert(0) += 1;
    }
    out
}

/// Sliding window of `n` chars over the text with whitespace collapsed.
pub fn extract_char_ngrams(text: &str, n: usize) -> Counts {
    assert!(n >= 1, "n-gram order must be positive");
    let collapsed = collapse_whitespace(text);
    let chars: Vec<char> = collapsed.chars().collect();
    let mut out = Counts::new();
    for window in chars.windows(n) {
        *out.entry(window.iter().collect()).or_insert(0) += 1;
    }
    out
}

/// A named set of lowercase words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    name: String,
    words: BTreeSet<String>,
}

pub const MALE_WORDS: [&str; 11] = [
    "feitelijk",
    "voornamelijk",
    "degelijk",
    "oorspronkelijk",
    "tamelijk",
    "onmiddellijk",
    "je",
    "d'r",
    "ja",
    "nee",
    "neen",
];

pub const FEMALE_WORDS: [&str; 8] = [
    "ik",
    "hij",
    "dadelijk",
    "vriendelijk",
    "lelijk",
    "vrolijk",
    "eindelijk",
    "verschrikkelijk",
];

impl Lexicon {
    pub fn new<I, S>(name: impl Into<String>, words: I) -> Result<Self, FeatureError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let name = name.into();
        let mut set = BTreeSet::new();
        for w in words {
            let w = w.as_ref().trim();
            if w.is_empty() {
                continue;
            }
            if w.to_lowercase() != w {
                return Err(FeatureError::Lexicon(format!("{name}: `{w}` is not lowercase")));
            }
            set.insert(w.to_owned());
        }
        if set.is_empty() {
            return Err(FeatureError::Lexicon(format!("{name}: no words")));
        }
        Ok(Self { name, words: set })
    }

    /// Words reported as more frequent in male Dutch speech.
    pub fn male() -> Self {
        Self::new("male", MALE_WORDS).expect("built-in list")
    }

    /// Words reported as more frequent in female Dutch speech.
    pub fn female() -> Self {
        Self::new("female", FEMALE_WORDS).expect("built-in list")
    }

    /// One word per line.
    pub fn load(name: &str, path: impl AsRef<Path>) -> Result<Self, FeatureError> {
        let text = fs::read_to_string(path)?;
        Self::new(name, text.lines())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn words(&self) -> &BTreeSet<String> {
        &self.words
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }
}

/// Number of tokens whose lowercase form is in the lexicon.
pub fn lexicon_count<S: AsRef<str>>(tokens: &[S], lex: &Lexicon) -> usize {
    tokens
        .iter()
        .filter(|t| lex.contains(&t.as_ref().to_lowercase()))
        .count()
}

/// Suffix rule for Dutch diminutives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiminutiveRule {
    pub suffixes: Vec<String>,
    pub min_len: usize,
    pub exclusions: BTreeSet<String>,
}

impl Default for DiminutiveRule {
    fn default() -> Self {
        Self {
            suffixes: ["tje", "pje", "kje", "etje", "je"].map(String::from).to_vec(),
            min_len: 4,
            exclusions: ["oranje", "franje"].map(String::from).into(),
        }
    }
}

impl DiminutiveRule {
    pub fn matches(&self, token: &str) -> bool {
        let lower = token.to_lowercase();
        lower.chars().count() >= self.min_len
            && !self.exclusions.contains(&lower)
            && self.suffixes.iter().any(|s| lower.ends_with(s.as_str()))
    }
}

pub fn diminutive_count<S: AsRef<str>>(tokens: &[S], rule: &DiminutiveRule) -> usize {
    tokens.iter().filter(|t| rule.matches(t.as_ref())).count()
}
