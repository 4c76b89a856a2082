//! Labelled documents, genre-based scenarios and external-data deduplication.

mod dedupe;
mod split;
mod tsv;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use dedupe::{dedupe_external, normalize_text};
pub use split::{build_scenario, split_in_domain, Fraction, ScenarioMode, ScenarioSpec};
pub use tsv::{ingest_tsv, read_tsv, write_tsv};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("duplicate document id `{0}`")]
    DuplicateId(String),
    #[error("invalid document: {0}")]
    InvalidDocument(String),
    #[error("empty input")]
    EmptyInput,
    #[error("document `{0}` has no label")]
    UnlabelledDocument(String),
    #[error("no labelled documents for genre `{0}`")]
    MissingGenre(Genre),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid fraction `{0}`")]
    InvalidFraction(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Source genre of a document.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Genre {
    News,
    Twitter,
    YouTube,
    Other(String),
}

impl Genre {
    /// Short code used in reports (`N`, `TW`, `YT`).
    pub fn short(&self) -> String {
        match self {
            Genre::News => "N".into(),
            Genre::Twitter => "TW".into(),
            Genre::YouTube => "YT".into(),
            Genre::Other(tag) => tag.clone(),
        }
    }
}

impl fmt::Display for Genre {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Genre::News => f.write_str("news"),
            Genre::Twitter => f.write_str("twitter"),
            Genre::YouTube => f.write_str("youtube"),
            Genre::Other(tag) => write!(f, "other:{tag}"),
        }
    }
}

impl FromStr for Genre {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_lowercase();
        match lower.as_str() {
            "news" | "n" => Ok(Genre::News),
            "twitter" | "tw" => Ok(Genre::Twitter),
            "youtube" | "yt" => Ok(Genre::YouTube),
            _ => match lower.strip_prefix("other:") {
                Some(tag) if !tag.is_empty() && !tag.contains(char::is_whitespace) => {
                    Ok(Genre::Other(tag.to_owned()))
                }
                _ => Err(format!("unknown genre `{s}`")),
            },
        }
    }
}

/// Author gender label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    F,
    M,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::F, Label::M];

    pub fn other(self) -> Label {
        match self {
            Label::F => Label::M,
            Label::M => Label::F,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::F => "F",
            Label::M => "M",
        })
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "F" | "f" => Ok(Label::F),
            "M" | "m" => Ok(Label::M),
            _ => Err(format!("unknown label `{s}`")),
        }
    }
}

/// One labelled paragraph of text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub genre: Genre,
    pub label: Option<Label>,
    pub text: String,
}

impl Document {
    pub fn new(
        id: impl Into<String>,
        genre: Genre,
        label: Option<Label>,
        text: impl Into<String>,
    ) -> Result<Self, CorpusError> {
        let doc = Self {
            id: id.into(),
            genre,
            label,
            text: text.into(),
        };
        doc.validate()?;
        Ok(doc)
    }

    fn validate(&self) -> Result<(), CorpusError> {
        if self.id.is_empty() || self.id.contains(['\t', '\n', '\r']) {
            return Err(CorpusError::InvalidDocument(format!(
                "bad id `{}`",
                self.id.escape_debug()
            )));
        }
        if self.text.trim().is_empty() {
            return Err(CorpusError::InvalidDocument(format!(
                "document `{}` has empty text",
                self.id
            )));
        }
        Ok(())
    }
}

/// An ordered collection of documents with unique ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    documents: Vec<Document>,
    provenance: String,
}

impl Corpus {
    pub fn new(
        documents: Vec<Document>,
        provenance: impl Into<String>,
    ) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(documents.len());
        for d in &documents {
            if !seen.insert(d.id.as_str()) {
                return Err(CorpusError::DuplicateId(d.id.clone()));
            }
        }
        Ok(Self {
            documents,
            provenance: provenance.into(),
        })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.documents
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn labelled_in<'a>(&'a self, genre: &'a Genre) -> impl Iterator<Item = &'a Document> {
        self.documents
            .iter()
            .filter(move |d| d.label.is_some() && &d.genre == genre)
    }
}
