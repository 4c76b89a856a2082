use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use super::FeatureError;

/// Word vectors loaded from a word2vec/fastText style text file.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dimension: usize,
    words: Vec<String>,
    vectors: Vec<Vec<f64>>,
    index: HashMap<String, usize>,
}

impl EmbeddingTable {
    /// Builds a table, rejecting ragged or non-finite vectors. Later
    /// duplicates of a word are ignored.
    pub fn new(
        dimension: usize,
        entries: impl IntoIterator<Item = (String, Vec<f64>)>,
    ) -> Result<Self, FeatureError> {
        if dimension == 0 {
            return Err(FeatureError::Embedding("dimension must be positive".into()));
        }
        let mut table = Self {
            dimension,
            words: Vec::new(),
            vectors: Vec::new(),
            index: HashMap::new(),
        };
        for (word, v) in entries {
            if v.len() != dimension {
                return Err(FeatureError::Embedding(format!(
                    "`{word}` has {} components, expected {dimension}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(FeatureError::NonFiniteEmbedding(word));
            }
            if table.index.contains_key(&word) {
                continue;
            }
            table.index.insert(word.clone(), table.words.len());
            table.words.push(word);
            table.vectors.push(v);
        }
        Ok(table)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index.get(word).map(|&i| self.vectors[i].as_slice())
    }

    /// Entries in file order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.words
            .iter()
            .zip(&self.vectors)
            .map(|(w, v)| (w.as_str(), v.as_slice()))
    }

    /// Parses `<count> <dimension>` followed by `word x1 ... xd` lines.
    pub fn read<R: Read>(reader: R) -> Result<Self, FeatureError> {
        let mut lines = BufReader::new(reader).lines();
        let header = lines
            .next()
            .ok_or_else(|| FeatureError::Embedding("empty embedding file".into()))??;
        let mut head = header.split_whitespace();
        let parse_usize = |s: Option<&str>| -> Result<usize, FeatureError> {
            s.and_then(|s| s.parse().ok())
                .ok_or_else(|| FeatureError::Embedding(format!("bad header `{header}`")))
        };
        let count = parse_usize(head.next())?;
        let dimension = parse_usize(head.next())?;

        let mut entries = Vec::with_capacity(count);
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(' ').filter(|p| !p.is_empty());
            let word = parts.next().unwrap_or_default().to_owned();
            let v: Result<Vec<f64>, _> = parts.map(str::parse::<f64>).collect();
            let v = v.map_err(|_| {
                FeatureError::Embedding(format!("line {}: unparsable component", i + 2))
            })?;
            entries.push((word, v));
        }
        if entries.len() != count {
            return Err(FeatureError::Embedding(format!(
                "header declares {count} vectors, found {}",
                entries.len()
            )));
        }
        Self::new(dimension, entries)
    }

    /// Writes the format [`EmbeddingTable::read`] accepts.
    pub fn write<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {}", self.words.len(), self.dimension)?;
        for (word, v) in self.words.iter().zip(&self.vectors) {
            let comps: Vec<String> = v.iter().map(f64::to_string).collect();
            writeln!(w, "{word} {}", comps.join(" "))?;
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FeatureError> {
        Self::read(File::open(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_text_format() {
        let data = "2 3\nhond 0.1 0.2 0.3\nkat -1 0 1e-3\n";
        let t = EmbeddingTable::read(data.as_bytes()).unwrap();
        assert_eq!(t.dimension(), 3);
        assert_eq!(t.len(), 2);
        assert_eq!(t.get("kat").unwrap(), &[-1.0, 0.0, 0.001]);
    }

    #[test]
    fn rejects_wrong_dimension_and_count() {
        assert!(EmbeddingTable::read("1 3\nhond 0.1 0.2\n".as_bytes()).is_err());
        assert!(EmbeddingTable::read("2 1\nhond 0.1\n".as_bytes()).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        let err = EmbeddingTable::read("1 2\nhond NaN 1\n".as_bytes()).unwrap_err();
        assert!(matches!(err, FeatureError::NonFiniteEmbedding(w) if w == "hond"));
    }
}
