//! Prediction files.
//!
//! ```text
//! name=spacy_s1 acc=0.57
//! doc-1	F
//! doc-2	-1
//! ```
//!
//! Labels may be `F`/`M` (mapped through the [`LabelEncoding`]) or `+1`/`-1`.

#![allow(clippy::tabs_in_doc_comments)]

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use indexmap::IndexMap;
use num_rational::BigRational;

use super::{accuracy_from_decimal, format_decimal, EnsembleError, EnsembleMember, LabelEncoding};
use crate::corpus::Label;

/// Extension picked up by [`load_members_dir`].
pub const PREDICTION_EXT: &str = "pred";

/// Parses a prediction file into a member.
pub fn read_predictions(text: &str, encoding: LabelEncoding) -> Result<EnsembleMember, EnsembleError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| EnsembleError::MalformedHeader("empty file".into()))?;
    let header = header.trim_end_matches('\r');
    let rest = header
        .strip_prefix("name=")
        .ok_or_else(|| EnsembleError::MalformedHeader(format!("`{header}` does not start with `name=`")))?;
    let (name, acc) = rest
        .rsplit_once(" acc=")
        .ok_or_else(|| EnsembleError::MalformedHeader(format!("`{header}` has no ` acc=` field")))?;
    if name.is_empty() {
        return Err(EnsembleError::MalformedHeader("empty member name".into()));
    }
    let acc = accuracy_from_decimal(acc.trim())?;

    let mut preds = IndexMap::new();
    for (i, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let lineno = i + 1;
        let (id, label) = line.split_once('\t').ok_or_else(|| EnsembleError::MalformedRow {
            line: lineno,
            reason: "expected `doc_id<TAB>label`".into(),
        })?;
        if id.is_empty() {
            return Err(EnsembleError::MalformedRow {
                line: lineno,
                reason: "empty document id".into(),
            });
        }
        let vote = encoding.parse_vote(label).ok_or_else(|| EnsembleError::UnknownLabel {
            line: lineno,
            label: label.to_string(),
        })?;
        if preds.insert(id.to_string(), vote).is_some() {
            return Err(EnsembleError::DuplicateDocId(id.to_string()));
        }
    }
    EnsembleMember::new(name, acc, preds)
}

pub fn load_external_predictions(
    path: impl AsRef<Path>,
    encoding: LabelEncoding,
) -> Result<EnsembleMember, EnsembleError> {
    read_predictions(&fs::read_to_string(path)?, encoding)
}

/// Loads every `*.pred` file in `dir`, sorted by file name.
pub fn load_members_dir(
    dir: impl AsRef<Path>,
    encoding: LabelEncoding,
) -> Result<Vec<EnsembleMember>, EnsembleError> {
    let mut paths: Vec<_> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    paths.retain(|p| p.is_file() && p.extension().is_some_and(|e| e == PREDICTION_EXT));
    paths.sort();
    paths
        .iter()
        .map(|p| load_external_predictions(p, encoding))
        .collect()
}

/// Writes labels as `F`/`M` under the given header.
pub fn write_predictions<'a, W: Write>(
    mut w: W,
    name: &str,
    accuracy: &BigRational,
    labels: impl IntoIterator<Item = (&'a str, Label)>,
) -> io::Result<()> {
    writeln!(w, "name={name} acc={}", format_decimal(accuracy))?;
    for (id, label) in labels {
        writeln!(w, "{id}\t{label}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_example() {
        let m = read_predictions("name=spacy_s1 acc=0.57\na\tF\nb\t-1\nc\t+1\n", LabelEncoding::default()).unwrap();
        assert_eq!(m.name, "spacy_s1");
        assert_eq!(*m.weight(), BigRational::new(7.into(), 100.into()));
        assert_eq!(m.predictions().len(), 3);
        assert_eq!(m.prediction("a"), Some(1));
        assert_eq!(m.prediction("b"), Some(-1));
    }

    #[test]
    fn errors() {
        let enc = LabelEncoding::default();
        assert!(matches!(read_predictions("name=x acc=1.2\n", enc), Err(EnsembleError::OutOfRange(_))));
        assert!(matches!(read_predictions("acc=0.5\n", enc), Err(EnsembleError::MalformedHeader(_))));
        assert!(matches!(read_predictions("", enc), Err(EnsembleError::MalformedHeader(_))));
        assert!(matches!(
            read_predictions("name=x acc=0.5\na\tQ\n", enc),
            Err(EnsembleError::UnknownLabel { line: 2, .. })
        ));
        assert!(matches!(
            read_predictions("name=x acc=0.5\na\tF\na\tM\n", enc),
            Err(EnsembleError::DuplicateDocId(_))
        ));
    }

    #[test]
    fn write_then_read() {
        let acc = BigRational::new(2.into(), 3.into());
        let mut buf = Vec::new();
        write_predictions(&mut buf, "ens", &acc, [("a", Label::F), ("b", Label::M)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("name=ens acc=0.66666666666666667\n"));
        let m = read_predictions(&text, LabelEncoding::default()).unwrap();
        assert_eq!(m.prediction("b"), Some(-1));
    }
}
