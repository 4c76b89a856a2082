//! Four-column TSV interchange: `id \t genre \t label \t text`.
//!
//! Inside the text column tabs, newlines, carriage returns and backslashes are
//! escaped as `\t`, `\n`, `\r` and `\\`.

use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{Corpus, CorpusError, Document, Genre, Label};

pub(crate) fn escape_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            _ => out.push(c),
        }
    }
    out
}

pub(crate) fn unescape_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('\\') => out.push('\\'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

fn parse_row(line: &str, line_no: usize) -> Result<Document, CorpusError> {
    let malformed = |reason: String| CorpusError::MalformedRow {
        line: line_no,
        reason,
    };
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 4 {
        return Err(malformed(format!("expected 4 fields, found {}", fields.len())));
    }
    let genre: Genre = fields[1].parse().map_err(malformed)?;
    let label = match fields[2].trim() {
        "" => None,
        tok => Some(tok.parse::<Label>().map_err(malformed)?),
    };
    let text = unescape_text(fields[3]);
    Document::new(fields[0], genre, label, text).map_err(|e| malformed(e.to_string()))
}

/// Reads a corpus from any reader. Blank lines are skipped; line numbers in
/// errors are 1-based.
pub fn read_tsv<R: Read>(reader: R, provenance: &str) -> Result<Corpus, CorpusError> {
    let mut docs = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        docs.push(parse_row(line, i + 1)?);
    }
    Corpus::new(docs, provenance)
}

/// Loads a TSV corpus file.
pub fn ingest_tsv(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    let provenance = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_tsv(fs::File::open(path)?, &provenance)
}

pub fn write_tsv<'a, W, I>(mut w: W, docs: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a Document>,
{
    for d in docs {
        let label = d.label.map(|l| l.to_string()).unwrap_or_default();
        writeln!(w, "{}\t{}\t{}\t{}", d.id, d.genre, label, escape_text(&d.text))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reads_rows_in_order() {
        let data = "d1\tNews\tF\tHallo wereld\nd2\ttwitter\tM\tja\n\nd3\tyoutube\t\tnee\n";
        let c = read_tsv(data.as_bytes(), "provided").unwrap();
        assert_eq!(c.len(), 3);
        let d1 = &c.documents()[0];
        assert_eq!(d1.id, "d1");
        assert_eq!(d1.genre, Genre::News);
        assert_eq!(d1.label, Some(Label::F));
        assert_eq!(d1.text, "Hallo wereld");
        assert_eq!(c.documents()[2].label, None);
    }

    #[test]
    fn wrong_field_count_reports_line() {
        let data = "d1\tnews\tF\tok\nd2\tnews\tM\n";
        match read_tsv(data.as_bytes(), "x") {
            Err(CorpusError::MalformedRow { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_tokens_are_malformed() {
        assert!(matches!(
            read_tsv("d1\tradio\tF\tx\n".as_bytes(), "x"),
            Err(CorpusError::MalformedRow { line: 1, .. })
        ));
        assert!(matches!(
            read_tsv("d1\tnews\tX\tx\n".as_bytes(), "x"),
            Err(CorpusError::MalformedRow { line: 1, .. })
        ));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let data = "d1\tnews\tF\ta\nd1\tnews\tM\tb\n";
        assert!(matches!(
            read_tsv(data.as_bytes(), "x"),
            Err(CorpusError::DuplicateId(_))
        ));
    }

    #[test]
    fn escapes_are_decoded() {
        let c = read_tsv("d1\tnews\tF\ta\\tb\\nc\\\\d\n".as_bytes(), "x").unwrap();
        assert_eq!(c.documents()[0].text, "a\tb\nc\\d");
    }

    fn arb_doc() -> impl Strategy<Value = Document> {
        let genre = prop_oneof![
            Just(Genre::News),
            Just(Genre::Twitter),
            Just(Genre::YouTube),
            "[a-z]{1,6}".prop_map(Genre::Other),
        ];
        let label = prop_oneof![Just(None), Just(Some(Label::F)), Just(Some(Label::M))];
        (genre, label, "[^\\s]\\PC{0,40}[\\t\\n\\\\ ]{0,3}")
            .prop_map(|(g, l, t)| Document::new("tmp", g, l, t).unwrap())
    }

    proptest! {
        #[test]
        fn tsv_round_trips(docs in proptest::collection::vec(arb_doc(), 0..20)) {
            let docs: Vec<Document> = docs
                .into_iter()
                .enumerate()
                .map(|(i, mut d)| { d.id = format!("doc{i}"); d })
                .collect();
            let mut buf = Vec::new();
            write_tsv(&mut buf, &docs).unwrap();
            let back = read_tsv(buf.as_slice(), "rt").unwrap();
            prop_assert_eq!(back.into_documents(), docs);
        }
    }
}
