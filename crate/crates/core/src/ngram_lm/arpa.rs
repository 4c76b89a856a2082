//! ARPA-layout model files.
//!
//! ```text
//! xgenre-lm 1
//! \data\
//! ngram 1=5
//! ngram 2=7
//!
//! \1-grams:
//! -0.7781513	</s>	-0.30103
//! -99	<s>	-0.2218487
//! ...
//!
//! \2-grams:
//! -0.4771213	<s> a
//! ...
//!
//! \end\
//! ```
//!
//! Every line below a block header is `log10prob TAB n-gram TAB log10backoff`;
//! the backoff column is present on all orders but the highest. Contexts that
//! are not themselves predictable (`<s>`, `<s> <s>`, ...) carry the
//! conventional `-99` probability. Floats are written in shortest round-trip
//! form, so reading a file back reproduces every score bit for bit.

#![allow(clippy::tabs_in_doc_comments)]

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use super::kn::{NGramLM, CONTEXT_ONLY_LOGPROB};
use super::vocab::{Vocab, BOS};
use super::LmError;

const MAGIC: &str = "xgenre-lm 1";

impl NGramLM {
    pub fn to_arpa(&self) -> String {
        let mut blocks: Vec<Vec<(Vec<u32>, f64)>> = vec![Vec::new(); self.order];
        for (k, level) in self.probs.iter().enumerate() {
            blocks[k].extend(level.iter().map(|(g, &p)| (g.clone(), p)));
        }
        for ctx in self.backoffs.keys() {
            if Self::context_only(ctx) {
                blocks[ctx.len() - 1].push((ctx.clone(), CONTEXT_ONLY_LOGPROB));
            }
        }
        let words = |g: &[u32]| -> Vec<&str> { g.iter().map(|&id| self.vocab.word(id)).collect() };
        for block in &mut blocks {
            block.sort_by(|a, b| words(&a.0).cmp(&words(&b.0)));
        }

        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "\\data\\");
        for (k, block) in blocks.iter().enumerate() {
            let _ = writeln!(out, "ngram {}={}", k + 1, block.len());
        }
        for (k, block) in blocks.iter().enumerate() {
            let _ = writeln!(out, "\n\\{}-grams:", k + 1);
            for (gram, p) in block {
                let text = words(gram).join(" ");
                if k + 1 < self.order {
                    let b = self.backoffs.get(gram).copied().unwrap_or(0.0);
                    let _ = writeln!(out, "{p}\t{text}\t{b}");
                } else {
                    let _ = writeln!(out, "{p}\t{text}");
                }
            }
        }
        let _ = writeln!(out, "\n\\end\\");
        out
    }

    pub fn from_arpa(text: &str) -> Result<NGramLM, LmError> {
        let corrupt = |m: String| LmError::CorruptModelFile(m);
        let mut lines = text.lines().map(str::trim_end).filter(|l| !l.is_empty());
        if lines.next() != Some(MAGIC) {
            return Err(corrupt("missing or unsupported version line".into()));
        }
        if lines.next() != Some("\\data\\") {
            return Err(corrupt("missing \\data\\ section".into()));
        }

        let mut declared = Vec::new();
        let mut line = lines.next();
        while let Some(l) = line {
            let Some(rest) = l.strip_prefix("ngram ") else { break };
            let (k, n) = rest
                .split_once('=')
                .ok_or_else(|| corrupt(format!("bad count line `{l}`")))?;
            let k: usize = k.parse().map_err(|_| corrupt(format!("bad order in `{l}`")))?;
            let n: usize = n.parse().map_err(|_| corrupt(format!("bad count in `{l}`")))?;
            if k != declared.len() + 1 {
                return Err(corrupt(format!("orders out of sequence at `{l}`")));
            }
            declared.push(n);
            line = lines.next();
        }
        let order = declared.len();
        if order == 0 || order > super::MAX_ORDER {
            return Err(corrupt(format!("unsupported order {order}")));
        }

        let mut vocab = Vocab::new();
        let mut probs = vec![HashMap::new(); order];
        let mut backoffs = HashMap::new();
        for (k, &n) in declared.iter().enumerate() {
            let header = format!("\\{}-grams:", k + 1);
            if line != Some(header.as_str()) {
                return Err(corrupt(format!("expected `{header}`")));
            }
            for _ in 0..n {
                let l = lines
                    .next()
                    .ok_or_else(|| corrupt(format!("truncated {}-gram block", k + 1)))?;
                let fields: Vec<&str> = l.split('\t').collect();
                let want = if k + 1 < order { 3 } else { 2 };
                if fields.len() != want {
                    return Err(corrupt(format!("bad entry `{l}`")));
                }
                let p: f64 = fields[0]
                    .parse()
                    .map_err(|_| corrupt(format!("bad probability in `{l}`")))?;
                let gram: Vec<u32> = fields[1].split(' ').map(|t| vocab.intern_any(t)).collect();
                if gram.len() != k + 1 {
                    return Err(corrupt(format!("wrong n-gram length in `{l}`")));
                }
                if want == 3 {
                    let b: f64 = fields[2]
                        .parse()
                        .map_err(|_| corrupt(format!("bad backoff in `{l}`")))?;
                    if b != 0.0 || NGramLM::context_only(&gram) {
                        backoffs.insert(gram.clone(), b);
                    }
                }
                if !(NGramLM::context_only(&gram) && p == CONTEXT_ONLY_LOGPROB) {
                    if gram.last() == Some(&BOS) {
                        return Err(corrupt(format!("`<s>` predicted in `{l}`")));
                    }
                    probs[k].insert(gram, p);
                }
            }
            line = lines.next();
        }
        if line != Some("\\end\\") {
            return Err(corrupt("missing \\end\\".into()));
        }
        Ok(NGramLM {
            order,
            vocab,
            probs,
            backoffs,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> io::Result<()> {
        fs::write(path, self.to_arpa())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<NGramLM, LmError> {
        Self::from_arpa(&fs::read_to_string(path)?)
    }
}
