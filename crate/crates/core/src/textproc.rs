//! Tokenization and sentence segmentation.
//!
//! Everything downstream (features, language models) goes through these two
//! functions so that training and scoring always agree on token boundaries.
//!
//! Rules:
//!
//! * text is split on Unicode whitespace;
//! * inside each chunk, a leading and a trailing run of non-alphanumeric
//!   characters is split off as its own token (`"blij."` becomes `"blij"`,
//!   `"."`), while anything in between stays attached, so word-internal
//!   apostrophes survive (`"d'r"`);
//! * lowercasing is optional and applied last.

/// Tokenizer switches. The default keeps case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct TokenizerConfig {
    pub lowercase: bool,
}

impl TokenizerConfig {
    pub fn lowercased() -> Self {
        Self { lowercase: true }
    }
}

/// A non-empty run of whitespace-free tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    tokens: Vec<String>,
}

impl Sentence {
    /// Returns `None` if `tokens` is empty or any token is empty or contains
    /// whitespace.
    pub fn new(tokens: Vec<String>) -> Option<Self> {
        let ok = !tokens.is_empty()
            && tokens
                .iter()
                .all(|t| !t.is_empty() && !t.chars().any(char::is_whitespace));
        ok.then_some(Self { tokens })
    }

    /// Builds a sentence from whitespace-separated words. Test helper, mostly.
    pub fn from_words(words: &str) -> Option<Self> {
        Self::new(words.split_whitespace().map(str::to_owned).collect())
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn into_tokens(self) -> Vec<String> {
        self.tokens
    }
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric()
}

fn push_chunk(chunk: &str, cfg: TokenizerConfig, out: &mut Vec<String>) {
    let emit = |s: &str, out: &mut Vec<String>| {
        if !s.is_empty() {
            out.push(if cfg.lowercase {
                s.to_lowercase()
            } else {
                s.to_owned()
            });
        }
    };

    let lead_end = chunk
        .char_indices()
        .find(|&(_, c)| !is_punct(c))
        .map(|(i, _)| i);
    let Some(lead_end) = lead_end else {
        // all punctuation: one token
        emit(chunk, out);
        return;
    };
    let trail_start = chunk
        .char_indices()
        .rev()
        .find(|&(_, c)| !is_punct(c))
        .map(|(i, c)| i + c.len_utf8())
        .unwrap_or(chunk.len());

    emit(&chunk[..lead_end], out);
    emit(&chunk[lead_end..trail_start], out);
    emit(&chunk[trail_start..], out);
}

/// Splits `text` into tokens. Total and deterministic; empty input gives an
/// empty list.
pub fn tokenize(text: &str, cfg: TokenizerConfig) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        push_chunk(chunk, cfg, &mut out);
    }
    out
}

const TERMINATORS: [char; 4] = ['.', '!', '?', '…'];

/// Splits `text` at sentence terminators (`. ! ? …`) that are followed by
/// whitespace or the end of the text, then tokenizes each piece.
///
/// There is no abbreviation handling. Text without any terminator comes back
/// as a single sentence; empty pieces are dropped.
pub fn segment_sentences(text: &str, cfg: TokenizerConfig) -> Vec<Sentence> {
    let mut sentences = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if !TERMINATORS.contains(&c) {
            continue;
        }
        let at_boundary = match chars.peek() {
            None => true,
            Some(&(_, next)) => next.is_whitespace(),
        };
        if at_boundary {
            let end = i + c.len_utf8();
            if let Some(s) = Sentence::new(tokenize(&text[start..end], cfg)) {
                sentences.push(s);
            }
            start = end;
        }
    }
    if let Some(s) = Sentence::new(tokenize(&text[start..], cfg)) {
        sentences.push(s);
    }
    sentences
}

/// Collapses every whitespace run to a single space and trims both ends.
pub fn collapse_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for (i, w) in text.split_whitespace().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(w);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(text: &str) -> Vec<String> {
        tokenize(text, TokenizerConfig::default())
    }

    #[test]
    fn splits_trailing_punctuation() {
        assert_eq!(toks("Ik ben blij."), ["Ik", "ben", "blij", "."]);
    }

    #[test]
    fn keeps_internal_apostrophe() {
        assert_eq!(toks("d'r"), ["d'r"]);
        assert_eq!(toks("(d'r)"), ["(", "d'r", ")"]);
    }

    #[test]
    fn lowercase_is_applied() {
        let got = tokenize("Ja, nee!", TokenizerConfig::lowercased());
        assert_eq!(got, ["ja", ",", "nee", "!"]);
    }

    #[test]
    fn punctuation_runs_stay_together() {
        assert_eq!(toks("echt?!"), ["echt", "?!"]);
        assert_eq!(toks("..."), ["..."]);
        assert_eq!(toks("\"hoi\""), ["\"", "hoi", "\""]);
    }

    #[test]
    fn empty_text() {
        assert!(toks("").is_empty());
        assert!(toks("  \n\t").is_empty());
    }

    #[test]
    fn two_sentences() {
        let s = segment_sentences("Hallo. Dag!", TokenizerConfig::default());
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].tokens(), ["Hallo", "."]);
        assert_eq!(s[1].tokens(), ["Dag", "!"]);
    }

    #[test]
    fn no_terminator_is_one_sentence() {
        let s = segment_sentences("geen terminator", TokenizerConfig::default());
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].len(), 2);
    }

    #[test]
    fn empty_text_has_no_sentences() {
        assert!(segment_sentences("", TokenizerConfig::default()).is_empty());
        assert!(segment_sentences("   ", TokenizerConfig::default()).is_empty());
    }

    #[test]
    fn terminator_inside_token_is_not_a_boundary() {
        let s = segment_sentences("zie 3.5 en www.nl ok", TokenizerConfig::default());
        assert_eq!(s.len(), 1);
        let s = segment_sentences("Wat?! Echt… ja", TokenizerConfig::default());
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn sentence_rejects_bad_tokens() {
        assert!(Sentence::new(vec![]).is_none());
        assert!(Sentence::new(vec!["".into()]).is_none());
        assert!(Sentence::new(vec!["a b".into()]).is_none());
    }

    proptest! {
        #[test]
        fn tokens_reproduce_non_whitespace(text in "\\PC{0,60}") {
            let joined: String = toks(&text).concat();
            let expected: String = text.chars().filter(|c| !c.is_whitespace()).collect();
            prop_assert_eq!(joined, expected);
        }

        #[test]
        fn lowercase_commutes(text in "\\PC{0,60}") {
            let lower = tokenize(&text, TokenizerConfig::lowercased());
            let mapped: Vec<String> = toks(&text).iter().map(|t| t.to_lowercase()).collect();
            prop_assert_eq!(lower, mapped);
        }

        #[test]
        fn segmentation_preserves_tokens(text in "[a-zA-Z .!?…,']{0,80}") {
            let sents = segment_sentences(&text, TokenizerConfig::default());
            prop_assert!(sents.iter().all(|s| !s.tokens().is_empty()));
            let flat: Vec<String> = sents.into_iter().flat_map(Sentence::into_tokens).collect();
            prop_assert_eq!(flat, toks(&text));
        }
    }
}
