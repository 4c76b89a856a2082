use super::counts::{count_ngrams, prune_singletons};
use super::kn::{estimate_kn, NGramLM};
use super::LmError;
use crate::corpus::{Document, Label};
use crate::textproc::{segment_sentences, Sentence, TokenizerConfig};

pub const DEFAULT_ORDER: usize = 5;

/// Training switches for one per-label language model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LmConfig {
    pub order: usize,
    pub prune: bool,
    pub tokenizer: TokenizerConfig,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self {
            order: DEFAULT_ORDER,
            prune: false,
            tokenizer: TokenizerConfig::default(),
        }
    }
}

/// Counts, optionally prunes, and estimates a model in one go.
pub fn train_lm(sentences: &[Sentence], order: usize, prune: bool) -> Result<NGramLM, LmError> {
    let counts = count_ngrams(sentences, order)?;
    let counts = if prune { prune_singletons(&counts) } else { counts };
    estimate_kn(&counts)
}

/// Two language models, one per label; a paragraph goes to the label whose
/// model gives the higher mean sentence score.
#[derive(Debug, Clone, PartialEq)]
pub struct DualLMClassifier {
    /// model for [`Label::F`]
    pub lm_pos: NGramLM,
    /// model for [`Label::M`]
    pub lm_neg: NGramLM,
    pub tie_label: Label,
    pub tokenizer: TokenizerConfig,
    /// Divide each sentence score by its number of predicted positions.
    pub length_normalize: bool,
}

impl DualLMClassifier {
    pub fn new(lm_pos: NGramLM, lm_neg: NGramLM, tokenizer: TokenizerConfig) -> Result<Self, LmError> {
        if lm_pos.order() != lm_neg.order() {
            return Err(LmError::OrderMismatch(lm_pos.order(), lm_neg.order()));
        }
        Ok(Self {
            lm_pos,
            lm_neg,
            tie_label: Label::F,
            tokenizer,
            length_normalize: false,
        })
    }

    /// Splits labelled documents by label, segments them into sentences and
    /// trains one model per side.
    pub fn train(docs: &[Document], cfg: &LmConfig) -> Result<Self, LmError> {
        let mut sides: [Vec<Sentence>; 2] = [Vec::new(), Vec::new()];
        for d in docs {
            let side = match d.label {
                Some(Label::F) => 0,
                Some(Label::M) => 1,
                None => continue,
            };
            sides[side].extend(segment_sentences(&d.text, cfg.tokenizer));
        }
        let [f, m] = sides;
        if f.is_empty() || m.is_empty() {
            return Err(LmError::SingleClassInput);
        }
        Self::new(
            train_lm(&f, cfg.order, cfg.prune)?,
            train_lm(&m, cfg.order, cfg.prune)?,
            cfg.tokenizer,
        )
    }

    pub fn swapped(&self) -> Self {
        Self {
            lm_pos: self.lm_neg.clone(),
            lm_neg: self.lm_pos.clone(),
            ..self.clone()
        }
    }

    fn sentence_score(&self, lm: &NGramLM, s: &Sentence) -> f64 {
        let total = lm.score_sentence(s);
        if self.length_normalize {
            total / (s.len() + 1) as f64
        } else {
            total
        }
    }

    /// Mean sentence scores under the F and M models.
    pub fn paragraph_scores(&self, text: &str) -> Result<(f64, f64), LmError> {
        let sentences = segment_sentences(text, self.tokenizer);
        if sentences.is_empty() {
            return Err(LmError::EmptyParagraph);
        }
        let n = sentences.len() as f64;
        let mut pos = 0.0;
        let mut neg = 0.0;
        for s in &sentences {
            pos += self.sentence_score(&self.lm_pos, s);
            neg += self.sentence_score(&self.lm_neg, s);
        }
        Ok((pos / n, neg / n))
    }

    /// Label and margin (mean F score minus mean M score).
    pub fn classify(&self, text: &str) -> Result<(Label, f64), LmError> {
        let (pos, neg) = self.paragraph_scores(text)?;
        let margin = pos - neg;
        let label = if margin > 0.0 {
            Label::F
        } else if margin < 0.0 {
            Label::M
        } else {
            self.tie_label
        };
        Ok((label, margin))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Genre;

    fn repeat_lm(word: &str) -> NGramLM {
        let s = Sentence::from_words(&format!("{word} {word} {word}")).unwrap();
        train_lm(&vec![s; 5], 3, false).unwrap()
    }

    #[test]
    fn identical_models_tie() {
        let lm = repeat_lm("ik");
        let clf = DualLMClassifier::new(lm.clone(), lm, TokenizerConfig::default()).unwrap();
        assert_eq!(clf.classify("ik ik.").unwrap(), (Label::F, 0.0));
        let mut clf = clf;
        clf.tie_label = Label::M;
        assert_eq!(clf.classify("ja").unwrap().0, Label::M);
    }

    #[test]
    fn picks_matching_model() {
        let clf = DualLMClassifier::new(repeat_lm("ik"), repeat_lm("ja"), TokenizerConfig::default()).unwrap();
        let (label, margin) = clf.classify("ik ik.").unwrap();
        assert_eq!(label, Label::F);
        assert!(margin > 0.0);
        let (label2, margin2) = clf.swapped().classify("ik ik.").unwrap();
        assert_eq!(label2, Label::M);
        assert_eq!(margin2, -margin);
    }

    #[test]
    fn empty_paragraph() {
        let lm = repeat_lm("ik");
        let clf = DualLMClassifier::new(lm.clone(), lm, TokenizerConfig::default()).unwrap();
        assert!(matches!(clf.classify("  "), Err(LmError::EmptyParagraph)));
    }

    #[test]
    fn order_mismatch() {
        let s = Sentence::from_words("a b").unwrap();
        let a = train_lm(std::slice::from_ref(&s), 2, false).unwrap();
        let b = train_lm(&[s], 3, false).unwrap();
        assert!(DualLMClassifier::new(a, b, TokenizerConfig::default()).is_err());
    }

    #[test]
    fn training_needs_both_labels() {
        let d = Document::new("1", Genre::News, Some(Label::F), "ik ben blij.").unwrap();
        assert!(matches!(
            DualLMClassifier::train(&[d], &LmConfig::default()),
            Err(LmError::SingleClassInput)
        ));
    }
}
