//! Interpolated modified Kneser-Ney estimation, stored in backoff form.
//!
//! For an n-gram `h w` of length k with adjusted count `a` (raw count at the
//! top order, number of distinct left extensions below):
//!
//! ```text
//! p_k(w | h) = max(a(h w) - D_k(a), 0) / A(h) + gamma(h) * p_{k-1}(w | h')
//! gamma(h)   = (D_k1 * N1(h) + D_k2 * N2(h) + D_k3 * N3+(h)) / A(h)
//! p_0(w)     = 1 / (|V| + 1)
//! ```
//!
//! where `A(h)` sums the adjusted counts of the stored words after `h`,
//! `N_i(h)` counts those words with adjusted count `i` (`3+` for three or
//! more), `h'` drops the first token of `h`, and `V` is the unigram inventory
//! (which includes `</s>`). The extra `+1` in `p_0` is the `<unk>` slot.
//!
//! Discounts per order come from the count-of-counts `n1..n4`:
//! `Y = n1 / (n1 + 2 n2)`, `D1 = 1 - 2Y n2/n1`, `D2 = 2 - 3Y n3/n2`,
//! `D3+ = 3 - 4Y n4/n3`. If any `n_i` is zero or any `D_i` falls outside
//! `(0, i)`, the order uses `0.75` for all three.
//!
//! The stored probability of an n-gram is the full interpolated value, and the
//! backoff weight of a context is `gamma(h)`, so ordinary backoff lookup
//! reproduces the interpolated distribution exactly.

use std::collections::{BTreeSet, HashMap};

use super::counts::CountTable;
use super::vocab::{Vocab, BOS, EOS, UNK};
use super::LmError;
use crate::textproc::Sentence;

pub const FALLBACK_DISCOUNT: f64 = 0.75;

/// Log10 probability written for context-only entries such as `<s>`.
pub const CONTEXT_ONLY_LOGPROB: f64 = -99.0;

/// Modified Kneser-Ney discounts for one order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discounts {
    pub d1: f64,
    pub d2: f64,
    pub d3_plus: f64,
}

impl Discounts {
    pub fn fallback() -> Self {
        Self {
            d1: FALLBACK_DISCOUNT,
            d2: FALLBACK_DISCOUNT,
            d3_plus: FALLBACK_DISCOUNT,
        }
    }

    pub fn from_count_of_counts(coc: [u64; 4]) -> Self {
        if coc.contains(&0) {
            return Self::fallback();
        }
        let [n1, n2, n3, n4] = coc.map(|n| n as f64);
        let y = n1 / (n1 + 2.0 * n2);
        let d = Self {
            d1: 1.0 - 2.0 * y * n2 / n1,
            d2: 2.0 - 3.0 * y * n3 / n2,
            d3_plus: 3.0 - 4.0 * y * n4 / n3,
        };
        let ok = [d.d1, d.d2, d.d3_plus]
            .iter()
            .zip([1.0, 2.0, 3.0])
            .all(|(&di, cap)| di > 0.0 && di < cap);
        if ok {
            d
        } else {
            Self::fallback()
        }
    }

    pub fn for_count(&self, adjusted: u64) -> f64 {
        match adjusted {
            0 => 0.0,
            1 => self.d1,
            2 => self.d2,
            _ => self.d3_plus,
        }
    }
}

/// A backoff n-gram language model over log10 probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct NGramLM {
    pub(crate) order: usize,
    pub(crate) vocab: Vocab,
    /// `probs[k-1]`: n-grams of length k → log10 p(w | h)
    pub(crate) probs: Vec<HashMap<Vec<u32>, f64>>,
    /// context → log10 backoff weight; absent means 0
    pub(crate) backoffs: HashMap<Vec<u32>, f64>,
}

/// Estimates an interpolated modified Kneser-Ney model from counts.
///
/// Orders above 1 may be empty (for example after pruning a small corpus);
/// such a model simply backs off. An empty unigram order is an error.
pub fn estimate_kn(ct: &CountTable) -> Result<NGramLM, LmError> {
    let order = ct.order();
    if ct.grams(1).is_empty() {
        return Err(LmError::DegenerateCounts(1));
    }
    let mut lm = NGramLM {
        order,
        vocab: ct.vocab().clone(),
        probs: vec![HashMap::new(); order],
        backoffs: HashMap::new(),
    };

    for k in 1..=order {
        let discounts = Discounts::from_count_of_counts(ct.count_of_counts(k));

        // per context: total adjusted count and N1, N2, N3+
        let mut ctx_stats: HashMap<&[u32], (u64, [u64; 3])> = HashMap::new();
        for (gram, stats) in ct.grams(k) {
            let a = ct.adjusted(k, stats);
            let e = ctx_stats.entry(&gram[..k - 1]).or_default();
            e.0 += a;
            match a {
                0 => {}
                1 => e.1[0] += 1,
                2 => e.1[1] += 1,
                _ => e.1[2] += 1,
            }
        }
        let gamma = |total: u64, n: [u64; 3]| -> f64 {
            (discounts.d1 * n[0] as f64 + discounts.d2 * n[1] as f64 + discounts.d3_plus * n[2] as f64)
                / total as f64
        };

        let mut level = HashMap::with_capacity(ct.grams(k).len() + 1);
        let uniform = 1.0 / (ct.grams(1).len() + 1) as f64;
        for (gram, stats) in ct.grams(k) {
            let (total, n) = ctx_stats[&gram[..k - 1]];
            let a = ct.adjusted(k, stats) as f64;
            let own = (a - discounts.for_count(a as u64)).max(0.0) / total as f64;
            let lower = if k == 1 {
                uniform
            } else {
                10f64.powf(lm.log_prob_ids(&gram[1..k - 1], gram[k - 1]))
            };
            level.insert(gram.clone(), (own + gamma(total, n) * lower).log10());
        }
        if k == 1 {
            let (total, n) = ctx_stats[&[][..]];
            level.insert(vec![UNK], (gamma(total, n) * uniform).log10());
        }
        lm.probs[k - 1] = level;

        if k > 1 {
            for (ctx, (total, n)) in ctx_stats {
                lm.backoffs.insert(ctx.to_vec(), gamma(total, n).log10());
            }
        }
    }
    Ok(lm)
}

impl NGramLM {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    /// Number of stored n-grams of length `k` (including `<unk>` at k = 1).
    pub fn len_at(&self, k: usize) -> usize {
        self.probs[k - 1].len()
    }

    /// Stored n-grams of length `k` as token strings.
    pub fn grams_at(&self, k: usize) -> BTreeSet<Vec<String>> {
        self.probs[k - 1]
            .keys()
            .map(|g| g.iter().map(|&id| self.vocab.word(id).to_owned()).collect())
            .collect()
    }

    /// Words that can be predicted: the unigram inventory, `</s>` and `<unk>`.
    pub fn predictable(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self.probs[0].keys().map(|g| g[0]).collect();
        ids.sort_unstable();
        ids
    }

    /// Every context with a stored continuation.
    pub fn contexts(&self) -> Vec<Vec<u32>> {
        let mut out: BTreeSet<Vec<u32>> = BTreeSet::new();
        out.insert(Vec::new());
        out.extend(self.backoffs.keys().cloned());
        for level in &self.probs[1..] {
            out.extend(level.keys().map(|g| g[..g.len() - 1].to_vec()));
        }
        out.into_iter().collect()
    }

    pub(crate) fn log_prob_ids(&self, history: &[u32], word: u32) -> f64 {
        let keep = history.len().min(self.order - 1);
        let history = &history[history.len() - keep..];
        let mut buf = Vec::with_capacity(keep + 1);
        buf.extend_from_slice(history);
        buf.push(word);
        let mut acc = 0.0;
        for start in 0..=keep {
            let gram = &buf[start..];
            if let Some(&p) = self.probs[gram.len() - 1].get(gram) {
                return acc + p;
            }
            if let Some(&b) = self.backoffs.get(&buf[start..keep]) {
                acc += b;
            }
        }
        // unreachable for a valid model: `<unk>` is always a stored unigram
        acc + self.probs[0].get(&[UNK][..]).copied().unwrap_or(f64::NEG_INFINITY)
    }

    /// log10 p(word | history), where history is given as token strings
    /// (`<s>` allowed). Unknown tokens are scored as `<unk>`.
    pub fn log_prob(&self, history: &[&str], word: &str) -> f64 {
        let hist: Vec<u32> = history
            .iter()
            .map(|t| self.vocab.lookup(t).unwrap_or(UNK))
            .collect();
        self.log_prob_ids(&hist, self.vocab.id_or_unk(word))
    }

    /// Total log10 probability of the sentence, including `</s>`.
    pub fn score_sentence(&self, s: &Sentence) -> f64 {
        self.score_tokens(s.tokens())
    }

    pub fn score_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> f64 {
        let mut padded = vec![BOS; self.order - 1];
        padded.extend(tokens.iter().map(|t| self.vocab.id_or_unk(t.as_ref())));
        padded.push(EOS);
        let mut total = 0.0;
        for pos in self.order - 1..padded.len() {
            total += self.log_prob_ids(&padded[pos + 1 - self.order..pos], padded[pos]);
        }
        total
    }

    /// Sum of p(w | ctx) over every predictable word, for checking that the
    /// stored model is normalized.
    pub fn context_mass(&self, ctx: &[u32]) -> f64 {
        self.predictable()
            .into_iter()
            .map(|w| 10f64.powf(self.log_prob_ids(ctx, w)))
            .sum()
    }

    /// Largest deviation from 1 over all stored contexts.
    pub fn max_normalization_error(&self) -> f64 {
        self.contexts()
            .iter()
            .map(|c| (self.context_mass(c) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub(crate) fn context_only(gram: &[u32]) -> bool {
        gram.last() == Some(&BOS)
    }
}
