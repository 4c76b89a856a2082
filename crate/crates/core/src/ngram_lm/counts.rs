use std::collections::HashMap;

use super::vocab::{Vocab, BOS, EOS};
use super::LmError;
use crate::textproc::Sentence;

pub const MAX_ORDER: usize = 8;

/// Raw occurrence count plus the number of distinct left extensions seen in
/// the unpruned data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GramStats {
    pub count: u64,
    pub left_extensions: u64,
}

/// Per-order n-gram statistics for one training corpus.
///
/// Each sentence is padded with `order - 1` begin sentinels and one end
/// sentinel. Only n-grams whose last token is not the begin sentinel are
/// counted, so `<s>` is never a predicted word.
///
/// The count-of-counts used for discount estimation are taken on the adjusted
/// counts (raw counts at the top order, left-extension counts below) before
/// any pruning and survive it.
#[derive(Debug, Clone, PartialEq)]
pub struct CountTable {
    order: usize,
    vocab: Vocab,
    grams: Vec<HashMap<Vec<u32>, GramStats>>,
    count_of_counts: Vec<[u64; 4]>,
    pruned: bool,
}

impl CountTable {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    pub fn is_pruned(&self) -> bool {
        self.pruned
    }

    /// N-grams of length `k` (1-based).
    pub fn grams(&self, k: usize) -> &HashMap<Vec<u32>, GramStats> {
        &self.grams[k - 1]
    }

    pub fn count_of_counts(&self, k: usize) -> [u64; 4] {
        self.count_of_counts[k - 1]
    }

    /// Raw count looked up by token strings.
    pub fn count(&self, gram: &[&str]) -> u64 {
        if gram.is_empty() || gram.len() > self.order {
            return 0;
        }
        let ids: Option<Vec<u32>> = gram.iter().map(|t| self.vocab.lookup(t)).collect();
        ids.and_then(|ids| self.grams[ids.len() - 1].get(&ids).map(|s| s.count))
            .unwrap_or(0)
    }

    /// Adjusted count used by Kneser-Ney estimation.
    pub fn adjusted(&self, k: usize, stats: &GramStats) -> u64 {
        if k == self.order {
            stats.count
        } else {
            stats.left_extensions
        }
    }

    #[cfg(test)]
    pub(crate) fn clear_order_for_test(&mut self, k: usize) {
        self.grams[k - 1].clear();
    }

    pub fn total_grams(&self) -> usize {
        self.grams.iter().map(HashMap::len).sum()
    }
}

fn ends_with_bos(gram: &[u32]) -> bool {
    gram.last() == Some(&BOS)
}

/// Counts every k-gram, k = 1..=order, over the padded sentences.
pub fn count_ngrams(sentences: &[Sentence], order: usize) -> Result<CountTable, LmError> {
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(LmError::OrderOutOfRange(order));
    }
    if sentences.is_empty() {
        return Err(LmError::EmptyInput);
    }
    let mut vocab = Vocab::new();
    let mut grams: Vec<HashMap<Vec<u32>, GramStats>> = vec![HashMap::new(); order];
    let mut padded = Vec::new();
    for s in sentences {
        padded.clear();
        padded.resize(order - 1, BOS);
        for t in s.tokens() {
            padded.push(vocab.intern(t)?);
        }
        padded.push(EOS);
        for end in order - 1..padded.len() {
            for k in 1..=order {
                let gram = &padded[end + 1 - k..=end];
                grams[k - 1].entry(gram.to_vec()).or_default().count += 1;
            }
        }
    }

    for k in 1..order {
        let (lower, higher) = grams.split_at_mut(k);
        for gram in higher[0].keys() {
            if let Some(s) = lower[k - 1].get_mut(&gram[1..]) {
                s.left_extensions += 1;
            }
        }
    }

    let mut table = CountTable {
        order,
        vocab,
        grams,
        count_of_counts: vec![[0; 4]; order],
        pruned: false,
    };
    for k in 1..=order {
        let mut coc = [0u64; 4];
        for stats in table.grams[k - 1].values() {
            let a = table.adjusted(k, stats);
            if (1..=4).contains(&a) {
                coc[a as usize - 1] += 1;
            }
        }
        table.count_of_counts[k - 1] = coc;
    }
    Ok(table)
}

/// Drops every n-gram of length ≥ 2 seen exactly once, then anything whose
/// prefix is gone. Unigrams are kept.
pub fn prune_singletons(ct: &CountTable) -> CountTable {
    let mut out = ct.clone();
    out.pruned = true;
    for k in 2..=out.order {
        out.grams[k - 1].retain(|_, s| s.count > 1);
    }
    for k in 2..=out.order {
        let (lower, higher) = out.grams.split_at_mut(k - 1);
        let prefixes = &lower[k - 2];
        higher[0].retain(|gram, _| {
            let prefix = &gram[..k - 1];
            ends_with_bos(prefix) || prefixes.contains_key(prefix)
        });
    }
    out
}
