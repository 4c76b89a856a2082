//! Brute-force interpolated modified Kneser-Ney, written from the textbook
//! definitions and sharing no code with the library.
//!
//! Every quantity is recomputed from the padded sentences on demand:
//! raw counts, continuation counts, count-of-counts, discounts, and the
//! recursive interpolation. Pruning drops n-grams (length ≥ 2) seen once
//! and anything whose prefix was dropped; continuation counts and
//! count-of-counts still come from the unpruned data.

use std::collections::{BTreeMap, BTreeSet};

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";

type Gram = Vec<String>;

pub struct Oracle {
    pub order: usize,
    /// surviving n-grams by length, with raw counts
    kept: Vec<BTreeMap<Gram, u64>>,
    /// all n-grams by length, with raw counts
    all: Vec<BTreeMap<Gram, u64>>,
    /// the unigram inventory (includes `</s>`)
    pub vocab: BTreeSet<String>,
}

impl Oracle {
    pub fn new(sentences: &[Vec<String>], order: usize, prune: bool) -> Self {
        let mut all: Vec<BTreeMap<Gram, u64>> = vec![BTreeMap::new(); order + 1];
        for s in sentences {
            let mut padded: Vec<String> = vec![BOS.to_string(); order - 1];
            padded.extend(s.iter().cloned());
            padded.push(EOS.to_string());
            for len in 1..=order {
                for start in 0..=padded.len() - len {
                    let g = &padded[start..start + len];
                    if g[len - 1] == BOS {
                        continue;
                    }
                    *all[len].entry(g.to_vec()).or_insert(0) += 1;
                }
            }
        }
        let vocab = all[1].keys().map(|g| g[0].clone()).collect();
        let mut kept = all.clone();
        if prune {
            for level in kept.iter_mut().take(order + 1).skip(2) {
                level.retain(|_, c| *c >= 2);
            }
            for len in 2..=order {
                let lower = kept[len - 1].clone();
                kept[len].retain(|g, _| g[len - 2] == BOS || lower.contains_key(&g[..len - 1]));
            }
        }
        Oracle { order, kept, all, vocab }
    }

    /// Raw count at the top order, number of distinct one-word left
    /// extensions below it.
    fn adjusted(&self, g: &[String]) -> u64 {
        let len = g.len();
        if len == self.order {
            return self.all[len].get(g).copied().unwrap_or(0);
        }
        self.all[len + 1].keys().filter(|e| &e[1..] == g).count() as u64
    }

    pub fn discounts(&self, len: usize) -> [f64; 3] {
        let mut n = [0f64; 5];
        for g in self.all[len].keys() {
            let a = self.adjusted(g);
            if (1..=4).contains(&a) {
                n[a as usize] += 1.0;
            }
        }
        if n[1..=4].contains(&0.0) {
            return [0.75; 3];
        }
        let y = n[1] / (n[1] + 2.0 * n[2]);
        let d = [
            1.0 - 2.0 * y * n[2] / n[1],
            2.0 - 3.0 * y * n[3] / n[2],
            3.0 - 4.0 * y * n[4] / n[3],
        ];
        if d[0] <= 0.0 || d[0] >= 1.0 || d[1] <= 0.0 || d[1] >= 2.0 || d[2] <= 0.0 || d[2] >= 3.0 {
            return [0.75; 3];
        }
        d
    }

    fn discount(d: &[f64; 3], a: u64) -> f64 {
        match a {
            0 => 0.0,
            1 => d[0],
            2 => d[1],
            _ => d[2],
        }
    }

    /// P(w | history); unknown words are scored as `<unk>`.
    pub fn prob(&self, history: &[&str], w: &str) -> f64 {
        let keep = history.len().min(self.order - 1);
        let h: Vec<String> = history[history.len() - keep..]
            .iter()
            .map(|t| {
                if *t == BOS || self.vocab.contains(*t) {
                    t.to_string()
                } else {
                    UNK.to_string()
                }
            })
            .collect();
        let w = if self.vocab.contains(w) { w } else { UNK };
        self.interp(&h, w)
    }

    fn interp(&self, h: &[String], w: &str) -> f64 {
        let len = h.len() + 1;
        let lower = if h.is_empty() {
            1.0 / (self.vocab.len() + 1) as f64
        } else {
            self.interp(&h[1..], w)
        };
        let followers: Vec<(&Gram, u64)> = self.kept[len]
            .keys()
            .filter(|g| &g[..len - 1] == h)
            .map(|g| (g, self.adjusted(g)))
            .collect();
        if followers.is_empty() {
            return lower;
        }
        let d = self.discounts(len);
        let total: u64 = followers.iter().map(|(_, a)| a).sum();
        let mass: f64 = followers.iter().map(|(_, a)| Self::discount(&d, *a)).sum();
        let own = followers
            .iter()
            .find(|(g, _)| g[len - 1] == w)
            .map(|(_, a)| (*a as f64 - Self::discount(&d, *a)).max(0.0) / total as f64)
            .unwrap_or(0.0);
        own + mass / total as f64 * lower
    }

    /// Every history the model has a stored continuation for, including the empty one.
    pub fn contexts(&self) -> Vec<Gram> {
        let mut out = BTreeSet::new();
        out.insert(Vec::new());
        for len in 2..=self.order {
            for g in self.kept[len].keys() {
                out.insert(g[..len - 1].to_vec());
            }
        }
        out.into_iter().collect()
    }

    /// log10 probability of a sentence including `</s>`.
    pub fn score(&self, tokens: &[String]) -> f64 {
        let mut hist: Vec<String> = vec![BOS.to_string(); self.order - 1];
        let mut total = 0.0;
        for t in tokens.iter().map(String::as_str).chain([EOS]) {
            let h: Vec<&str> = hist.iter().map(String::as_str).collect();
            total += self.prob(&h, t).log10();
            hist.push(t.to_string());
        }
        total
    }
}
