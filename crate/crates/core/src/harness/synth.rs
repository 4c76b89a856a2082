//! Seeded synthetic corpora with a planted, genre-independent gender signal.
//!
//! Each label owns a small vocabulary shared by every genre; each genre owns
//! its own topic vocabulary; a common vocabulary is shared by everyone. A
//! fraction of each document's tokens comes from a label vocabulary (mostly
//! the author's own, sometimes the other one), so a model that picks up the
//! label words transfers across genres while genre words carry no signal.
//! Matching word embeddings put each vocabulary group around its own centre.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Document, Genre, Label};
use crate::features::EmbeddingTable;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub docs: usize,
    pub genres: Vec<Genre>,
    pub seed: u64,
    pub sentences: (usize, usize),
    pub sentence_len: (usize, usize),
    /// Probability that a token is a label word.
    pub signal_rate: f64,
    /// Probability that a label word comes from the other label.
    pub leak: f64,
    pub label_vocab: usize,
    pub genre_vocab: usize,
    pub common_vocab: usize,
    pub dim: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            docs: 2000,
            genres: vec![Genre::News, Genre::Twitter],
            seed: 0,
            sentences: (2, 4),
            sentence_len: (6, 12),
            signal_rate: 0.3,
            leak: 0.1,
            label_vocab: 40,
            genre_vocab: 150,
            common_vocab: 100,
            dim: 16,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthData {
    pub corpus: Corpus,
    pub embeddings: EmbeddingTable,
    /// `[F words, M words]`
    pub label_words: [Vec<String>; 2],
}

const ONSETS: [&str; 14] = ["b", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "v"];
const NUCLEI: [&str; 6] = ["a", "e", "i", "o", "u", "oe"];

fn fresh_words(rng: &mut ChaCha8Rng, n: usize, taken: &mut HashSet<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let syllables = rng.gen_range(2..=3);
        let w: String = (0..syllables)
            .map(|_| format!("{}{}", ONSETS.choose(rng).unwrap(), NUCLEI.choose(rng).unwrap()))
            .collect();
        if taken.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

pub fn generate(cfg: &SynthConfig) -> SynthData {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut taken = HashSet::new();
    let label_words = [
        fresh_words(&mut rng, cfg.label_vocab, &mut taken),
        fresh_words(&mut rng, cfg.label_vocab, &mut taken),
    ];
    let genre_words: Vec<Vec<String>> = cfg
        .genres
        .iter()
        .map(|_| fresh_words(&mut rng, cfg.genre_vocab, &mut taken))
        .collect();
    let common = fresh_words(&mut rng, cfg.common_vocab, &mut taken);

    let mut groups: Vec<&Vec<String>> = vec![&label_words[0], &label_words[1], &common];
    groups.extend(genre_words.iter());
    let mut entries = Vec::new();
    for group in groups {
        let centre: Vec<f64> = (0..cfg.dim).map(|_| rng.gen_range(-3.0..3.0)).collect();
        for w in group {
            let v = centre.iter().map(|c| c + rng.gen_range(-0.3..0.3)).collect();
            entries.push((w.clone(), v));
        }
    }
    let embeddings = EmbeddingTable::new(cfg.dim, entries).expect("generated embeddings are well formed");

    let mut docs = Vec::with_capacity(cfg.docs);
    for i in 0..cfg.docs {
        let g = i % cfg.genres.len();
        let label = if rng.gen_bool(0.5) { Label::F } else { Label::M };
        let own = usize::from(label == Label::M);
        let n_sent = rng.gen_range(cfg.sentences.0..=cfg.sentences.1);
        let mut text = Vec::new();
        for _ in 0..n_sent {
            let len = rng.gen_range(cfg.sentence_len.0..=cfg.sentence_len.1);
            let mut words: Vec<&str> = (0..len)
                .map(|_| {
                    let r: f64 = rng.gen();
                    let pool = if r < cfg.signal_rate {
                        let side = if rng.gen_bool(cfg.leak) { 1 - own } else { own };
                        &label_words[side]
                    } else if r < cfg.signal_rate + (1.0 - cfg.signal_rate) / 2.0 {
                        &genre_words[g]
                    } else {
                        &common
                    };
                    pool.choose(&mut rng).unwrap().as_str()
                })
                .collect();
            words.push(".");
            text.push(words.join(" "));
        }
        let doc = Document::new(format!("d{i:05}"), cfg.genres[g].clone(), Some(label), text.join(" "))
            .expect("generated documents are valid");
        docs.push(doc);
    }
    let corpus = Corpus::new(docs, "synthetic").expect("generated ids are unique");
    SynthData {
        corpus,
        embeddings,
        label_words,
    }
}
