//! Word clusters from embedding space.
//!
//! Words are grouped with seeded k-means (k-means++ seeding, Lloyd updates).
//! Afterwards every singleton cluster and every cluster larger than
//! `max_size` is discarded; the words in them simply have no cluster.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EmbeddingTable, FeatureError};
use crate::fingerprint::Fingerprint;

pub const DEFAULT_MAX_CLUSTER_SIZE: usize = 500;

/// `vocabulary / 50`, but at least 10.
pub fn default_k(vocabulary: usize) -> usize {
    (vocabulary / 50).max(10)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub max_size: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Stop once no centroid moves further than this (Euclidean).
    pub tolerance: f64,
    /// Independent k-means++ starts; the lowest-inertia run wins.
    pub restarts: usize,
}

impl KMeansConfig {
    pub fn new(k: usize, max_size: usize, seed: u64) -> Self {
        Self {
            k,
            max_size,
            seed,
            max_iter: 100,
            tolerance: 1e-6,
            restarts: 3,
        }
    }
}

/// Surface word (lowercase) to cluster id, after size filtering.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClusterMap {
    assignment: BTreeMap<String, u32>,
    sizes: BTreeMap<u32, usize>,
}

impl ClusterMap {
    pub fn from_assignment(assignment: BTreeMap<String, u32>) -> Self {
        let mut sizes = BTreeMap::new();
        for &c in assignment.values() {
            *sizes.entry(c).or_insert(0) += 1;
        }
        Self { assignment, sizes }
    }

    pub fn get(&self, word: &str) -> Option<u32> {
        self.assignment.get(word).copied()
    }

    pub fn assignment(&self) -> &BTreeMap<String, u32> {
        &self.assignment
    }

    pub fn sizes(&self) -> &BTreeMap<u32, usize> {
        &self.sizes
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn fingerprint(&self) -> Fingerprint {
        let mut parts = vec![b"clusters-v1".to_vec()];
        for (w, c) in &self.assignment {
            parts.push(w.as_bytes().to_vec());
            parts.push(c.to_le_bytes().to_vec());
        }
        Fingerprint::of_parts(parts)
    }

    /// One `word \t cluster_id` line per word, sorted by word.
    pub fn write<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (word, c) in &self.assignment {
            writeln!(w, "{word}\t{c}")?;
        }
        Ok(())
    }

    pub fn read<R: Read>(reader: R) -> Result<Self, FeatureError> {
        let mut assignment = BTreeMap::new();
        for (i, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = || FeatureError::ClusterFile(format!("line {}: `{line}`", i + 1));
            let (word, id) = line.split_once('\t').ok_or_else(bad)?;
            let id: u32 = id.trim().parse().map_err(|_| bad())?;
            if word.is_empty() || assignment.insert(word.to_owned(), id).is_some() {
                return Err(bad());
            }
        }
        Ok(Self::from_assignment(assignment))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> io::Result<()> {
        self.write(io::BufWriter::new(File::create(path)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FeatureError> {
        Self::read(File::open(path)?)
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = sq_dist(point, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn seed_centroids(points: &[&[f64]], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centroids = vec![points[rng.gen_range(0..points.len())].to_vec()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.gen::<f64>() * total;
            let mut pick = d2.iter().rposition(|&d| d > 0.0).unwrap_or(0);
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 && r < d {
                    pick = i;
                    break;
                }
                r -= d;
            }
            pick
        } else {
            rng.gen_range(0..points.len())
        };
        let c = points[pick].to_vec();
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

/// One k-means run; returns (assignment, inertia).
fn lloyd(points: &[&[f64]], cfg: &KMeansConfig, rng: &mut ChaCha8Rng) -> (Vec<usize>, f64) {
    let dim = points[0].len();
    let mut centroids = seed_centroids(points, cfg.k, rng);
    let mut assign = vec![0usize; points.len()];
    for _ in 0..cfg.max_iter {
        for (a, p) in assign.iter_mut().zip(points) {
            *a = nearest(p, &centroids).0;
        }
        let mut sums = vec![vec![0.0; dim]; cfg.k];
        let mut counts = vec![0usize; cfg.k];
        for (&a, p) in assign.iter().zip(points) {
            counts[a] += 1;
            for (s, x) in sums[a].iter_mut().zip(p.iter()) {
                *s += x;
            }
        }
        let mut moved = 0.0f64;
        for ((c, s), &n) in centroids.iter_mut().zip(sums).zip(&counts) {
            if n == 0 {
                continue; // empty cluster keeps its centroid
            }
            let next: Vec<f64> = s.into_iter().map(|x| x / n as f64).collect();
            moved = moved.max(sq_dist(c, &next).sqrt());
            *c = next;
        }
        if moved < cfg.tolerance {
            break;
        }
    }
    let mut inertia = 0.0;
    for (a, p) in assign.iter_mut().zip(points) {
        let (j, d) = nearest(p, &centroids);
        *a = j;
        inertia += d;
    }
    (assign, inertia)
}

/// Clusters the embedding vocabulary and applies the size filter.
///
/// Words are lowercased first; when two entries share a lowercase form the
/// first one in table order is kept.
pub fn build_clusters(emb: &EmbeddingTable, cfg: &KMeansConfig) -> Result<ClusterMap, FeatureError> {
    let mut seen = HashSet::new();
    let mut words = Vec::new();
    let mut points = Vec::new();
    for (w, v) in emb.iter() {
        let lower = w.to_lowercase();
        if seen.insert(lower.clone()) {
            words.push(lower);
            points.push(v);
        }
    }
    if cfg.k == 0 || points.len() < cfg.k {
        return Err(FeatureError::TooFewWords {
            words: points.len(),
            k: cfg.k,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<(Vec<usize>, f64)> = None;
    for _ in 0..cfg.restarts.max(1) {
        let run = lloyd(&points, cfg, &mut rng);
        if best.as_ref().is_none_or(|b| run.1 < b.1) {
            best = Some(run);
        }
    }
    let (assign, _) = best.expect("at least one restart");

    let mut sizes = vec![0usize; cfg.k];
    for &a in &assign {
        sizes[a] += 1;
    }
    let assignment = words
        .into_iter()
        .zip(assign)
        .filter(|&(_, a)| sizes[a] >= 2 && sizes[a] <= cfg.max_size)
        .map(|(w, a)| (w, a as u32))
        .collect();
    Ok(ClusterMap::from_assignment(assignment))
}

/// Replaces every token whose lowercase form has a cluster by `CL_<id>`.
pub fn map_to_clusters<S: AsRef<str>>(tokens: &[S], cm: &ClusterMap) -> Vec<String> {
    tokens
        .iter()
        .map(|t| {
            let t = t.as_ref();
            match cm.get(&t.to_lowercase()) {
                Some(id) => format!("CL_{id}"),
                None => t.to_owned(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(points: &[(&str, [f64; 2])]) -> EmbeddingTable {
        EmbeddingTable::new(2, points.iter().map(|(w, p)| (w.to_string(), p.to_vec()))).unwrap()
    }

    #[test]
    fn planted_pairs_are_recovered() {
        let emb = table(&[
            ("a1", [0.0, 0.0]),
            ("a2", [0.1, 0.0]),
            ("b1", [10.0, 10.0]),
            ("b2", [10.0, 10.1]),
            ("c1", [-10.0, 10.0]),
            ("c2", [-10.1, 10.0]),
        ]);
        for seed in 0..20 {
            let cm = build_clusters(&emb, &KMeansConfig::new(3, 500, seed)).unwrap();
            assert_eq!(cm.assignment().len(), 6);
            for pair in ["a", "b", "c"] {
                assert_eq!(cm.get(&format!("{pair}1")), cm.get(&format!("{pair}2")));
            }
            assert_ne!(cm.get("a1"), cm.get("b1"));
            assert_ne!(cm.get("a1"), cm.get("c1"));
            assert_ne!(cm.get("b1"), cm.get("c1"));
        }
    }

    #[test]
    fn k_equal_to_vocabulary_leaves_nothing() {
        let emb = table(&[("a", [0.0, 0.0]), ("b", [1.0, 0.0]), ("c", [0.0, 1.0])]);
        let cm = build_clusters(&emb, &KMeansConfig::new(3, 500, 1)).unwrap();
        assert!(cm.is_empty());
    }

    #[test]
    fn size_filter_drops_singletons_and_oversized() {
        // planted clusters of sizes 1, 3 and 6 with max_size 5
        let mut pts = vec![("solo".to_string(), vec![100.0, 100.0])];
        for i in 0..3 {
            pts.push((format!("t{i}"), vec![0.0, i as f64 * 0.01]));
        }
        for i in 0..6 {
            pts.push((format!("s{i}"), vec![-50.0, i as f64 * 0.01]));
        }
        let emb = EmbeddingTable::new(2, pts).unwrap();
        let cm = build_clusters(&emb, &KMeansConfig::new(3, 5, 4)).unwrap();
        assert_eq!(cm.assignment().len(), 3);
        assert!(cm.assignment().keys().all(|w| w.starts_with('t')));
    }

    #[test]
    fn too_few_words() {
        let emb = table(&[("a", [0.0, 0.0])]);
        assert!(matches!(
            build_clusters(&emb, &KMeansConfig::new(2, 500, 0)),
            Err(FeatureError::TooFewWords { words: 1, k: 2 })
        ));
    }

    #[test]
    fn case_variants_collapse() {
        let emb = table(&[("Hond", [0.0, 0.0]), ("hond", [5.0, 5.0]), ("kat", [0.0, 0.1])]);
        let cm = build_clusters(&emb, &KMeansConfig::new(1, 500, 0)).unwrap();
        assert_eq!(cm.assignment().len(), 2);
    }

    #[test]
    fn mapping_examples() {
        let empty = ClusterMap::default();
        assert_eq!(map_to_clusters(&["de", "hond"], &empty), ["de", "hond"]);
        let cm = ClusterMap::from_assignment(BTreeMap::from([("hond".to_string(), 7)]));
        assert_eq!(map_to_clusters(&["de", "hond"], &cm), ["de", "CL_7"]);
        assert_eq!(map_to_clusters(&["Hond"], &cm), ["CL_7"]);
    }

    #[test]
    fn tsv_round_trip() {
        let cm = ClusterMap::from_assignment(BTreeMap::from([
            ("hond".to_string(), 7),
            ("kat".to_string(), 7),
            ("d'r".to_string(), 2),
        ]));
        let mut buf = Vec::new();
        cm.write(&mut buf).unwrap();
        let back = ClusterMap::read(buf.as_slice()).unwrap();
        assert_eq!(back, cm);
        assert_eq!(back.fingerprint(), cm.fingerprint());
        assert_eq!(back.sizes()[&7], 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn surviving_clusters_respect_bounds(
            pts in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 5..80),
            k in 1usize..12,
            max_size in 1usize..20,
            seed in any::<u64>(),
        ) {
            let entries = pts.iter().enumerate().map(|(i, &(x, y))| (format!("w{i}"), vec![x, y]));
            let emb = EmbeddingTable::new(2, entries).unwrap();
            prop_assume!(k <= emb.len());
            let cfg = KMeansConfig::new(k, max_size, seed);
            let cm = build_clusters(&emb, &cfg).unwrap();
            for &size in cm.sizes().values() {
                prop_assert!(size >= 2 && size <= max_size);
            }
            prop_assert_eq!(build_clusters(&emb, &cfg).unwrap(), cm);
        }
    }
}
