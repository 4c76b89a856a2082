//! Feature configuration, fitted feature index and sparse vectors.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use indexmap::IndexMap;

use super::clusters::{map_to_clusters, ClusterMap};
use super::extract::{
    diminutive_count, extract_char_ngrams, extract_word_ngrams, lexicon_count, Counts,
    DiminutiveRule, Lexicon,
};
use super::FeatureError;
use crate::corpus::Document;
use crate::fingerprint::Fingerprint;
use crate::textproc::{tokenize, TokenizerConfig};

/// A feature family and its namespace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureFamily {
    /// word unigrams, `w1:`
    Unigrams,
    /// character trigrams, `c3:`
    CharTrigrams,
    /// unigrams after cluster substitution, `cl:`
    Clusters,
    /// male lexicon count, `lexM`
    MaleLexicon,
    /// female lexicon count, `lexF`
    FemaleLexicon,
    /// diminutive count, `dim`
    Diminutives,
}

impl FeatureFamily {
    pub const ALL: [FeatureFamily; 6] = [
        FeatureFamily::Unigrams,
        FeatureFamily::CharTrigrams,
        FeatureFamily::Clusters,
        FeatureFamily::MaleLexicon,
        FeatureFamily::FemaleLexicon,
        FeatureFamily::Diminutives,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            FeatureFamily::Unigrams => "w1",
            FeatureFamily::CharTrigrams => "c3",
            FeatureFamily::Clusters => "cl",
            FeatureFamily::MaleLexicon => "lexM",
            FeatureFamily::FemaleLexicon => "lexF",
            FeatureFamily::Diminutives => "dim",
        }
    }
}

impl fmt::Display for FeatureFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for FeatureFamily {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FeatureFamily::ALL
            .into_iter()
            .find(|f| f.tag().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| FeatureError::Config(format!("unknown feature family `{s}`")))
    }
}

/// Which families are active plus the resources they need.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureConfig {
    pub families: BTreeSet<FeatureFamily>,
    pub tokenizer: TokenizerConfig,
    pub male: Lexicon,
    pub female: Lexicon,
    pub diminutives: DiminutiveRule,
}

impl FeatureConfig {
    pub fn new(families: impl IntoIterator<Item = FeatureFamily>) -> Self {
        Self {
            families: families.into_iter().collect(),
            tokenizer: TokenizerConfig::default(),
            male: Lexicon::male(),
            female: Lexicon::female(),
            diminutives: DiminutiveRule::default(),
        }
    }

    /// Clusters, male-lexicon counts and character trigrams.
    pub fn best_trad() -> Self {
        use FeatureFamily::*;
        Self::new([Clusters, MaleLexicon, CharTrigrams])
    }

    /// A preset name (`best-trad`, `unigrams`, `char3`, `clusters`, `lexicons`,
    /// `all`) or a comma-separated family list such as `w1,c3,lexF`.
    pub fn parse(spec: &str) -> Result<Self, FeatureError> {
        use FeatureFamily::*;
        Ok(match spec.trim() {
            "best-trad" => Self::best_trad(),
            "unigrams" => Self::new([Unigrams]),
            "char3" => Self::new([CharTrigrams]),
            "clusters" => Self::new([Clusters]),
            "lexicons" => Self::new([MaleLexicon, FemaleLexicon, Diminutives]),
            "all" => Self::new(FeatureFamily::ALL),
            list => {
                let fams = list
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(str::parse)
                    .collect::<Result<BTreeSet<_>, _>>()?;
                if fams.is_empty() {
                    return Err(FeatureError::Config("no feature families".into()));
                }
                Self::new(fams)
            }
        })
    }

    pub fn has(&self, f: FeatureFamily) -> bool {
        self.families.contains(&f)
    }

    pub fn needs_clusters(&self) -> bool {
        self.has(FeatureFamily::Clusters)
    }

    pub fn families_string(&self) -> String {
        self.families
            .iter()
            .map(|f| f.tag())
            .collect::<Vec<_>>()
            .join(",")
    }

    fn header_lines(&self) -> Vec<(String, String)> {
        let join = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(" ");
        vec![
            ("families".into(), self.families_string()),
            ("lowercase".into(), self.tokenizer.lowercase.to_string()),
            ("lexM".into(), join(self.male.words())),
            ("lexF".into(), join(self.female.words())),
            ("dim.suffixes".into(), self.diminutives.suffixes.join(" ")),
            ("dim.min_len".into(), self.diminutives.min_len.to_string()),
            ("dim.exclusions".into(), join(&self.diminutives.exclusions)),
        ]
    }
}

/// Feature name → count for one document, namespaced, in first-seen order.
/// Enabled scalar families are always present, even at zero.
fn raw_features(doc: &Document, cfg: &FeatureConfig, cm: Option<&ClusterMap>) -> Counts {
    use FeatureFamily::*;
    let tokens = tokenize(&doc.text, cfg.tokenizer);
    let mut out = Counts::new();
    let add_all = |prefix: &str, counts: Counts, out: &mut Counts| {
        for (k, v) in counts {
            *out.entry(format!("{prefix}:{k}")).or_insert(0) += v;
        }
    };
    if cfg.has(Unigrams) {
        add_all("w1", extract_word_ngrams(&tokens, 1), &mut out);
    }
    if cfg.has(CharTrigrams) {
        let text = if cfg.tokenizer.lowercase {
            doc.text.to_lowercase()
        } else {
            doc.text.clone()
        };
        add_all("c3", extract_char_ngrams(&text, 3), &mut out);
    }
    if cfg.has(Clusters) {
        let empty = ClusterMap::default();
        let mapped = map_to_clusters(&tokens, cm.unwrap_or(&empty));
        add_all("cl", extract_word_ngrams(&mapped, 1), &mut out);
    }
    if cfg.has(MaleLexicon) {
        out.insert("lexM".into(), lexicon_count(&tokens, &cfg.male));
    }
    if cfg.has(FemaleLexicon) {
        out.insert("lexF".into(), lexicon_count(&tokens, &cfg.female));
    }
    if cfg.has(Diminutives) {
        out.insert("dim".into(), diminutive_count(&tokens, &cfg.diminutives));
    }
    out
}

/// Sparse feature values over a fitted [`FeatureSpace`], sorted by column,
/// with no explicit zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    entries: Vec<(u32, f64)>,
    space: Fingerprint,
}

impl SparseVector {
    /// Sorts, merges duplicate columns by addition and drops zeros.
    pub fn from_pairs(space: Fingerprint, pairs: impl IntoIterator<Item = (u32, f64)>) -> Self {
        let mut entries: Vec<(u32, f64)> = pairs.into_iter().collect();
        entries.sort_by_key(|&(i, _)| i);
        let mut merged: Vec<(u32, f64)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += v,
                _ => merged.push((i, v)),
            }
        }
        merged.retain(|&(_, v)| v != 0.0);
        Self {
            entries: merged,
            space,
        }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn space(&self) -> Fingerprint {
        self.space
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, col: u32) -> f64 {
        self.entries
            .binary_search_by_key(&col, |&(i, _)| i)
            .map(|k| self.entries[k].1)
            .unwrap_or(0.0)
    }

    pub fn max_column(&self) -> Option<u32> {
        self.entries.last().map(|&(i, _)| i)
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(i, v)| dense[i as usize] * v)
            .sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::from_pairs(self.space, self.entries.iter().map(|&(i, v)| (i, v * c)))
    }
}

/// Frozen feature-name → column mapping fitted on training documents.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSpace {
    config: FeatureConfig,
    index: IndexMap<String, u32>,
    clusters: Option<Fingerprint>,
    fingerprint: Fingerprint,
}

const SPACE_MAGIC: &str = "xgenre-features 1";

impl FeatureSpace {
    /// Enumerates every feature observed in `train`, assigning columns in
    /// first-seen order.
    pub fn fit(
        train: &[Document],
        config: FeatureConfig,
        cm: Option<&ClusterMap>,
    ) -> Result<Self, FeatureError> {
        if train.is_empty() {
            return Err(FeatureError::EmptyInput);
        }
        check_clusters(&config, cm)?;
        let mut index = IndexMap::new();
        for doc in train {
            for name in raw_features(doc, &config, cm).into_keys() {
                let next = index.len() as u32;
                index.entry(name).or_insert(next);
            }
        }
        Ok(Self::assemble(config, index, cm.map(ClusterMap::fingerprint)))
    }

    fn assemble(
        config: FeatureConfig,
        index: IndexMap<String, u32>,
        clusters: Option<Fingerprint>,
    ) -> Self {
        let mut parts: Vec<String> = vec![SPACE_MAGIC.into()];
        for (k, v) in config.header_lines() {
            parts.push(format!("{k}={v}"));
        }
        parts.push(clusters.map(|c| c.to_string()).unwrap_or_default());
        parts.extend(index.keys().cloned());
        let fingerprint = Fingerprint::of_parts(&parts);
        Self {
            config,
            index,
            clusters,
            fingerprint,
        }
    }

    pub fn config(&self) -> &FeatureConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn name(&self, col: u32) -> Option<&str> {
        self.index.get_index(col as usize).map(|(k, _)| k.as_str())
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.fingerprint
    }

    pub fn cluster_fingerprint(&self) -> Option<Fingerprint> {
        self.clusters
    }

    /// Raw counts for every feature known to the space; unseen features are
    /// dropped.
    pub fn vectorize(
        &self,
        doc: &Document,
        cm: Option<&ClusterMap>,
    ) -> Result<SparseVector, FeatureError> {
        check_clusters(&self.config, cm)?;
        if cm.map(ClusterMap::fingerprint) != self.clusters {
            return Err(FeatureError::ConfigMismatch(
                "cluster map differs from the one used at fit time".into(),
            ));
        }
        let pairs = raw_features(doc, &self.config, cm)
            .into_iter()
            .filter_map(|(name, c)| self.column(&name).map(|col| (col, c as f64)));
        Ok(SparseVector::from_pairs(self.fingerprint, pairs))
    }

    pub fn vectorize_all(
        &self,
        docs: &[Document],
        cm: Option<&ClusterMap>,
    ) -> Result<Vec<SparseVector>, FeatureError> {
        docs.iter().map(|d| self.vectorize(d, cm)).collect()
    }

    pub fn write<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{SPACE_MAGIC}")?;
        for (k, v) in self.config.header_lines() {
            writeln!(w, "{k}={v}")?;
        }
        let clusters = self.clusters.map(|c| c.to_string()).unwrap_or("none".into());
        writeln!(w, "clusters={clusters}")?;
        writeln!(w, "fingerprint={}", self.fingerprint)?;
        writeln!(w, "features={}", self.index.len())?;
        for name in self.index.keys() {
            writeln!(w, "{name}")?;
        }
        Ok(())
    }

    pub fn read(text: &str) -> Result<Self, FeatureError> {
        let corrupt = |m: &str| FeatureError::CorruptFile(m.to_owned());
        let mut lines = text.lines();
        if lines.next() != Some(SPACE_MAGIC) {
            return Err(corrupt("missing or unsupported version line"));
        }
        let mut header = std::collections::HashMap::new();
        for line in lines.by_ref() {
            let (k, v) = line.split_once('=').ok_or_else(|| corrupt(line))?;
            header.insert(k.to_owned(), v.to_owned());
            if k == "features" {
                break;
            }
        }
        let get = |k: &str| header.get(k).cloned().ok_or_else(|| corrupt(&format!("missing `{k}`")));
        let words = |s: String| s.split(' ').filter(|w| !w.is_empty()).map(str::to_owned).collect::<Vec<_>>();

        let families = FeatureConfig::parse(&get("families")?)?.families;
        let config = FeatureConfig {
            families,
            tokenizer: TokenizerConfig {
                lowercase: get("lowercase")?.parse().map_err(|_| corrupt("lowercase"))?,
            },
            male: Lexicon::new("male", words(get("lexM")?))?,
            female: Lexicon::new("female", words(get("lexF")?))?,
            diminutives: DiminutiveRule {
                suffixes: words(get("dim.suffixes")?),
                min_len: get("dim.min_len")?.parse().map_err(|_| corrupt("dim.min_len"))?,
                exclusions: words(get("dim.exclusions")?).into_iter().collect(),
            },
        };
        let clusters = match get("clusters")?.as_str() {
            "none" => None,
            fp => Some(fp.parse().map_err(|e: String| corrupt(&e))?),
        };
        let n: usize = get("features")?.parse().map_err(|_| corrupt("features"))?;
        let mut index = IndexMap::with_capacity(n);
        for name in lines {
            let next = index.len() as u32;
            if index.insert(name.to_owned(), next).is_some() {
                return Err(corrupt(&format!("duplicate feature `{name}`")));
            }
        }
        if index.len() != n {
            return Err(corrupt("feature count mismatch"));
        }
        let space = Self::assemble(config, index, clusters);
        let stored: Fingerprint = get("fingerprint")?.parse().map_err(|e: String| corrupt(&e))?;
        if stored != space.fingerprint {
            return Err(corrupt("fingerprint mismatch"));
        }
        Ok(space)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> io::Result<()> {
        self.write(io::BufWriter::new(fs::File::create(path)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FeatureError> {
        Self::read(&fs::read_to_string(path)?)
    }
}

fn check_clusters(config: &FeatureConfig, cm: Option<&ClusterMap>) -> Result<(), FeatureError> {
    match (config.needs_clusters(), cm.is_some()) {
        (true, false) => Err(FeatureError::ConfigMismatch(
            "cluster features enabled but no cluster map given".into(),
        )),
        (false, true) => Err(FeatureError::ConfigMismatch(
            "cluster map given but cluster features disabled".into(),
        )),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Genre, Label};
    use std::collections::BTreeMap;

    fn doc(id: &str, text: &str) -> Document {
        Document::new(id, Genre::News, Some(Label::F), text).unwrap()
    }

    #[test]
    fn scalar_only_space_has_three_columns() {
        use FeatureFamily::*;
        let cfg = FeatureConfig::new([MaleLexicon, FemaleLexicon, Diminutives]);
        let fs = FeatureSpace::fit(&[doc("a", "hallo")], cfg, None).unwrap();
        assert_eq!(fs.len(), 3);
    }

    #[test]
    fn unigram_index_is_first_seen() {
        let fs = FeatureSpace::fit(&[doc("a", "a b")], FeatureConfig::parse("w1").unwrap(), None).unwrap();
        assert_eq!(fs.column("w1:a"), Some(0));
        assert_eq!(fs.column("w1:b"), Some(1));
        assert_eq!(fs.len(), 2);
    }

    #[test]
    fn refit_is_identical() {
        let docs = [doc("a", "Ik ben blij, ja."), doc("b", "nee hoor")];
        let a = FeatureSpace::fit(&docs, FeatureConfig::parse("all").unwrap(), Some(&ClusterMap::default())).unwrap();
        let b = FeatureSpace::fit(&docs, FeatureConfig::parse("all").unwrap(), Some(&ClusterMap::default())).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.fingerprint(), b.fingerprint());
    }

    #[test]
    fn unseen_words_are_dropped() {
        let fs = FeatureSpace::fit(&[doc("a", "a b")], FeatureConfig::parse("w1").unwrap(), None).unwrap();
        assert!(fs.vectorize(&doc("z", "x y z"), None).unwrap().is_empty());
        let v = fs.vectorize(&doc("z", "a a"), None).unwrap();
        assert_eq!(v.entries(), &[(0, 2.0)]);
    }

    #[test]
    fn lexicon_column() {
        let fs = FeatureSpace::fit(&[doc("a", "x")], FeatureConfig::parse("lexM").unwrap(), None).unwrap();
        let v = fs.vectorize(&doc("b", "Ja nee ja"), None).unwrap();
        assert_eq!(v.get(fs.column("lexM").unwrap()), 3.0);
    }

    #[test]
    fn cluster_features_use_cluster_ids() {
        let cm = ClusterMap::from_assignment(BTreeMap::from([
            ("hond".to_string(), 7),
            ("kat".to_string(), 7),
        ]));
        let fs = FeatureSpace::fit(&[doc("a", "de Hond")], FeatureConfig::parse("cl").unwrap(), Some(&cm)).unwrap();
        assert_eq!(fs.column("cl:de"), Some(0));
        assert_eq!(fs.column("cl:CL_7"), Some(1));
        let v = fs.vectorize(&doc("b", "kat kat"), Some(&cm)).unwrap();
        assert_eq!(v.entries(), &[(1, 2.0)]);
    }

    #[test]
    fn cluster_mismatch_is_an_error() {
        let cm = ClusterMap::from_assignment(BTreeMap::from([("hond".to_string(), 7)]));
        let cfg = FeatureConfig::parse("cl").unwrap();
        assert!(matches!(
            FeatureSpace::fit(&[doc("a", "x")], cfg.clone(), None),
            Err(FeatureError::ConfigMismatch(_))
        ));
        let fs = FeatureSpace::fit(&[doc("a", "x")], cfg, Some(&cm)).unwrap();
        let other = ClusterMap::from_assignment(BTreeMap::from([("kat".to_string(), 1)]));
        assert!(matches!(
            fs.vectorize(&doc("b", "x"), Some(&other)),
            Err(FeatureError::ConfigMismatch(_))
        ));
        assert!(matches!(
            fs.vectorize(&doc("b", "x"), None),
            Err(FeatureError::ConfigMismatch(_))
        ));
    }

    #[test]
    fn empty_training_set() {
        assert!(matches!(
            FeatureSpace::fit(&[], FeatureConfig::parse("w1").unwrap(), None),
            Err(FeatureError::EmptyInput)
        ));
    }

    #[test]
    fn presets_and_lists() {
        use FeatureFamily::*;
        assert_eq!(
            FeatureConfig::parse("best-trad").unwrap().families,
            BTreeSet::from([Clusters, MaleLexicon, CharTrigrams])
        );
        assert_eq!(
            FeatureConfig::parse("w1, lexF").unwrap().families,
            BTreeSet::from([Unigrams, FemaleLexicon])
        );
        assert!(FeatureConfig::parse("w2").is_err());
        assert!(FeatureConfig::parse("").is_err());
    }

    #[test]
    fn persistence_round_trip() {
        let docs = [doc("a", "Ik ben blij met mijn huisje, ja."), doc("b", "nee\tdat is lelijk")];
        let fs = FeatureSpace::fit(&docs, FeatureConfig::parse("all").unwrap(), Some(&ClusterMap::default())).unwrap();
        let mut buf = Vec::new();
        fs.write(&mut buf).unwrap();
        let back = FeatureSpace::read(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, fs);
        let tampered = String::from_utf8(buf).unwrap().replace("w1:blij", "w1:blij2");
        assert!(matches!(FeatureSpace::read(&tampered), Err(FeatureError::CorruptFile(_))));
    }

    #[test]
    fn sparse_vector_normalizes_pairs() {
        let fp = Fingerprint::default();
        let v = SparseVector::from_pairs(fp, [(3, 1.0), (1, 2.0), (3, -1.0), (0, 0.0)]);
        assert_eq!(v.entries(), &[(1, 2.0)]);
    }
}
