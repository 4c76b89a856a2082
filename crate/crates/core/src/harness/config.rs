//! Run configuration and its flat `key=value` file form.
//!
//! ```text
//! # comments and blank lines are ignored
//! corpus=data/corpus.tsv
//! scenario=cross-genre:news
//! model=logreg
//! features=best-trad
//! embeddings=data/vectors.txt
//! seed=7
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::HarnessError;
use crate::corpus::{Corpus, Fraction, Genre, Label, ScenarioSpec};
use crate::features::{FeatureConfig, DEFAULT_MAX_CLUSTER_SIZE};
use crate::linear::TrainConfig;
use crate::ngram_lm::{LmConfig, DEFAULT_ORDER};
use crate::textproc::TokenizerConfig;

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "XGENRE_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Logreg,
    Nb,
    DualLm,
    Ensemble,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Logreg => "logreg",
            ModelKind::Nb => "nb",
            ModelKind::DualLm => "dual-lm",
            ModelKind::Ensemble => "ensemble",
        })
    }
}

impl FromStr for ModelKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "logreg" => Ok(ModelKind::Logreg),
            "nb" => Ok(ModelKind::Nb),
            "dual-lm" => Ok(ModelKind::DualLm),
            "ensemble" => Ok(ModelKind::Ensemble),
            other => Err(HarnessError::Config(format!("unknown model `{other}`"))),
        }
    }
}

/// Which scenarios to run. Cross-genre scenarios train on every other
/// labelled genre present in the corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScenarioChoice {
    /// In-domain and cross-genre for every genre in the corpus.
    All,
    InDomain(Genre),
    CrossGenre(Genre),
}

impl fmt::Display for ScenarioChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioChoice::All => f.write_str("all"),
            ScenarioChoice::InDomain(g) => write!(f, "in-domain:{g}"),
            ScenarioChoice::CrossGenre(g) => write!(f, "cross-genre:{g}"),
        }
    }
}

impl FromStr for ScenarioChoice {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "all" {
            return Ok(ScenarioChoice::All);
        }
        let bad = || HarnessError::Config(format!("bad scenario `{s}` (all | in-domain:<genre> | cross-genre:<genre>)"));
        let (mode, genre) = s.split_once(':').ok_or_else(bad)?;
        let genre: Genre = genre.parse().map_err(|_| bad())?;
        match mode {
            "in-domain" => Ok(ScenarioChoice::InDomain(genre)),
            "cross-genre" => Ok(ScenarioChoice::CrossGenre(genre)),
            _ => Err(bad()),
        }
    }
}

/// Per-stage seeds derived from one top-level seed by fixed offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Seeds {
    pub split: u64,
    pub cluster: u64,
    pub train: u64,
}

impl Seeds {
    pub fn derive(seed: u64) -> Self {
        Self {
            split: seed,
            cluster: seed.wrapping_add(1),
            train: seed.wrapping_add(2),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub scenario: ScenarioChoice,
    pub model: ModelKind,
    pub features: String,
    pub seed: u64,
    pub valid_fraction: Fraction,
    pub lm_order: usize,
    pub lm_prune: bool,
    pub length_normalize: bool,
    pub lowercase: bool,
    pub embeddings: Option<PathBuf>,
    pub clusters: Option<PathBuf>,
    /// Cluster count; defaults to `max(vocabulary / 50, 10)`.
    pub k: Option<usize>,
    pub max_cluster_size: usize,
    /// Directory of per-scenario external prediction files for ensembles.
    pub members: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub l2_lambda: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub nb_alpha: f64,
    pub positive_label: Label,
}

impl Default for RunConfig {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            corpus: None,
            scenario: ScenarioChoice::All,
            model: ModelKind::Logreg,
            features: "best-trad".into(),
            seed: 0,
            valid_fraction: Fraction::one_tenth(),
            lm_order: DEFAULT_ORDER,
            lm_prune: false,
            length_normalize: false,
            lowercase: false,
            embeddings: None,
            clusters: None,
            k: None,
            max_cluster_size: DEFAULT_MAX_CLUSTER_SIZE,
            members: None,
            out_dir: None,
            l2_lambda: t.l2_lambda,
            learning_rate: t.learning_rate,
            epochs: t.epochs,
            batch_size: t.batch_size,
            nb_alpha: 1.0,
            positive_label: Label::F,
        }
    }
}

fn parse_field<T: FromStr>(key: &str, value: &str) -> Result<T, HarnessError> {
    value
        .trim()
        .parse()
        .map_err(|_| HarnessError::Config(format!("bad value for `{key}`: `{value}`")))
}

fn opt_path(v: &str) -> Option<PathBuf> {
    let v = v.trim();
    (!v.is_empty()).then(|| PathBuf::from(v))
}

impl RunConfig {
    pub fn seeds(&self) -> Seeds {
        Seeds::derive(self.seed)
    }

    pub fn tokenizer(&self) -> TokenizerConfig {
        TokenizerConfig {
            lowercase: self.lowercase,
        }
    }

    pub fn feature_config(&self) -> Result<FeatureConfig, HarnessError> {
        let mut fc = FeatureConfig::parse(&self.features)?;
        fc.tokenizer = self.tokenizer();
        Ok(fc)
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            l2_lambda: self.l2_lambda,
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            batch_size: self.batch_size,
            seed: self.seeds().train,
        }
    }

    pub fn lm_config(&self) -> LmConfig {
        LmConfig {
            order: self.lm_order,
            prune: self.lm_prune,
            tokenizer: self.tokenizer(),
        }
    }

    fn uses_features(&self) -> bool {
        matches!(self.model, ModelKind::Logreg | ModelKind::Nb | ModelKind::Ensemble)
    }

    /// Cheap checks that must pass before any data is touched: option
    /// ranges, feature spec syntax, and existence of every referenced path.
    pub fn check(&self) -> Result<(), HarnessError> {
        if !(1..=crate::ngram_lm::MAX_ORDER).contains(&self.lm_order) {
            return Err(HarnessError::Config(format!("lm_order {} outside 1..=8", self.lm_order)));
        }
        if self.uses_features() {
            let fc = self.feature_config()?;
            if fc.needs_clusters() && self.clusters.is_none() && self.embeddings.is_none() {
                return Err(HarnessError::Config(
                    "cluster features need `clusters` or `embeddings`".into(),
                ));
            }
        }
        if self.k == Some(0) || self.max_cluster_size < 2 {
            return Err(HarnessError::Config("k must be positive and max_cluster_size at least 2".into()));
        }
        let paths = [&self.corpus, &self.embeddings, &self.clusters, &self.members];
        for p in paths.into_iter().flatten() {
            if !p.exists() {
                return Err(HarnessError::Config(format!("{} does not exist", p.display())));
            }
        }
        Ok(())
    }

    /// Expands [`RunConfig::scenario`] against the genres present in `corpus`.
    pub fn scenarios(&self, corpus: &Corpus) -> Result<Vec<ScenarioSpec>, HarnessError> {
        let genres: BTreeSet<Genre> = corpus
            .documents()
            .iter()
            .filter(|d| d.label.is_some())
            .map(|d| d.genre.clone())
            .collect();
        let seed = self.seeds().split;
        let in_domain = |g: &Genre| ScenarioSpec::in_domain(g.clone(), self.valid_fraction, seed);
        let cross = |g: &Genre| {
            let train = genres.iter().filter(|x| *x != g).cloned();
            let mut spec = ScenarioSpec::cross_genre(train, g.clone(), seed);
            spec.valid_fraction = self.valid_fraction;
            spec
        };
        let specs = match &self.scenario {
            ScenarioChoice::All => genres.iter().map(in_domain).chain(genres.iter().map(cross)).collect(),
            ScenarioChoice::InDomain(g) => vec![in_domain(g)],
            ScenarioChoice::CrossGenre(g) => vec![cross(g)],
        };
        for s in &specs {
            s.validate()?;
        }
        Ok(specs)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        let v = value.trim();
        match key.trim() {
            "corpus" => self.corpus = opt_path(v),
            "scenario" => self.scenario = v.parse()?,
            "model" => self.model = v.parse()?,
            "features" => self.features = v.to_string(),
            "seed" => self.seed = parse_field(key, v)?,
            "valid_fraction" => self.valid_fraction = parse_field(key, v)?,
            "lm_order" => self.lm_order = parse_field(key, v)?,
            "lm_prune" => self.lm_prune = parse_field(key, v)?,
            "length_normalize" => self.length_normalize = parse_field(key, v)?,
            "lowercase" => self.lowercase = parse_field(key, v)?,
            "embeddings" => self.embeddings = opt_path(v),
            "clusters" => self.clusters = opt_path(v),
            "k" => self.k = if v.is_empty() { None } else { Some(parse_field(key, v)?) },
            "max_cluster_size" => self.max_cluster_size = parse_field(key, v)?,
            "members" => self.members = opt_path(v),
            "out_dir" => self.out_dir = opt_path(v),
            "l2_lambda" => self.l2_lambda = parse_field(key, v)?,
            "learning_rate" => self.learning_rate = parse_field(key, v)?,
            "epochs" => self.epochs = parse_field(key, v)?,
            "batch_size" => self.batch_size = parse_field(key, v)?,
            "nb_alpha" => self.nb_alpha = parse_field(key, v)?,
            "positive_label" => self.positive_label = parse_field(key, v)?,
            other => return Err(HarnessError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<(), HarnessError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("line {}: expected key=value", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    pub fn to_text(&self) -> String {
        let p = |o: &Option<PathBuf>| o.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let lines = [
            ("corpus", p(&self.corpus)),
            ("scenario", self.scenario.to_string()),
            ("model", self.model.to_string()),
            ("features", self.features.clone()),
            ("seed", self.seed.to_string()),
            ("valid_fraction", self.valid_fraction.to_string()),
            ("lm_order", self.lm_order.to_string()),
            ("lm_prune", self.lm_prune.to_string()),
            ("length_normalize", self.length_normalize.to_string()),
            ("lowercase", self.lowercase.to_string()),
            ("embeddings", p(&self.embeddings)),
            ("clusters", p(&self.clusters)),
            ("k", self.k.map(|k| k.to_string()).unwrap_or_default()),
            ("max_cluster_size", self.max_cluster_size.to_string()),
            ("members", p(&self.members)),
            ("out_dir", p(&self.out_dir)),
            ("l2_lambda", self.l2_lambda.to_string()),
            ("learning_rate", self.learning_rate.to_string()),
            ("epochs", self.epochs.to_string()),
            ("batch_size", self.batch_size.to_string()),
            ("nb_alpha", self.nb_alpha.to_string()),
            ("positive_label", self.positive_label.to_string()),
        ];
        lines.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}
