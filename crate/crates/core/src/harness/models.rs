//! Trained single models and their on-disk directory layout.
//!
//! A model directory holds `manifest.txt` (`xgenre-model 1` plus `kind=`
//! and switches) and, depending on the kind, `features.txt`, `weights.txt`,
//! `clusters.tsv`, `f.arpa` and `m.arpa`.

use std::fs;
use std::path::Path;

use super::config::{ModelKind, RunConfig};
use super::HarnessError;
use crate::corpus::{Document, Label};
use crate::features::{ClusterMap, FeatureSpace, SparseVector};
use crate::fingerprint::Fingerprint;
use crate::linear::{LinearModel, NBModel};
use crate::ngram_lm::{DualLMClassifier, NGramLM};
use crate::textproc::TokenizerConfig;

const MANIFEST_MAGIC: &str = "xgenre-model 1";

#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Linear {
        space: FeatureSpace,
        model: LinearModel,
        clusters: Option<ClusterMap>,
    },
    NaiveBayes {
        space: FeatureSpace,
        model: NBModel,
        clusters: Option<ClusterMap>,
    },
    DualLm(DualLMClassifier),
}

fn labels_of(docs: &[Document]) -> Result<Vec<Label>, HarnessError> {
    docs.iter()
        .map(|d| {
            d.label
                .ok_or_else(|| HarnessError::Data(format!("training document `{}` has no label", d.id)))
        })
        .collect()
}

impl TrainedModel {
    /// Fits `kind` on `train` only. `clusters` is required when the feature
    /// preset uses cluster features.
    pub fn train(
        kind: ModelKind,
        train: &[Document],
        cfg: &RunConfig,
        clusters: Option<&ClusterMap>,
    ) -> Result<Self, HarnessError> {
        match kind {
            ModelKind::Logreg | ModelKind::Nb => {
                let fc = cfg.feature_config()?;
                let clusters = if fc.needs_clusters() { clusters.cloned() } else { None };
                let space = FeatureSpace::fit(train, fc, clusters.as_ref())?;
                let xs = space.vectorize_all(train, clusters.as_ref())?;
                let ys = labels_of(train)?;
                Ok(if kind == ModelKind::Logreg {
                    let model = LinearModel::train(&xs, &ys, space.len(), &cfg.train_config())?;
                    TrainedModel::Linear { space, model, clusters }
                } else {
                    let model = NBModel::train(&xs, &ys, space.len(), cfg.nb_alpha)?;
                    TrainedModel::NaiveBayes { space, model, clusters }
                })
            }
            ModelKind::DualLm => {
                let mut clf = DualLMClassifier::train(train, &cfg.lm_config())?;
                clf.length_normalize = cfg.length_normalize;
                Ok(TrainedModel::DualLm(clf))
            }
            ModelKind::Ensemble => Err(HarnessError::Config(
                "an ensemble is not a single trainable model".into(),
            )),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            TrainedModel::Linear { .. } => ModelKind::Logreg,
            TrainedModel::NaiveBayes { .. } => ModelKind::Nb,
            TrainedModel::DualLm(_) => ModelKind::DualLm,
        }
    }

    fn vectorize(space: &FeatureSpace, clusters: Option<&ClusterMap>, doc: &Document) -> Result<SparseVector, HarnessError> {
        Ok(space.vectorize(doc, clusters)?)
    }

    /// Label and a real-valued score (positive favours `F`): probability of
    /// `F` minus one half for the linear models, the log10 margin for the
    /// dual LM.
    pub fn predict_one(&self, doc: &Document) -> Result<(Label, f64), HarnessError> {
        match self {
            TrainedModel::Linear { space, model, clusters } => {
                let x = Self::vectorize(space, clusters.as_ref(), doc)?;
                let p = model.predict_proba(&x)?;
                Ok((model.predict(&x)?, p - 0.5))
            }
            TrainedModel::NaiveBayes { space, model, clusters } => {
                let x = Self::vectorize(space, clusters.as_ref(), doc)?;
                let p = model.posterior(&x)?;
                Ok((model.predict(&x)?, p - 0.5))
            }
            TrainedModel::DualLm(clf) => Ok(clf.classify(&doc.text)?),
        }
    }

    pub fn predict(&self, docs: &[Document]) -> Result<Vec<Label>, HarnessError> {
        docs.iter().map(|d| Ok(self.predict_one(d)?.0)).collect()
    }

    fn manifest(&self) -> String {
        let mut out = format!("{MANIFEST_MAGIC}\nkind={}\n", self.kind());
        if let TrainedModel::DualLm(clf) = self {
            out.push_str(&format!(
                "lowercase={}\nlength_normalize={}\ntie_label={}\n",
                clf.tokenizer.lowercase, clf.length_normalize, clf.tie_label
            ));
        }
        out
    }

    /// Digest of every fitted parameter, in the same serialized form that
    /// [`TrainedModel::save`] writes.
    pub fn fingerprint(&self) -> Fingerprint {
        let mut parts = vec![self.manifest()];
        match self {
            TrainedModel::Linear { space, model, clusters } => {
                parts.push(space_text(space));
                parts.push(model.to_text());
                parts.push(clusters.as_ref().map(|c| c.fingerprint().to_string()).unwrap_or_default());
            }
            TrainedModel::NaiveBayes { space, model, clusters } => {
                parts.push(space_text(space));
                parts.push(model.to_text());
                parts.push(clusters.as_ref().map(|c| c.fingerprint().to_string()).unwrap_or_default());
            }
            TrainedModel::DualLm(clf) => {
                parts.push(clf.lm_pos.to_arpa());
                parts.push(clf.lm_neg.to_arpa());
            }
        }
        Fingerprint::of_parts(&parts)
    }

    pub fn save(&self, dir: impl AsRef<Path>) -> Result<(), HarnessError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        fs::write(dir.join("manifest.txt"), self.manifest())?;
        let write_linear = |space: &FeatureSpace, clusters: &Option<ClusterMap>| -> Result<(), HarnessError> {
            space.save(dir.join("features.txt"))?;
            if let Some(c) = clusters {
                c.save(dir.join("clusters.tsv"))?;
            }
            Ok(())
        };
        match self {
            TrainedModel::Linear { space, model, clusters } => {
                write_linear(space, clusters)?;
                model.save(dir.join("weights.txt"))?;
            }
            TrainedModel::NaiveBayes { space, model, clusters } => {
                write_linear(space, clusters)?;
                model.save(dir.join("weights.txt"))?;
            }
            TrainedModel::DualLm(clf) => {
                clf.lm_pos.save(dir.join("f.arpa"))?;
                clf.lm_neg.save(dir.join("m.arpa"))?;
            }
        }
        Ok(())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let dir = dir.as_ref();
        let manifest = fs::read_to_string(dir.join("manifest.txt"))?;
        let mut lines = manifest.lines();
        if lines.next() != Some(MANIFEST_MAGIC) {
            return Err(HarnessError::Data(format!("{}: not a model directory", dir.display())));
        }
        let mut fields = std::collections::HashMap::new();
        for l in lines.filter(|l| !l.is_empty()) {
            let (k, v) = l
                .split_once('=')
                .ok_or_else(|| HarnessError::Data(format!("bad manifest line `{l}`")))?;
            fields.insert(k, v);
        }
        let get = |k: &str| -> Result<&str, HarnessError> {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| HarnessError::Data(format!("manifest lacks `{k}`")))
        };
        let bad = |k: &str| HarnessError::Data(format!("bad manifest value for `{k}`"));
        let kind: ModelKind = get("kind")?.parse().map_err(|_| bad("kind"))?;
        let linear_parts = || -> Result<(FeatureSpace, Option<ClusterMap>), HarnessError> {
            let space = FeatureSpace::load(dir.join("features.txt"))?;
            let cpath = dir.join("clusters.tsv");
            let clusters = if cpath.exists() { Some(ClusterMap::load(cpath)?) } else { None };
            Ok((space, clusters))
        };
        match kind {
            ModelKind::Logreg => {
                let (space, clusters) = linear_parts()?;
                let model = LinearModel::load(dir.join("weights.txt"))?;
                Ok(TrainedModel::Linear { space, model, clusters })
            }
            ModelKind::Nb => {
                let (space, clusters) = linear_parts()?;
                let model = NBModel::load(dir.join("weights.txt"))?;
                Ok(TrainedModel::NaiveBayes { space, model, clusters })
            }
            ModelKind::DualLm => {
                let tokenizer = TokenizerConfig {
                    lowercase: get("lowercase")?.parse().map_err(|_| bad("lowercase"))?,
                };
                let mut clf = DualLMClassifier::new(
                    NGramLM::load(dir.join("f.arpa"))?,
                    NGramLM::load(dir.join("m.arpa"))?,
                    tokenizer,
                )?;
                clf.length_normalize = get("length_normalize")?.parse().map_err(|_| bad("length_normalize"))?;
                clf.tie_label = get("tie_label")?.parse().map_err(|_| bad("tie_label"))?;
                Ok(TrainedModel::DualLm(clf))
            }
            ModelKind::Ensemble => Err(bad("kind")),
        }
    }
}

fn space_text(space: &FeatureSpace) -> String {
    let mut buf = Vec::new();
    // writing to a Vec cannot fail
    let _ = space.write(&mut buf);
    String::from_utf8(buf).unwrap_or_default()
}
