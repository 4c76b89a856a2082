use std::fs;

use indexmap::IndexMap;
use num_rational::BigRational;

use super::config::{ModelKind, RunConfig};
use super::metrics::correct_count;
use super::models::TrainedModel;
use super::report::{MemberSummary, Report, ScenarioReport};
use super::HarnessError;
use crate::corpus::{build_scenario, ingest_tsv, split_in_domain, Corpus, Document, Fraction, Label, ScenarioSpec};
use crate::ensemble::{
    format_decimal, load_members_dir, write_predictions, Ensemble, EnsembleMember, LabelEncoding,
};
use crate::features::{build_clusters, default_k, ClusterMap, EmbeddingTable, KMeansConfig};
use crate::fingerprint::Fingerprint;

/// Shared resources resolved once per run.
#[derive(Debug, Clone, Default)]
pub struct Resources {
    pub clusters: Option<ClusterMap>,
}

impl Resources {
    /// Loads or builds the cluster map if the configured features need one.
    pub fn prepare(cfg: &RunConfig) -> Result<Self, HarnessError> {
        cfg.check()?;
        let needs = cfg.model != ModelKind::DualLm && cfg.feature_config()?.needs_clusters();
        if !needs {
            return Ok(Self::default());
        }
        let clusters = if let Some(path) = &cfg.clusters {
            ClusterMap::load(path)?
        } else if let Some(path) = &cfg.embeddings {
            let emb = EmbeddingTable::load(path)?;
            Self::clusters_from(&emb, cfg)?
        } else {
            unreachable!("RunConfig::check requires clusters or embeddings")
        };
        Ok(Self { clusters: Some(clusters) })
    }

    pub fn clusters_from(emb: &EmbeddingTable, cfg: &RunConfig) -> Result<ClusterMap, HarnessError> {
        let k = cfg.k.unwrap_or_else(|| default_k(emb.len()));
        let kc = KMeansConfig::new(k, cfg.max_cluster_size, cfg.seeds().cluster);
        Ok(build_clusters(emb, &kc)?)
    }
}

/// Everything one scenario produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub report: ScenarioReport,
    /// Validation predictions in validation-set order.
    pub predictions: IndexMap<String, Label>,
}

impl ScenarioOutcome {
    /// The prediction file for the validation set; its `acc` is the exact
    /// validation accuracy.
    pub fn prediction_file(&self) -> String {
        let acc = BigRational::new(self.report.correct.into(), self.report.valid_size.max(1).into());
        let name = format!("{}@{}", self.report.model, slug(&self.report.scenario));
        let mut buf = Vec::new();
        let _ = write_predictions(
            &mut buf,
            &name,
            &acc,
            self.predictions.iter().map(|(k, l)| (k.as_str(), *l)),
        );
        String::from_utf8(buf).unwrap_or_default()
    }
}

/// Lowercase alphanumerics with single dashes: `TW+YT | N` becomes `tw-yt-n`.
pub fn slug(name: &str) -> String {
    let mut out = String::new();
    for c in name.chars() {
        if c.is_alphanumeric() {
            out.extend(c.to_lowercase());
        } else if !out.is_empty() && !out.ends_with('-') {
            out.push('-');
        }
    }
    out.trim_end_matches('-').to_string()
}

fn gold_of(docs: &[Document]) -> IndexMap<String, Label> {
    docs.iter()
        .filter_map(|d| d.label.map(|l| (d.id.clone(), l)))
        .collect()
}

fn exact_accuracy(pred: &IndexMap<String, Label>, gold: &IndexMap<String, Label>) -> Result<BigRational, HarnessError> {
    let (c, n) = correct_count(pred, gold)?;
    Ok(BigRational::new(c.into(), n.into()))
}

fn predict_map(model: &TrainedModel, docs: &[Document]) -> Result<IndexMap<String, Label>, HarnessError> {
    Ok(docs
        .iter()
        .map(|d| d.id.clone())
        .zip(model.predict(docs)?)
        .collect())
}

/// Members trained on 90% of the scenario's training side, weighted by
/// their accuracy on the remaining 10%, plus any external members found in
/// `<members>/<scenario slug>/*.pred`.
type Combined = (IndexMap<String, Label>, Fingerprint, Vec<MemberSummary>);

fn run_ensemble(
    cfg: &RunConfig,
    spec: &ScenarioSpec,
    train: &[Document],
    valid: &[Document],
    res: &Resources,
) -> Result<Combined, HarnessError> {
    let encoding = LabelEncoding {
        positive: cfg.positive_label,
    };
    let (inner_train, inner_dev) = split_in_domain(train, Fraction::one_tenth(), cfg.seeds().split)?;
    let inner_gold = gold_of(&inner_dev);
    let mut members = Vec::new();
    let mut parts = Vec::new();
    for kind in [ModelKind::Logreg, ModelKind::Nb, ModelKind::DualLm] {
        let model = TrainedModel::train(kind, &inner_train, cfg, res.clusters.as_ref())?;
        let acc = exact_accuracy(&predict_map(&model, &inner_dev)?, &inner_gold)?;
        let preds = predict_map(&model, valid)?;
        members.push(EnsembleMember::from_labels(
            kind.to_string(),
            acc,
            preds.iter().map(|(k, l)| (k.as_str(), *l)),
            encoding,
        )?);
        parts.push(model.fingerprint().to_string());
    }
    if let Some(dir) = &cfg.members {
        let sub = dir.join(slug(&spec.name));
        if sub.is_dir() {
            for m in load_members_dir(&sub, encoding)? {
                parts.push(format!("{} {}", m.name, format_decimal(m.validation_accuracy())));
                members.push(m);
            }
        }
    }
    let summaries = members
        .iter()
        .map(|m| MemberSummary {
            name: m.name.clone(),
            accuracy: format_decimal(m.validation_accuracy()),
            weight: format_decimal(m.weight()),
        })
        .collect();
    let ens = Ensemble::new(members, encoding)?;
    let preds = valid
        .iter()
        .map(|d| Ok((d.id.clone(), ens.combine(&d.id)?.0)))
        .collect::<Result<_, HarnessError>>()?;
    Ok((preds, Fingerprint::of_parts(&parts), summaries))
}

/// Builds the split, fits on the training side only, and scores the
/// validation side.
pub fn run_scenario(
    cfg: &RunConfig,
    corpus: &Corpus,
    spec: &ScenarioSpec,
    res: &Resources,
) -> Result<ScenarioOutcome, HarnessError> {
    let (train, valid) = build_scenario(corpus, spec)?;
    let gold = gold_of(&valid);
    let (predictions, fit, members) = match cfg.model {
        ModelKind::Ensemble => run_ensemble(cfg, spec, &train, &valid, res)?,
        kind => {
            let model = TrainedModel::train(kind, &train, cfg, res.clusters.as_ref())?;
            (predict_map(&model, &valid)?, model.fingerprint(), Vec::new())
        }
    };
    let (correct, total) = correct_count(&predictions, &gold)?;
    let uses_lm = matches!(cfg.model, ModelKind::DualLm | ModelKind::Ensemble);
    let features = if cfg.model == ModelKind::DualLm {
        String::new()
    } else {
        cfg.feature_config()?.families_string()
    };
    let report = ScenarioReport {
        scenario: spec.name.clone(),
        mode: spec.mode,
        train_genres: spec.train_genres.iter().cloned().collect(),
        valid_genre: spec.valid_genre.clone(),
        train_size: train.len(),
        valid_size: valid.len(),
        model: cfg.model,
        features,
        seeds: cfg.seeds(),
        lm_order: uses_lm.then_some(cfg.lm_order),
        correct,
        accuracy: correct as f64 / total as f64,
        fit,
        positive_label: cfg.positive_label,
        members,
    };
    Ok(ScenarioOutcome { report, predictions })
}

/// Runs every configured scenario over an in-memory corpus.
pub fn run_on_corpus(cfg: &RunConfig, corpus: &Corpus) -> Result<(Report, Vec<ScenarioOutcome>), HarnessError> {
    let res = Resources::prepare(cfg)?;
    let mut outcomes = Vec::new();
    for spec in cfg.scenarios(corpus)? {
        outcomes.push(run_scenario(cfg, corpus, &spec, &res)?);
    }
    let report = Report {
        rows: outcomes.iter().map(|o| o.report.clone()).collect(),
    };
    Ok((report, outcomes))
}

/// Loads the configured corpus, runs, and writes `report.kv`, `report.txt`,
/// `config.txt` and `predictions/<scenario>.pred` under `out_dir` if set.
pub fn run(cfg: &RunConfig) -> Result<(Report, Vec<ScenarioOutcome>), HarnessError> {
    cfg.check()?;
    let path = cfg
        .corpus
        .as_ref()
        .ok_or_else(|| HarnessError::Config("no corpus given".into()))?;
    let corpus = ingest_tsv(path)?;
    let (report, outcomes) = run_on_corpus(cfg, &corpus)?;
    if let Some(out) = &cfg.out_dir {
        let preds = out.join("predictions");
        fs::create_dir_all(&preds)?;
        fs::write(out.join("report.kv"), report.to_kv())?;
        fs::write(out.join("report.txt"), report.to_table())?;
        fs::write(out.join("config.txt"), cfg.to_text())?;
        for o in &outcomes {
            fs::write(preds.join(format!("{}.pred", slug(&o.report.scenario))), o.prediction_file())?;
        }
    }
    Ok((report, outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs() {
        assert_eq!(slug("TW+YT | N"), "tw-yt-n");
        assert_eq!(slug("N (90-10)"), "n-90-10");
    }
}
