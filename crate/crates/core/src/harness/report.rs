//! Scenario results, rendered as a Table-3-style text table and as
//! `key=value` sections that can be read back.

use std::fmt::Write as _;

use super::config::{ModelKind, Seeds};
use super::metrics::{macro_average, round_half_away};
use super::HarnessError;
use crate::corpus::{Genre, Label, ScenarioMode};
use crate::fingerprint::Fingerprint;

/// One ensemble member as it entered the vote.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemberSummary {
    pub name: String,
    /// exact decimal
    pub accuracy: String,
    /// exact decimal, `accuracy - 0.5`
    pub weight: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub scenario: String,
    pub mode: ScenarioMode,
    pub train_genres: Vec<Genre>,
    pub valid_genre: Genre,
    pub train_size: usize,
    pub valid_size: usize,
    pub model: ModelKind,
    /// Feature families, or empty for the dual LM.
    pub features: String,
    pub seeds: Seeds,
    pub lm_order: Option<usize>,
    pub correct: usize,
    pub accuracy: f64,
    /// Digest of the fitted parameters.
    pub fit: Fingerprint,
    pub positive_label: Label,
    pub members: Vec<MemberSummary>,
}

fn mode_str(m: ScenarioMode) -> &'static str {
    match m {
        ScenarioMode::InDomain => "in-domain",
        ScenarioMode::CrossGenre => "cross-genre",
    }
}

impl ScenarioReport {
    pub fn to_kv(&self) -> String {
        let mut out = String::from("[scenario]\n");
        let genres: Vec<String> = self.train_genres.iter().map(Genre::to_string).collect();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        kv("name", self.scenario.clone());
        kv("mode", mode_str(self.mode).into());
        kv("train_genres", genres.join(","));
        kv("valid_genre", self.valid_genre.to_string());
        kv("train_size", self.train_size.to_string());
        kv("valid_size", self.valid_size.to_string());
        kv("model", self.model.to_string());
        kv("features", self.features.clone());
        kv("seed.split", self.seeds.split.to_string());
        kv("seed.cluster", self.seeds.cluster.to_string());
        kv("seed.train", self.seeds.train.to_string());
        kv("lm_order", self.lm_order.map(|o| o.to_string()).unwrap_or_default());
        kv("correct", self.correct.to_string());
        kv("accuracy", self.accuracy.to_string());
        kv("fit", self.fit.to_string());
        kv("positive_label", self.positive_label.to_string());
        kv("tie_label", self.positive_label.to_string());
        for m in &self.members {
            kv("member", format!("{} acc={} weight={}", m.name, m.accuracy, m.weight));
        }
        out
    }

    fn from_section(lines: &[(usize, &str)]) -> Result<Self, HarnessError> {
        let bad = |line: usize, what: &str| HarnessError::Data(format!("report line {line}: {what}"));
        let mut r = ScenarioReport {
            scenario: String::new(),
            mode: ScenarioMode::InDomain,
            train_genres: Vec::new(),
            valid_genre: Genre::News,
            train_size: 0,
            valid_size: 0,
            model: ModelKind::Logreg,
            features: String::new(),
            seeds: Seeds::derive(0),
            lm_order: None,
            correct: 0,
            accuracy: f64::NAN,
            fit: Fingerprint::default(),
            positive_label: Label::F,
            members: Vec::new(),
        };
        let mut seen_name = false;
        for &(n, line) in lines {
            let (k, v) = line.split_once('=').ok_or_else(|| bad(n, "expected key=value"))?;
            let num = |v: &str| v.parse::<u64>().map_err(|_| bad(n, "bad number"));
            match k {
                "name" => {
                    r.scenario = v.to_string();
                    seen_name = true;
                }
                "mode" => {
                    r.mode = match v {
                        "in-domain" => ScenarioMode::InDomain,
                        "cross-genre" => ScenarioMode::CrossGenre,
                        _ => return Err(bad(n, "bad mode")),
                    }
                }
                "train_genres" => {
                    r.train_genres = v
                        .split(',')
                        .filter(|s| !s.is_empty())
                        .map(|g| g.parse().map_err(|_| bad(n, "bad genre")))
                        .collect::<Result<_, _>>()?
                }
                "valid_genre" => r.valid_genre = v.parse().map_err(|_| bad(n, "bad genre"))?,
                "train_size" => r.train_size = num(v)? as usize,
                "valid_size" => r.valid_size = num(v)? as usize,
                "model" => r.model = v.parse().map_err(|_| bad(n, "bad model"))?,
                "features" => r.features = v.to_string(),
                "seed.split" => r.seeds.split = num(v)?,
                "seed.cluster" => r.seeds.cluster = num(v)?,
                "seed.train" => r.seeds.train = num(v)?,
                "lm_order" => r.lm_order = if v.is_empty() { None } else { Some(num(v)? as usize) },
                "correct" => r.correct = num(v)? as usize,
                "accuracy" => r.accuracy = v.parse().map_err(|_| bad(n, "bad accuracy"))?,
                "fit" => r.fit = v.parse().map_err(|_| bad(n, "bad fingerprint"))?,
                "positive_label" => r.positive_label = v.parse().map_err(|_| bad(n, "bad label"))?,
                "tie_label" => {}
                "member" => {
                    let mut parts = v.rsplitn(3, ' ');
                    let weight = parts.next().and_then(|p| p.strip_prefix("weight="));
                    let acc = parts.next().and_then(|p| p.strip_prefix("acc="));
                    let name = parts.next();
                    match (name, acc, weight) {
                        (Some(name), Some(acc), Some(weight)) => r.members.push(MemberSummary {
                            name: name.into(),
                            accuracy: acc.into(),
                            weight: weight.into(),
                        }),
                        _ => return Err(bad(n, "bad member line")),
                    }
                }
                _ => return Err(bad(n, "unknown key")),
            }
        }
        if !seen_name || r.accuracy.is_nan() {
            return Err(HarnessError::Data("report section lacks name or accuracy".into()));
        }
        Ok(r)
    }
}

/// Results of several scenarios run under one configuration.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub rows: Vec<ScenarioReport>,
}

impl Report {
    /// `(genre, accuracy)` for every row of the given mode, in row order.
    pub fn per_genre(&self, mode: ScenarioMode) -> Vec<(Genre, f64)> {
        self.rows
            .iter()
            .filter(|r| r.mode == mode)
            .map(|r| (r.valid_genre.clone(), r.accuracy))
            .collect()
    }

    /// Unrounded mean accuracy over the rows of `mode`, if any.
    pub fn macro_average(&self, mode: ScenarioMode) -> Option<f64> {
        let accs: Vec<f64> = self.per_genre(mode).into_iter().map(|(_, a)| a).collect();
        macro_average(&accs).ok()
    }

    pub fn to_kv(&self) -> String {
        self.rows
            .iter()
            .map(ScenarioReport::to_kv)
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn from_kv(text: &str) -> Result<Self, HarnessError> {
        let mut rows = Vec::new();
        let mut current: Option<Vec<(usize, &str)>> = None;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line == "[scenario]" {
                if let Some(sec) = current.take() {
                    rows.push(ScenarioReport::from_section(&sec)?);
                }
                current = Some(Vec::new());
            } else if !line.trim().is_empty() {
                current
                    .as_mut()
                    .ok_or_else(|| HarnessError::Data(format!("report line {}: outside a section", i + 1)))?
                    .push((i + 1, line));
            }
        }
        if let Some(sec) = current {
            rows.push(ScenarioReport::from_section(&sec)?);
        }
        Ok(Self { rows })
    }

    /// Genres down the side, in-genre and cross-genre accuracy (percent, two
    /// decimals) across, and an AVG row, followed by the ensemble inventory.
    pub fn to_table(&self) -> String {
        let mut genres: Vec<Genre> = Vec::new();
        for r in &self.rows {
            if !genres.contains(&r.valid_genre) {
                genres.push(r.valid_genre.clone());
            }
        }
        let cell = |mode: ScenarioMode, g: &Genre| -> String {
            self.rows
                .iter()
                .find(|r| r.mode == mode && &r.valid_genre == g)
                .map(|r| round_half_away(r.accuracy * 100.0, 2))
                .unwrap_or_else(|| "-".into())
        };
        let avg = |mode: ScenarioMode| -> String {
            let pcts: Vec<f64> = self.per_genre(mode).iter().map(|(_, a)| a * 100.0).collect();
            macro_average(&pcts)
                .map(|m| round_half_away(m, 2))
                .unwrap_or_else(|_| "-".into())
        };

        let mut out = String::new();
        if let Some(first) = self.rows.first() {
            let features = if first.features.is_empty() { "-" } else { &first.features };
            let _ = writeln!(
                out,
                "model: {}  features: {}  seed: {}  positive: {} (ties -> {})",
                first.model, features, first.seeds.split, first.positive_label, first.positive_label
            );
        }
        let _ = writeln!(out, "{:<12}{:>12}{:>14}", "Genre", "In-genre", "Cross-genre");
        for g in &genres {
            let _ = writeln!(
                out,
                "{:<12}{:>12}{:>14}",
                g.to_string(),
                cell(ScenarioMode::InDomain, g),
                cell(ScenarioMode::CrossGenre, g)
            );
        }
        let _ = writeln!(
            out,
            "{:<12}{:>12}{:>14}",
            "AVG",
            avg(ScenarioMode::InDomain),
            avg(ScenarioMode::CrossGenre)
        );
        for r in self.rows.iter().filter(|r| !r.members.is_empty()) {
            let _ = writeln!(out, "\nmembers for {}:", r.scenario);
            for m in &r.members {
                let _ = writeln!(out, "  {:<24} acc={:<8} weight={}", m.name, m.accuracy, m.weight);
            }
        }
        out
    }
}
