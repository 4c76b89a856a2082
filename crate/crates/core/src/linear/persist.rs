//! Plain-text model files. Floats use shortest round-trip formatting, so a
//! save/load cycle is lossless.
//!
//! ```text
//! xgenre-linear 1
//! trained_on=<hex>
//! l2_lambda=0.0001
//! ...
//! dim=3
//! 0.25
//! -1.5
//! 0
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::{LinearError, LinearModel, NBModel, TrainConfig};
use crate::fingerprint::Fingerprint;

const LINEAR_MAGIC: &str = "xgenre-linear 1";
const NB_MAGIC: &str = "xgenre-nb 1";

fn corrupt(msg: impl Into<String>) -> LinearError {
    LinearError::CorruptModelFile(msg.into())
}

/// Header of `key=value` lines up to and including `dim=`, then `dim` body lines.
struct Parsed<'a> {
    fields: HashMap<&'a str, &'a str>,
    body: Vec<&'a str>,
}

fn parse<'a>(text: &'a str, magic: &str) -> Result<Parsed<'a>, LinearError> {
    let mut lines = text.lines();
    if lines.next() != Some(magic) {
        return Err(corrupt(format!("expected `{magic}` on the first line")));
    }
    let mut fields = HashMap::new();
    let dim: usize = loop {
        let line = lines.next().ok_or_else(|| corrupt("missing `dim=` line"))?;
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| corrupt(format!("bad header line `{line}`")))?;
        if k == "dim" {
            break v.parse().map_err(|_| corrupt(format!("bad dim `{v}`")))?;
        }
        if fields.insert(k, v).is_some() {
            return Err(corrupt(format!("duplicate key `{k}`")));
        }
    };
    let body: Vec<&str> = lines.filter(|l| !l.is_empty()).collect();
    if body.len() != dim {
        return Err(corrupt(format!("expected {dim} rows, found {}", body.len())));
    }
    Ok(Parsed { fields, body })
}

impl Parsed<'_> {
    fn get<T: FromStr>(&self, key: &str) -> Result<T, LinearError> {
        let raw = self
            .fields
            .get(key)
            .ok_or_else(|| corrupt(format!("missing `{key}`")))?;
        raw.parse().map_err(|_| corrupt(format!("bad value for `{key}`: `{raw}`")))
    }
}

fn parse_floats(s: &str, expected: usize) -> Result<Vec<f64>, LinearError> {
    let out: Vec<f64> = s
        .split('\t')
        .map(|t| t.parse().map_err(|_| corrupt(format!("bad number `{t}`"))))
        .collect::<Result<_, _>>()?;
    if out.len() != expected {
        return Err(corrupt(format!("expected {expected} columns in `{s}`")));
    }
    Ok(out)
}

impl LinearModel {
    pub fn to_text(&self) -> String {
        let c = &self.config;
        let trace: Vec<String> = self.objective_trace.iter().map(f64::to_string).collect();
        let mut out = String::new();
        let _ = writeln!(out, "{LINEAR_MAGIC}");
        let _ = writeln!(out, "trained_on={}", self.trained_on);
        let _ = writeln!(out, "l2_lambda={}", c.l2_lambda);
        let _ = writeln!(out, "learning_rate={}", c.learning_rate);
        let _ = writeln!(out, "epochs={}", c.epochs);
        let _ = writeln!(out, "batch_size={}", c.batch_size);
        let _ = writeln!(out, "seed={}", c.seed);
        let _ = writeln!(out, "bias={}", self.bias);
        let _ = writeln!(out, "trace={}", trace.join(","));
        let _ = writeln!(out, "dim={}", self.weights.len());
        for w in &self.weights {
            let _ = writeln!(out, "{w}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, LinearError> {
        let p = parse(text, LINEAR_MAGIC)?;
        let trace_raw: String = p.get("trace")?;
        let objective_trace = if trace_raw.is_empty() {
            Vec::new()
        } else {
            trace_raw
                .split(',')
                .map(|t| t.parse().map_err(|_| corrupt(format!("bad trace value `{t}`"))))
                .collect::<Result<_, _>>()?
        };
        let weights = p
            .body
            .iter()
            .map(|l| parse_floats(l, 1).map(|v| v[0]))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            weights,
            bias: p.get("bias")?,
            trained_on: p.get::<Fingerprint>("trained_on")?,
            config: TrainConfig {
                l2_lambda: p.get("l2_lambda")?,
                learning_rate: p.get("learning_rate")?,
                epochs: p.get("epochs")?,
                batch_size: p.get("batch_size")?,
                seed: p.get("seed")?,
            },
            objective_trace,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LinearError> {
        Ok(fs::write(path, self.to_text())?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LinearError> {
        Self::from_text(&fs::read_to_string(path)?)
    }
}

impl NBModel {
    /// One row per feature: `ln P(present|F)`, `ln P(absent|F)`, then the same for `M`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{NB_MAGIC}");
        let _ = writeln!(out, "trained_on={}", self.trained_on);
        let _ = writeln!(out, "alpha={}", self.alpha);
        let _ = writeln!(out, "log_prior_f={}", self.log_prior[0]);
        let _ = writeln!(out, "log_prior_m={}", self.log_prior[1]);
        let _ = writeln!(out, "dim={}", self.dim());
        for i in 0..self.dim() {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}",
                self.log_present[0][i], self.log_absent[0][i], self.log_present[1][i], self.log_absent[1][i]
            );
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, LinearError> {
        let p = parse(text, NB_MAGIC)?;
        let mut present = [Vec::new(), Vec::new()];
        let mut absent = [Vec::new(), Vec::new()];
        for l in &p.body {
            let r = parse_floats(l, 4)?;
            present[0].push(r[0]);
            absent[0].push(r[1]);
            present[1].push(r[2]);
            absent[1].push(r[3]);
        }
        NBModel::from_parts(
            p.get("alpha")?,
            [p.get("log_prior_f")?, p.get("log_prior_m")?],
            present,
            absent,
            p.get::<Fingerprint>("trained_on")?,
        )
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LinearError> {
        Ok(fs::write(path, self.to_text())?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LinearError> {
        Self::from_text(&fs::read_to_string(path)?)
    }
}
