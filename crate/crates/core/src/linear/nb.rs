use super::logreg::{check_inputs, sigmoid};
use super::LinearError;
use crate::corpus::Label;
use crate::features::SparseVector;
use crate::fingerprint::Fingerprint;

fn class_index(l: Label) -> usize {
    match l {
        Label::F => 0,
        Label::M => 1,
    }
}

/// Bernoulli naive Bayes over binarized features (present iff value > 0).
///
/// `P(f present | c) = (n_c(f) + alpha) / (n_c + 2 alpha)`, priors are label
/// frequencies. Index 0 of every per-class array is `F`, index 1 is `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct NBModel {
    pub alpha: f64,
    pub log_prior: [f64; 2],
    pub log_present: [Vec<f64>; 2],
    pub log_absent: [Vec<f64>; 2],
    pub trained_on: Fingerprint,
    absent_total: [f64; 2],
}

impl NBModel {
    pub fn from_parts(
        alpha: f64,
        log_prior: [f64; 2],
        log_present: [Vec<f64>; 2],
        log_absent: [Vec<f64>; 2],
        trained_on: Fingerprint,
    ) -> Result<Self, LinearError> {
        let dim = log_present[0].len();
        if [&log_present[1], &log_absent[0], &log_absent[1]]
            .iter()
            .any(|v| v.len() != dim)
        {
            return Err(LinearError::DimensionMismatch("ragged naive Bayes tables".into()));
        }
        let absent_total = [log_absent[0].iter().sum(), log_absent[1].iter().sum()];
        Ok(Self {
            alpha,
            log_prior,
            log_present,
            log_absent,
            trained_on,
            absent_total,
        })
    }

    pub fn train(
        xs: &[SparseVector],
        ys: &[Label],
        dim: usize,
        alpha: f64,
    ) -> Result<Self, LinearError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(LinearError::InvalidConfig(format!("alpha must be positive, got {alpha}")));
        }
        let space = check_inputs(xs, ys, dim)?;
        let mut n_class = [0u64; 2];
        let mut present = [vec![0u64; dim], vec![0u64; dim]];
        for (x, &y) in xs.iter().zip(ys) {
            let c = class_index(y);
            n_class[c] += 1;
            for &(i, v) in x.entries() {
                if v > 0.0 {
                    present[c][i as usize] += 1;
                }
            }
        }
        let n = xs.len() as f64;
        let mut log_present = [Vec::with_capacity(dim), Vec::with_capacity(dim)];
        let mut log_absent = [Vec::with_capacity(dim), Vec::with_capacity(dim)];
        for c in 0..2 {
            let den = n_class[c] as f64 + 2.0 * alpha;
            for &k in &present[c] {
                log_present[c].push(((k as f64 + alpha) / den).ln());
                log_absent[c].push((((n_class[c] - k) as f64 + alpha) / den).ln());
            }
        }
        let log_prior = [
            (n_class[0] as f64 / n).ln(),
            (n_class[1] as f64 / n).ln(),
        ];
        Self::from_parts(alpha, log_prior, log_present, log_absent, space)
    }

    pub fn dim(&self) -> usize {
        self.log_present[0].len()
    }

    fn class_log_joint(&self, c: usize, x: &SparseVector) -> f64 {
        let mut l = self.log_prior[c] + self.absent_total[c];
        for &(i, v) in x.entries() {
            if v > 0.0 {
                l += self.log_present[c][i as usize] - self.log_absent[c][i as usize];
            }
        }
        l
    }

    /// Log-odds `ln P(F|x) - ln P(M|x)`.
    pub fn log_odds(&self, x: &SparseVector) -> Result<f64, LinearError> {
        if x.space() != self.trained_on {
            return Err(LinearError::FingerprintMismatch {
                expected: self.trained_on,
                found: x.space(),
            });
        }
        if x.max_column().is_some_and(|c| c as usize >= self.dim()) {
            return Err(LinearError::DimensionMismatch("column outside model".into()));
        }
        Ok(self.class_log_joint(0, x) - self.class_log_joint(1, x))
    }

    /// P(F | x).
    pub fn posterior(&self, x: &SparseVector) -> Result<f64, LinearError> {
        Ok(sigmoid(self.log_odds(x)?))
    }

    pub fn predict(&self, x: &SparseVector) -> Result<Label, LinearError> {
        Ok(if self.posterior(x)? >= 0.5 {
            Label::F
        } else {
            Label::M
        })
    }
}
