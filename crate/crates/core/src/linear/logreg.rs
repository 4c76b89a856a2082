//! L2-regularized logistic regression trained by seeded mini-batch gradient
//! descent.
//!
//! The objective is the mean negative log-likelihood plus `λ/2 ‖w‖²` (the
//! bias is not regularized). After every epoch the full-batch objective is
//! re-evaluated; an epoch that would increase it is rolled back and retried
//! with half the learning rate, so the recorded objective never goes up.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{label_target, LinearError};
use crate::corpus::Label;
use crate::features::SparseVector;
use crate::fingerprint::Fingerprint;

/// Halvings tried before an epoch is given up on.
const MAX_BACKTRACK: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub l2_lambda: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            l2_lambda: 1e-4,
            learning_rate: 0.1,
            epochs: 20,
            batch_size: 32,
            seed: 0,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<(), LinearError> {
        let ok = self.l2_lambda >= 0.0
            && self.l2_lambda.is_finite()
            && self.learning_rate > 0.0
            && self.learning_rate.is_finite()
            && self.batch_size > 0;
        if ok {
            Ok(())
        } else {
            Err(LinearError::InvalidConfig(format!("{self:?}")))
        }
    }
}

/// A trained linear scorer over one feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub trained_on: Fingerprint,
    pub config: TrainConfig,
    /// Full-batch objective before training and after each epoch.
    pub objective_trace: Vec<f64>,
}

/// Largest f64 below 1.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// Logistic function, kept strictly inside (0, 1).
pub fn sigmoid(z: f64) -> f64 {
    let p = if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    };
    p.clamp(f64::MIN_POSITIVE, BELOW_ONE)
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Mean negative log-likelihood plus `λ/2 ‖w‖²`.
pub fn objective(weights: &[f64], bias: f64, xs: &[SparseVector], ys: &[f64], l2: f64) -> f64 {
    let nll: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, &y)| {
            let z = x.dot(weights) + bias;
            softplus(z) - y * z
        })
        .sum::<f64>()
        / xs.len() as f64;
    let reg: f64 = weights.iter().map(|w| w * w).sum::<f64>() * l2 / 2.0;
    nll + reg
}

/// Analytic gradient of [`objective`] over the given rows.
pub fn gradient(
    weights: &[f64],
    bias: f64,
    xs: &[&SparseVector],
    ys: &[f64],
    l2: f64,
) -> (Vec<f64>, f64) {
    let n = xs.len() as f64;
    let mut gw: Vec<f64> = weights.iter().map(|w| l2 * w).collect();
    let mut gb = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let r = (sigmoid(x.dot(weights) + bias) - y) / n;
        gb += r;
        for &(i, v) in x.entries() {
            gw[i as usize] += r * v;
        }
    }
    (gw, gb)
}

pub(crate) fn check_inputs(
    xs: &[SparseVector],
    ys: &[Label],
    dim: usize,
) -> Result<Fingerprint, LinearError> {
    if xs.len() != ys.len() {
        return Err(LinearError::DimensionMismatch(format!(
            "{} vectors but {} labels",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 || !Label::ALL.iter().all(|l| ys.contains(l)) {
        return Err(LinearError::SingleClassInput);
    }
    let space = xs[0].space();
    for x in xs {
        if x.space() != space {
            return Err(LinearError::FingerprintMismatch {
                expected: space,
                found: x.space(),
            });
        }
        if x.max_column().is_some_and(|c| c as usize >= dim) {
            return Err(LinearError::DimensionMismatch(format!(
                "column {} outside dimension {dim}",
                x.max_column().unwrap_or_default()
            )));
        }
        if x.entries().iter().any(|&(_, v)| !v.is_finite()) {
            return Err(LinearError::DimensionMismatch("non-finite feature value".into()));
        }
    }
    Ok(space)
}

fn run_epoch(
    weights: &mut [f64],
    bias: &mut f64,
    xs: &[SparseVector],
    ys: &[f64],
    cfg: &TrainConfig,
    lr: f64,
    order: &[usize],
) {
    for batch in order.chunks(cfg.batch_size) {
        let bx: Vec<&SparseVector> = batch.iter().map(|&i| &xs[i]).collect();
        let by: Vec<f64> = batch.iter().map(|&i| ys[i]).collect();
        let (gw, gb) = gradient(weights, *bias, &bx, &by, cfg.l2_lambda);
        for (w, g) in weights.iter_mut().zip(gw) {
            *w -= lr * g;
        }
        *bias -= lr * gb;
    }
}

impl LinearModel {
    pub fn zeros(dim: usize, trained_on: Fingerprint, config: TrainConfig) -> Self {
        Self {
            weights: vec![0.0; dim],
            bias: 0.0,
            trained_on,
            config,
            objective_trace: Vec::new(),
        }
    }

    /// Trains on `xs` (all from one feature space of `dim` columns).
    pub fn train(
        xs: &[SparseVector],
        ys: &[Label],
        dim: usize,
        cfg: &TrainConfig,
    ) -> Result<Self, LinearError> {
        cfg.validate()?;
        let space = check_inputs(xs, ys, dim)?;
        let targets: Vec<f64> = ys.iter().map(|&l| label_target(l)).collect();

        let mut model = Self::zeros(dim, space, *cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut order: Vec<usize> = (0..xs.len()).collect();
        let mut lr = cfg.learning_rate;
        let mut current = objective(&model.weights, model.bias, xs, &targets, cfg.l2_lambda);
        model.objective_trace.push(current);

        for _ in 0..cfg.epochs {
            for _ in 0..=MAX_BACKTRACK {
                order.shuffle(&mut rng);
                let mut w = model.weights.clone();
                let mut b = model.bias;
                run_epoch(&mut w, &mut b, xs, &targets, cfg, lr, &order);
                let next = objective(&w, b, xs, &targets, cfg.l2_lambda);
                if next.is_finite() && next <= current {
                    model.weights = w;
                    model.bias = b;
                    current = next;
                    break;
                }
                lr /= 2.0;
            }
            model.objective_trace.push(current);
        }
        Ok(model)
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    fn check(&self, x: &SparseVector) -> Result<(), LinearError> {
        if x.space() != self.trained_on {
            return Err(LinearError::FingerprintMismatch {
                expected: self.trained_on,
                found: x.space(),
            });
        }
        if x.max_column().is_some_and(|c| c as usize >= self.dim()) {
            return Err(LinearError::DimensionMismatch("column outside model".into()));
        }
        Ok(())
    }

    pub fn decision(&self, x: &SparseVector) -> Result<f64, LinearError> {
        self.check(x)?;
        Ok(x.dot(&self.weights) + self.bias)
    }

    /// P(F | x).
    pub fn predict_proba(&self, x: &SparseVector) -> Result<f64, LinearError> {
        Ok(sigmoid(self.decision(x)?))
    }

    pub fn predict(&self, x: &SparseVector) -> Result<Label, LinearError> {
        Ok(if self.predict_proba(x)? >= 0.5 {
            Label::F
        } else {
            Label::M
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fp() -> Fingerprint {
        Fingerprint::of_parts(["test"])
    }

    fn vec1(x: f64) -> SparseVector {
        SparseVector::from_pairs(fp(), [(0, x)])
    }

    #[test]
    fn zero_epochs_gives_half() {
        let xs = [vec1(1.0), vec1(-1.0)];
        let cfg = TrainConfig { epochs: 0, ..Default::default() };
        let m = LinearModel::train(&xs, &[Label::F, Label::M], 1, &cfg).unwrap();
        assert_eq!(m.weights, [0.0]);
        assert_eq!(m.bias, 0.0);
        assert_eq!(m.predict_proba(&vec1(3.0)).unwrap(), 0.5);
    }

    #[test]
    fn separable_points() {
        let xs = [vec1(1.0), vec1(1.0), vec1(-1.0), vec1(-1.0)];
        let ys = [Label::F, Label::F, Label::M, Label::M];
        let cfg = TrainConfig { epochs: 50, ..Default::default() };
        let m = LinearModel::train(&xs, &ys, 1, &cfg).unwrap();
        for (x, y) in xs.iter().zip(ys) {
            assert_eq!(m.predict(x).unwrap(), y);
        }
    }

    #[test]
    fn negated_model_complements_probability() {
        let m = LinearModel {
            weights: vec![0.3, -1.2],
            bias: 0.4,
            ..LinearModel::zeros(2, fp(), TrainConfig::default())
        };
        let neg = LinearModel {
            weights: m.weights.iter().map(|w| -w).collect(),
            bias: -m.bias,
            ..m.clone()
        };
        let x = SparseVector::from_pairs(fp(), [(0, 2.0), (1, 0.5)]);
        let p = m.predict_proba(&x).unwrap();
        let q = neg.predict_proba(&x).unwrap();
        assert!((p + q - 1.0).abs() < 1e-15);
        assert_eq!(m.predict_proba(&x.scaled(0.0)).unwrap(), sigmoid(0.4));
    }

    #[test]
    fn input_errors() {
        let xs = [vec1(1.0), vec1(2.0)];
        let cfg = TrainConfig::default();
        assert!(matches!(
            LinearModel::train(&xs, &[Label::F, Label::F], 1, &cfg),
            Err(LinearError::SingleClassInput)
        ));
        let other = SparseVector::from_pairs(Fingerprint::of_parts(["x"]), [(0, 1.0)]);
        assert!(matches!(
            LinearModel::train(&[vec1(1.0), other.clone()], &[Label::F, Label::M], 1, &cfg),
            Err(LinearError::FingerprintMismatch { .. })
        ));
        assert!(matches!(
            LinearModel::train(&xs, &[Label::F, Label::M], 0, &cfg),
            Err(LinearError::DimensionMismatch(_))
        ));
        let m = LinearModel::zeros(1, fp(), cfg);
        assert!(matches!(m.predict_proba(&other), Err(LinearError::FingerprintMismatch { .. })));
    }

    #[test]
    fn objective_trace_is_monotone() {
        let xs: Vec<SparseVector> = (0..40)
            .map(|i| SparseVector::from_pairs(fp(), [(i % 7, (i % 5) as f64 + 1.0), (7 + i % 3, 30.0)]))
            .collect();
        let ys: Vec<Label> = (0..40).map(|i| if i % 2 == 0 { Label::F } else { Label::M }).collect();
        let cfg = TrainConfig { learning_rate: 5.0, ..Default::default() };
        let m = LinearModel::train(&xs, &ys, 10, &cfg).unwrap();
        assert_eq!(m.objective_trace.len(), 21);
        for w in m.objective_trace.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    proptest! {
        #[test]
        fn probability_in_open_interval(w in -1e3f64..1e3, b in -1e3f64..1e3, x in -10.0f64..10.0) {
            let m = LinearModel { weights: vec![w], bias: b, ..LinearModel::zeros(1, fp(), TrainConfig::default()) };
            let p = m.predict_proba(&vec1(x)).unwrap();
            prop_assert!(p > 0.0 && p < 1.0);
        }
    }
}
