//! Weighted voting over ±1 predictions.
//!
//! Each member votes with weight `validation_accuracy - 0.5`, its deviation
//! from a coin flip, so a worse-than-random member contributes the opposite
//! of what it predicts. A document's score is `Σ weight_i · prediction_i`,
//! and the score's sign picks the label (zero goes to the positive label).
//! Everything is done in exact rational arithmetic, so ties are detected
//! exactly.

mod decimal;
mod predfile;

use std::collections::HashSet;

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::corpus::Label;

pub use decimal::{format_decimal, parse_decimal};
pub use predfile::{load_external_predictions, load_members_dir, read_predictions, write_predictions, PREDICTION_EXT};

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("accuracy {0} outside [0, 1]")]
    OutOfRange(String),
    #[error("member `{member}` has no prediction for `{doc_id}`")]
    MissingPrediction { member: String, doc_id: String },
    #[error("ensemble has no members")]
    EmptyEnsemble,
    #[error("member `{member}` covers a different document set")]
    DocumentSetMismatch { member: String },
    #[error("duplicate member name `{0}`")]
    DuplicateMember(String),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: unknown label `{label}`")]
    UnknownLabel { line: usize, label: String },
    #[error("line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("duplicate document id `{0}`")]
    DuplicateDocId(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Exact `acc - 1/2`.
pub fn member_weight(validation_accuracy: &BigRational) -> Result<BigRational, EnsembleError> {
    if validation_accuracy.is_negative() || *validation_accuracy > BigRational::one() {
        return Err(EnsembleError::OutOfRange(format_decimal(validation_accuracy)));
    }
    Ok(validation_accuracy - BigRational::new(1.into(), 2.into()))
}

/// Reads an accuracy written as a decimal, e.g. `"0.55"` becomes exactly 11/20.
pub fn accuracy_from_decimal(s: &str) -> Result<BigRational, EnsembleError> {
    let r = parse_decimal(s).ok_or_else(|| EnsembleError::OutOfRange(s.to_string()))?;
    member_weight(&r)?;
    Ok(r)
}

/// Interprets an `f64` accuracy by its shortest decimal form (`0.55_f64` is
/// taken as 55/100, not as the nearest binary fraction).
pub fn accuracy_from_f64(acc: f64) -> Result<BigRational, EnsembleError> {
    if !acc.is_finite() {
        return Err(EnsembleError::OutOfRange(acc.to_string()));
    }
    accuracy_from_decimal(&format!("{acc}"))
}

/// Which label maps to `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelEncoding {
    pub positive: Label,
}

impl Default for LabelEncoding {
    fn default() -> Self {
        Self { positive: Label::F }
    }
}

impl LabelEncoding {
    pub fn negative(&self) -> Label {
        self.positive.other()
    }

    pub fn encode(&self, label: Label) -> i8 {
        if label == self.positive {
            1
        } else {
            -1
        }
    }

    pub fn decode(&self, vote: i8) -> Label {
        if vote >= 0 {
            self.positive
        } else {
            self.negative()
        }
    }

    /// `F`, `M`, `+1`, `1` or `-1`.
    pub fn parse_vote(&self, s: &str) -> Option<i8> {
        match s {
            "+1" | "1" => Some(1),
            "-1" => Some(-1),
            other => other.parse::<Label>().ok().map(|l| self.encode(l)),
        }
    }

    /// Sign of the score; exact zero goes to the positive label.
    pub fn decide(&self, score: &BigRational) -> Label {
        if score.is_negative() {
            self.negative()
        } else {
            self.positive
        }
    }
}

/// One voter: its validation accuracy, derived weight and per-document votes.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMember {
    pub name: String,
    validation_accuracy: BigRational,
    weight: BigRational,
    predictions: IndexMap<String, i8>,
}

impl EnsembleMember {
    /// `predictions` values must be `+1` or `-1`.
    pub fn new(
        name: impl Into<String>,
        validation_accuracy: BigRational,
        predictions: IndexMap<String, i8>,
    ) -> Result<Self, EnsembleError> {
        let name = name.into();
        let weight = member_weight(&validation_accuracy)?;
        if let Some((id, v)) = predictions.iter().find(|(_, v)| v.abs() != 1) {
            return Err(EnsembleError::MalformedRow {
                line: 0,
                reason: format!("prediction {v} for `{id}` is not ±1"),
            });
        }
        Ok(Self {
            name,
            validation_accuracy,
            weight,
            predictions,
        })
    }

    /// Builds a member from labels under `encoding`.
    pub fn from_labels<'a>(
        name: impl Into<String>,
        validation_accuracy: BigRational,
        labels: impl IntoIterator<Item = (&'a str, Label)>,
        encoding: LabelEncoding,
    ) -> Result<Self, EnsembleError> {
        let mut preds = IndexMap::new();
        for (id, l) in labels {
            if preds.insert(id.to_string(), encoding.encode(l)).is_some() {
                return Err(EnsembleError::DuplicateDocId(id.to_string()));
            }
        }
        Self::new(name, validation_accuracy, preds)
    }

    pub fn validation_accuracy(&self) -> &BigRational {
        &self.validation_accuracy
    }

    pub fn weight(&self) -> &BigRational {
        &self.weight
    }

    pub fn weight_f64(&self) -> f64 {
        self.weight.to_f64().unwrap_or(f64::NAN)
    }

    pub fn predictions(&self) -> &IndexMap<String, i8> {
        &self.predictions
    }

    pub fn prediction(&self, doc_id: &str) -> Option<i8> {
        self.predictions.get(doc_id).copied()
    }

    /// The same member voting the other way on every document.
    pub fn negated(&self) -> Self {
        Self {
            predictions: self.predictions.iter().map(|(k, v)| (k.clone(), -v)).collect(),
            ..self.clone()
        }
    }
}

/// Weights rescaled to integers over one shared denominator, in machine
/// integers when everything fits and in big integers otherwise.
#[derive(Debug, Clone)]
enum Scaled {
    Small(Vec<i128>, i128),
    Big(Vec<BigInt>, BigInt),
}

impl Scaled {
    fn new(weights: &[&BigRational]) -> Self {
        Self::small(weights).unwrap_or_else(|| {
            let denom = weights.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
            let numers = weights.iter().map(|w| w.numer() * (&denom / w.denom())).collect();
            Scaled::Big(numers, denom)
        })
    }

    /// Keeps every numerator below 2^62 so that up to 2^64 of them sum
    /// without overflow.
    fn small(weights: &[&BigRational]) -> Option<Self> {
        const LIMIT: i128 = 1 << 62;
        let mut denom: i128 = 1;
        for w in weights {
            let d = w.denom().to_i128()?;
            denom = denom.checked_div(denom.gcd(&d))?.checked_mul(d)?;
            if denom > LIMIT {
                return None;
            }
        }
        let numers = weights
            .iter()
            .map(|w| {
                let n = w.numer().to_i128()?.checked_mul(denom / w.denom().to_i128()?)?;
                (n.abs() < LIMIT).then_some(n)
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Scaled::Small(numers, denom))
    }

    /// `Σ weight_i · vote_i` where `vote(i)` is the sign of member i's vote.
    fn sum(&self, mut vote: impl FnMut(usize) -> Option<i8>) -> Option<BigRational> {
        Some(match self {
            Scaled::Small(numers, denom) => {
                let mut acc: i128 = 0;
                for (i, n) in numers.iter().enumerate() {
                    if vote(i)? > 0 {
                        acc += n;
                    } else {
                        acc -= n;
                    }
                }
                BigRational::new(acc.into(), (*denom).into())
            }
            Scaled::Big(numers, denom) => {
                let mut acc = BigInt::zero();
                for (i, n) in numers.iter().enumerate() {
                    if vote(i)? > 0 {
                        acc += n;
                    } else {
                        acc -= n;
                    }
                }
                BigRational::new(acc, denom.clone())
            }
        })
    }
}

/// `Σ weights[i] · votes[i]`, exactly. Votes are read by sign.
pub fn weighted_vote(weights: &[BigRational], votes: &[i8]) -> BigRational {
    assert_eq!(weights.len(), votes.len(), "one vote per weight");
    let refs: Vec<&BigRational> = weights.iter().collect();
    Scaled::new(&refs)
        .sum(|i| Some(votes[i]))
        .expect("every index has a vote")
}

/// A validated set of members over one document set.
#[derive(Debug, Clone)]
pub struct Ensemble {
    members: Vec<EnsembleMember>,
    encoding: LabelEncoding,
    scaled: Scaled,
}

impl Ensemble {
    /// All members must share the same set of document ids and have unique names.
    pub fn new(members: Vec<EnsembleMember>, encoding: LabelEncoding) -> Result<Self, EnsembleError> {
        let first = members.first().ok_or(EnsembleError::EmptyEnsemble)?;
        let mut names = HashSet::new();
        for m in &members {
            if !names.insert(m.name.as_str()) {
                return Err(EnsembleError::DuplicateMember(m.name.clone()));
            }
            let same = m.predictions.len() == first.predictions.len()
                && m.predictions.keys().all(|k| first.predictions.contains_key(k));
            if !same {
                return Err(EnsembleError::DocumentSetMismatch { member: m.name.clone() });
            }
        }
        let weights: Vec<&BigRational> = members.iter().map(|m| &m.weight).collect();
        let scaled = Scaled::new(&weights);
        Ok(Self {
            members,
            encoding,
            scaled,
        })
    }

    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }

    pub fn encoding(&self) -> LabelEncoding {
        self.encoding
    }

    /// Document ids in the first member's order.
    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.members[0].predictions.keys().map(String::as_str)
    }

    pub fn combine(&self, doc_id: &str) -> Result<(Label, BigRational), EnsembleError> {
        let mut missing = None;
        let score = self.scaled.sum(|i| {
            let m = &self.members[i];
            let v = m.prediction(doc_id);
            if v.is_none() {
                missing = Some(m.name.clone());
            }
            v
        });
        match score {
            Some(score) => Ok((self.encoding.decide(&score), score)),
            None => Err(EnsembleError::MissingPrediction {
                member: missing.unwrap_or_default(),
                doc_id: doc_id.to_string(),
            }),
        }
    }

    /// Labels for every document, in [`Ensemble::doc_ids`] order.
    pub fn combine_all(&self) -> Result<IndexMap<String, Label>, EnsembleError> {
        self.doc_ids()
            .map(|id| Ok((id.to_string(), self.combine(id)?.0)))
            .collect()
    }
}

/// Single-shot [`Ensemble::combine`] for callers holding a plain member list.
pub fn combine(
    members: &[EnsembleMember],
    doc_id: &str,
    encoding: LabelEncoding,
) -> Result<(Label, BigRational), EnsembleError> {
    if members.is_empty() {
        return Err(EnsembleError::EmptyEnsemble);
    }
    let mut weights = Vec::with_capacity(members.len());
    let mut votes = Vec::with_capacity(members.len());
    for m in members {
        votes.push(m.prediction(doc_id).ok_or_else(|| EnsembleError::MissingPrediction {
            member: m.name.clone(),
            doc_id: doc_id.to_string(),
        })?);
        weights.push(m.weight.clone());
    }
    let score = weighted_vote(&weights, &votes);
    Ok((encoding.decide(&score), score))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn member(name: &str, acc: &str, votes: &[(&str, i8)]) -> EnsembleMember {
        let preds = votes.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        EnsembleMember::new(name, accuracy_from_decimal(acc).unwrap(), preds).unwrap()
    }

    #[test]
    fn weights_are_exact() {
        assert_eq!(member_weight(&accuracy_from_decimal("0.55").unwrap()).unwrap(), q(1, 20));
        assert_eq!(member_weight(&accuracy_from_decimal("0.40").unwrap()).unwrap(), q(-1, 10));
        assert_eq!(member_weight(&accuracy_from_f64(0.55).unwrap()).unwrap(), q(1, 20));
        assert!(member_weight(&q(1, 2)).unwrap().is_zero());
        assert!(matches!(accuracy_from_decimal("1.2"), Err(EnsembleError::OutOfRange(_))));
        assert!(matches!(member_weight(&q(-1, 100)), Err(EnsembleError::OutOfRange(_))));
    }

    #[test]
    fn worked_examples() {
        let enc = LabelEncoding::default();
        let a = member("a", "0.55", &[("d", 1)]);
        let b = member("b", "0.40", &[("d", 1)]);
        let (label, score) = combine(&[a.clone(), b], "d", enc).unwrap();
        assert_eq!((label, score), (Label::M, q(-1, 20)));

        let single = member("s", "0.55", &[("d", -1)]);
        assert_eq!(combine(&[single], "d", enc).unwrap(), (Label::M, q(-1, 20)));

        let z1 = member("z1", "0.5", &[("d", -1)]);
        let z2 = member("z2", "0.5", &[("d", -1)]);
        assert_eq!(combine(&[z1, z2], "d", enc).unwrap(), (Label::F, q(0, 1)));

        assert!(matches!(combine(&[], "d", enc), Err(EnsembleError::EmptyEnsemble)));
        assert!(matches!(
            combine(&[a], "other", enc),
            Err(EnsembleError::MissingPrediction { .. })
        ));
    }

    #[test]
    fn ensemble_matches_free_function() {
        let members = vec![
            member("a", "0.61", &[("x", 1), ("y", -1)]),
            member("b", "0.33", &[("x", 1), ("y", 1)]),
            member("c", "0.5", &[("x", -1), ("y", -1)]),
        ];
        let enc = LabelEncoding::default();
        let e = Ensemble::new(members.clone(), enc).unwrap();
        for id in ["x", "y"] {
            assert_eq!(e.combine(id).unwrap(), combine(&members, id, enc).unwrap());
        }
    }

    #[test]
    fn ensemble_validation() {
        let a = member("a", "0.6", &[("x", 1)]);
        let b = member("b", "0.6", &[("y", 1)]);
        assert!(matches!(
            Ensemble::new(vec![a.clone(), b], LabelEncoding::default()),
            Err(EnsembleError::DocumentSetMismatch { .. })
        ));
        assert!(matches!(
            Ensemble::new(vec![a.clone(), a], LabelEncoding::default()),
            Err(EnsembleError::DuplicateMember(_))
        ));
        assert!(matches!(
            Ensemble::new(vec![], LabelEncoding::default()),
            Err(EnsembleError::EmptyEnsemble)
        ));
    }

    #[test]
    fn encoding_round_trip() {
        for positive in Label::ALL {
            let enc = LabelEncoding { positive };
            for l in Label::ALL {
                assert_eq!(enc.decode(enc.encode(l)), l);
            }
        }
        let enc = LabelEncoding::default();
        assert_eq!(enc.parse_vote("F"), Some(1));
        assert_eq!(enc.parse_vote("M"), Some(-1));
        assert_eq!(enc.parse_vote("+1"), Some(1));
        assert_eq!(enc.parse_vote("-1"), Some(-1));
        assert_eq!(enc.parse_vote("0"), None);
    }
}
