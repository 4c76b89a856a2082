use indexmap::IndexMap;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::HarnessError;
use crate::corpus::Label;
use crate::ensemble::parse_decimal;

/// Fraction of documents whose predicted label equals the gold label. Both
/// maps must cover the same ids.
pub fn accuracy(
    predictions: &IndexMap<String, Label>,
    gold: &IndexMap<String, Label>,
) -> Result<f64, HarnessError> {
    let (correct, total) = correct_count(predictions, gold)?;
    Ok(correct as f64 / total as f64)
}

/// `(correct, total)` behind [`accuracy`].
pub fn correct_count(
    predictions: &IndexMap<String, Label>,
    gold: &IndexMap<String, Label>,
) -> Result<(usize, usize), HarnessError> {
    if gold.is_empty() {
        return Err(HarnessError::EmptyInput("no gold labels".into()));
    }
    if predictions.len() != gold.len() {
        return Err(HarnessError::KeyMismatch(format!(
            "{} predictions for {} gold labels",
            predictions.len(),
            gold.len()
        )));
    }
    let mut correct = 0;
    for (id, g) in gold {
        let p = predictions
            .get(id)
            .ok_or_else(|| HarnessError::KeyMismatch(format!("no prediction for `{id}`")))?;
        correct += usize::from(p == g);
    }
    Ok((correct, gold.len()))
}

/// Unrounded arithmetic mean.
pub fn macro_average(values: &[f64]) -> Result<f64, HarnessError> {
    if values.is_empty() {
        return Err(HarnessError::EmptyInput("nothing to average".into()));
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Rounds half away from zero to `places` decimals and prints exactly that
/// many. The value is taken at its shortest decimal form, so `2.675` rounds
/// to `2.68` even though the nearest double is slightly below it.
pub fn round_half_away(x: f64, places: u32) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let exact = parse_decimal(&format!("{x}")).expect("finite f64 Display is a plain decimal");
    let scale = BigInt::from(10u32).pow(places);
    let scaled = exact.abs() * BigRational::from_integer(scale.clone());
    let half = BigRational::new(1.into(), 2.into());
    let n = (scaled + half).floor().to_integer();
    let (int, frac) = n.div_rem(&scale);
    let sign = if x < 0.0 && !n.is_zero() { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{:0>width$}", frac.to_string(), width = places as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(xs: &[(&str, Label)]) -> IndexMap<String, Label> {
        xs.iter().map(|(k, l)| (k.to_string(), *l)).collect()
    }

    #[test]
    fn accuracy_cases() {
        use Label::*;
        let gold = labels(&[("a", F), ("b", M), ("c", F), ("d", M)]);
        assert_eq!(accuracy(&gold, &gold).unwrap(), 1.0);
        let flipped: IndexMap<_, _> = gold.iter().map(|(k, l)| (k.clone(), l.other())).collect();
        assert_eq!(accuracy(&flipped, &gold).unwrap(), 0.0);
        let three = labels(&[("a", F), ("b", M), ("c", F), ("d", F)]);
        assert_eq!(accuracy(&three, &gold).unwrap(), 0.75);
        let wrong_keys = labels(&[("a", F), ("b", M), ("c", F), ("e", M)]);
        assert!(matches!(accuracy(&wrong_keys, &gold), Err(HarnessError::KeyMismatch(_))));
        assert!(matches!(
            accuracy(&IndexMap::new(), &IndexMap::new()),
            Err(HarnessError::EmptyInput(_))
        ));
    }

    #[test]
    fn averages() {
        assert_eq!(round_half_away(macro_average(&[64.75, 62.47, 66.60]).unwrap(), 2), "64.61");
        assert_eq!(round_half_away(macro_average(&[57.89, 56.98, 53.50]).unwrap(), 2), "56.12");
        assert_eq!(round_half_away(macro_average(&[65.01, 63.49, 66.30]).unwrap(), 2), "64.93");
        assert_eq!(macro_average(&[42.5]).unwrap(), 42.5);
        assert!(macro_average(&[]).is_err());
    }

    #[test]
    fn rounding() {
        assert_eq!(round_half_away(2.675, 2), "2.68");
        assert_eq!(round_half_away(-2.675, 2), "-2.68");
        assert_eq!(round_half_away(0.125, 2), "0.13");
        assert_eq!(round_half_away(1.0, 2), "1.00");
        assert_eq!(round_half_away(-0.001, 2), "0.00");
        assert_eq!(round_half_away(99.995, 2), "100.00");
        assert_eq!(round_half_away(2.5, 0), "3");
    }
}
