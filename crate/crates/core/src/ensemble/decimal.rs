//! Exact decimal <-> rational conversion for accuracies and weights.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Digits kept after the point when a value has no finite decimal form.
const MAX_FRACTION_DIGITS: usize = 17;

/// Parses `[-]digits[.digits]` (or `.digits`) into an exact rational.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let denom = BigInt::from(10u32).pow(frac.len() as u32);
    let r = BigRational::new(numer, denom);
    Some(if neg { -r } else { r })
}

/// Writes the exact decimal expansion when it terminates, otherwise the value
/// rounded half away from zero to 17 fractional digits.
pub fn format_decimal(r: &BigRational) -> String {
    let neg = r.is_negative();
    let r = r.abs();
    let ten = BigInt::from(10u32);
    let (int, mut rem) = r.numer().div_rem(r.denom());
    let mut frac = String::new();
    while !rem.is_zero() && frac.len() < MAX_FRACTION_DIGITS {
        rem *= &ten;
        let (d, next) = rem.div_rem(r.denom());
        frac.push_str(&d.to_string());
        rem = next;
    }
    let mut int = int;
    if !rem.is_zero() {
        // round on the remainder
        if &rem * 2u32 >= *r.denom() {
            let mut digits: Vec<u8> = frac.bytes().map(|b| b - b'0').collect();
            let mut carry = true;
            for d in digits.iter_mut().rev() {
                if !carry {
                    break;
                }
                *d += 1;
                carry = *d == 10;
                if carry {
                    *d = 0;
                }
            }
            if carry {
                int += 1;
            }
            frac = digits.iter().map(|d| (b'0' + d) as char).collect();
        }
        while frac.ends_with('0') {
            frac.pop();
        }
    }
    let sign = if neg && !(int.is_zero() && frac.is_empty()) { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses() {
        assert_eq!(parse_decimal("0.55"), Some(q(11, 20)));
        assert_eq!(parse_decimal("1"), Some(q(1, 1)));
        assert_eq!(parse_decimal(".5"), Some(q(1, 2)));
        assert_eq!(parse_decimal("-0.10"), Some(q(-1, 10)));
        for bad in ["", ".", "1e3", "0.5.5", "abc", "1,5"] {
            assert_eq!(parse_decimal(bad), None, "{bad}");
        }
    }

    #[test]
    fn formats() {
        assert_eq!(format_decimal(&q(11, 20)), "0.55");
        assert_eq!(format_decimal(&q(-1, 10)), "-0.1");
        assert_eq!(format_decimal(&q(3, 1)), "3");
        assert_eq!(format_decimal(&q(1, 3)), "0.33333333333333333");
        assert_eq!(format_decimal(&q(2, 3)), "0.66666666666666667");
        assert_eq!(format_decimal(&q(0, 1)), "0");
    }

    proptest! {
        #[test]
        fn terminating_round_trip(n in -1_000_000i64..1_000_000, e in 0u32..8) {
            let r = q(n, 10i64.pow(e));
            prop_assert_eq!(parse_decimal(&format_decimal(&r)), Some(r));
        }
    }
}
