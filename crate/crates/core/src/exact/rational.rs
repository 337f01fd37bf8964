//! Parsing and decimal rendering of exact rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{HatError, Result};

/// Parses `"a/b"` or an integer. Decimal notation is rejected so that
/// `0.35` can never silently stand in for `7/20`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || {
        HatError::invalid(format!(
            "expected an exact rational 'a/b' or integer, got {s:?}"
        ))
    };
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(HatError::invalid(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

/// `"num/den"`, or just the integer when the denominator is 1.
pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_from_ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn check_probability(p: &BigRational) -> Result<()> {
    if p.is_negative() || p > &BigRational::one() {
        return Err(HatError::ProbabilityOutOfRange(rational_to_string(p)));
    }
    Ok(())
}

/// Rounds `r` to `digits` significant digits (half to even) and renders
/// it in positional notation, e.g. `0.0726178426539313` or `0.500000000000000`.
pub fn to_significant(r: &BigRational, digits: usize) -> String {
    assert!(digits > 0);
    if r.is_zero() {
        return format!("0.{}", "0".repeat(digits - 1));
    }
    let neg = r.is_negative();
    let a = r.abs();
    let ten = BigRational::from_integer(BigInt::from(10));
    // exponent e with 10^e <= a < 10^(e+1)
    let mut e: i64 = (a.numer().bits() as i64 - a.denom().bits() as i64) * 30103 / 100000;
    let pow10 = |k: i64| -> BigRational {
        if k >= 0 {
            num_traits::pow(ten.clone(), k as usize)
        } else {
            num_traits::pow(ten.clone(), (-k) as usize).recip()
        }
    };
    while pow10(e) > a {
        e -= 1;
    }
    while pow10(e + 1) <= a {
        e += 1;
    }
    let shift = digits as i64 - 1 - e;
    let mut scaled = round_half_even(&(&a * pow10(shift)));
    if scaled.to_string().len() > digits {
        // rounding carried into a new digit
        e += 1;
        scaled = round_half_even(&(&a * pow10(digits as i64 - 1 - e)));
    }
    let ds = scaled.to_string();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if e < 0 {
        out.push_str("0.");
        out.push_str(&"0".repeat((-e - 1) as usize));
        out.push_str(&ds);
    } else if (e as usize) + 1 >= digits {
        out.push_str(&ds);
        out.push_str(&"0".repeat(e as usize + 1 - digits));
    } else {
        let split = e as usize + 1;
        out.push_str(&ds[..split]);
        out.push('.');
        out.push_str(&ds[split..]);
    }
    out
}

/// Like [`to_significant`] but without trailing fractional zeros: `0.35`, `0.34375`.
pub fn to_decimal(r: &BigRational, digits: usize) -> String {
    let s = to_significant(r, digits);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Same rendering for a float, through its exact binary value.
pub fn float_to_significant(x: f64, digits: usize) -> String {
    match BigRational::from_float(x) {
        Some(r) => to_significant(&r, digits),
        None => x.to_string(),
    }
}

/// Converts a rational of any size to the nearest-ish `f64`.
pub fn to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // scale both sides down to 60 significant bits
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let sn = (nb - 60).max(0);
    let sd = (db - 60).max(0);
    let n = (r.numer() >> sn as usize).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> sd as usize).to_f64().unwrap_or(1.0);
    n / d * 2f64.powi((sn - sd) as i32)
}

fn round_half_even(x: &BigRational) -> BigInt {
    let (q, rem) = x.numer().div_mod_floor(x.denom());
    let twice: BigInt = rem * 2;
    match twice.cmp(x.denom()) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => {
            if q.is_even() {
                q
            } else {
                q + 1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        rational_from_ratio(n, d)
    }

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("7/20").unwrap(), q(7, 20));
        assert_eq!(parse_rational(" 2/4 ").unwrap(), q(1, 2));
        assert_eq!(parse_rational("1").unwrap(), q(1, 1));
        assert_eq!(parse_rational("-3/9").unwrap(), q(-1, 3));
    }

    #[test]
    fn rejects_decimals_and_junk() {
        assert!(parse_rational("0.35").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
    }

    #[test]
    fn significant_digit_rendering() {
        assert_eq!(to_significant(&q(1, 2), 15), "0.500000000000000");
        assert_eq!(to_significant(&q(1, 9), 15), "0.111111111111111");
        assert_eq!(to_significant(&q(2, 3), 15), "0.666666666666667");
        assert_eq!(to_significant(&q(1, 7), 15), "0.142857142857143");
        assert_eq!(
            to_significant(&q(543607, 5764801), 15),
            "0.0942976175586980"
        );
        assert_eq!(to_significant(&q(123, 1), 5), "123.00");
        assert_eq!(to_significant(&q(123456, 1), 3), "123000");
        assert_eq!(to_significant(&q(-1, 4), 3), "-0.250");
        assert_eq!(to_significant(&q(0, 1), 3), "0.00");
        // 0.99999... rounds up into a new leading digit
        assert_eq!(to_significant(&q(999_999, 1_000_000), 3), "1.00");
    }

    #[test]
    fn decimal_rendering_trims() {
        assert_eq!(to_decimal(&q(7, 20), 15), "0.35");
        assert_eq!(to_decimal(&q(11, 32), 15), "0.34375");
        assert_eq!(to_decimal(&q(2101, 15625), 15), "0.134464");
        assert_eq!(to_decimal(&q(3, 1), 15), "3");
    }

    #[test]
    fn huge_rationals_convert_to_float() {
        let big = num_traits::pow(BigInt::from(10), 400);
        let r = BigRational::new(big.clone() * 3, big * 4);
        assert_eq!(to_f64(&r), 0.75);
        let tiny = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(2), 2000));
        assert_eq!(to_f64(&tiny), 0.0);
    }
}
