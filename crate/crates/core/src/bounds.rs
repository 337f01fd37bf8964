//! Upper bounds on the optimal win rate, the lower envelope from the best
//! known block strategies, slope diagnostics near 0 and 1, and CSV curves.

use std::path::Path;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{HatError, Result};
use crate::exact::rational::{
    check_probability, float_to_significant, parse_rational, to_f64, to_significant,
};
use crate::exact::RationalFunction;
use crate::machine::{builtin_machine, derive_closed_form, Builtin};

/// Largest binomial exponent evaluated in exact arithmetic.
pub const EXACT_EXPONENT_LIMIT: u64 = 1 << 20;
pub const CSV_DIGITS: usize = 15;

#[derive(Clone, Debug, PartialEq)]
pub struct BoundRecord {
    /// Reduced `a/b`.
    pub p: BigRational,
    pub lower: BigRational,
    pub lower_witness: Builtin,
    pub upper: BigRational,
    /// `C(b, a)`.
    pub binomial_exponent: BigInt,
    /// False when `upper` came from a log-space float.
    pub upper_exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerEnvelope {
    pub p: BigRational,
    pub value: BigRational,
    pub witness: Builtin,
}

fn closed_forms() -> &'static (RationalFunction, RationalFunction) {
    static FORMS: OnceLock<(RationalFunction, RationalFunction)> = OnceLock::new();
    FORMS.get_or_init(|| {
        let v = |b| {
            derive_closed_form(&builtin_machine(b))
                .expect("builtin solves")
                .value
        };
        (v(Builtin::S1), v(Builtin::S3))
    })
}

/// `max(V_S1, V_S3)`: S1 up to and including 1/2, S3 above.
pub fn lower_envelope(p: &BigRational) -> Result<LowerEnvelope> {
    check_probability(p)?;
    let (s1, s3) = closed_forms();
    let half = BigRational::new(1.into(), 2.into());
    let (witness, form) = if p <= &half {
        (Builtin::S1, s1)
    } else {
        (Builtin::S3, s3)
    };
    Ok(LowerEnvelope {
        p: p.clone(),
        value: form.eval(p)?,
        witness,
    })
}

/// `a/b - n^e f / b^(e+1)` with integer powers only. Both `n` and `f` are
/// `±a` mod every prime of `b`, so the numerator is coprime to `b` and the
/// quotient is already reduced; gcd on multi-megabit integers is avoided.
fn exact_upper(a: u64, b: u64, n: &BigInt, f: &BigInt, e: u64) -> BigRational {
    let e = e as u32;
    let b = BigInt::from(b);
    let b_pow = b.pow(e);
    let numer = BigInt::from(a) * &b_pow - n.pow(e) * f;
    BigRational::new_raw(numer, b_pow * b)
}

/// Bound for `p = a/b` in lowest terms: `p - (1-p)^C(b,a) p` when
/// `p ≤ 1/2`, `p - p^C(b,a) (1-p)` otherwise.
pub fn upper_bound(p: &BigRational) -> Result<BoundRecord> {
    if p <= &BigRational::zero() || p >= &BigRational::one() {
        return Err(HatError::ProbabilityOutOfRange(format!(
            "{} (the upper bound needs 0 < p < 1)",
            crate::exact::rational_to_string(p)
        )));
    }
    // BigRational is always reduced
    let a = p
        .numer()
        .to_u64()
        .ok_or_else(|| HatError::invalid("numerator too large"))?;
    let b = p
        .denom()
        .to_u64()
        .ok_or_else(|| HatError::invalid("denominator too large"))?;
    let c: BigInt = num_integer::binomial(BigInt::from(b), BigInt::from(a));
    let q = BigRational::one() - p;
    let low_side = p <= &BigRational::new(1.into(), 2.into());
    let (base, factor) = if low_side { (&q, p) } else { (p, &q) };

    let (upper, upper_exact) = match c.to_u64().filter(|&c| c <= EXACT_EXPONENT_LIMIT) {
        Some(e) => (exact_upper(a, b, base.numer(), factor.numer(), e), true),
        None => {
            let cf = c.to_f64().unwrap_or(f64::INFINITY);
            let tail = (cf * to_f64(base).ln()).exp() * to_f64(factor);
            let v = to_f64(p) - tail;
            (
                BigRational::from_float(v).unwrap_or_else(|| p.clone()),
                false,
            )
        }
    };
    let lower = lower_envelope(p)?;
    Ok(BoundRecord {
        p: p.clone(),
        lower: lower.value,
        lower_witness: lower.witness,
        upper,
        binomial_exponent: c,
        upper_exact,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeDiagnostics {
    /// `V_S1'(0)`.
    pub s1_slope_at_zero: BigRational,
    /// `V_S3'(1)`.
    pub s3_slope_at_one: BigRational,
    pub b: u64,
    /// `b · UB(1/b)`, tending to `1 - 1/e`.
    pub upper_slope_at_zero: f64,
    /// `b · (1 - UB((b-1)/b))`, tending to `1 + 1/e`.
    pub upper_slope_at_one: f64,
}

pub fn derivative_diagnostics() -> Result<DerivativeDiagnostics> {
    const B: u64 = 10_000;
    let (s1, s3) = closed_forms();
    let b = BigRational::from_integer(B.into());
    let near_zero = upper_bound(&BigRational::new(1.into(), B.into()))?;
    let near_one = upper_bound(&BigRational::new((B - 1).into(), B.into()))?;
    Ok(DerivativeDiagnostics {
        s1_slope_at_zero: s1.derivative().eval(&BigRational::zero())?,
        s3_slope_at_one: s3.derivative().eval(&BigRational::one())?,
        b: B,
        upper_slope_at_zero: to_f64(&(&b * near_zero.upper)),
        upper_slope_at_one: to_f64(&(&b * (BigRational::one() - near_one.upper))),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveRow {
    pub p: BigRational,
    pub lower: BigRational,
    pub witness: Builtin,
    /// `None` when the bound is not exact and only exact values were requested.
    pub upper: Option<BigRational>,
    pub upper_exact: bool,
}

/// Parses `"start:stop:count"` (inclusive, evenly spaced) or a
/// comma-separated list of exact rationals.
pub fn parse_grid(spec: &str) -> Result<Vec<BigRational>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    let grid = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(HatError::invalid(format!(
                "grid {spec:?} is not start:stop:count"
            )));
        };
        let start = parse_rational(start)?;
        let stop = parse_rational(stop)?;
        let count: u64 = count
            .trim()
            .parse()
            .map_err(|_| HatError::invalid(format!("bad grid count {count:?}")))?;
        match count {
            0 => Vec::new(),
            1 => vec![start],
            _ => {
                let step = (&stop - &start) / BigRational::from_integer((count - 1).into());
                (0..count)
                    .map(|i| &start + &step * BigRational::from_integer(i.into()))
                    .collect()
            }
        }
    } else {
        spec.split(',')
            .map(parse_rational)
            .collect::<Result<Vec<_>>>()?
    };
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(HatError::invalid("grid values must be strictly increasing"));
    }
    Ok(grid)
}

pub fn curve_rows(grid: &[BigRational], exact_only: bool) -> Result<Vec<CurveRow>> {
    grid.iter()
        .map(|p| {
            let r = upper_bound(p)?;
            Ok(CurveRow {
                p: r.p,
                lower: r.lower,
                witness: r.lower_witness,
                upper: (r.upper_exact || !exact_only).then_some(r.upper),
                upper_exact: r.upper_exact,
            })
        })
        .collect()
}

/// CSV text with header `p,lower,upper,witness`.
pub fn render_curve(rows: &[CurveRow]) -> String {
    let mut out = String::from("p,lower,upper,witness\n");
    for r in rows {
        let upper = match &r.upper {
            Some(u) if r.upper_exact => to_significant(u, CSV_DIGITS),
            Some(u) => float_to_significant(to_f64(u), CSV_DIGITS),
            None => String::new(),
        };
        out.push_str(&format!(
            "{},{},{},{}\n",
            to_significant(&r.p, CSV_DIGITS),
            to_significant(&r.lower, CSV_DIGITS),
            upper,
            r.witness
        ));
    }
    out
}

pub fn emit_curve(grid: &[BigRational], out: &Path, exact_only: bool) -> Result<Vec<CurveRow>> {
    let rows = curve_rows(grid, exact_only)?;
    std::fs::write(out, render_curve(&rows))?;
    Ok(rows)
}
