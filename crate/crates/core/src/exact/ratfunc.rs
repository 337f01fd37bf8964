//! Rational functions in one variable over the integers, kept in a unique
//! canonical form so that equality is structural.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::poly::IntPolynomial;
use crate::error::{HatError, Result};

/// `numerator / denominator` in canonical form:
///
/// * numerator and denominator share no polynomial factor,
/// * the gcd of all their coefficients together is 1,
/// * the lowest-degree nonzero coefficient of the denominator is positive,
/// * zero is `0 / 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: IntPolynomial,
    den: IntPolynomial,
}

impl RationalFunction {
    /// Reduces `num / den` to canonical form.
    pub fn normalize(num: IntPolynomial, den: IntPolynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(HatError::DivisionByZeroPolynomial);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = IntPolynomial::gcd_primitive(&num, &den);
        let (mut num, mut den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let c = num.content().gcd(&den.content());
        if c != BigInt::from(1) {
            num = num.div_scalar(&c);
            den = den.div_scalar(&c);
        }
        if den.trailing().is_some_and(Signed::is_negative) {
            num = -&num;
            den = -&den;
        }
        Ok(RationalFunction { num, den })
    }

    pub fn zero() -> Self {
        RationalFunction {
            num: IntPolynomial::zero(),
            den: IntPolynomial::one(),
        }
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        Self::from_poly(IntPolynomial::constant(c))
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self::normalize(
            IntPolynomial::constant(r.numer().clone()),
            IntPolynomial::constant(r.denom().clone()),
        )
        .expect("rational denominator is nonzero")
    }

    pub fn from_poly(p: IntPolynomial) -> Self {
        Self::normalize(p, IntPolynomial::one()).expect("unit denominator")
    }

    /// The variable `p`.
    pub fn var() -> Self {
        Self::from_poly(IntPolynomial::var())
    }

    pub fn numer(&self) -> &IntPolynomial {
        &self.num
    }

    pub fn denom(&self) -> &IntPolynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `deg num + deg den`, used to rank pivots.
    pub fn total_degree(&self) -> usize {
        self.num.degree().unwrap_or(0) + self.den.degree().unwrap_or(0)
    }

    pub fn eval(&self, x: &BigRational) -> Result<BigRational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(HatError::Pole(x.to_string()));
        }
        Ok(self.num.eval(x) / d)
    }

    /// Quotient-rule derivative with respect to `p`.
    pub fn derivative(&self) -> Self {
        let top = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::normalize(top, &self.den * &self.den).expect("nonzero denominator squared")
    }

    /// `f(1 - p)`.
    pub fn reflect(&self) -> Self {
        let q = IntPolynomial::one_minus_var();
        Self::normalize(self.num.compose(&q), self.den.compose(&q))
            .expect("reflection keeps the denominator nonzero")
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(HatError::DivisionByZeroPolynomial);
        }
        Self::normalize(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    /// `"num_coeffs / den_coeffs"`, coefficients lowest degree first.
    pub fn to_exact_string(&self) -> String {
        format!(
            "{} / {}",
            self.num.to_coeff_string(),
            self.den.to_coeff_string()
        )
    }

    pub fn parse_exact(s: &str) -> Result<Self> {
        let (n, d) = s
            .split_once('/')
            .ok_or_else(|| HatError::invalid(format!("expected 'num / den', got {s:?}")))?;
        let parse = |t: &str| {
            IntPolynomial::parse_coeff_string(t)
                .ok_or_else(|| HatError::invalid(format!("bad coefficient list {t:?}")))
        };
        Self::normalize(parse(n)?, parse(d)?)
    }
}

impl Default for RationalFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({})", self.to_exact_string())
    }
}

/// Factors the largest power of `p` out of the numerator, e.g.
/// `p(1 - p + p^2 + p^3)/(2 - 3p + 3p^2)`.
impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.num.valuation();
        let num = if self.num.is_zero() || v == 0 {
            format_group(&self.num)
        } else {
            let rest = IntPolynomial::new(self.num.coeffs()[v..].to_vec());
            let pv = if v == 1 {
                "p".to_string()
            } else {
                format!("p^{v}")
            };
            if rest.degree() == Some(0) {
                match rest.coeffs()[0].to_string().as_str() {
                    "1" => pv,
                    "-1" => format!("-{pv}"),
                    c => format!("{c}{pv}"),
                }
            } else {
                format!("{pv}({rest})")
            }
        };
        if self.den == IntPolynomial::one() {
            write!(f, "{num}")
        } else {
            write!(f, "{num}/{}", format_group(&self.den))
        }
    }
}

fn format_group(p: &IntPolynomial) -> String {
    let nonzero = p.coeffs().iter().filter(|c| !c.is_zero()).count();
    if nonzero > 1 {
        format!("({p})")
    } else {
        p.to_string()
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;

    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.den == rhs.den {
            return RationalFunction::normalize(&self.num + &rhs.num, self.den.clone())
                .expect("nonzero denominator");
        }
        RationalFunction::normalize(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
        .expect("product of nonzero denominators")
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;

    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;

    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;

    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction::normalize(&self.num * &rhs.num, &self.den * &rhs.den)
            .expect("product of nonzero denominators")
    }
}

/// Panics on division by the zero function; use [`RationalFunction::checked_div`]
/// when the divisor may vanish.
impl Div for &RationalFunction {
    type Output = RationalFunction;

    fn div(self, rhs: &RationalFunction) -> RationalFunction {
        self.checked_div(rhs)
            .expect("division by zero rational function")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);
