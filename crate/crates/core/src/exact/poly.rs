//! Dense univariate polynomials with arbitrary-precision integer coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Polynomial in `p`; `coeffs[k]` is the coefficient of `p^k`.
///
/// The zero polynomial has no coefficients and the highest stored
/// coefficient is never zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    /// The variable `p`.
    pub fn var() -> Self {
        Self::from_i64s(&[0, 1])
    }

    /// `1 - p`.
    pub fn one_minus_var() -> Self {
        Self::from_i64s(&[1, -1])
    }

    /// `c * p^k`.
    pub fn monomial(c: impl Into<BigInt>, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c.into();
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// Lowest-degree nonzero coefficient.
    pub fn trailing(&self) -> Option<&BigInt> {
        self.coeffs.iter().find(|c| !c.is_zero())
    }

    /// Number of leading zero coefficients, i.e. the largest `k` with `p^k | self`.
    pub fn valuation(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Nonnegative gcd of the coefficients; zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// `self / content`, keeping the sign of every coefficient.
    pub fn primitive_part(&self) -> Self {
        let c = self.content();
        if c.is_zero() || c.is_one() {
            return self.clone();
        }
        self.div_scalar(&c)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Exact coefficientwise division; the caller guarantees divisibility.
    pub fn div_scalar(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c / k).collect())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    /// `self(inner(p))` by Horner's scheme.
    pub fn compose(&self, inner: &IntPolynomial) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Self::constant(c.clone());
        }
        acc
    }

    /// Pseudo-remainder of `self` by `divisor`:
    /// `lc(divisor)^(deg self - deg divisor + 1) * self mod divisor`.
    pub fn pseudo_rem(&self, divisor: &IntPolynomial) -> Self {
        let dd = divisor.degree().expect("pseudo_rem by zero polynomial");
        let lc = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let Some(sd) = self.degree() else {
            return Self::zero();
        };
        if sd < dd {
            return self.clone();
        }
        let mut scale_steps = sd - dd + 1;
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.len() - 1;
            let t = rem[top].clone();
            let shift = top - dd;
            for c in rem.iter_mut() {
                *c *= &lc;
            }
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[i + shift] -= &t * d;
            }
            scale_steps -= 1;
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        let mut r = Self::new(rem);
        if scale_steps > 0 {
            r = r.scale(&num_traits::pow(lc, scale_steps));
        }
        r
    }

    /// Primitive gcd of two polynomials (content 1, sign unspecified).
    /// `gcd(0, 0)` is zero.
    pub fn gcd_primitive(a: &IntPolynomial, b: &IntPolynomial) -> IntPolynomial {
        let (mut a, mut b) = if a.degree() >= b.degree() {
            (a.primitive_part(), b.primitive_part())
        } else {
            (b.primitive_part(), a.primitive_part())
        };
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a
    }

    /// Exact quotient `self / divisor` over the integers.
    ///
    /// Returns `None` if the division leaves a remainder or needs
    /// non-integer coefficients.
    pub fn div_exact(&self, divisor: &IntPolynomial) -> Option<IntPolynomial> {
        let dd = divisor.degree()?;
        let lc = divisor.leading().unwrap();
        let Some(sd) = self.degree() else {
            return Some(Self::zero());
        };
        if sd < dd {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); sd - dd + 1];
        for shift in (0..=sd - dd).rev() {
            let top = &rem[shift + dd];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(lc);
            if !r.is_zero() {
                return None;
            }
            for (i, d) in divisor.coeffs.iter().enumerate() {
                rem[i + shift] -= &q * d;
            }
            quot[shift] = q;
        }
        if rem.iter().all(Zero::is_zero) {
            Some(Self::new(quot))
        } else {
            None
        }
    }

    /// Comma-separated coefficients, lowest degree first; `0` for zero.
    pub fn to_coeff_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.coeffs
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_coeff_string(s: &str) -> Option<Self> {
        let coeffs = s
            .split(',')
            .map(|t| t.trim().parse::<BigInt>().ok())
            .collect::<Option<Vec<_>>>()?;
        Some(Self::new(coeffs))
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPolynomial[{}]", self.to_coeff_string())
    }
}

/// Human-readable form such as `2 - 3p + 3p^2`.
impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match (k, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "p")?,
                (1, false) => write!(f, "{mag}p")?,
                (_, true) => write!(f, "p^{k}")?,
                (_, false) => write!(f, "{mag}p^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;

    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let a = self.coeffs.get(k);
            let b = rhs.coeffs.get(k);
            out.push(match (a, b) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        IntPolynomial::new(out)
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;

    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;

    fn neg(self) -> IntPolynomial {
        IntPolynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;

    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for IntPolynomial {
            type Output = IntPolynomial;
            fn $m(self, rhs: IntPolynomial) -> IntPolynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
