//! Scalar fields: exact rationals and tolerance-compared binary floats.
//!
//! Every algebraic object in the crate is generic over [`Scalar`]. The exact
//! field ([`Rational`]) gives zero-tolerance verification of polynomial
//! identities; `f64` is used where square roots or random orthogonal matrices
//! are unavoidable.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use num_integer::Integer;

use crate::linalg::Matrix;
use crate::octonion::table;

/// Exact rational scalar.
pub type Rational = BigRational;

/// Default equality tolerance for float mode.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

/// Relative singular-value threshold used for float kernels.
pub const FLOAT_RANK_THRESHOLD: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseScalarError {
    #[error("empty scalar literal")]
    Empty,
    #[error("invalid scalar literal {0:?}")]
    Invalid(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("non-finite float literal {0:?}")]
    NonFinite(String),
}

/// A field usable as octonion coefficients.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` when ring operations are exact and equality is literal.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    /// `n / d`; panics when `d == 0`.
    fn from_ratio(n: i64, d: i64) -> Self;
    /// Lossy conversion from a float. Exact fields get the exact binary value.
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;

    /// Literal zero for exact fields, `|x| <= FLOAT_TOLERANCE` for floats.
    fn is_zero(&self) -> bool;
    fn abs(&self) -> Self;

    /// Equality in the field's sense (literal, or within the default tolerance).
    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero()
    }

    /// Square root when it exists in the field. For rationals only perfect
    /// squares have one; floats return `None` for negative inputs.
    fn sqrt(&self) -> Option<Self>;

    /// Whether `x` should be treated as zero when eliminating against entries
    /// whose magnitude is at most `scale`.
    fn negligible(&self, scale: &Self) -> bool;

    fn mul_ref(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.clone() - other.clone()
    }

    fn is_positive(&self) -> bool;
    fn is_negative(&self) -> bool {
        (-self.clone()).is_positive()
    }

    /// Basis of the right kernel of `m`.
    fn null_space(m: &Matrix<Self>) -> Vec<Vec<Self>> {
        m.rref_null_space()
    }

    /// Solution of a consistent (possibly overdetermined) system: exact
    /// elimination for exact fields, SVD least squares for floats.
    fn least_squares(m: &Matrix<Self>, b: &[Self]) -> Option<Vec<Self>> {
        m.solve(b)
    }

    /// Octonion product of coordinate arrays through the basis table.
    fn octonion_product(x: &[Self; 8], y: &[Self; 8]) -> [Self; 8] {
        let t = table();
        let mut out: [Self; 8] = std::array::from_fn(|_| Self::zero());
        for (a, xa) in x.iter().enumerate() {
            for (b, yb) in y.iter().enumerate() {
                let (sign, k) = t.product(a, b);
                let p = xa.mul_ref(yb);
                out[k] = if sign > 0 {
                    out[k].add_ref(&p)
                } else {
                    out[k].sub_ref(&p)
                };
            }
        }
        out
    }

    /// Canonical string form: `"3/5"` for rationals, shortest round-trip
    /// decimal for floats.
    fn to_scalar_string(&self) -> String;
    fn parse_scalar(s: &str) -> Result<Self, ParseScalarError>;
}

fn parse_rational(s: &str) -> Result<Rational, ParseScalarError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseScalarError::Empty);
    }
    let bad = || ParseScalarError::Invalid(s.to_string());
    let int = |t: &str| -> Result<BigInt, ParseScalarError> {
        let t = t.trim();
        let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        BigInt::from_str(t).map_err(|_| bad())
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let n = int(n)?;
            let d = int(d)?;
            if d.is_zero() {
                return Err(ParseScalarError::ZeroDenominator(s.to_string()));
            }
            Ok(Rational::new(n, d))
        }
        None => {
            if let Some((whole, frac)) = s.split_once('.') {
                // Terminating decimals are exact rationals.
                let neg = whole.trim_start().starts_with('-');
                let whole_digits = whole.trim().trim_start_matches(['-', '+']);
                if !frac.bytes().all(|b| b.is_ascii_digit())
                    || !whole_digits.bytes().all(|b| b.is_ascii_digit())
                    || (whole_digits.is_empty() && frac.is_empty())
                    || frac.len() > 4096
                {
                    return Err(bad());
                }
                let w = if whole_digits.is_empty() {
                    BigInt::zero()
                } else {
                    BigInt::from_str(whole_digits).map_err(|_| bad())?
                };
                let f = if frac.is_empty() {
                    BigInt::zero()
                } else {
                    BigInt::from_str(frac).map_err(|_| bad())?
                };
                let den = num_traits::pow(BigInt::from(10), frac.len());
                let mag = Rational::new(w * &den + f, den);
                Ok(if neg { -mag } else { mag })
            } else {
                Ok(Rational::from_integer(int(s)?))
            }
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }
    fn from_f64(x: f64) -> Self {
        Rational::from_float(x).unwrap_or_else(Zero::zero)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }
    fn sqrt(&self) -> Option<Self> {
        if Signed::is_negative(self) {
            return None;
        }
        let n = self.numer();
        let d = self.denom();
        let rn = num_integer::Roots::sqrt(n);
        let rd = num_integer::Roots::sqrt(d);
        (&rn * &rn == *n && &rd * &rd == *d).then(|| Rational::new(rn, rd))
    }
    fn negligible(&self, _scale: &Self) -> bool {
        Zero::is_zero(self)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    /// Integer arithmetic over common denominators, reduced once per
    /// coordinate.
    fn octonion_product(x: &[Self; 8], y: &[Self; 8]) -> [Self; 8] {
        let frame = |v: &[Self; 8]| {
            let d = v.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            let n: Vec<BigInt> = v.iter().map(|c| c.numer() * (&d / c.denom())).collect();
            (n, d)
        };
        let (nx, dx) = frame(x);
        let (ny, dy) = frame(y);
        let t = table();
        let mut acc: [BigInt; 8] = std::array::from_fn(|_| BigInt::zero());
        for (a, xa) in nx.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in ny.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let (sign, k) = t.product(a, b);
                let p = xa * yb;
                if sign > 0 {
                    acc[k] += p;
                } else {
                    acc[k] -= p;
                }
            }
        }
        let d = dx * dy;
        acc.map(|n| Rational::new(n, d.clone()))
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn to_scalar_string(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
    fn parse_scalar(s: &str) -> Result<Self, ParseScalarError> {
        parse_rational(s)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        n as f64 / d as f64
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        f64::abs(*self) <= FLOAT_TOLERANCE
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| f64::sqrt(*self))
    }
    fn negligible(&self, scale: &Self) -> bool {
        f64::abs(*self) <= 1e-9 * scale.max(1.0)
    }
    fn is_positive(&self) -> bool {
        *self > 0.0
    }
    fn null_space(m: &Matrix<Self>) -> Vec<Vec<Self>> {
        m.svd_null_space(FLOAT_RANK_THRESHOLD)
    }
    fn least_squares(m: &Matrix<Self>, b: &[Self]) -> Option<Vec<Self>> {
        m.svd_least_squares(b)
    }
    fn to_scalar_string(&self) -> String {
        format!("{self:?}")
    }
    fn parse_scalar(s: &str) -> Result<Self, ParseScalarError> {
        let t = s.trim();
        if t.is_empty() {
            return Err(ParseScalarError::Empty);
        }
        if t.contains('/') {
            let q = parse_rational(t)?;
            let x = Scalar::to_f64(&q);
            if !x.is_finite() {
                return Err(ParseScalarError::NonFinite(t.to_string()));
            }
            return Ok(x);
        }
        let x: f64 = t.parse().map_err(|_| ParseScalarError::Invalid(t.to_string()))?;
        if !x.is_finite() {
            return Err(ParseScalarError::NonFinite(t.to_string()));
        }
        Ok(x)
    }
}

/// Evaluation mode of a computation context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(format!("unknown mode {other:?} (expected exact|float)")),
        }
    }
}
