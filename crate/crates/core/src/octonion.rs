//! Octonions via the Cayley–Dickson doubling construction.
//!
//! The basis is fixed by iterated doubling: `e₀ = 1`, `e₁ = i`, `e₂ = j`,
//! `e₃ = e₁e₂`, `e₄ = I`, `e₅ = e₁e₄`, `e₆ = e₂e₄`, `e₇ = e₃e₄`. The 8×8
//! multiplication table is derived once from the doubling rule
//!
//! ```text
//! (a + Ib)(c + Id) = (ac − d b̄) + I(cb + ā d)
//! ```
//!
//! applied recursively (reals → complexes → quaternions → octonions), never
//! written out by hand.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use once_cell::sync::Lazy;
use serde::ser::{Serialize, SerializeSeq, Serializer};
use thiserror::Error;

use crate::linalg::Matrix;
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OctonionError {
    #[error("zero divisor: the zero octonion has no inverse")]
    ZeroDivisor,
    #[error("octonion is not a unit (norm² = {0})")]
    NotUnit(String),
    #[error("octonion is not imaginary (real part {0})")]
    NotImaginary(String),
}

/// Cayley–Dickson product on raw pair coordinates of length `2ⁿ`.
///
/// A vector of length `2m` is read as `a + I b` with `a`, `b` its two
/// halves.
pub fn cayley_dickson_product<S: Scalar>(x: &[S], y: &[S]) -> Vec<S> {
    assert_eq!(x.len(), y.len());
    assert!(x.len().is_power_of_two(), "length must be a power of two");
    let n = x.len();
    if n == 1 {
        return vec![x[0].mul_ref(&y[0])];
    }
    let h = n / 2;
    let (a, b) = x.split_at(h);
    let (c, d) = y.split_at(h);
    let conj = |q: &[S]| -> Vec<S> {
        q.iter()
            .enumerate()
            .map(|(k, t)| if k == 0 { t.clone() } else { -t.clone() })
            .collect()
    };
    let ac = cayley_dickson_product(a, c);
    let dbb = cayley_dickson_product(d, &conj(b));
    let cb = cayley_dickson_product(c, b);
    let abd = cayley_dickson_product(&conj(a), d);
    ac.iter()
        .zip(&dbb)
        .map(|(p, q)| p.sub_ref(q))
        .chain(cb.iter().zip(&abd).map(|(p, q)| p.add_ref(q)))
        .collect()
}

/// Signed basis product table: `e_a · e_b = sign · e_index`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicationTable {
    entries: [[(i8, u8); 8]; 8],
    /// Columns: the raw pair coordinates of each named basis element.
    basis_in_raw: [[i64; 8]; 8],
}

impl MultiplicationTable {
    fn derive() -> Self {
        let raw = |k: usize| {
            let mut v = vec![Rational::from_i64(0); 8];
            v[k] = Rational::from_i64(1);
            v
        };
        let mul = |a: &Vec<Rational>, b: &Vec<Rational>| cayley_dickson_product(a, b);
        let ints = |v: &[Rational]| -> Vec<i64> {
            v.iter()
                .map(|c| {
                    assert!(c.is_integer(), "basis products have integer coordinates");
                    c.to_integer().try_into().expect("small coordinate")
                })
                .collect()
        };
        // i, j and I are the generators introduced by the three doublings.
        let e1 = raw(1);
        let e2 = raw(2);
        let e4 = raw(4);
        let e3 = mul(&e1, &e2);
        let e5 = mul(&e1, &e4);
        let e6 = mul(&e2, &e4);
        let e7 = mul(&e3, &e4);
        let basis_q = [raw(0), e1, e2, e3, e4, e5, e6, e7];
        let basis: Vec<Vec<i64>> = basis_q.iter().map(|b| ints(b)).collect();

        let mut basis_in_raw = [[0i64; 8]; 8];
        for (k, b) in basis.iter().enumerate() {
            basis_in_raw[k].copy_from_slice(b);
        }
        let express = |v: &[i64]| -> (i8, u8) {
            let hits: Vec<(usize, i64)> = v
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(k, &c)| (k, c))
                .collect();
            assert_eq!(hits.len(), 1, "basis product is not a signed basis element");
            let (raw_idx, c) = hits[0];
            let (k, b) = basis
                .iter()
                .enumerate()
                .find(|(_, b)| b[raw_idx] != 0)
                .expect("raw coordinate covered by the basis");
            (i8::try_from(c * b[raw_idx]).expect("unit sign"), k as u8)
        };
        let mut entries = [[(0i8, 0u8); 8]; 8];
        for a in 0..8 {
            for b in 0..8 {
                entries[a][b] = express(&ints(&mul(&basis_q[a], &basis_q[b])));
            }
        }
        MultiplicationTable {
            entries,
            basis_in_raw,
        }
    }

    /// `(sign, k)` with `e_a e_b = sign · e_k`.
    pub fn product(&self, a: usize, b: usize) -> (i8, usize) {
        let (s, k) = self.entries[a][b];
        (s, k as usize)
    }

    /// Raw pair coordinates of the named basis element `e_k`.
    pub fn basis_in_raw(&self, k: usize) -> [i64; 8] {
        self.basis_in_raw[k]
    }
}

static TABLE: Lazy<MultiplicationTable> = Lazy::new(MultiplicationTable::derive);

pub fn table() -> &'static MultiplicationTable {
    &TABLE
}

#[derive(Clone, PartialEq)]
pub struct Octonion<S> {
    coords: [S; 8],
}

impl<S: Scalar> Octonion<S> {
    pub fn new(coords: [S; 8]) -> Self {
        Octonion { coords }
    }

    pub fn from_slice(c: &[S]) -> Self {
        assert_eq!(c.len(), 8, "octonions have 8 coordinates");
        Octonion {
            coords: std::array::from_fn(|k| c[k].clone()),
        }
    }

    pub fn zero() -> Self {
        Octonion {
            coords: std::array::from_fn(|_| S::zero()),
        }
    }

    pub fn one() -> Self {
        Self::basis(0)
    }

    /// The basis element `e_k`.
    pub fn basis(k: usize) -> Self {
        let mut x = Self::zero();
        x.coords[k] = S::one();
        x
    }

    /// `re + im · e_axis`.
    pub fn complex(re: S, im: S, axis: usize) -> Self {
        let mut x = Self::zero();
        x.coords[0] = re;
        x.coords[axis] = im;
        x
    }

    /// The real scalar `s · 1`.
    pub fn real_scalar(s: S) -> Self {
        let mut x = Self::zero();
        x.coords[0] = s;
        x
    }

    /// An imaginary octonion from 7 coordinates on `e₁…e₇`.
    pub fn imaginary(c: &[S]) -> Self {
        assert_eq!(c.len(), 7);
        let mut x = Self::zero();
        x.coords[1..].clone_from_slice(c);
        x
    }

    pub fn coords(&self) -> &[S; 8] {
        &self.coords
    }

    pub fn coord(&self, k: usize) -> &S {
        &self.coords[k]
    }

    pub fn to_vec(&self) -> Vec<S> {
        self.coords.to_vec()
    }

    pub fn real(&self) -> &S {
        &self.coords[0]
    }

    /// The imaginary part `x − ⟨x,1⟩1`.
    pub fn imag(&self) -> Self {
        let mut x = self.clone();
        x.coords[0] = S::zero();
        x
    }

    /// `x̄ = 2⟨x,1⟩1 − x`.
    pub fn conjugate(&self) -> Self {
        let two_re = S::from_i64(2).mul_ref(self.real());
        Self::real_scalar(two_re) - self.clone()
    }

    pub fn inner(&self, other: &Self) -> S {
        self.coords
            .iter()
            .zip(&other.coords)
            .fold(S::zero(), |acc, (a, b)| acc.add_ref(&a.mul_ref(b)))
    }

    pub fn norm_sq(&self) -> S {
        self.inner(self)
    }

    pub fn scale(&self, s: &S) -> Self {
        Octonion {
            coords: std::array::from_fn(|k| self.coords[k].mul_ref(s)),
        }
    }

    /// `x⁻¹ = x̄ / |x|²`.
    pub fn inverse(&self) -> Result<Self, OctonionError> {
        let n = self.norm_sq();
        if n.is_zero() {
            return Err(OctonionError::ZeroDivisor);
        }
        Ok(self.conjugate().scale(&(S::one() / n)))
    }

    /// Product through the derived basis table.
    pub fn mul(&self, other: &Self) -> Self {
        Octonion {
            coords: S::octonion_product(&self.coords, &other.coords),
        }
    }

    /// `x^k` by repeated left multiplication; negative exponents invert first.
    /// Single octonions generate an associative subalgebra, so the
    /// bracketing is immaterial.
    pub fn power(&self, k: i64) -> Result<Self, OctonionError> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..k.unsigned_abs() {
            acc = base.mul(&acc);
        }
        Ok(acc)
    }

    /// `(xy)z − x(yz)`.
    pub fn associator(x: &Self, y: &Self, z: &Self) -> Self {
        x.mul(y).mul(z) - x.mul(&y.mul(z))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }

    pub fn is_unit(&self) -> bool {
        self.norm_sq().approx_eq(&S::one())
    }

    pub fn is_imaginary(&self) -> bool {
        self.real().is_zero()
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.coords.iter().zip(&other.coords).all(|(a, b)| a.approx_eq(b))
    }

    /// Largest coordinate difference, as a float.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.sub_ref(b).to_f64().abs())
            .fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> Octonion<f64> {
        Octonion {
            coords: std::array::from_fn(|k| self.coords[k].to_f64()),
        }
    }

    /// Rescales to unit norm when the field has the square root.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm_sq();
        if n.is_zero() {
            return None;
        }
        let r = n.sqrt()?;
        Some(self.scale(&(S::one() / r)))
    }

    pub fn require_unit(&self) -> Result<(), OctonionError> {
        if self.is_unit() {
            Ok(())
        } else {
            Err(OctonionError::NotUnit(self.norm_sq().to_scalar_string()))
        }
    }

    pub fn require_imaginary_unit(&self) -> Result<(), OctonionError> {
        if !self.is_imaginary() {
            return Err(OctonionError::NotImaginary(self.real().to_scalar_string()));
        }
        self.require_unit()
    }

    /// Raw Cayley–Dickson pair coordinates of this octonion.
    pub fn to_raw(&self) -> Vec<S> {
        let t = table();
        let mut out = vec![S::zero(); 8];
        for k in 0..8 {
            let b = t.basis_in_raw(k);
            for (r, &c) in b.iter().enumerate() {
                if c != 0 {
                    let term = self.coords[k].mul_ref(&S::from_i64(c));
                    out[r] = out[r].add_ref(&term);
                }
            }
        }
        out
    }

    pub fn from_raw(raw: &[S]) -> Self {
        let t = table();
        let mut x = Self::zero();
        for k in 0..8 {
            let b = t.basis_in_raw(k);
            for (r, &c) in b.iter().enumerate() {
                if c != 0 {
                    // Signed permutation: the inverse is the transpose.
                    x.coords[k] = raw[r].mul_ref(&S::from_i64(c));
                }
            }
        }
        x
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(Scalar::to_scalar_string).collect()
    }
}

impl<S: Scalar> fmt::Debug for Octonion<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Octonion[{}]", self.to_strings().join(", "))
    }
}

impl<S: Scalar> Serialize for Octonion<S> {
    fn serialize<Z: Serializer>(&self, serializer: Z) -> Result<Z::Ok, Z::Error> {
        let mut seq = serializer.serialize_seq(Some(8))?;
        for c in &self.coords {
            seq.serialize_element(&c.to_scalar_string())?;
        }
        seq.end()
    }
}

impl<S: Scalar> Add for Octonion<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Octonion {
            coords: std::array::from_fn(|k| self.coords[k].add_ref(&o.coords[k])),
        }
    }
}

impl<S: Scalar> Sub for Octonion<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Octonion {
            coords: std::array::from_fn(|k| self.coords[k].sub_ref(&o.coords[k])),
        }
    }
}

impl<S: Scalar> Neg for Octonion<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Octonion {
            coords: self.coords.map(|c| -c),
        }
    }
}

impl<'a, S: Scalar> Mul<&'a Octonion<S>> for &'a Octonion<S> {
    type Output = Octonion<S>;
    fn mul(self, o: &'a Octonion<S>) -> Octonion<S> {
        Octonion::mul(self, o)
    }
}

/// An octonion of unit norm (exactly, or within tolerance in float mode).
#[derive(Clone, PartialEq)]
pub struct UnitOctonion<S>(Octonion<S>);

impl<S: Scalar> fmt::Debug for UnitOctonion<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Unit{:?}", self.0)
    }
}

impl<S: Scalar> UnitOctonion<S> {
    pub fn try_new(x: Octonion<S>) -> Result<Self, OctonionError> {
        x.require_unit()?;
        Ok(UnitOctonion(x))
    }

    pub fn as_octonion(&self) -> &Octonion<S> {
        &self.0
    }

    pub fn into_inner(self) -> Octonion<S> {
        self.0
    }

    pub fn power(&self, k: i64) -> UnitOctonion<S> {
        // Units are invertible, so this cannot fail.
        UnitOctonion(self.0.power(k).expect("unit octonions are invertible"))
    }
}

/// Applies an 8×8 matrix (acting on coordinates `e₀…e₇`) to an octonion.
pub fn apply_matrix<S: Scalar>(m: &Matrix<S>, x: &Octonion<S>) -> Octonion<S> {
    Octonion::from_slice(&m.mul_vec(x.coords()))
}

/// The matrix whose `k`-th column is `f(e_k)`.
pub fn matrix_of<S: Scalar>(f: impl Fn(&Octonion<S>) -> Octonion<S>) -> Matrix<S> {
    let cols: Vec<Vec<S>> = (0..8).map(|k| f(&Octonion::basis(k)).to_vec()).collect();
    Matrix::from_columns(&cols)
}

/// The first basis triple `(e_a, e_b, e_c)` in scan order with a nonzero
/// associator, together with that associator.
pub fn non_associative_witness<S: Scalar>() -> Option<(usize, usize, usize, Octonion<S>)> {
    for a in 1..8 {
        for b in 1..8 {
            for c in 1..8 {
                let assoc =
                    Octonion::associator(&Octonion::<S>::basis(a), &Octonion::basis(b), &Octonion::basis(c));
                if !assoc.is_zero() {
                    return Some((a, b, c, assoc));
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    type O = Octonion<Rational>;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn e(k: usize) -> O {
        O::basis(k)
    }

    #[test]
    fn basis_definitions_hold() {
        assert_eq!(e(1).mul(&e(2)), e(3));
        assert_eq!(e(1).mul(&e(4)), e(5));
        assert_eq!(e(2).mul(&e(4)), e(6));
        assert_eq!(e(3).mul(&e(4)), e(7));
        assert_eq!(e(2).mul(&e(1)), -e(3));
        assert_eq!(e(4).mul(&e(4)), -O::one());
    }

    #[test]
    fn quaternion_block_is_hamiltonian() {
        // i² = j² = k² = ijk = −1 on e₁, e₂, e₃.
        for k in 1..4 {
            assert_eq!(e(k).mul(&e(k)), -O::one());
        }
        assert_eq!(e(1).mul(&e(2)).mul(&e(3)), -O::one());
        assert_eq!(e(2).mul(&e(3)), e(1));
        assert_eq!(e(3).mul(&e(1)), e(2));
    }

    #[test]
    fn imaginary_units_square_to_minus_one_and_anticommute() {
        for a in 1..8 {
            assert_eq!(e(a).mul(&e(a)), -O::one());
            for b in 1..8 {
                if a != b {
                    assert_eq!(e(a).mul(&e(b)), -e(b).mul(&e(a)));
                }
            }
        }
    }

    #[test]
    fn table_agrees_with_recursive_doubling() {
        let x = O::new(std::array::from_fn(|k| q(k as i64 - 3, 2)));
        let y = O::new(std::array::from_fn(|k| q(5 - 2 * k as i64, 3)));
        let via_raw = O::from_raw(&cayley_dickson_product(&x.to_raw(), &y.to_raw()));
        assert_eq!(x.mul(&y), via_raw);
        assert_eq!(O::from_raw(&x.to_raw()), x);
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(O::one().conjugate(), O::one());
        assert_eq!(e(1).conjugate(), -e(1));
        let x = O::complex(q(3, 5), q(4, 5), 1);
        assert_eq!(x.conjugate(), O::complex(q(3, 5), q(-4, 5), 1));
    }

    #[test]
    fn inner_inverse_examples() {
        assert_eq!(e(1).inner(&e(2)), q(0, 1));
        assert_eq!(e(4).inverse().unwrap(), -e(4));
        assert_eq!(O::zero().inverse(), Err(OctonionError::ZeroDivisor));
    }

    #[test]
    fn power_examples() {
        let x = O::complex(q(3, 5), q(4, 5), 2);
        assert_eq!(x.power(0).unwrap(), O::one());
        // cos 3θ = 4c³ − 3c, sin 3θ = 3s − 4s³ with c = 3/5, s = 4/5.
        assert_eq!(x.power(3).unwrap(), O::complex(q(-117, 125), q(44, 125), 2));
        assert_eq!(x.power(-1).unwrap(), x.conjugate());
        assert_eq!(x.power(-3).unwrap().mul(&x.power(3).unwrap()), O::one());
    }

    #[test]
    fn witness_found() {
        let (a, b, c, assoc) = non_associative_witness::<Rational>().unwrap();
        assert!(!assoc.is_zero());
        assert_eq!(Octonion::associator(&e(a), &e(b), &e(c)), assoc);
        assert_eq!(e(1).mul(&e(2)).mul(&e(4)), -e(1).mul(&e(2).mul(&e(4))));
    }

    #[test]
    fn serializes_as_scalar_strings() {
        let x = O::complex(q(3, 5), q(-4, 5), 1);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"["3/5","-4/5","0","0","0","0","0","0"]"#);
    }
}
