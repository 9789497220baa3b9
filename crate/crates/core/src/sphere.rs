//! Points on spheres, exact and random.
//!
//! Inverse stereographic projection `t ↦ ((|t|² − 1), 2t) / (|t|² + 1)` maps
//! rational vectors to rational unit vectors, which gives a dense supply of
//! exact sample points on every `Sⁿ`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{dot, orthonormal_completion, Matrix};
use crate::octonion::Octonion;
use crate::scalar::{Rational, Scalar};

/// Deterministic per-sample generator: one ChaCha8 stream per sample index,
/// all keyed by the same 64-bit seed.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Inverse stereographic projection of `t ∈ Sⁿ` coordinates; the result has
/// length `t.len() + 1` and exactly unit norm.
pub fn stereographic_point<S: Scalar>(t: &[S]) -> Vec<S> {
    let r = dot(t, t);
    let den = r.add_ref(&S::one());
    let inv = S::one() / den;
    std::iter::once(r.sub_ref(&S::one()).mul_ref(&inv))
        .chain(t.iter().map(|x| S::from_i64(2).mul_ref(x).mul_ref(&inv)))
        .collect()
}

/// `(cos θ, sin θ)` from the circle parameter `s`.
pub fn circle_point<S: Scalar>(s: &S) -> (S, S) {
    let p = stereographic_point(std::slice::from_ref(s));
    (p[0].clone(), p[1].clone())
}

/// Unit octonion from a point of `R⁷`.
pub fn rational_unit_octonion<S: Scalar>(t: &[S]) -> Octonion<S> {
    assert_eq!(t.len(), 7);
    Octonion::from_slice(&stereographic_point(t))
}

/// Unit imaginary octonion (a point of `S⁶`) from a point of `R⁶`.
pub fn rational_imaginary_unit<S: Scalar>(t: &[S]) -> Octonion<S> {
    assert_eq!(t.len(), 6);
    Octonion::imaginary(&stereographic_point(t))
}

/// Scalars that know how to draw random sphere points. Exact fields sample
/// stereographic images of small random rationals; floats sample Gaussian
/// directions.
pub trait SampleScalar: Scalar {
    fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Self>;

    /// Random `(cos θ, sin θ)`.
    fn random_circle_point<R: Rng + ?Sized>(rng: &mut R) -> (Self, Self) {
        let v = Self::random_unit_vector(rng, 2);
        (v[0].clone(), v[1].clone())
    }
}

/// Random rational `n/d` with `|n| ≤ 6`, `d ≤ 3`. Small denominators keep
/// products of sampled points from growing huge.
pub fn random_small_rational<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    let n = rng.random_range(-6i64..=6);
    let d = rng.random_range(1i64..=3);
    Rational::from_ratio(n, d)
}

impl SampleScalar for Rational {
    fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Self> {
        let t: Vec<Rational> = (0..dim - 1).map(|_| random_small_rational(rng)).collect();
        let mut v = stereographic_point(&t);
        // Small t cluster near (−1, 0, …); a random cyclic shift moves the
        // cluster around the coordinate axes.
        let shift = rng.random_range(0..dim);
        v.rotate_right(shift);
        v
    }
}

impl SampleScalar for f64 {
    fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Self> {
        loop {
            let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let n = dot(&v, &v).sqrt();
            if n > 1e-6 {
                return v.into_iter().map(|x| x / n).collect();
            }
        }
    }
}

pub fn random_unit_octonion<S: SampleScalar, R: Rng + ?Sized>(rng: &mut R) -> Octonion<S> {
    Octonion::from_slice(&S::random_unit_vector(rng, 8))
}

pub fn random_imaginary_unit<S: SampleScalar, R: Rng + ?Sized>(rng: &mut R) -> Octonion<S> {
    Octonion::imaginary(&S::random_unit_vector(rng, 7))
}

/// A random unit vector orthogonal to the given orthonormal vectors,
/// exact in rational mode.
pub fn random_unit_orthogonal_to<S: SampleScalar, R: Rng + ?Sized>(
    rng: &mut R,
    given: &[Vec<S>],
    n: usize,
) -> Vec<S> {
    let complement = orthonormal_completion(given, n);
    let c = S::random_unit_vector(rng, complement.len());
    let mut out = vec![S::zero(); n];
    for (coef, b) in c.iter().zip(&complement) {
        for k in 0..n {
            out[k] = out[k].add_ref(&coef.mul_ref(&b[k]));
        }
    }
    out
}

/// Random imaginary octonion `v ⊥ ⟨1, p⟩` (not normalized to any norm in
/// particular). Exact in rational mode.
pub fn random_tangent_vector<S: SampleScalar, R: Rng + ?Sized>(rng: &mut R, p: &Octonion<S>) -> Octonion<S> {
    let p7: Vec<S> = p.coords()[1..].to_vec();
    let u = random_unit_orthogonal_to(rng, &[p7], 7);
    let scale = S::from_i64(rng.random_range(1i64..=3));
    Octonion::imaginary(&u).scale(&scale)
}

/// Haar-random rotation in `SO(n)`: QR of a Gaussian matrix with the sign
/// of `R`'s diagonal folded into `Q`, then a determinant correction.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix<f64> {
    let g = nalgebra::DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    if q.determinant() < 0.0 {
        for i in 0..n {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    Matrix::from_rows((0..n).map(|i| (0..n).map(|j| q[(i, j)]).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn stereographic_examples() {
        let zero = vec![q(0, 1); 7];
        let p = stereographic_point(&zero);
        assert_eq!(p[0], q(-1, 1));
        assert!(p[1..].iter().all(|x| *x == q(0, 1)));

        let mut t = vec![q(0, 1); 7];
        t[0] = q(1, 1);
        let p = stereographic_point(&t);
        assert_eq!(p[0], q(0, 1));
        assert_eq!(p[1], q(1, 1));

        t[0] = q(1, 2);
        let p = stereographic_point(&t);
        assert_eq!(p[0], q(-3, 5));
        assert_eq!(p[1], q(4, 5));
    }

    #[test]
    fn rational_samples_are_exact_units() {
        let mut rng = sample_rng(3, 0);
        for dim in [2usize, 4, 7, 8] {
            for _ in 0..20 {
                let v = Rational::random_unit_vector(&mut rng, dim);
                assert_eq!(dot(&v, &v), q(1, 1));
            }
        }
    }

    #[test]
    fn orthogonal_sample_is_orthogonal() {
        let mut rng = sample_rng(5, 1);
        let p = random_imaginary_unit::<Rational, _>(&mut rng);
        let v = random_tangent_vector(&mut rng, &p);
        assert_eq!(v.inner(&p), q(0, 1));
        assert!(v.is_imaginary());
    }

    #[test]
    fn haar_rotation_is_special_orthogonal() {
        let mut rng = sample_rng(9, 2);
        let m = random_rotation(&mut rng, 6);
        assert!(m.mul(&m.transpose()).max_abs_diff(&Matrix::identity(6)) < 1e-12);
        assert!((m.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let a: u64 = sample_rng(7, 3).random();
        let b: u64 = sample_rng(7, 3).random();
        let c: u64 = sample_rng(7, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
