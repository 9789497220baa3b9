//! The twistor space `Z(S⁶) = (S⁶ × S⁷)/S¹`, the `SO(7)` action on almost
//! complex structures, and companion octonions.
//!
//! A pair `(p, x)` induces the structure `v ↦ (p(vx))x̄` on `T_pS⁶ = ⟨1,p⟩⊥`;
//! constant `x` gives a section, and `x = 1` is the canonical `J^cn_p(v) = pv`.

use rand::Rng;
use thiserror::Error;

use crate::degree::{antipodal_classes, polar_form, power_map_preimages};
use crate::linalg::{orthonormal_completion, Matrix};
use crate::octonion::{apply_matrix, matrix_of, Octonion};
use crate::scalar::Scalar;
use crate::sphere::{random_rotation, random_unit_octonion, SampleScalar};
use crate::subalgebra::{quaternion_span_through, random_g2};

/// Float tolerance for the companion and section identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TwistorError {
    #[error("p is not a unit imaginary octonion")]
    NotImaginaryUnit,
    #[error("x is not a unit octonion")]
    NotUnit,
    #[error("not an element of SO(7): {0}")]
    InvalidSO7(String),
    #[error("companion kernel has dimension {0} and no vector passes the isotopy identity")]
    KernelDimensionError(usize),
    #[error("companion fails the isotopy identity (residual {0:e})")]
    VerificationFailed(f64),
    #[error("x⁶ = ±1: the fiber is not finite")]
    NonGenericInput,
}

fn close<S: Scalar>(a: &Octonion<S>, b: &Octonion<S>) -> bool {
    if S::EXACT {
        a == b
    } else {
        a.max_abs_diff(b) <= IDENTITY_TOLERANCE
    }
}

/// An orthonormal basis of `⟨1, p⟩⊥`, exact whenever `p` is.
pub fn tangent_basis<S: Scalar>(p: &Octonion<S>) -> Vec<Octonion<S>> {
    orthonormal_completion(&[Octonion::<S>::one().to_vec(), p.to_vec()], 8)
        .iter()
        .map(|v| Octonion::from_slice(v))
        .collect()
}

/// A linear operator on `T_pS⁶ = ⟨1, p⟩⊥`, stored in [`tangent_basis`]`(p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentStructure<S: Scalar> {
    p: Octonion<S>,
    basis: Vec<Octonion<S>>,
    op: Matrix<S>,
}

impl<S: Scalar> TangentStructure<S> {
    pub fn from_map(p: &Octonion<S>, f: impl Fn(&Octonion<S>) -> Octonion<S>) -> Self {
        let basis = tangent_basis(p);
        let cols: Vec<Vec<S>> = basis
            .iter()
            .map(|b| {
                let img = f(b);
                basis.iter().map(|c| img.inner(c)).collect()
            })
            .collect();
        TangentStructure {
            p: p.clone(),
            basis,
            op: Matrix::from_columns(&cols),
        }
    }

    pub fn p(&self) -> &Octonion<S> {
        &self.p
    }

    pub fn basis(&self) -> &[Octonion<S>] {
        &self.basis
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.op
    }

    /// `J(v)` for `v ∈ ⟨1, p⟩⊥`.
    pub fn apply(&self, v: &Octonion<S>) -> Octonion<S> {
        let c: Vec<S> = self.basis.iter().map(|b| v.inner(b)).collect();
        self.op
            .mul_vec(&c)
            .iter()
            .zip(&self.basis)
            .fold(Octonion::zero(), |acc, (t, b)| acc + b.scale(t))
    }

    /// Failed invariants among orthogonality and `J² = −Id`.
    pub fn defects(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.op.is_orthogonal() {
            out.push("not orthogonal");
        }
        if !self
            .op
            .mul(&self.op)
            .approx_eq(&Matrix::identity(6).scale(&-S::one()))
        {
            out.push("J² ≠ −Id");
        }
        out
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.p.approx_eq(&other.p) && self.op.close_to(&other.op, IDENTITY_TOLERANCE)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.op.max_abs_diff(&other.op)
    }
}

/// `J^cn_p(v) = pv`.
pub fn canonical_structure_at<S: Scalar>(p: &Octonion<S>) -> Result<TangentStructure<S>, TwistorError> {
    p.require_imaginary_unit()
        .map_err(|_| TwistorError::NotImaginaryUnit)?;
    Ok(TangentStructure::from_map(p, |v| p.mul(v)))
}

/// A point `(p, x) ∈ S⁶ × S⁷`, standing for its `S¹`-orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistorPoint<S: Scalar> {
    pub p: Octonion<S>,
    pub x: Octonion<S>,
}

impl<S: Scalar> TwistorPoint<S> {
    pub fn new(p: Octonion<S>, x: Octonion<S>) -> Result<Self, TwistorError> {
        p.require_imaginary_unit()
            .map_err(|_| TwistorError::NotImaginaryUnit)?;
        if !x.is_unit() {
            return Err(TwistorError::NotUnit);
        }
        Ok(TwistorPoint { p, x })
    }

    /// `e^{iθ}·(p, x) = (p, (cos θ + p sin θ)x)`.
    pub fn rotate(&self, c: &S, s: &S) -> Self {
        let phase = Octonion::real_scalar(c.clone()) + self.p.scale(s);
        TwistorPoint {
            p: self.p.clone(),
            x: phase.mul(&self.x),
        }
    }
}

/// `v ↦ (p(vx))x̄`.
pub fn twistor_evaluate<S: Scalar>(t: &TwistorPoint<S>) -> TangentStructure<S> {
    let xb = t.x.conjugate();
    TangentStructure::from_map(&t.p, |v| t.p.mul(&v.mul(&t.x)).mul(&xb))
}

/// An orthogonal map of `𝕆` fixing `1`, with determinant `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SO7Element<S: Scalar> {
    m: Matrix<S>,
}

impl<S: Scalar> SO7Element<S> {
    pub fn new(m: Matrix<S>) -> Result<Self, TwistorError> {
        let bad = |s: &str| TwistorError::InvalidSO7(s.to_string());
        if m.rows() != 8 || m.cols() != 8 {
            return Err(bad("expected an 8×8 matrix"));
        }
        if !m
            .mul(&m.transpose())
            .close_to(&Matrix::identity(8), IDENTITY_TOLERANCE)
        {
            return Err(bad("not orthogonal"));
        }
        let one = Octonion::<S>::one();
        if !close(&apply_matrix(&m, &one), &one) {
            return Err(bad("does not fix 1"));
        }
        let d = m.determinant();
        let unit_det = if S::EXACT {
            d == S::one()
        } else {
            (d.to_f64() - 1.0).abs() <= IDENTITY_TOLERANCE
        };
        if !unit_det {
            return Err(bad("determinant is not +1"));
        }
        Ok(SO7Element { m })
    }

    pub fn identity() -> Self {
        SO7Element {
            m: Matrix::identity(8),
        }
    }

    /// `c(x): w ↦ x w x̄` for a unit octonion `x`.
    pub fn conjugation(x: &Octonion<S>) -> Result<Self, TwistorError> {
        if !x.is_unit() {
            return Err(TwistorError::NotUnit);
        }
        let xb = x.conjugate();
        Ok(SO7Element {
            m: matrix_of(|w| x.mul(w).mul(&xb)),
        })
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.m
    }

    pub fn apply(&self, v: &Octonion<S>) -> Octonion<S> {
        apply_matrix(&self.m, v)
    }

    pub fn inverse(&self) -> Self {
        SO7Element {
            m: self.m.transpose(),
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        SO7Element {
            m: self.m.mul(&other.m),
        }
    }
}

impl<S: Scalar> serde::Serialize for SO7Element<S> {
    fn serialize<Z: serde::Serializer>(&self, s: Z) -> Result<Z::Ok, Z::Error> {
        self.m.serialize(s)
    }
}

/// `c(x)·φ` with `x` a random unit and `φ ∈ G₂` from a random frame; exact in
/// rational mode. Every element of `SO(7)` has this form since `c` maps
/// onto `SO(7)/G₂`.
pub fn random_so7<S: SampleScalar, R: Rng + ?Sized>(rng: &mut R) -> SO7Element<S> {
    let x: Octonion<S> = random_unit_octonion(rng);
    let phi = SO7Element { m: random_g2(rng) };
    SO7Element::conjugation(&x).expect("unit").compose(&phi)
}

/// Haar-random element of `SO(7)`.
pub fn random_so7_haar<R: Rng + ?Sized>(rng: &mut R) -> SO7Element<f64> {
    let q = random_rotation(rng, 7);
    let mut m = Matrix::identity(8);
    for i in 0..7 {
        for j in 0..7 {
            m.set(i + 1, j + 1, *q.get(i, j));
        }
    }
    SO7Element { m }
}

/// A section `p ↦ J_p` of the twistor bundle, evaluated pointwise.
pub trait Section<S: Scalar> {
    fn at(&self, p: &Octonion<S>) -> Result<TangentStructure<S>, TwistorError>;
}

/// `J^cn`.
pub struct Canonical;

impl<S: Scalar> Section<S> for Canonical {
    fn at(&self, p: &Octonion<S>) -> Result<TangentStructure<S>, TwistorError> {
        canonical_structure_at(p)
    }
}

/// The constant-`x` section `p ↦ [(p, x)]`.
pub struct Rp7Section<S: Scalar> {
    pub x: Octonion<S>,
}

impl<S: Scalar> Section<S> for Rp7Section<S> {
    fn at(&self, p: &Octonion<S>) -> Result<TangentStructure<S>, TwistorError> {
        Ok(twistor_evaluate(&TwistorPoint::new(p.clone(), self.x.clone())?))
    }
}

pub fn rp7_section<S: Scalar>(x: &Octonion<S>) -> Result<Rp7Section<S>, TwistorError> {
    if !x.is_unit() {
        return Err(TwistorError::NotUnit);
    }
    Ok(Rp7Section { x: x.clone() })
}

/// `(A·J)_p(v) = A J_{A⁻¹p}(A⁻¹v)`.
pub struct Acted<S: Scalar, T> {
    pub a: SO7Element<S>,
    pub inner: T,
}

impl<S: Scalar, T: Section<S>> Section<S> for Acted<S, T> {
    fn at(&self, p: &Octonion<S>) -> Result<TangentStructure<S>, TwistorError> {
        let inv = self.a.inverse();
        let jq = self.inner.at(&inv.apply(p))?;
        Ok(TangentStructure::from_map(p, |v| {
            self.a.apply(&jq.apply(&inv.apply(v)))
        }))
    }
}

pub fn so7_act<S: Scalar, T: Section<S>>(a: &SO7Element<S>, section: T) -> Acted<S, T> {
    Acted {
        a: a.clone(),
        inner: section,
    }
}

/// Largest operator difference between two sections at the given points.
pub fn section_distance<S: Scalar>(
    a: &dyn Section<S>,
    b: &dyn Section<S>,
    points: &[Octonion<S>],
) -> Result<(bool, f64), TwistorError> {
    let mut equal = true;
    let mut worst = 0.0f64;
    for p in points {
        let (ja, jb) = (a.at(p)?, b.at(p)?);
        equal &= ja.same_as(&jb);
        worst = worst.max(ja.max_abs_diff(&jb));
    }
    Ok((equal, worst))
}

/// A companion `a` of `λ`: `(λ(x)a)(āλ(y)) = λ(xy)` for all `x, y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Companion<S: Scalar> {
    /// Unit when the field has the needed square root; otherwise a nonzero
    /// multiple of a companion.
    pub a: Octonion<S>,
    /// Dimension of `{u : λ(xu) = λ(x)λ(u) ∀x}`.
    pub kernel_dim: usize,
    /// Largest isotopy-identity error over all 64 basis pairs.
    pub residual: f64,
}

/// `max |(λ(e_i)a)(āλ(e_j)) / |a|² − λ(e_i e_j)|` over basis pairs, plus
/// whether every pair holds in the field's sense.
pub fn isotopy_residual<S: Scalar>(l: &SO7Element<S>, a: &Octonion<S>) -> (bool, f64) {
    let n = a.norm_sq();
    if n.is_zero() {
        return (false, f64::INFINITY);
    }
    let ab = a.conjugate().scale(&(S::one() / n));
    let images: Vec<Octonion<S>> = (0..8).map(|k| l.apply(&Octonion::basis(k))).collect();
    let mut ok = true;
    let mut worst = 0.0f64;
    for (i, xi) in images.iter().enumerate() {
        let xa = xi.mul(a);
        for (j, xj) in images.iter().enumerate() {
            let lhs = xa.mul(&ab.mul(xj));
            let rhs = l.apply(&Octonion::basis(i).mul(&Octonion::basis(j)));
            ok &= close(&lhs, &rhs);
            worst = worst.max(lhs.max_abs_diff(&rhs));
        }
    }
    (ok, worst)
}

/// Solves for a companion in two linear stages.
///
/// `u = λ⁻¹(a)` satisfies `λ(xu) = λ(x)λ(u)`, linear in `u`; its solution
/// space `K` always contains `1`, so it is at least 2-dimensional for
/// `λ ∉ G₂` and all of `𝕆` for `λ ∈ G₂`. Writing `a = Σ cᵢ λ(Kᵢ)`, the
/// isotopy identity is linear in `M = c cᵀ`; the rank-one solution gives `c`
/// up to sign.
pub fn companion<S: Scalar>(l: &SO7Element<S>) -> Result<Companion<S>, TwistorError> {
    let e = |k: usize| Octonion::<S>::basis(k);
    let images: Vec<Octonion<S>> = (0..8).map(|k| l.apply(&e(k))).collect();

    let mut stage1 = Matrix::zeros(64, 8);
    for k in 0..8 {
        for j in 0..8 {
            let col = l.apply(&e(k).mul(&e(j))) - images[k].mul(&images[j]);
            for i in 0..8 {
                stage1.set(8 * k + i, j, col.coord(i).clone());
            }
        }
    }
    let kernel = S::null_space(&stage1);
    let dim = kernel.len();
    if dim == 0 {
        return Err(TwistorError::KernelDimensionError(0));
    }
    if dim == 8 {
        // λ is an automorphism, and a = 1 is a companion.
        let a = Octonion::one();
        let (ok, residual) = isotopy_residual(l, &a);
        if ok {
            return Ok(Companion {
                a,
                kernel_dim: dim,
                residual,
            });
        }
    }
    let b: Vec<Octonion<S>> = kernel.iter().map(|u| l.apply(&Octonion::from_slice(u))).collect();

    let pairs: Vec<(usize, usize)> = (0..dim).flat_map(|i| (i..dim).map(move |j| (i, j))).collect();
    let bbar: Vec<Octonion<S>> = b.iter().map(Octonion::conjugate).collect();
    let mut stage2 = Matrix::zeros(512, pairs.len());
    let mut rhs = Vec::with_capacity(512);
    for (x, ix) in images.iter().enumerate() {
        let xb: Vec<Octonion<S>> = b.iter().map(|bi| ix.mul(bi)).collect();
        for (y, iy) in images.iter().enumerate() {
            let by: Vec<Octonion<S>> = bbar.iter().map(|bj| bj.mul(iy)).collect();
            for (col, &(i, j)) in pairs.iter().enumerate() {
                let mut t = xb[i].mul(&by[j]);
                if i != j {
                    t = t + xb[j].mul(&by[i]);
                }
                for r in 0..8 {
                    stage2.set(64 * x + 8 * y + r, col, t.coord(r).clone());
                }
            }
            rhs.extend(l.apply(&e(x).mul(&e(y))).to_vec());
        }
    }
    let sol = S::least_squares(&stage2, &rhs).ok_or(TwistorError::KernelDimensionError(dim))?;
    let mut m = Matrix::zeros(dim, dim);
    for (&(i, j), v) in pairs.iter().zip(sol) {
        m.set(i, j, v.clone());
        m.set(j, i, v);
    }
    let pivot = (0..dim)
        .max_by(|&i, &j| m.get(i, i).to_f64().total_cmp(&m.get(j, j).to_f64()))
        .expect("nonempty kernel");
    if !m.get(pivot, pivot).is_positive() {
        return Err(TwistorError::KernelDimensionError(dim));
    }
    // a·√M_jj = Σᵢ M_ij bᵢ.
    let scaled = (0..dim).fold(Octonion::zero(), |acc, i| acc + b[i].scale(m.get(i, pivot)));
    let a = scaled.normalized().unwrap_or(scaled);
    let (ok, residual) = isotopy_residual(l, &a);
    if !ok {
        return Err(TwistorError::VerificationFailed(residual));
    }
    Ok(Companion {
        a,
        kernel_dim: dim,
        residual,
    })
}

/// Outcome of checking `(λ·J^cn)_p(v) = (p(v a_λ))ā_λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop41Report<S: Scalar> {
    pub companion: Companion<S>,
    pub holds: bool,
    pub max_residual: f64,
}

pub fn verify_prop41<S: Scalar>(
    l: &SO7Element<S>,
    samples: &[(Octonion<S>, Octonion<S>)],
) -> Result<Prop41Report<S>, TwistorError> {
    let comp = companion(l)?;
    let a = &comp.a;
    let ab = a.conjugate().scale(&(S::one() / a.norm_sq()));
    let inv = l.inverse();
    let mut holds = true;
    let mut worst = 0.0f64;
    for (p, v) in samples {
        let lhs = l.apply(&inv.apply(p).mul(&inv.apply(v)));
        let rhs = p.mul(&v.mul(a)).mul(&ab);
        holds &= close(&lhs, &rhs);
        worst = worst.max(lhs.max_abs_diff(&rhs));
    }
    Ok(Prop41Report {
        companion: comp,
        holds,
        max_residual: worst,
    })
}

/// Which cube formula reproduces `(c(x)·J^cn)_p(v)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct CubeReport {
    /// `(p(v x³)) x̄³`.
    pub matches_cube: bool,
    /// `(p(v x̄³)) x³`.
    pub matches_conjugate_cube: bool,
    /// `v ∈ A` (the quaternion algebra through `p`, `x`) is sent to `pv`.
    pub subalgebra_branch: bool,
}

pub fn triality_cube<S: Scalar>(
    x: &Octonion<S>,
    p: &Octonion<S>,
    v: &Octonion<S>,
) -> Result<CubeReport, TwistorError> {
    p.require_imaginary_unit()
        .map_err(|_| TwistorError::NotImaginaryUnit)?;
    let c = SO7Element::conjugation(x)?;
    let inv = c.inverse();
    let acted = |w: &Octonion<S>| c.apply(&inv.apply(p).mul(&inv.apply(w)));
    let candidate = |z: &Octonion<S>, w: &Octonion<S>| p.mul(&w.mul(z)).mul(&z.conjugate());
    let x3 = x.power(3).map_err(|_| TwistorError::NotUnit)?;
    let xb3 = x3.conjugate();
    let lhs = acted(v);
    let span = quaternion_span_through(p, x).map_err(|_| TwistorError::NotImaginaryUnit)?;
    let subalgebra_branch = span[2..].iter().all(|w| close(&acted(w), &p.mul(w)));
    Ok(CubeReport {
        matches_cube: close(&lhs, &candidate(&x3, v)),
        matches_conjugate_cube: close(&lhs, &candidate(&xb3, v)),
        subalgebra_branch,
    })
}

/// Number of classes `[y] ∈ RP⁷` with `y⁶ = x⁶`.
pub fn fiber_count_rp7<S: Scalar>(x: &Octonion<S>) -> Result<usize, TwistorError> {
    if !x.is_unit() {
        return Err(TwistorError::NotUnit);
    }
    let xf = x.to_f64();
    let w = xf.power(6).map_err(|_| TwistorError::NotUnit)?;
    polar_form(&w).map_err(|_| TwistorError::NonGenericInput)?;
    let roots = power_map_preimages(&w, 6).map_err(|_| TwistorError::NonGenericInput)?;
    let tol = 1e-9;
    debug_assert!(roots
        .iter()
        .any(|y| y.max_abs_diff(&xf) < tol || y.max_abs_diff(&-xf.clone()) < tol));
    Ok(antipodal_classes(&roots, tol).len())
}

/// `x(t) = cos πt + e₁ sin πt` and its lift `(cos πt − p sin πt)x(t)` induce
/// the same structure at `p`. Takes `(cos πt, sin πt)`.
pub fn thm33_lift_identity<S: Scalar>(c: &S, s: &S, p: &Octonion<S>) -> Result<bool, TwistorError> {
    let x = Octonion::complex(c.clone(), s.clone(), 1);
    let lift = (Octonion::real_scalar(c.clone()) - p.scale(s)).mul(&x);
    let direct = twistor_evaluate(&TwistorPoint::new(p.clone(), x)?);
    let lifted = twistor_evaluate(&TwistorPoint::new(p.clone(), lift)?);
    Ok(direct.same_as(&lifted))
}
