//! Orthogonal complex structures on `R⁶ = ⟨1, e₁⟩⊥`.
//!
//! Every orientation-compatible orthogonal structure is `J_x(v) = (e₁(vx))x̄`
//! for a unit octonion `x`, unique up to left multiplication by a unit
//! complex number `cos θ + e₁ sin θ`.
//!
//! Coordinates on `R⁶` use the ordered basis [`R6_BASIS`] =
//! `(e₂, e₃, e₄, e₅, e₇, e₆)`. Under the plain order `(e₂, …, e₇)` the
//! standard structure `L_{e₁}` has a negative complex-basis determinant, so
//! the last two vectors are swapped once, globally.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::Matrix;
use crate::octonion::Octonion;
use crate::scalar::Scalar;
use crate::sphere::random_rotation;
use crate::subalgebra::{in_span, quaternion_span_through};

/// Octonion indices of the ordered basis of `⟨1, e₁⟩⊥`.
pub const R6_BASIS: [usize; 6] = [2, 3, 4, 5, 7, 6];

/// Tolerance for float-mode identity checks of whole operators.
pub const OPERATOR_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CStructError {
    #[error("octonion is not a unit")]
    NotUnit,
    #[error("zero octonion has no associated structure")]
    ZeroOctonion,
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("ker(J − L_e1) has dimension {0}, expected 2 or 6")]
    RankError(usize),
    #[error("identical structures: every complex line is common")]
    IdenticalStructures,
    #[error("no common complex line (agreement space of dimension {0})")]
    NoCommonLine(usize),
    #[error("x lies in span(1, e1): the block decomposition is degenerate")]
    DegenerateX,
    #[error("structure equality and the phase criterion disagree")]
    CriterionMismatch,
}

pub fn embed<S: Scalar>(v: &[S]) -> Octonion<S> {
    assert_eq!(v.len(), 6);
    let mut c: [S; 8] = std::array::from_fn(|_| S::zero());
    for (k, &idx) in R6_BASIS.iter().enumerate() {
        c[idx] = v[k].clone();
    }
    Octonion::new(c)
}

/// Coordinates of `v` on [`R6_BASIS`]; the `1` and `e₁` components are dropped.
pub fn restrict<S: Scalar>(v: &Octonion<S>) -> Vec<S> {
    R6_BASIS.iter().map(|&k| v.coord(k).clone()).collect()
}

fn basis_vector<S: Scalar>(k: usize) -> Vec<S> {
    let mut v = vec![S::zero(); 6];
    v[k] = S::one();
    v
}

/// The 6×6 matrix of a linear map `⟨1,e₁⟩⊥ → ⟨1,e₁⟩⊥` given on octonions.
pub fn operator_matrix<S: Scalar>(f: impl Fn(&Octonion<S>) -> Octonion<S>) -> Matrix<S> {
    let cols: Vec<Vec<S>> = (0..6)
        .map(|k| restrict(&f(&embed(&basis_vector::<S>(k)))))
        .collect();
    Matrix::from_columns(&cols)
}

/// Sign of `det[u, Ju, v, Jv, w, Jw]` for a `J`-complex basis `(u, v, w)`
/// built greedily from the coordinate basis. `0` if `J` admits no such basis.
pub fn complex_basis_orientation<S: Scalar>(j: &Matrix<S>) -> i8 {
    let n = j.rows();
    let mut cols: Vec<Vec<S>> = Vec::new();
    for k in 0..n {
        if cols.len() == n {
            break;
        }
        let u = basis_vector::<S>(k);
        let ju = j.mul_vec(&u);
        let mut trial = cols.clone();
        trial.push(u);
        trial.push(ju);
        if Matrix::from_columns(&trial).rank() == trial.len() {
            cols = trial;
        }
    }
    if cols.len() != n {
        return 0;
    }
    let d = Matrix::from_columns(&cols).determinant();
    if d.is_zero() {
        0
    } else if d.is_positive() {
        1
    } else {
        -1
    }
}

/// An orthogonal, orientation-compatible complex structure on `R⁶`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStructureR6<S: Scalar> {
    op: Matrix<S>,
}

impl<S: Scalar> Serialize for ComplexStructureR6<S> {
    fn serialize<Z: serde::Serializer>(&self, s: Z) -> Result<Z::Ok, Z::Error> {
        self.op.serialize(s)
    }
}

/// Reasons a 6×6 matrix fails to be a compatible complex structure.
pub fn structure_defects<S: Scalar>(m: &Matrix<S>) -> Vec<String> {
    let mut out = Vec::new();
    if m.rows() != 6 || m.cols() != 6 {
        out.push(format!("shape {}×{}, expected 6×6", m.rows(), m.cols()));
        return out;
    }
    if !m
        .mul(&m.transpose())
        .close_to(&Matrix::identity(6), OPERATOR_TOLERANCE)
    {
        out.push("not orthogonal".to_string());
    }
    if !m
        .mul(m)
        .close_to(&Matrix::identity(6).scale(&-S::one()), OPERATOR_TOLERANCE)
    {
        out.push("J² ≠ −Id".to_string());
    }
    if out.is_empty() && complex_basis_orientation(m) != 1 {
        out.push("orientation is not compatible".to_string());
    }
    out
}

impl<S: Scalar> ComplexStructureR6<S> {
    pub fn from_matrix(op: Matrix<S>) -> Result<Self, CStructError> {
        let defects = structure_defects(&op);
        if defects.is_empty() {
            Ok(ComplexStructureR6 { op })
        } else {
            Err(CStructError::InvalidStructure(defects.join("; ")))
        }
    }

    /// Skips validation; for operators known to be valid by construction.
    pub(crate) fn from_matrix_unchecked(op: Matrix<S>) -> Self {
        ComplexStructureR6 { op }
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.op
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        self.op.mul_vec(v)
    }

    /// `J(v)` for an octonion `v ∈ ⟨1, e₁⟩⊥`.
    pub fn apply_octonion(&self, v: &Octonion<S>) -> Octonion<S> {
        embed(&self.apply(&restrict(v)))
    }

    pub fn orientation_sign(&self) -> i8 {
        complex_basis_orientation(&self.op)
    }

    /// Equality of operators (exact, or within [`OPERATOR_TOLERANCE`]).
    pub fn same_as(&self, other: &Self) -> bool {
        self.op.close_to(&other.op, OPERATOR_TOLERANCE)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.op.max_abs_diff(&other.op)
    }
}

/// `v ↦ e₁ v` on `⟨1, e₁⟩⊥`.
pub fn standard_structure<S: Scalar>() -> ComplexStructureR6<S> {
    let e1 = Octonion::basis(1);
    ComplexStructureR6::from_matrix_unchecked(operator_matrix(|v| e1.mul(v)))
}

/// `J_x(v) = (e₁(vx))x̄ / |x|²`; for unit `x` this is `(e₁(vx))x̄`. Depends
/// only on the real line through `x`, so any nonzero representative works.
pub fn j_from_octonion_projective<S: Scalar>(x: &Octonion<S>) -> Result<ComplexStructureR6<S>, CStructError> {
    let n = x.norm_sq();
    if n.is_zero() {
        return Err(CStructError::ZeroOctonion);
    }
    let e1 = Octonion::basis(1);
    let xb = x.conjugate().scale(&(S::one() / n));
    Ok(ComplexStructureR6::from_matrix_unchecked(operator_matrix(|v| {
        e1.mul(&v.mul(x)).mul(&xb)
    })))
}

/// `J_x(v) = (e₁(vx))x̄` for a unit octonion `x`.
pub fn j_from_octonion<S: Scalar>(x: &Octonion<S>) -> Result<ComplexStructureR6<S>, CStructError> {
    if !x.is_unit() {
        return Err(CStructError::NotUnit);
    }
    j_from_octonion_projective(x)
}

/// `y x̄ ∈ span(1, e₁)`.
pub fn phase_related<S: Scalar>(x: &Octonion<S>, y: &Octonion<S>) -> bool {
    let r = y.mul(&x.conjugate());
    (2..8).all(|k| r.coord(k).is_zero())
}

/// Whether `y = (cos θ + e₁ sin θ)x` for some `θ`, decided by `J_x = J_y` and
/// cross-checked against the phase criterion `y x̄ ∈ span(1, e₁)`.
pub fn equivalent<S: Scalar>(x: &Octonion<S>, y: &Octonion<S>) -> Result<bool, CStructError> {
    if !x.is_unit() || !y.is_unit() {
        return Err(CStructError::NotUnit);
    }
    equivalent_projective(x, y)
}

/// [`equivalent`] for nonzero representatives of real lines.
pub fn equivalent_projective<S: Scalar>(x: &Octonion<S>, y: &Octonion<S>) -> Result<bool, CStructError> {
    let by_structure = j_from_octonion_projective(x)?.same_as(&j_from_octonion_projective(y)?);
    if by_structure != phase_related(x, y) {
        return Err(CStructError::CriterionMismatch);
    }
    Ok(by_structure)
}

/// Recovers `x` with `J_x = J`.
///
/// The kernel `L = ker(J − L_{e₁})` is a common complex line, `A = ⟨1, e₁⟩ ⊕ L`
/// is a quaternion subalgebra, `J` acts on `A⊥` as left multiplication by
/// `l = x̄e₁x ∈ Im A`, and `x ∝ 1 − e₁l` solves that equation inside `A`
/// (with `x = w ∈ L` when `l = −e₁`).
///
/// The result is normalized when the field has the needed square root;
/// otherwise it is a nonzero representative of the same real line, which
/// determines the same structure.
pub fn recover_x<S: Scalar>(j: &ComplexStructureR6<S>) -> Result<Octonion<S>, CStructError> {
    let defects = structure_defects(j.matrix());
    if !defects.is_empty() {
        return Err(CStructError::InvalidStructure(defects.join("; ")));
    }
    let std = standard_structure::<S>();
    if j.same_as(&std) {
        return Ok(Octonion::one());
    }
    let kernel = j.matrix().sub(std.matrix()).null_space();
    match kernel.len() {
        2 => {}
        6 => return Ok(Octonion::one()),
        d => return Err(CStructError::RankError(d)),
    }
    let e1 = Octonion::<S>::basis(1);
    let u = embed(&kernel[0]);
    let a = quaternion_span_through(&e1, &u).expect("e1 is a unit imaginary");
    let i_vec = (0..6)
        .map(|k| {
            let b = embed(&basis_vector::<S>(k));
            let proj = a.iter().fold(Octonion::zero(), |acc, v| {
                acc + v.scale(&(b.inner(v) / v.norm_sq()))
            });
            b - proj
        })
        .max_by(|p, q| p.norm_sq().to_f64().total_cmp(&q.norm_sq().to_f64()))
        .expect("six candidates");
    let l = j
        .apply_octonion(&i_vec)
        .mul(&i_vec.conjugate())
        .scale(&(S::one() / i_vec.norm_sq()));
    if !in_span(&l, &a) || !l.is_unit() {
        return Err(CStructError::InvalidStructure(
            "A⊥ is not acted on by a unit of Im A".to_string(),
        ));
    }
    let raw = Octonion::one() - e1.mul(&l);
    let x = if raw.norm_sq().to_f64() < 1e-12 {
        a[2].clone()
    } else {
        raw
    };
    let x = x.normalized().unwrap_or(x);
    if !j_from_octonion_projective(&x)?.same_as(j) {
        return Err(CStructError::InvalidStructure(
            "recovered octonion does not reproduce J".to_string(),
        ));
    }
    Ok(x)
}

/// An oriented plane `span(u, Ju)` in `R⁶`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexLine<S: Scalar> {
    #[serde(serialize_with = "ser_vec")]
    pub u: Vec<S>,
    #[serde(serialize_with = "ser_vec")]
    pub ju: Vec<S>,
}

fn ser_vec<S: Scalar, Z: serde::Serializer>(v: &[S], s: Z) -> Result<Z::Ok, Z::Error> {
    let strings: Vec<String> = v.iter().map(Scalar::to_scalar_string).collect();
    strings.serialize(s)
}

/// Result of [`common_line`]: the line plus how well the two structures
/// agree on it.
#[derive(Debug, Clone, PartialEq)]
pub struct CommonLine<S: Scalar> {
    pub line: ComplexLine<S>,
    pub kernel_dim: usize,
    pub residual: f64,
}

/// The unique complex line on which two distinct structures agree,
/// `ker(J₁ − J₂)`.
pub fn common_line<S: Scalar>(
    j1: &ComplexStructureR6<S>,
    j2: &ComplexStructureR6<S>,
) -> Result<CommonLine<S>, CStructError> {
    if j1.same_as(j2) {
        return Err(CStructError::IdenticalStructures);
    }
    let kernel = j1.matrix().sub(j2.matrix()).null_space();
    if kernel.len() != 2 {
        return Err(CStructError::NoCommonLine(kernel.len()));
    }
    let u0 = embed(&kernel[0]);
    let u = restrict(&u0.normalized().unwrap_or(u0));
    let ju = j1.apply(&u);
    let diff = |a: Vec<S>, b: Vec<S>| {
        a.iter()
            .zip(&b)
            .map(|(x, y)| x.sub_ref(y).to_f64().abs())
            .fold(0.0, f64::max)
    };
    let residual = diff(ju.clone(), j2.apply(&u)).max(diff(j1.apply(&ju), j2.apply(&ju)));
    Ok(CommonLine {
        line: ComplexLine { u, ju },
        kernel_dim: kernel.len(),
        residual,
    })
}

/// The quaternion-coordinate description of `J_x` for `x ∉ span(1, e₁)`.
#[derive(Debug, Clone)]
pub struct QuaternionForm<S: Scalar> {
    /// Orthogonal basis `(1, e₁, w, we₁)` of the subalgebra `A ∋ 1, e₁, x`.
    pub span: [Octonion<S>; 4],
    /// Orthogonal basis `I·A` of `A⊥`.
    pub complement: [Octonion<S>; 4],
    /// `l = x̄ e₁ x / |x|²`.
    pub l: Octonion<S>,
    /// Unit imaginary axis of `x = cos θ + w sin θ`.
    pub axis: Octonion<f64>,
    /// `2θ`, the angle by which `e₁` is turned about the axis to give `l`.
    pub angle: f64,
    /// `J_x = L_{e₁}` on `A ∩ R⁶`.
    pub agrees_on_a: bool,
    /// `J_x = L_l` on `A⊥`.
    pub agrees_on_complement: bool,
}

/// Rotation of `v` by `angle` about the unit imaginary `axis`, in the sense
/// `v⊥ ↦ cos φ v⊥ + sin φ Im(v⊥ w)`.
pub fn rotate_about(v: &Octonion<f64>, axis: &Octonion<f64>, angle: f64) -> Octonion<f64> {
    let par = axis.scale(&v.inner(axis));
    let perp = v.clone() - par.clone();
    par + perp.scale(&angle.cos()) + perp.mul(axis).imag().scale(&angle.sin())
}

pub fn quaternion_coordinate_form<S: Scalar>(x: &Octonion<S>) -> Result<QuaternionForm<S>, CStructError> {
    if x.is_zero() {
        return Err(CStructError::ZeroOctonion);
    }
    if (2..8).all(|k| x.coord(k).is_zero()) {
        return Err(CStructError::DegenerateX);
    }
    let e1 = Octonion::<S>::basis(1);
    let span = quaternion_span_through(&e1, x).expect("e1 is a unit imaginary");
    let i_unit = (1..8)
        .map(Octonion::<S>::basis)
        .map(|b| {
            let proj = span.iter().fold(Octonion::zero(), |acc, v| {
                acc + v.scale(&(b.inner(v) / v.norm_sq()))
            });
            b - proj
        })
        .max_by(|p, q| p.norm_sq().to_f64().total_cmp(&q.norm_sq().to_f64()))
        .expect("seven candidates");
    let complement: [Octonion<S>; 4] = std::array::from_fn(|k| i_unit.mul(&span[k]));
    let n = x.norm_sq();
    let l = x.conjugate().mul(&e1).mul(x).scale(&(S::one() / n.clone()));
    let jx = j_from_octonion_projective(x)?;
    let close = |a: &Octonion<S>, b: &Octonion<S>| {
        if S::EXACT {
            a == b
        } else {
            a.max_abs_diff(b) <= OPERATOR_TOLERANCE
        }
    };
    let agrees_on_a = span[2..].iter().all(|v| close(&jx.apply_octonion(v), &e1.mul(v)));
    let agrees_on_complement = complement.iter().all(|v| close(&jx.apply_octonion(v), &l.mul(v)));

    let xf = x.to_f64();
    let nf = xf.norm_sq().sqrt();
    let im = xf.imag();
    let im_norm = im.norm_sq().sqrt();
    let axis = im.scale(&(1.0 / im_norm));
    let angle = 2.0 * (im_norm / nf).atan2(*xf.real() / nf);
    Ok(QuaternionForm {
        span,
        complement,
        l,
        axis,
        angle,
        agrees_on_a,
        agrees_on_complement,
    })
}

/// A point of `CP³`: coordinates of `x` in the left `C`-module basis
/// `(1, e₂, e₄, e₆)` of `𝕆`, with `C = span(1, e₁)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cp3Point<S: Scalar> {
    /// `(re, im)` pairs.
    pub coords: [(S, S); 4],
}

pub const CP3_MODULE_BASIS: [usize; 4] = [0, 2, 4, 6];

fn cmul<S: Scalar>((a, b): &(S, S), (c, d): &(S, S)) -> (S, S) {
    (
        a.mul_ref(c).sub_ref(&b.mul_ref(d)),
        a.mul_ref(d).add_ref(&b.mul_ref(c)),
    )
}

impl<S: Scalar> Cp3Point<S> {
    /// Same point of `CP³`: all 2×2 complex minors vanish.
    pub fn same_point(&self, other: &Self) -> bool {
        for i in 0..4 {
            for j in 0..4 {
                let (p, q) = (
                    cmul(&self.coords[i], &other.coords[j]),
                    cmul(&self.coords[j], &other.coords[i]),
                );
                if !p.0.approx_eq(&q.0) || !p.1.approx_eq(&q.1) {
                    return false;
                }
            }
        }
        true
    }

    /// Divides by the first nonzero coordinate.
    pub fn affine(&self) -> Self {
        let Some(pivot) = self.coords.iter().find(|(a, b)| !(a.is_zero() && b.is_zero())) else {
            return self.clone();
        };
        let (a, b) = pivot.clone();
        let n = a.mul_ref(&a).add_ref(&b.mul_ref(&b));
        let inv = (a / n.clone(), -b / n);
        Cp3Point {
            coords: std::array::from_fn(|k| cmul(&self.coords[k], &inv)),
        }
    }
}

/// The octonion `z · b` with `z = re + e₁ im`.
pub fn module_element<S: Scalar>((re, im): &(S, S), b: usize) -> Octonion<S> {
    Octonion::complex(re.clone(), im.clone(), 1).mul(&Octonion::basis(b))
}

pub fn to_cp3<S: Scalar>(x: &Octonion<S>) -> Cp3Point<S> {
    let e1 = Octonion::<S>::basis(1);
    Cp3Point {
        coords: std::array::from_fn(|k| {
            let b = Octonion::basis(CP3_MODULE_BASIS[k]);
            (x.inner(&b), x.inner(&e1.mul(&b)))
        }),
    }
}

/// `Q L_{e₁} Qᵀ` for a Haar-random `Q ∈ SO(6)`.
pub fn random_structure<R: Rng + ?Sized>(rng: &mut R) -> ComplexStructureR6<f64> {
    let q = random_rotation(rng, 6);
    let op = q.mul(standard_structure::<f64>().matrix()).mul(&q.transpose());
    ComplexStructureR6::from_matrix_unchecked(op)
}
