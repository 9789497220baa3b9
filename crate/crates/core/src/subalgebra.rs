//! Quaternion subalgebras, doubling coordinates and G₂ automorphisms.

use rand::Rng;
use thiserror::Error;

use crate::linalg::Matrix;
use crate::octonion::{apply_matrix, matrix_of, Octonion};
use crate::scalar::Scalar;
use crate::sphere::{random_imaginary_unit, random_unit_orthogonal_to, stereographic_point, SampleScalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubalgebraError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("doubling unit is not orthogonal to the subalgebra")]
    NotOrthogonal,
    #[error("doubling element is not a unit")]
    NotUnit,
    #[error("invalid frame: {0}")]
    FrameInvalid(String),
    #[error("automorphism check failed on e{0}·e{1}")]
    AutomorphismCheckFailed(usize, usize),
    #[error("normalization needs a square root that does not exist in the field")]
    InexactNormalization,
}

/// Projection of `v` onto the span of mutually orthogonal nonzero vectors.
fn project<S: Scalar>(v: &Octonion<S>, basis: &[Octonion<S>]) -> Octonion<S> {
    basis.iter().fold(Octonion::zero(), |acc, b| {
        acc + b.scale(&(v.inner(b) / b.norm_sq()))
    })
}

/// `true` when `v` lies in the span of the mutually orthogonal `basis`.
pub fn in_span<S: Scalar>(v: &Octonion<S>, basis: &[Octonion<S>]) -> bool {
    (v.clone() - project(v, basis)).is_zero()
}

/// The quaternion subalgebra `⟨1, x, y, yx⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuaternionFrame<S: Scalar> {
    x: Octonion<S>,
    y: Octonion<S>,
    basis: [Octonion<S>; 4],
}

impl<S: Scalar> QuaternionFrame<S> {
    pub fn new(x: Octonion<S>, y: Octonion<S>) -> Result<Self, SubalgebraError> {
        let bad = |m: &str| SubalgebraError::FrameInvalid(m.to_string());
        x.require_imaginary_unit()
            .map_err(|_| bad("x is not a unit imaginary"))?;
        y.require_imaginary_unit()
            .map_err(|_| bad("y is not a unit imaginary"))?;
        if !x.inner(&y).is_zero() {
            return Err(bad("x and y are not orthogonal"));
        }
        let yx = y.mul(&x);
        let basis = [Octonion::one(), x.clone(), y.clone(), yx];
        let frame = QuaternionFrame { x, y, basis };
        if let Some((a, b)) = frame.closure_failure() {
            return Err(SubalgebraError::FrameInvalid(format!(
                "span not closed under b{a}·b{b}"
            )));
        }
        Ok(frame)
    }

    pub fn x(&self) -> &Octonion<S> {
        &self.x
    }

    pub fn y(&self) -> &Octonion<S> {
        &self.y
    }

    /// `(1, x, y, yx)`.
    pub fn basis(&self) -> &[Octonion<S>; 4] {
        &self.basis
    }

    pub fn contains(&self, v: &Octonion<S>) -> bool {
        in_span(v, &self.basis)
    }

    /// First pair of basis elements whose product leaves the span.
    pub fn closure_failure(&self) -> Option<(usize, usize)> {
        for a in 0..4 {
            for b in 0..4 {
                if !self.contains(&self.basis[a].mul(&self.basis[b])) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Coordinates in the basis `(1, x, y, yx)`.
    pub fn coords_of(&self, v: &Octonion<S>) -> [S; 4] {
        std::array::from_fn(|k| v.inner(&self.basis[k]))
    }

    pub fn element(&self, c: &[S; 4]) -> Octonion<S> {
        self.basis
            .iter()
            .zip(c)
            .fold(Octonion::zero(), |acc, (b, t)| acc + b.scale(t))
    }
}

/// First `e_k` (`k = 1…7`) orthogonal to `p`; if there is none, `None`.
fn first_basis_orthogonal<S: Scalar>(p: &Octonion<S>) -> Option<Octonion<S>> {
    (1..8).map(Octonion::basis).find(|e| e.inner(p).is_zero())
}

/// An orthogonal (not necessarily unit) basis `(1, p, w, wp)` of a quaternion
/// subalgebra containing `1`, `p` and `x`. Never needs a square root.
pub fn quaternion_span_through<S: Scalar>(
    p: &Octonion<S>,
    x: &Octonion<S>,
) -> Result<[Octonion<S>; 4], SubalgebraError> {
    p.require_imaginary_unit()
        .map_err(|e| SubalgebraError::DegenerateInput(e.to_string()))?;
    let im = x.imag();
    let w = im.clone() - p.scale(&im.inner(p));
    let w = if w.is_zero() {
        first_basis_orthogonal(p).unwrap_or_else(|| {
            let e = (1..8)
                .map(Octonion::basis)
                .find(|e: &Octonion<S>| !(e.clone() - p.scale(&e.inner(p))).is_zero())
                .expect("some basis vector is not parallel to p");
            e.clone() - p.scale(&e.inner(p))
        })
    } else {
        w
    };
    let wp = w.mul(p);
    Ok([Octonion::one(), p.clone(), w, wp])
}

/// The quaternion subalgebra through `1`, `p`, `x`, framed as `(p, y)` with
/// `y` the normalized component of `Im x` orthogonal to `p`. When
/// `x ∈ span(1, p)` the fallback `y` is the first standard basis vector
/// orthogonal to `⟨1, p⟩`.
pub fn quaternion_subalgebra_through<S: Scalar>(
    p: &Octonion<S>,
    x: &Octonion<S>,
) -> Result<QuaternionFrame<S>, SubalgebraError> {
    let span = quaternion_span_through(p, x)?;
    let y = span[2]
        .normalized()
        .ok_or(SubalgebraError::InexactNormalization)?;
    QuaternionFrame::new(p.clone(), y)
}

/// Coordinates `𝕆 = A ⊕ IA`, `v = a + I b` with `a, b ∈ A`, written in the
/// frame basis of `A`.
#[derive(Debug, Clone)]
pub struct DoublingCoordinates<S: Scalar> {
    frame: QuaternionFrame<S>,
    i_unit: Octonion<S>,
}

pub type Pair<S> = ([S; 4], [S; 4]);

pub fn doubling_coordinates<S: Scalar>(
    frame: &QuaternionFrame<S>,
    i_unit: &Octonion<S>,
) -> Result<DoublingCoordinates<S>, SubalgebraError> {
    if !i_unit.is_unit() {
        return Err(SubalgebraError::NotUnit);
    }
    if frame.basis.iter().any(|b| !b.inner(i_unit).is_zero()) {
        return Err(SubalgebraError::NotOrthogonal);
    }
    Ok(DoublingCoordinates {
        frame: frame.clone(),
        i_unit: i_unit.clone(),
    })
}

impl<S: Scalar> DoublingCoordinates<S> {
    pub fn frame(&self) -> &QuaternionFrame<S> {
        &self.frame
    }

    pub fn to_coords(&self, v: &Octonion<S>) -> Pair<S> {
        let a = self.frame.coords_of(v);
        let rest = v.clone() - self.frame.element(&a);
        let b = self.i_unit.conjugate().mul(&rest);
        (a, self.frame.coords_of(&b))
    }

    pub fn from_coords(&self, (a, b): &Pair<S>) -> Octonion<S> {
        self.frame.element(a) + self.i_unit.mul(&self.frame.element(b))
    }

    /// The doubling rule `(a + Ib)(c + Id) = (ac − d b̄) + I(cb + ā d)`,
    /// evaluated with quaternion products inside `A`.
    pub fn multiply(&self, (a, b): &Pair<S>, (c, d): &Pair<S>) -> Pair<S> {
        let f = &self.frame;
        let (a, b, c, d) = (f.element(a), f.element(b), f.element(c), f.element(d));
        let first = a.mul(&c) - d.mul(&b.conjugate());
        let second = c.mul(&b) + a.conjugate().mul(&d);
        (f.coords_of(&first), f.coords_of(&second))
    }

    /// First coordinate basis pair on which the doubling rule disagrees with
    /// octonion multiplication.
    pub fn doubling_rule_failure(&self) -> Option<(usize, usize)> {
        let unit = |k: usize| -> Pair<S> {
            let mut a: [S; 4] = std::array::from_fn(|_| S::zero());
            let mut b = a.clone();
            if k < 4 {
                a[k] = S::one();
            } else {
                b[k - 4] = S::one();
            }
            (a, b)
        };
        for s in 0..8 {
            for t in 0..8 {
                let (u, v) = (unit(s), unit(t));
                let lhs = self.from_coords(&self.multiply(&u, &v));
                let rhs = self.from_coords(&u).mul(&self.from_coords(&v));
                if !lhs.approx_eq(&rhs) {
                    return Some((s, t));
                }
            }
        }
        None
    }
}

/// Orthonormal imaginary units `(x, y, z)` with `z ⊥ yx`.
#[derive(Debug, Clone, PartialEq)]
pub struct G2Frame<S: Scalar> {
    pub x: Octonion<S>,
    pub y: Octonion<S>,
    pub z: Octonion<S>,
}

impl<S: Scalar> G2Frame<S> {
    pub fn new(x: Octonion<S>, y: Octonion<S>, z: Octonion<S>) -> Result<Self, SubalgebraError> {
        let bad = |m: String| SubalgebraError::FrameInvalid(m);
        for (name, v) in [("x", &x), ("y", &y), ("z", &z)] {
            v.require_imaginary_unit()
                .map_err(|e| bad(format!("{name}: {e}")))?;
        }
        for (name, u, v) in [("x,y", &x, &y), ("x,z", &x, &z), ("y,z", &y, &z)] {
            if !u.inner(v).is_zero() {
                return Err(bad(format!("{name} not orthogonal")));
            }
        }
        if !z.inner(&y.mul(&x)).is_zero() {
            return Err(bad("z is not orthogonal to yx".to_string()));
        }
        Ok(G2Frame { x, y, z })
    }

    pub fn standard() -> Self {
        G2Frame {
            x: Octonion::basis(1),
            y: Octonion::basis(2),
            z: Octonion::basis(4),
        }
    }

    /// The frame `(φ(e₁), φ(e₂), φ(e₄))` of a linear map.
    pub fn image_of(m: &Matrix<S>) -> Result<Self, SubalgebraError> {
        let col = |k| Octonion::from_slice(&m.column(k));
        G2Frame::new(col(1), col(2), col(4))
    }
}

/// First basis pair `(a, b)` with `φ(e_a e_b) ≠ φ(e_a)φ(e_b)`.
pub fn automorphism_failure<S: Scalar>(m: &Matrix<S>) -> Option<(usize, usize)> {
    let images: Vec<Octonion<S>> = (0..8).map(|k| apply_matrix(m, &Octonion::basis(k))).collect();
    for a in 0..8 {
        for b in 0..8 {
            let lhs = apply_matrix(m, &Octonion::basis(a).mul(&Octonion::basis(b)));
            if !lhs.approx_eq(&images[a].mul(&images[b])) {
                return Some((a, b));
            }
        }
    }
    None
}

/// The automorphism sending `(e₁, e₂, e₄) ↦ (x, y, z)`, extended by
/// `e₃ ↦ xy`, `e₅ ↦ xz`, `e₆ ↦ yz`, `e₇ ↦ (xy)z`.
pub fn g2_from_frame<S: Scalar>(f: &G2Frame<S>) -> Result<Matrix<S>, SubalgebraError> {
    let xy = f.x.mul(&f.y);
    let cols = [
        Octonion::one(),
        f.x.clone(),
        f.y.clone(),
        xy.clone(),
        f.z.clone(),
        f.x.mul(&f.z),
        f.y.mul(&f.z),
        xy.mul(&f.z),
    ];
    let m = Matrix::from_columns(&cols.iter().map(Octonion::to_vec).collect::<Vec<_>>());
    if !m.is_orthogonal() {
        return Err(SubalgebraError::FrameInvalid(
            "image is not orthonormal".to_string(),
        ));
    }
    if let Some((a, b)) = automorphism_failure(&m) {
        return Err(SubalgebraError::AutomorphismCheckFailed(a, b));
    }
    Ok(m)
}

/// Exact unit vector of length `t.len() + 1` from the stereographic chart.
pub fn rational_unit_sphere_point<S: Scalar>(t: &[S]) -> Vec<S> {
    stereographic_point(t)
}

pub fn random_g2_frame<S: SampleScalar, R: Rng + ?Sized>(rng: &mut R) -> G2Frame<S> {
    let x: Octonion<S> = random_imaginary_unit(rng);
    let one = Octonion::<S>::one().to_vec();
    let y = Octonion::from_slice(&random_unit_orthogonal_to(rng, &[one.clone(), x.to_vec()], 8));
    let yx = y.mul(&x);
    let z = Octonion::from_slice(&random_unit_orthogonal_to(
        rng,
        &[one, x.to_vec(), y.to_vec(), yx.to_vec()],
        8,
    ));
    G2Frame::new(x, y, z).expect("sampled frame is admissible")
}

pub fn random_g2<S: SampleScalar, R: Rng + ?Sized>(rng: &mut R) -> Matrix<S> {
    g2_from_frame(&random_g2_frame(rng)).expect("valid frames give automorphisms")
}

/// `φ((c + e₁ s)·x) = (c + φ(e₁) s)·φ(x)`.
pub fn s1_equivariance_holds<S: Scalar>(phi: &Matrix<S>, (c, s): (&S, &S), x: &Octonion<S>) -> bool {
    let rot = Octonion::complex(c.clone(), s.clone(), 1);
    let lhs = apply_matrix(phi, &rot.mul(x));
    let phi_e1 = apply_matrix(phi, &Octonion::basis(1));
    let rot_image = Octonion::real_scalar(c.clone()) + phi_e1.scale(s);
    lhs.approx_eq(&rot_image.mul(&apply_matrix(phi, x)))
}

/// Rebuilds a G₂ element from its own frame image.
pub fn rebuild_from_image<S: Scalar>(phi: &Matrix<S>) -> Result<Matrix<S>, SubalgebraError> {
    g2_from_frame(&G2Frame::image_of(phi)?)
}

/// Matrix of left multiplication by `a`.
pub fn left_mult_matrix<S: Scalar>(a: &Octonion<S>) -> Matrix<S> {
    matrix_of(|v| a.mul(v))
}
