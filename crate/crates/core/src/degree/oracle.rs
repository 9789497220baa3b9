//! Analytic preimages of power maps.
//!
//! Every octonion `w` lies in the complex line `span(1, u)` through its
//! imaginary axis `u`, and `y ↦ yᵏ` preserves each such line, so the
//! preimages of a unit `w ≠ ±1` are the `k` points `cos α + u sin α` with
//! `kα ≡ φ (mod 2π)`.

use crate::octonion::Octonion;

use super::DegreeError;

/// Below this imaginary norm a unit octonion counts as `±1`.
pub const GENERIC_TOLERANCE: f64 = 1e-12;

/// `(φ, u)` with `w = cos φ + u sin φ`, `φ ∈ (0, π)`.
pub fn polar_form(w: &Octonion<f64>) -> Result<(f64, Octonion<f64>), DegreeError> {
    let im = w.imag();
    let r = im.norm_sq().sqrt();
    if r < GENERIC_TOLERANCE {
        return Err(DegreeError::NonGenericValue);
    }
    Ok((r.atan2(*w.real()), im.scale(&(1.0 / r))))
}

pub fn power_map_preimages(w: &Octonion<f64>, k: u32) -> Result<Vec<Octonion<f64>>, DegreeError> {
    if k == 0 {
        return Err(DegreeError::BadConfig("exponent must be positive".to_string()));
    }
    let (phi, u) = polar_form(w)?;
    Ok((0..k)
        .map(|j| {
            let alpha = (phi + 2.0 * std::f64::consts::PI * f64::from(j)) / f64::from(k);
            Octonion::real_scalar(alpha.cos()) + u.scale(&alpha.sin())
        })
        .collect())
}

/// Classes of `points` modulo `y ~ −y`.
pub fn antipodal_classes(points: &[Octonion<f64>], tol: f64) -> Vec<Octonion<f64>> {
    let mut reps: Vec<Octonion<f64>> = Vec::new();
    for p in points {
        let known = reps
            .iter()
            .any(|r| r.max_abs_diff(p) < tol || r.max_abs_diff(&-p.clone()) < tol);
        if !known {
            reps.push(p.clone());
        }
    }
    reps
}
