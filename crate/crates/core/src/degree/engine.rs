//! Multi-start Newton search for preimages of a regular value.
//!
//! Each Newton step works in the stereographic chart centred at the current
//! point (so the retraction is `Δ ↦ ((1 − |Δ|²)y + 2Σ Δᵢ Eᵢ)/(1 + |Δ|²)`) and
//! measures the residual in the chart of `S⁷` centred at the target `q` with
//! pole `−q`. A preimage `y` contributes `sign det[y, W] · sign det[f(y), Df W]`
//! for any frame `W` of `T_y`; on the cylinder the domain frame is
//! `(∂θ, W)` with `W` oriented as the boundary of the unit ball of `Im 𝕆`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::orthonormal_completion;
use crate::sphere::{sample_rng, SampleScalar};

use super::maps::{cylinder_point, split_cylinder, Domain, MapFamily, Point};
use super::DegreeError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeConfig {
    /// Newton starts per pass (two passes per sampled value).
    pub starts: usize,
    pub trials: usize,
    /// Chart-residual convergence threshold.
    pub tolerance: f64,
    /// Chordal distance below which two preimages are the same.
    pub dedupe: f64,
    /// Values with a preimage where `|det Df| < critical` are re-sampled.
    pub critical: f64,
    pub max_resamples: usize,
    pub max_iterations: usize,
    /// Negates the domain orientation.
    pub reverse_orientation: bool,
}

impl Default for DegreeConfig {
    fn default() -> Self {
        DegreeConfig {
            starts: 2000,
            trials: 3,
            tolerance: 1e-10,
            dedupe: 1e-6,
            critical: 1e-8,
            max_resamples: 5,
            max_iterations: 60,
            reverse_orientation: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Preimage {
    /// Domain point in the `R⁸` layout of [`super::maps`].
    pub point: [f64; 8],
    pub sign: i8,
    /// `det Df` in oriented orthonormal frames.
    pub det: f64,
    /// `|f(y) − q|`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub target: [f64; 8],
    pub degree: i64,
    pub preimages: Vec<Preimage>,
    pub converged_starts: usize,
    /// Values discarded (near-critical or unstable) before this one.
    pub resamples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeReport {
    pub map: String,
    pub degree: i64,
    pub seed: u64,
    pub trials: Vec<TrialReport>,
}

enum Outcome {
    Converged(Point),
    Stalled,
    Failed,
}

/// Radical inverse of `n` in base `b`.
fn radical_inverse(mut n: u64, b: u64) -> f64 {
    let inv = 1.0 / b as f64;
    let mut out = 0.0;
    let mut f = inv;
    while n > 0 {
        out += (n % b) as f64 * f;
        n /= b;
        f *= inv;
    }
    out
}

const HALTON_BASES: [u64; 9] = [2, 3, 5, 7, 11, 13, 17, 19, 23];

/// Halton point `n` with a Cranley–Patterson shift.
fn halton(n: u64, shift: &[f64; 9]) -> [f64; 9] {
    std::array::from_fn(|i| (radical_inverse(n + 1, HALTON_BASES[i]) + shift[i]).fract())
}

/// Box–Muller on consecutive pairs; the result is uniform on the sphere of
/// dimension `dim − 1` once normalised.
fn gaussians(u: &[f64], dim: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(dim + 1);
    for pair in u.chunks(2) {
        let r = (-2.0 * (1.0 - pair[0]).ln()).sqrt();
        let a = 2.0 * std::f64::consts::PI * pair[1];
        out.push(r * a.cos());
        out.push(r * a.sin());
    }
    out.truncate(dim);
    out
}

fn stereographic(center: &Point, frame: &[Point], t: &[f64]) -> Point {
    let s: f64 = t.iter().map(|x| x * x).sum();
    let mut y = center.scale(&(1.0 - s));
    for (ti, e) in t.iter().zip(frame) {
        y = y + e.scale(&(2.0 * ti));
    }
    y.scale(&(1.0 / (1.0 + s)))
}

fn completion(given: &[Point]) -> Vec<Point> {
    let given: Vec<Vec<f64>> = given.iter().map(Point::to_vec).collect();
    orthonormal_completion(&given, 8)
        .iter()
        .map(|v| Point::from_slice(v))
        .collect()
}

/// Oriented frame of the domain's tangent space at `y`, the chart scale of
/// each frame vector, and the domain orientation sign of the frame.
fn domain_frame(domain: Domain, y: &Point) -> (Vec<Point>, Vec<f64>, f64) {
    match domain {
        Domain::Sphere => {
            let w = completion(std::slice::from_ref(y));
            let mut cols = vec![y.clone()];
            cols.extend(w.iter().cloned());
            (w, vec![2.0; 7], det8(&cols).signum())
        }
        Domain::Cylinder => {
            let (_, p) = split_cylinder(y);
            let w = completion(&[Point::one(), p.clone()]);
            let mut cols = vec![Point::one(), p];
            cols.extend(w.iter().cloned());
            let orient = det8(&cols).signum();
            let mut frame = vec![Point::one()];
            frame.extend(w);
            let mut scales = vec![1.0];
            scales.extend([2.0; 6]);
            (frame, scales, orient)
        }
    }
}

fn retract(domain: Domain, y: &Point, frame: &[Point], delta: &[f64]) -> Point {
    match domain {
        Domain::Sphere => {
            let z = stereographic(y, frame, delta);
            z.normalized().unwrap_or(z)
        }
        Domain::Cylinder => {
            let (theta, p) = split_cylinder(y);
            let z = stereographic(&p, &frame[1..], &delta[1..]);
            cylinder_point(theta + delta[0], &z.normalized().unwrap_or(z))
        }
    }
}

fn in_interior(domain: Domain, y: &Point) -> bool {
    match domain {
        Domain::Sphere => true,
        Domain::Cylinder => {
            let theta = *y.real();
            theta > 0.0 && theta < 2.0 * std::f64::consts::PI
        }
    }
}

fn det8(cols: &[Point]) -> f64 {
    DMatrix::from_fn(8, 8, |i, j| *cols[j].coord(i)).determinant()
}

struct TargetChart {
    q: Point,
    frame: Vec<Point>,
}

impl TargetChart {
    fn new(q: &Point) -> Self {
        TargetChart {
            q: q.clone(),
            frame: completion(std::slice::from_ref(q)),
        }
    }

    fn coords(&self, y: &Point) -> DVector<f64> {
        let den = 1.0 + y.inner(&self.q);
        DVector::from_iterator(7, self.frame.iter().map(|e| y.inner(e) / den))
    }

    fn push(&self, y: &Point, w: &Point) -> DVector<f64> {
        let den = 1.0 + y.inner(&self.q);
        let wq = w.inner(&self.q);
        DVector::from_iterator(
            7,
            self.frame
                .iter()
                .map(|e| w.inner(e) / den - y.inner(e) * wq / (den * den)),
        )
    }
}

/// Largest chart step, about a quarter radian on the sphere.
const MAX_STEP: f64 = 0.125;

fn newton(map: &MapFamily, chart: &TargetChart, start: Point, cfg: &DegreeConfig) -> Outcome {
    let domain = map.domain();
    let mut y = start;
    let mut res = chart.coords(&map.eval(&y)).norm();
    for _ in 0..cfg.max_iterations {
        if !res.is_finite() {
            return Outcome::Failed;
        }
        if res < cfg.tolerance {
            return Outcome::Converged(y);
        }
        let fy = map.eval(&y);
        let (frame, scales, _) = domain_frame(domain, &y);
        let mut jac = DMatrix::zeros(7, 7);
        for (j, (e, s)) in frame.iter().zip(&scales).enumerate() {
            let col = chart.push(&fy, &map.push(&y, &e.scale(s)));
            jac.set_column(j, &col);
        }
        let rhs = -chart.coords(&fy);
        let Some(delta) = jac.lu().solve(&rhs) else {
            return Outcome::Failed;
        };
        let mut lambda = (MAX_STEP / delta.norm()).min(1.0);
        let mut accepted = None;
        for _ in 0..12 {
            let step: Vec<f64> = delta.iter().map(|d| d * lambda).collect();
            let cand = retract(domain, &y, &frame, &step);
            if in_interior(domain, &cand) {
                let r = chart.coords(&map.eval(&cand)).norm();
                if r < res {
                    accepted = Some((cand, r));
                    break;
                }
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((cand, r)) => {
                y = cand;
                res = r;
            }
            None => break,
        }
    }
    if res < cfg.tolerance {
        Outcome::Converged(y)
    } else if res < 1e-3 {
        Outcome::Stalled
    } else {
        Outcome::Failed
    }
}

fn start_point(domain: Domain, n: u64, shift: &[f64; 9]) -> Point {
    // Each parity class walks its own Halton sequence; interleaving one
    // sequence would tie the parity to the leading base-2 digit.
    let u = match domain {
        Domain::Sphere => halton(n / 2, shift),
        Domain::Cylinder => halton(n, shift),
    };
    let unit = |g: Vec<f64>, offset: usize| {
        let mut c = [0.0; 8];
        c[offset..offset + g.len()].copy_from_slice(&g);
        let p = Point::new(c);
        p.normalized().unwrap_or_else(|| Point::basis(offset))
    };
    match domain {
        // Odd starts are uniform in the angle from 1 rather than in volume,
        // so thin caps around ±1 are not starved.
        Domain::Sphere if n % 2 == 1 => {
            let beta = std::f64::consts::PI * u[0];
            let v = unit(gaussians(&u[1..], 7), 1);
            Point::real_scalar(beta.cos()) + v.scale(&beta.sin())
        }
        Domain::Sphere => unit(gaussians(&u[..8], 8), 0),
        Domain::Cylinder => {
            let theta = 2.0 * std::f64::consts::PI * (0.001 + 0.998 * u[0]);
            cylinder_point(theta, &unit(gaussians(&u[1..], 7), 1))
        }
    }
}

struct Pass {
    preimages: Vec<Point>,
    converged: usize,
    stalled: usize,
}

fn search(map: &MapFamily, q: &Point, shift: &[f64; 9], cfg: &DegreeConfig) -> Pass {
    let chart = TargetChart::new(q);
    let domain = map.domain();
    let outcomes: Vec<Outcome> = (0..cfg.starts as u64)
        .into_par_iter()
        .map(|n| newton(map, &chart, start_point(domain, n, shift), cfg))
        .collect();
    let mut preimages: Vec<Point> = Vec::new();
    let (mut converged, mut stalled) = (0, 0);
    for o in outcomes {
        match o {
            Outcome::Converged(y) => {
                converged += 1;
                if preimages.iter().all(|p| p.max_abs_diff(&y) >= cfg.dedupe) {
                    preimages.push(y);
                }
            }
            Outcome::Stalled => stalled += 1,
            Outcome::Failed => {}
        }
    }
    Pass {
        preimages,
        converged,
        stalled,
    }
}

fn signed(map: &MapFamily, y: &Point, q: &Point, reverse: bool) -> Preimage {
    let fy = map.eval(y);
    let (frame, _, orient) = domain_frame(map.domain(), y);
    let mut cols = vec![fy.clone()];
    cols.extend(frame.iter().map(|w| map.push(y, w)));
    let det = det8(&cols) * orient;
    let sign = if reverse { -det.signum() } else { det.signum() };
    Preimage {
        point: std::array::from_fn(|k| *y.coord(k)),
        sign: sign as i8,
        det,
        residual: (fy - q.clone()).norm_sq().sqrt(),
    }
}

fn random_target<R: Rng + ?Sized>(rng: &mut R) -> Point {
    loop {
        let q = Point::from_slice(&f64::random_unit_vector(rng, 8));
        // Stay away from ±1, the boundary image of the cylinder maps.
        if q.real().abs() < 0.95 {
            return q;
        }
    }
}

fn run_trial(
    map: &MapFamily,
    seed: u64,
    trial: usize,
    cfg: &DegreeConfig,
) -> Result<TrialReport, DegreeError> {
    let mut rng = sample_rng(seed, trial as u64);
    let mut resamples = 0;
    let mut stalled_total = 0;
    loop {
        if resamples > cfg.max_resamples {
            return Err(if stalled_total > 0 {
                DegreeError::NonConvergence {
                    stalled: stalled_total,
                }
            } else {
                DegreeError::UnstablePreimageCount
            });
        }
        let q = random_target(&mut rng);
        let shift_a: [f64; 9] = std::array::from_fn(|_| rng.random::<f64>());
        let shift_b: [f64; 9] = std::array::from_fn(|_| rng.random::<f64>());
        let a = search(map, &q, &shift_a, cfg);
        let b = search(map, &q, &shift_b, cfg);
        let stalled_only = (a.converged == 0 && a.stalled > 0) || (b.converged == 0 && b.stalled > 0);
        if stalled_only || a.preimages.len() != b.preimages.len() {
            stalled_total += a.stalled + b.stalled;
            resamples += 1;
            continue;
        }
        let pre: Vec<Preimage> = a
            .preimages
            .iter()
            .map(|y| signed(map, y, &q, cfg.reverse_orientation))
            .collect();
        if pre.iter().any(|p| p.det.abs() < cfg.critical) {
            resamples += 1;
            continue;
        }
        return Ok(TrialReport {
            target: std::array::from_fn(|k| *q.coord(k)),
            degree: pre.iter().map(|p| i64::from(p.sign)).sum(),
            preimages: pre,
            converged_starts: a.converged + b.converged,
            resamples,
        });
    }
}

/// Degree by signed counting at `config.trials` independent regular values.
pub fn mapping_degree(
    map: &MapFamily,
    seed: u64,
    config: &DegreeConfig,
) -> Result<DegreeReport, DegreeError> {
    map.validate()?;
    if config.trials == 0 || config.starts == 0 {
        return Err(DegreeError::BadConfig(
            "trials and starts must be positive".to_string(),
        ));
    }
    let trials: Vec<TrialReport> = (0..config.trials)
        .map(|t| run_trial(map, seed, t, config))
        .collect::<Result<_, _>>()?;
    let degrees: Vec<i64> = trials.iter().map(|t| t.degree).collect();
    if degrees.iter().any(|d| *d != degrees[0]) {
        return Err(DegreeError::ConflictingEstimates(degrees));
    }
    Ok(DegreeReport {
        map: map.to_string(),
        degree: degrees[0],
        seed,
        trials,
    })
}

/// Degree of the self-map of `RP⁷` induced by an odd map of `S⁷`. Both
/// spaces are orientable and the covering is a local diffeomorphism, so the
/// degree equals that of the lift.
pub fn degree_on_rp7(map: &MapFamily, seed: u64, config: &DegreeConfig) -> Result<DegreeReport, DegreeError> {
    if map.domain() != Domain::Sphere {
        return Err(DegreeError::NotOdd);
    }
    let mut rng = sample_rng(seed, u64::MAX);
    for _ in 0..64 {
        let x = Point::from_slice(&f64::random_unit_vector(&mut rng, 8));
        if !map.is_odd_at(&x) {
            return Err(DegreeError::NotOdd);
        }
    }
    mapping_degree(map, seed, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::oracle::power_map_preimages;

    fn quick() -> DegreeConfig {
        DegreeConfig {
            starts: 400,
            trials: 2,
            ..DegreeConfig::default()
        }
    }

    #[test]
    fn halton_is_in_unit_cube() {
        let s = [0.3; 9];
        for n in 0..100 {
            assert!(halton(n, &s).iter().all(|x| (0.0..1.0).contains(x)));
        }
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
    }

    #[test]
    fn basic_degrees() {
        for (m, d) in [
            (MapFamily::Identity, 1),
            (MapFamily::Power(2), 2),
            (MapFamily::Conjugation, -1),
            (MapFamily::ThetaCircle, 0),
            (MapFamily::CylinderCollapse, 1),
            (MapFamily::CylinderLoop, 2),
        ] {
            let r = mapping_degree(&m, 1, &quick()).unwrap();
            assert_eq!(r.degree, d, "{m}");
        }
    }

    #[test]
    fn power_preimages_match_oracle() {
        let r = mapping_degree(&MapFamily::Power(5), 2, &quick()).unwrap();
        for t in &r.trials {
            let q = Point::from_slice(&t.target);
            let oracle = power_map_preimages(&q, 5).unwrap();
            assert_eq!(t.preimages.len(), 5);
            for p in &t.preimages {
                let y = Point::from_slice(&p.point);
                assert!(oracle.iter().any(|o| o.max_abs_diff(&y) < 1e-8));
            }
        }
    }

    #[test]
    fn composites_multiply() {
        for name in [
            "power:3*conjugation",
            "conjugation*squaring",
            "squaring*cylinder-collapse",
        ] {
            let m: MapFamily = name.parse().unwrap();
            let r = mapping_degree(&m, 4, &quick()).unwrap();
            assert_eq!(Some(r.degree), m.expected_degree(), "{name}");
        }
    }

    #[test]
    fn reversed_orientation_negates() {
        let cfg = DegreeConfig {
            reverse_orientation: true,
            ..quick()
        };
        assert_eq!(mapping_degree(&MapFamily::Power(3), 3, &cfg).unwrap().degree, -3);
    }

    #[test]
    fn rp7_checks_oddness() {
        assert_eq!(
            degree_on_rp7(&MapFamily::Power(2), 1, &quick()).unwrap_err(),
            DegreeError::NotOdd
        );
        assert_eq!(degree_on_rp7(&MapFamily::Rp7Cube, 1, &quick()).unwrap().degree, 3);
    }
}
