//! The maps whose degrees are computed.
//!
//! Points are vectors of `R⁸`. On `S⁷` they are unit octonions; on the
//! cylinder `[0, 2π] × S⁶` slot 0 holds `θ` and slots 1–7 hold `p ∈ Im 𝕆`.
//! Tangent vectors use the same layout, so every map exposes a pushforward
//! `h ↦ Df(y)[h]` on `R⁸`.

use std::fmt;
use std::str::FromStr;

use crate::octonion::Octonion;

use super::DegreeError;

pub type Point = Octonion<f64>;

/// Central-difference step for maps without a closed-form differential.
pub const FD_STEP: f64 = 1e-5;

/// Largest accepted `power:k`; the default start budget resolves all `k` roots up to here.
pub const MAX_EXPONENT: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Sphere,
    /// `[0, 2π] × S⁶`, relative to its boundary.
    Cylinder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Differential {
    Exact,
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapFamily {
    Identity,
    /// `x ↦ xᵏ`.
    Power(u32),
    /// `x ↦ x̄`.
    Conjugation,
    /// `cos α + p sin α ↦ cos α + e₁ sin α`: collapses `S⁷` onto a circle.
    ThetaCircle,
    /// `x ↦ x³`, the lift of `[x] ↦ [a_{c(x)}]` on `RP⁷`.
    Rp7Cube,
    /// `(θ, p) ↦ cos θ + p sin θ`.
    CylinderLoop,
    /// `(θ, p) ↦ cos θ/2 + p sin θ/2`.
    CylinderCollapse,
    /// `outer ∘ inner`; `outer` must be defined on `S⁷`.
    Composite(Box<MapFamily>, Box<MapFamily>),
}

fn power_with_derivative(x: &Point, h: &Point, k: u32) -> (Point, Point) {
    // P₀ = 1, Pₖ = x Pₖ₋₁, DPₖ[h] = h Pₖ₋₁ + x DPₖ₋₁[h].
    let mut p = Point::one();
    let mut dp = Point::zero();
    for _ in 0..k {
        dp = h.mul(&p) + x.mul(&dp);
        p = x.mul(&p);
    }
    (p, dp)
}

impl MapFamily {
    pub fn domain(&self) -> Domain {
        match self {
            MapFamily::CylinderLoop | MapFamily::CylinderCollapse => Domain::Cylinder,
            MapFamily::Composite(_, inner) => inner.domain(),
            _ => Domain::Sphere,
        }
    }

    pub fn differential(&self) -> Differential {
        match self {
            MapFamily::ThetaCircle => Differential::FiniteDifference,
            MapFamily::Composite(a, b) => {
                if a.differential() == Differential::Exact && b.differential() == Differential::Exact {
                    Differential::Exact
                } else {
                    Differential::FiniteDifference
                }
            }
            _ => Differential::Exact,
        }
    }

    pub fn validate(&self) -> Result<(), DegreeError> {
        match self {
            MapFamily::Power(0) => Err(DegreeError::BadConfig("power:0 is constant".to_string())),
            MapFamily::Composite(outer, inner) => {
                if outer.domain() != Domain::Sphere {
                    return Err(DegreeError::BadConfig(
                        "the outer map of a composite must live on S⁷".to_string(),
                    ));
                }
                outer.validate()?;
                inner.validate()
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, y: &Point) -> Point {
        match self {
            MapFamily::Identity => y.clone(),
            MapFamily::Power(k) => y.power(i64::from(*k)).expect("positive power"),
            MapFamily::Conjugation => y.conjugate(),
            MapFamily::ThetaCircle => {
                let r = y.imag().norm_sq().sqrt();
                Point::complex(*y.real(), r, 1)
            }
            MapFamily::Rp7Cube => y.power(3).expect("positive power"),
            MapFamily::CylinderLoop => {
                let (theta, p) = split_cylinder(y);
                Point::real_scalar(theta.cos()) + p.scale(&theta.sin())
            }
            MapFamily::CylinderCollapse => {
                let (theta, p) = split_cylinder(y);
                let h = theta / 2.0;
                Point::real_scalar(h.cos()) + p.scale(&h.sin())
            }
            MapFamily::Composite(outer, inner) => outer.eval(&inner.eval(y)),
        }
    }

    /// `Df(y)[h]`.
    pub fn push(&self, y: &Point, h: &Point) -> Point {
        match self {
            MapFamily::Identity => h.clone(),
            MapFamily::Power(k) => power_with_derivative(y, h, *k).1,
            MapFamily::Rp7Cube => power_with_derivative(y, h, 3).1,
            MapFamily::Conjugation => h.conjugate(),
            MapFamily::ThetaCircle => {
                let plus = self.eval(&(y.clone() + h.scale(&FD_STEP)));
                let minus = self.eval(&(y.clone() - h.scale(&FD_STEP)));
                (plus - minus).scale(&(0.5 / FD_STEP))
            }
            MapFamily::CylinderLoop => {
                let (theta, p) = split_cylinder(y);
                let (dtheta, dp) = split_cylinder(h);
                (Point::real_scalar(-theta.sin()) + p.scale(&theta.cos())).scale(&dtheta)
                    + dp.scale(&theta.sin())
            }
            MapFamily::CylinderCollapse => {
                let (theta, p) = split_cylinder(y);
                let (dtheta, dp) = split_cylinder(h);
                let s = theta / 2.0;
                (Point::real_scalar(-s.sin()) + p.scale(&s.cos())).scale(&(0.5 * dtheta)) + dp.scale(&s.sin())
            }
            MapFamily::Composite(outer, inner) => outer.push(&inner.eval(y), &inner.push(y, h)),
        }
    }

    /// Whether `f(−x) = −f(x)`, so that `f` descends to `RP⁷`.
    pub fn is_odd_at(&self, x: &Point) -> bool {
        let a = self.eval(&-x.clone());
        let b = -self.eval(x);
        a.max_abs_diff(&b) < 1e-9
    }

    /// The degree predicted by theory, where one is known.
    pub fn expected_degree(&self) -> Option<i64> {
        match self {
            MapFamily::Identity => Some(1),
            MapFamily::Power(k) => Some(i64::from(*k)),
            MapFamily::Conjugation => Some(-1),
            MapFamily::ThetaCircle => Some(0),
            MapFamily::Rp7Cube => Some(3),
            MapFamily::CylinderLoop => Some(2),
            MapFamily::CylinderCollapse => Some(1),
            MapFamily::Composite(a, b) => Some(a.expected_degree()? * b.expected_degree()?),
        }
    }
}

/// `(θ, p)` from the cylinder layout.
pub fn split_cylinder(y: &Point) -> (f64, Point) {
    (*y.real(), y.imag())
}

pub fn cylinder_point(theta: f64, p: &Point) -> Point {
    Point::real_scalar(theta) + p.imag()
}

impl fmt::Display for MapFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapFamily::Identity => write!(f, "identity"),
            MapFamily::Power(2) => write!(f, "squaring"),
            MapFamily::Power(k) => write!(f, "power:{k}"),
            MapFamily::Conjugation => write!(f, "conjugation"),
            MapFamily::ThetaCircle => write!(f, "theta-circle"),
            MapFamily::Rp7Cube => write!(f, "rp7-cube"),
            MapFamily::CylinderLoop => write!(f, "cylinder-loop"),
            MapFamily::CylinderCollapse => write!(f, "cylinder-collapse"),
            MapFamily::Composite(a, b) => write!(f, "{a}*{b}"),
        }
    }
}

impl FromStr for MapFamily {
    type Err = DegreeError;

    /// Names as printed by `Display`; `a*b` composes right to left.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.matches('*').count() > 8 {
            return Err(DegreeError::BadConfig(
                "at most 9 factors in a composite".to_string(),
            ));
        }
        if let Some((outer, inner)) = s.split_once('*') {
            let map = MapFamily::Composite(Box::new(outer.parse()?), Box::new(inner.parse()?));
            map.validate()?;
            return Ok(map);
        }
        let map = match s {
            "identity" => MapFamily::Identity,
            "squaring" => MapFamily::Power(2),
            "conjugation" => MapFamily::Conjugation,
            "theta-circle" => MapFamily::ThetaCircle,
            "rp7-cube" => MapFamily::Rp7Cube,
            "cylinder-loop" => MapFamily::CylinderLoop,
            "cylinder-collapse" => MapFamily::CylinderCollapse,
            other => match other.strip_prefix("power:") {
                Some(k) => {
                    let k: u32 = k
                        .parse()
                        .map_err(|_| DegreeError::UnknownMap(other.to_string()))?;
                    if !(1..=MAX_EXPONENT).contains(&k) {
                        return Err(DegreeError::BadConfig(format!(
                            "exponent {k} outside 1..={MAX_EXPONENT}"
                        )));
                    }
                    MapFamily::Power(k)
                }
                None => return Err(DegreeError::UnknownMap(other.to_string())),
            },
        };
        Ok(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Point {
        Point::new([0.3, -0.2, 0.5, 0.1, -0.4, 0.2, 0.6, -0.1])
            .normalized()
            .unwrap()
    }

    fn fd(f: &MapFamily, y: &Point, h: &Point) -> Point {
        let e = 1e-6;
        (f.eval(&(y.clone() + h.scale(&e))) - f.eval(&(y.clone() - h.scale(&e)))).scale(&(0.5 / e))
    }

    #[test]
    fn exact_differentials_match_differences() {
        let y = sample();
        let h = Point::new([0.1, 0.7, -0.3, 0.2, 0.0, 0.5, -0.6, 0.4]);
        for f in [
            MapFamily::Identity,
            MapFamily::Power(1),
            MapFamily::Power(4),
            MapFamily::Conjugation,
            MapFamily::Rp7Cube,
            MapFamily::Composite(Box::new(MapFamily::Power(2)), Box::new(MapFamily::Conjugation)),
        ] {
            assert!(f.push(&y, &h).max_abs_diff(&fd(&f, &y, &h)) < 1e-7, "{f}");
        }
        let c = cylinder_point(1.3, &sample().imag().normalized().unwrap());
        for f in [MapFamily::CylinderLoop, MapFamily::CylinderCollapse] {
            assert!(f.push(&c, &h).max_abs_diff(&fd(&f, &c, &h)) < 1e-7, "{f}");
        }
    }

    #[test]
    fn names_round_trip() {
        for s in [
            "identity",
            "squaring",
            "power:5",
            "conjugation",
            "theta-circle",
            "rp7-cube",
            "cylinder-loop",
            "cylinder-collapse",
            "squaring*cylinder-collapse",
        ] {
            let m: MapFamily = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
        }
        assert!("power:0".parse::<MapFamily>().is_err());
        assert!("nosuch".parse::<MapFamily>().is_err());
        assert!("cylinder-loop*identity".parse::<MapFamily>().is_err());
    }

    #[test]
    fn oddness() {
        let y = sample();
        assert!(MapFamily::Rp7Cube.is_odd_at(&y));
        assert!(MapFamily::Conjugation.is_odd_at(&y));
        assert!(!MapFamily::Power(2).is_odd_at(&y));
    }

    #[test]
    fn boundary_collapses() {
        let p = sample().imag().normalized().unwrap();
        let at = |f: &MapFamily, t: f64| f.eval(&cylinder_point(t, &p));
        let tau = 2.0 * std::f64::consts::PI;
        assert!(at(&MapFamily::CylinderCollapse, 0.0).max_abs_diff(&Point::one()) < 1e-15);
        assert!(at(&MapFamily::CylinderCollapse, tau).max_abs_diff(&-Point::one()) < 1e-15);
        assert!(at(&MapFamily::CylinderLoop, tau).max_abs_diff(&Point::one()) < 1e-15);
    }
}
