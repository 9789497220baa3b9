//! Graded integer polynomials and the Chern-class computation for the
//! normal bundle of `CP²` in the Grassmannian of oriented 2-planes in `R⁶`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharClassError {
    #[error("variable {0} must have positive even degree")]
    OddDegree(String),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("polynomials live in different rings")]
    RingMismatch,
    #[error("constant term is not a unit")]
    NonUnitLeadingTerm,
    #[error("inverse needs a truncation degree")]
    NoTruncation,
    #[error("class in degree {degree} exceeds rank {rank}")]
    RankExceeded { degree: u32, rank: u32 },
    #[error("expression is not symmetric in the rank-2 roots")]
    NotSymmetric,
    #[error("coefficient overflow")]
    Overflow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct RingData {
    names: Vec<String>,
    degrees: Vec<u32>,
    truncate_at: Option<u32>,
}

/// `Z[v₁, …, vₙ]` with graded variables, modulo every monomial of total
/// degree `≥ truncate_at`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyRing(Arc<RingData>);

impl PolyRing {
    pub fn new(vars: &[(&str, u32)], truncate_at: Option<u32>) -> Result<Self, CharClassError> {
        for (name, d) in vars {
            if *d == 0 || d % 2 == 1 {
                return Err(CharClassError::OddDegree(name.to_string()));
            }
        }
        Ok(PolyRing(Arc::new(RingData {
            names: vars.iter().map(|(n, _)| n.to_string()).collect(),
            degrees: vars.iter().map(|(_, d)| *d).collect(),
            truncate_at,
        })))
    }

    pub fn truncate_at(&self) -> Option<u32> {
        self.0.truncate_at
    }

    fn arity(&self) -> usize {
        self.0.names.len()
    }

    fn degree_of(&self, mono: &[u32]) -> u32 {
        mono.iter().zip(&self.0.degrees).map(|(e, d)| e * d).sum()
    }

    fn keeps(&self, mono: &[u32]) -> bool {
        self.0.truncate_at.is_none_or(|t| self.degree_of(mono) < t)
    }

    pub fn constant(&self, c: i64) -> GradedPoly {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(vec![0; self.arity()], c);
        }
        GradedPoly {
            ring: self.clone(),
            terms,
        }
    }

    pub fn one(&self) -> GradedPoly {
        self.constant(1)
    }

    pub fn zero(&self) -> GradedPoly {
        self.constant(0)
    }

    pub fn var(&self, name: &str) -> Result<GradedPoly, CharClassError> {
        let i = self
            .0
            .names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| CharClassError::UnknownVariable(name.to_string()))?;
        let mut mono = vec![0; self.arity()];
        mono[i] = 1;
        Ok(self.monomial(mono, 1))
    }

    /// `c · v^mono`, or zero if truncated away.
    pub fn monomial(&self, mono: Vec<u32>, c: i64) -> GradedPoly {
        let mut terms = BTreeMap::new();
        if c != 0 && self.keeps(&mono) {
            terms.insert(mono, c);
        }
        GradedPoly {
            ring: self.clone(),
            terms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPoly {
    ring: PolyRing,
    terms: BTreeMap<Vec<u32>, i64>,
}

impl GradedPoly {
    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mono: &[u32]) -> i64 {
        self.terms.get(mono).copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> i64 {
        self.coefficient(&vec![0; self.ring.arity()])
    }

    fn same_ring(&self, other: &Self) -> Result<(), CharClassError> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(CharClassError::RingMismatch)
        }
    }

    fn accumulate(terms: &mut BTreeMap<Vec<u32>, i64>, mono: Vec<u32>, c: i64) -> Result<(), CharClassError> {
        let slot = terms.entry(mono).or_insert(0);
        *slot = slot.checked_add(c).ok_or(CharClassError::Overflow)?;
        terms.retain(|_, c| *c != 0);
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, CharClassError> {
        self.same_ring(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            Self::accumulate(&mut terms, m.clone(), *c)?;
        }
        Ok(GradedPoly {
            ring: self.ring.clone(),
            terms,
        })
    }

    pub fn neg(&self) -> Self {
        GradedPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CharClassError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: i64) -> Result<Self, CharClassError> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            Self::accumulate(
                &mut terms,
                m.clone(),
                c.checked_mul(k).ok_or(CharClassError::Overflow)?,
            )?;
        }
        Ok(GradedPoly {
            ring: self.ring.clone(),
            terms,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, CharClassError> {
        self.same_ring(other)?;
        let mut terms = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mono: Vec<u32> = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                if self.ring.keeps(&mono) {
                    let c = ca.checked_mul(*cb).ok_or(CharClassError::Overflow)?;
                    Self::accumulate(&mut terms, mono, c)?;
                }
            }
        }
        Ok(GradedPoly {
            ring: self.ring.clone(),
            terms,
        })
    }

    pub fn pow(&self, k: u32) -> Result<Self, CharClassError> {
        let mut out = self.ring.one();
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// The homogeneous part of total degree `d`.
    pub fn component(&self, d: u32) -> Self {
        GradedPoly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| self.ring.degree_of(m) == d)
                .map(|(m, c)| (m.clone(), *c))
                .collect(),
        }
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| self.ring.degree_of(m)).max()
    }

    /// Replace the `i`-th variable by `images[i]`, evaluated in the images' ring.
    pub fn substitute(&self, images: &[GradedPoly]) -> Result<GradedPoly, CharClassError> {
        let target = match images.first() {
            Some(p) => p.ring.clone(),
            None => return Err(CharClassError::RingMismatch),
        };
        if images.len() != self.ring.arity() || images.iter().any(|p| p.ring != target) {
            return Err(CharClassError::RingMismatch);
        }
        let mut out = target.zero();
        for (m, c) in &self.terms {
            let mut term = target.constant(*c);
            for (e, img) in m.iter().zip(images) {
                term = term.mul(&img.pow(*e)?)?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Swap two variables.
    pub fn swap_vars(&self, i: usize, j: usize) -> Self {
        GradedPoly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut m = m.clone();
                    m.swap(i, j);
                    (m, *c)
                })
                .collect(),
        }
    }
}

fn render_monomial(ring: &PolyRing, mono: &[u32]) -> String {
    let mut parts = Vec::new();
    for (e, name) in mono.iter().zip(&ring.0.names) {
        match e {
            0 => {}
            1 => parts.push(name.clone()),
            e => parts.push(format!("{name}^{e}")),
        }
    }
    parts.join(" ")
}

impl fmt::Display for GradedPoly {
    /// Terms by ascending degree, then by descending exponents.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&Vec<u32>, &i64)> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            self.ring
                .degree_of(a)
                .cmp(&self.ring.degree_of(b))
                .then_with(|| b.cmp(a))
        });
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let body = render_monomial(&self.ring, m);
            let mag = c.unsigned_abs();
            let text = match (body.is_empty(), mag) {
                (true, _) => mag.to_string(),
                (false, 1) => body,
                (false, _) => format!("{mag}{body}"),
            };
            match (k, *c < 0) {
                (0, true) => write!(f, "-{text}")?,
                (0, false) => write!(f, "{text}")?,
                (_, true) => write!(f, " - {text}")?,
                (_, false) => write!(f, " + {text}")?,
            }
        }
        Ok(())
    }
}

/// The total Chern class of a complement: the inverse of `total` up to the
/// truncation, checked to vanish above complex rank `rank`.
pub fn whitney_complement(total: &GradedPoly, rank: u32) -> Result<GradedPoly, CharClassError> {
    let ring = total.ring().clone();
    if ring.truncate_at().is_none() {
        return Err(CharClassError::NoTruncation);
    }
    let sign = match total.constant_term() {
        1 => 1,
        -1 => -1,
        _ => return Err(CharClassError::NonUnitLeadingTerm),
    };
    // total = sign·(1 − u) with u nilpotent, so the inverse is sign·Σ uⁿ.
    let u = ring.one().sub(&total.scale(sign)?)?;
    let mut inverse = ring.zero();
    let mut power = ring.one();
    while !power.is_zero() {
        inverse = inverse.add(&power)?;
        power = power.mul(&u)?;
    }
    let inverse = inverse.scale(sign)?;
    if let Some(d) = inverse.max_degree() {
        if d > 2 * rank {
            return Err(CharClassError::RankExceeded { degree: d, rank });
        }
    }
    Ok(inverse)
}

/// `c₂(τ₁ ⊗ τ₂)` for a line bundle `τ₁` and a rank-2 bundle `τ₂`, in terms
/// of `c₁(τ₁), c₁(τ₂), c₂(τ₂)`.
#[derive(Debug, Clone)]
pub struct TensorFormula {
    /// `(x₁ + x₂)(x₁ + x₃)` in `Z[x₁, x₂, x₃]`.
    pub roots_product: GradedPoly,
    /// The same with `x₂, x₃` grouped into elementary symmetric functions.
    pub grouped: String,
    /// The rewritten class in `Z[c₁(τ₁), c₁(τ₂), c₂(τ₂)]`.
    pub formula: GradedPoly,
}

pub const ROOT_NAMES: [&str; 3] = ["x_1", "x_2", "x_3"];
pub const CLASS_NAMES: [&str; 3] = ["c_1(τ_1)", "c_1(τ_2)", "c_2(τ_2)"];

pub fn tensor_line_chern() -> Result<TensorFormula, CharClassError> {
    let roots = PolyRing::new(
        &[(ROOT_NAMES[0], 2), (ROOT_NAMES[1], 2), (ROOT_NAMES[2], 2)],
        None,
    )?;
    let x1 = roots.var(ROOT_NAMES[0])?;
    let x2 = roots.var(ROOT_NAMES[1])?;
    let x3 = roots.var(ROOT_NAMES[2])?;
    // Torus weights of the tensor product: α + θ and β + θ.
    let product = x1.add(&x2)?.mul(&x1.add(&x3)?)?;
    if product.swap_vars(1, 2) != product {
        return Err(CharClassError::NotSymmetric);
    }
    let e1 = x2.add(&x3)?;
    let e2 = x2.mul(&x3)?;
    let alpha = product.coefficient(&[2, 0, 0]);
    let beta = product.coefficient(&[1, 1, 0]);
    let gamma = product.coefficient(&[0, 1, 1]);
    let candidate = x1
        .pow(2)?
        .scale(alpha)?
        .add(&x1.mul(&e1)?.scale(beta)?)?
        .add(&e2.scale(gamma)?)?;
    if candidate != product {
        return Err(CharClassError::NotSymmetric);
    }
    let classes = PolyRing::new(
        &[(CLASS_NAMES[0], 2), (CLASS_NAMES[1], 2), (CLASS_NAMES[2], 4)],
        None,
    )?;
    let formula = classes
        .monomial(vec![2, 0, 0], alpha)
        .add(&classes.monomial(vec![1, 1, 0], beta))?
        .add(&classes.monomial(vec![0, 0, 1], gamma))?;
    let coeff = |c: i64, body: String| match c {
        1 => body,
        c => format!("{c}{body}"),
    };
    let grouped = format!(
        "{} + {} + {}",
        coeff(alpha, format!("{}^2", ROOT_NAMES[0])),
        coeff(
            beta,
            format!("{}({} + {})", ROOT_NAMES[0], ROOT_NAMES[1], ROOT_NAMES[2])
        ),
        coeff(gamma, format!("{} {}", ROOT_NAMES[1], ROOT_NAMES[2])),
    );
    Ok(TensorFormula {
        roots_product: product,
        grouped,
        formula,
    })
}

/// Term-by-term substitution display, e.g. `a^2 + a(-a) + a^2`.
fn substitution_display(formula: &GradedPoly, images: &[GradedPoly]) -> String {
    let factor = |p: &GradedPoly| {
        let s = p.to_string();
        let simple = !s.contains(' ') && !s.starts_with('-') && !s.contains('^');
        (s, simple)
    };
    let mut terms: Vec<(&Vec<u32>, &i64)> = formula.terms.iter().collect();
    terms.sort_by(|(a, _), (b, _)| b.cmp(a));
    let mut out = Vec::new();
    for (mono, c) in terms {
        let active = mono.iter().filter(|e| **e > 0).count();
        let mut body = String::new();
        for (e, img) in mono.iter().zip(images) {
            let (s, simple) = factor(img);
            let piece = match (*e, simple) {
                (0, _) => continue,
                (1, _) if active == 1 => s,
                (1, true) if body.is_empty() => s,
                (1, true) => format!(" {s}"),
                (1, false) => format!("({s})"),
                (e, true) => format!("{s}^{e}"),
                (e, false) => format!("({s})^{e}"),
            };
            body.push_str(&piece);
        }
        out.push(if *c == 1 { body } else { format!("{c}{body}") });
    }
    out.join(" + ")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lemma22Trace {
    pub lines: Vec<String>,
    pub c1_perp: String,
    pub c2_perp: String,
    pub tensor_formula: String,
    pub normal_c2: String,
    pub euler_number: i64,
}

/// Evaluates `c₂(τ₁ ⊗ τ₂)` at the given classes in `Z[a]/a³`.
pub fn normal_c2(
    formula: &GradedPoly,
    c11: &GradedPoly,
    c12: &GradedPoly,
    c22: &GradedPoly,
) -> Result<GradedPoly, CharClassError> {
    formula.substitute(&[c11.clone(), c12.clone(), c22.clone()])
}

/// `H*(CP²) = Z[a]/a³` with `a` in degree 2.
pub fn cp2_ring() -> PolyRing {
    PolyRing::new(&[("a", 2)], Some(6)).expect("valid ring")
}

/// The Euler number of the normal bundle of `CP²`, with each displayed step.
pub fn euler_number_lemma22() -> Result<Lemma22Trace, CharClassError> {
    let ring = cp2_ring();
    let a = ring.var("a")?;
    let total = ring.one().add(&a)?;
    let perp = whitney_complement(&total, 2)?;
    let c1 = perp.component(2);
    let c2 = perp.component(4);
    let tensor = tensor_line_chern()?;
    let images = [a.clone(), c1.clone(), c2.clone()];
    let shown = substitution_display(&tensor.formula, &images);
    let normal = normal_c2(&tensor.formula, &a, &c1, &c2)?;
    let euler = normal.coefficient(&[2]);
    let lines = vec![
        format!("({total})(1 + c_1(τ⊥) + c_2(τ⊥)) = 1"),
        format!("c_1(τ⊥) = {c1}, c_2(τ⊥) = {c2}"),
        format!("{} = {}", tensor.roots_product_factored(), tensor.grouped),
        format!("c_2(τ_1 ⊗ τ_2) = {}", tensor.formula),
        format!("c_2(N CP^2) = {shown} = {normal}"),
        format!("Euler number = {euler}"),
    ];
    Ok(Lemma22Trace {
        lines,
        c1_perp: c1.to_string(),
        c2_perp: c2.to_string(),
        tensor_formula: tensor.formula.to_string(),
        normal_c2: normal.to_string(),
        euler_number: euler,
    })
}

impl TensorFormula {
    fn roots_product_factored(&self) -> String {
        format!(
            "({a} + {b})({a} + {c})",
            a = ROOT_NAMES[0],
            b = ROOT_NAMES[1],
            c = ROOT_NAMES[2]
        )
    }
}
