//! Formal direct sums of cyclic groups and symbolic `π_m(S⁷)`, and the
//! homotopy groups of spaces of almost complex structures expressed in them.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomotopyError {
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("cannot parse group expression {0:?}")]
    Parse(String),
    #[error("table row {row}: {message}")]
    Table { row: usize, message: String },
    #[error("table entry for m = {0} has no source")]
    MissingProvenance(u32),
    #[error("table lists m = {0} twice")]
    DuplicateEntry(u32),
    #[error("table entry for m = {0} refers to another homotopy group")]
    NestedSymbol(u32),
    #[error("reading table: {0}")]
    Io(String),
}

/// One summand. The derived order is the canonical order of a sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", content = "value")]
pub enum Atom {
    Z,
    /// `ℤ/n` with `n ≥ 2`.
    Cyclic(u64),
    /// `π_m(S⁷)`, unresolved.
    PiS7(u32),
}

impl Atom {
    /// `ℤ/n`, normalised: `ℤ/0 = ℤ`, `ℤ/1 = 0`.
    pub fn cyclic(n: i64) -> Option<Atom> {
        match n.unsigned_abs() {
            0 => Some(Atom::Z),
            1 => None,
            n => Some(Atom::Cyclic(n)),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Z => write!(f, "ℤ"),
            Atom::Cyclic(n) => write!(f, "ℤ/{n}"),
            Atom::PiS7(m) => write!(f, "π_{m}(S⁷)"),
        }
    }
}

/// A finite direct sum, kept sorted; the empty sum is the trivial group.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupExpr {
    summands: Vec<Atom>,
}

impl GroupExpr {
    pub fn trivial() -> Self {
        GroupExpr::default()
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let mut summands: Vec<Atom> = atoms.into_iter().collect();
        summands.sort();
        GroupExpr { summands }
    }

    pub fn cyclic(n: i64) -> Self {
        GroupExpr::from_atoms(Atom::cyclic(n))
    }

    pub fn pi(m: u32) -> Self {
        GroupExpr::from_atoms([Atom::PiS7(m)])
    }

    pub fn sum(&self, other: &GroupExpr) -> Self {
        GroupExpr::from_atoms(self.summands.iter().chain(&other.summands).copied())
    }

    /// `k` copies.
    pub fn times(&self, k: usize) -> Self {
        GroupExpr::from_atoms(
            self.summands
                .iter()
                .copied()
                .cycle()
                .take(self.summands.len() * k),
        )
    }

    pub fn summands(&self) -> &[Atom] {
        &self.summands
    }

    pub fn is_symbolic(&self) -> bool {
        self.summands.iter().any(|a| matches!(a, Atom::PiS7(_)))
    }

    /// Substitutes every `π_m(S⁷)` that the table knows.
    pub fn resolve(&self, table: &Pi7Table) -> Self {
        let mut atoms = Vec::new();
        for a in &self.summands {
            match (a, table.get(*a)) {
                (Atom::PiS7(_), Some(g)) => atoms.extend(g.summands.iter().copied()),
                _ => atoms.push(*a),
            }
        }
        GroupExpr::from_atoms(atoms)
    }
}

impl fmt::Display for GroupExpr {
    /// `ℤ ⊕ ℤ/2 ⊕ π_8(S⁷)^4`; repeated summands are written as powers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.summands.len() {
            let a = self.summands[i];
            let run = self.summands[i..].iter().take_while(|b| **b == a).count();
            if !first {
                write!(f, " ⊕ ")?;
            }
            first = false;
            match run {
                1 => write!(f, "{a}")?,
                k => write!(f, "{a}^{k}")?,
            }
            i += run;
        }
        Ok(())
    }
}

impl Serialize for GroupExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("GroupExpr", 2)?;
        st.serialize_field("rendered", &self.to_string())?;
        st.serialize_field("summands", &self.summands)?;
        st.end()
    }
}

/// Largest number of summands accepted by the parser.
pub const MAX_SUMMANDS: usize = 4096;

fn parse_atom(s: &str) -> Option<Option<Atom>> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s == "0" {
        return Some(None);
    }
    if s == "ℤ" || s == "Z" {
        return Some(Some(Atom::Z));
    }
    if let Some(n) = s.strip_prefix("ℤ/").or_else(|| s.strip_prefix("Z/")) {
        return n.parse::<i64>().ok().map(Atom::cyclic);
    }
    let rest = s.strip_prefix("π_").or_else(|| s.strip_prefix("pi_"))?;
    let open = rest.find('(')?;
    let m = rest[..open].trim_start_matches('{').trim_end_matches('}');
    let m: u32 = m.parse().ok()?;
    match &rest[open..] {
        "(S⁷)" | "(S^7)" | "(S7)" => Some(Some(Atom::PiS7(m))),
        _ => None,
    }
}

impl FromStr for GroupExpr {
    type Err = HomotopyError;

    /// Accepts the rendered form and an ASCII spelling: `Z + Z/2 + pi_8(S^7)^2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || HomotopyError::Parse(s.to_string());
        if s.trim().is_empty() {
            return Err(err());
        }
        let mut atoms = Vec::new();
        for part in s.split(['⊕', '+']) {
            let part = part.trim();
            let (body, count) = match part.rsplit_once('^') {
                Some((b, k)) if !b.ends_with("(S") => {
                    let k: usize = k.trim().parse().map_err(|_| err())?;
                    (b, k)
                }
                _ => (part, 1),
            };
            if count > MAX_SUMMANDS - atoms.len() {
                return Err(err());
            }
            if let Some(a) = parse_atom(body).ok_or_else(err)? {
                atoms.extend(std::iter::repeat_n(a, count));
            }
        }
        Ok(GroupExpr::from_atoms(atoms))
    }
}

#[derive(Debug, Deserialize)]
struct TableRow {
    m: u32,
    group: String,
    source: String,
}

/// User-supplied values of `π_m(S⁷)`, each with its source.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Pi7Table {
    entries: BTreeMap<u32, (GroupExpr, String)>,
}

impl Pi7Table {
    /// CSV with header `m,group,source`.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, HomotopyError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut entries = BTreeMap::new();
        for (i, row) in rdr.deserialize::<TableRow>().enumerate() {
            let row = row.map_err(|e| HomotopyError::Table {
                row: i + 1,
                message: e.to_string(),
            })?;
            if row.source.is_empty() {
                return Err(HomotopyError::MissingProvenance(row.m));
            }
            let group: GroupExpr = row
                .group
                .parse()
                .map_err(|e: HomotopyError| HomotopyError::Table {
                    row: i + 1,
                    message: e.to_string(),
                })?;
            if group.is_symbolic() {
                return Err(HomotopyError::NestedSymbol(row.m));
            }
            if entries.insert(row.m, (group, row.source)).is_some() {
                return Err(HomotopyError::DuplicateEntry(row.m));
            }
        }
        Ok(Pi7Table { entries })
    }

    pub fn from_path(path: &Path) -> Result<Self, HomotopyError> {
        let file = std::fs::File::open(path).map_err(|e| HomotopyError::Io(e.to_string()))?;
        Self::from_reader(file)
    }

    fn get(&self, atom: Atom) -> Option<&GroupExpr> {
        match atom {
            Atom::PiS7(m) => self.entries.get(&m).map(|(g, _)| g),
            _ => None,
        }
    }

    pub fn source(&self, m: u32) -> Option<&str> {
        self.entries.get(&m).map(|(_, s)| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `π_k` of the space of almost complex structures on `S⁶`.
pub fn pi_j_s6(k: i64) -> Result<GroupExpr, HomotopyError> {
    match k {
        k if k < 1 => Err(HomotopyError::OutOfRange(format!("k = {k}; need k ≥ 1"))),
        1 => Ok(GroupExpr::cyclic(2)),
        k => {
            let k = u32::try_from(k).map_err(|_| HomotopyError::OutOfRange(format!("k = {k}")))?;
            let top = k
                .checked_add(6)
                .ok_or_else(|| HomotopyError::OutOfRange(format!("k = {k}")))?;
            Ok(GroupExpr::pi(k).sum(&GroupExpr::pi(top)))
        }
    }
}

/// `π_i` of the space of almost complex structures on `X_g`, the connected
/// sum of `g` copies of `S³ × S³`.
pub fn pi_xg(g: i64, i: i64) -> Result<GroupExpr, HomotopyError> {
    if g < 0 || i < 1 {
        return Err(HomotopyError::OutOfRange(format!(
            "g = {g}, i = {i}; need g ≥ 0, i ≥ 1"
        )));
    }
    let range = || HomotopyError::OutOfRange(format!("g = {g}, i = {i}"));
    match i {
        1 => {
            let n = 2i64
                .checked_sub(g.checked_mul(2).ok_or_else(range)?)
                .ok_or_else(range)?;
            Ok(GroupExpr::cyclic(n))
        }
        2 if g == 1 => Ok(GroupExpr::from_atoms([Atom::Z, Atom::Cyclic(2)])),
        2 => Ok(GroupExpr::cyclic(2)),
        i => {
            let i = u32::try_from(i).map_err(|_| range())?;
            let copies = usize::try_from(g.checked_mul(2).ok_or_else(range)?).map_err(|_| range())?;
            if copies > MAX_SUMMANDS - 2 || i > u32::MAX - 6 {
                return Err(range());
            }
            Ok(GroupExpr::pi(i)
                .sum(&GroupExpr::pi(i + 3).times(copies))
                .sum(&GroupExpr::pi(i + 6)))
        }
    }
}

/// Whether the classifying map of an `SU(3)`-structure on a 6-complex
/// composed to `BG₂` is null: exactly when `c₂` vanishes.
pub fn c2_triviality_criterion(c2_evaluation: i64, is_6complex: bool) -> Result<bool, HomotopyError> {
    if !is_6complex {
        return Err(HomotopyError::OutOfRange(
            "criterion applies to complexes of dimension at most 6".to_string(),
        ));
    }
    Ok(c2_evaluation == 0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XgCriterion {
    pub genus: i64,
    pub lifts_to_s6: bool,
    /// Degree of the resulting map `X_g → S⁶`, half the Euler characteristic.
    pub degree: i64,
}

/// `X_g` has `c₁ = c₂ = 0` and Euler characteristic `2 − 2g`.
pub fn xg_criterion(g: i64) -> Result<XgCriterion, HomotopyError> {
    if g < 0 {
        return Err(HomotopyError::OutOfRange(format!("g = {g}")));
    }
    Ok(XgCriterion {
        genus: g,
        lifts_to_s6: c2_triviality_criterion(0, true)?,
        degree: 1 - g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s6_groups() {
        assert_eq!(pi_j_s6(1).unwrap().to_string(), "ℤ/2");
        assert_eq!(pi_j_s6(2).unwrap().to_string(), "π_2(S⁷) ⊕ π_8(S⁷)");
        assert!(pi_j_s6(0).is_err());
        assert!(pi_j_s6(-3).is_err());
    }

    #[test]
    fn xg_groups() {
        assert_eq!(pi_xg(2, 1).unwrap().to_string(), "ℤ/2");
        assert_eq!(pi_xg(1, 1).unwrap().to_string(), "ℤ");
        assert_eq!(pi_xg(0, 1).unwrap().to_string(), "ℤ/2");
        assert_eq!(pi_xg(3, 1).unwrap().to_string(), "ℤ/4");
        assert_eq!(pi_xg(1, 2).unwrap().to_string(), "ℤ ⊕ ℤ/2");
        assert_eq!(pi_xg(4, 2).unwrap().to_string(), "ℤ/2");
        assert_eq!(pi_xg(2, 3).unwrap().to_string(), "π_3(S⁷) ⊕ π_6(S⁷)^4 ⊕ π_9(S⁷)");
        assert_eq!(pi_xg(0, 5).unwrap().to_string(), "π_5(S⁷) ⊕ π_11(S⁷)");
        assert!(pi_xg(-1, 1).is_err());
        assert!(pi_xg(1, 0).is_err());
    }

    #[test]
    fn normalisation() {
        assert_eq!(GroupExpr::cyclic(-4), GroupExpr::cyclic(4));
        assert_eq!(GroupExpr::cyclic(1).to_string(), "0");
        assert_eq!(GroupExpr::cyclic(0).to_string(), "ℤ");
        let g = GroupExpr::from_atoms([Atom::PiS7(3), Atom::Cyclic(3), Atom::Z, Atom::Cyclic(2)]);
        assert_eq!(g.to_string(), "ℤ ⊕ ℤ/2 ⊕ ℤ/3 ⊕ π_3(S⁷)");
    }

    #[test]
    fn parse_round_trip() {
        for s in ["0", "ℤ", "ℤ ⊕ ℤ/2", "π_2(S⁷) ⊕ π_8(S⁷)", "ℤ^2 ⊕ π_6(S⁷)^4"] {
            assert_eq!(s.parse::<GroupExpr>().unwrap().to_string(), s);
        }
        assert_eq!(
            "Z + Z/1 + pi_{12}(S^7)".parse::<GroupExpr>().unwrap().to_string(),
            "ℤ ⊕ π_12(S⁷)"
        );
        assert!("Q".parse::<GroupExpr>().is_err());
        assert!("".parse::<GroupExpr>().is_err());
        // Repeats are capped in total, so every accepted string re-parses.
        assert!("ℤ^4096".parse::<GroupExpr>().is_ok());
        assert!("ℤ^4000 ⊕ ℤ^97".parse::<GroupExpr>().is_err());
    }

    #[test]
    fn table_resolution() {
        let csv = "m,group,source\n7,Z,test fixture\n13,Z/2,test fixture\n";
        let t = Pi7Table::from_reader(csv.as_bytes()).unwrap();
        let g = pi_j_s6(7).unwrap();
        assert_eq!(g.resolve(&t).to_string(), "ℤ ⊕ ℤ/2");
        assert_eq!(t.source(7), Some("test fixture"));
        // Unknown entries stay symbolic.
        assert_eq!(pi_j_s6(2).unwrap().resolve(&t).to_string(), "π_2(S⁷) ⊕ π_8(S⁷)");
    }

    #[test]
    fn table_errors() {
        let bad = |s: &str| Pi7Table::from_reader(s.as_bytes()).unwrap_err();
        assert_eq!(bad("m,group,source\n7,Z,\n"), HomotopyError::MissingProvenance(7));
        assert_eq!(
            bad("m,group,source\n7,Z,a\n7,Z,b\n"),
            HomotopyError::DuplicateEntry(7)
        );
        assert_eq!(
            bad("m,group,source\n7,pi_8(S^7),a\n"),
            HomotopyError::NestedSymbol(7)
        );
        assert!(matches!(
            bad("m,group,source\nx,Z,a\n"),
            HomotopyError::Table { .. }
        ));
    }

    #[test]
    fn criterion() {
        assert!(c2_triviality_criterion(0, true).unwrap());
        assert!(!c2_triviality_criterion(1, true).unwrap());
        assert!(c2_triviality_criterion(0, false).is_err());
        let x = xg_criterion(3).unwrap();
        assert!(x.lifts_to_s6);
        assert_eq!(x.degree, -2);
    }
}
