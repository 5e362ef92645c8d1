//! Local-realistic value assignments for the twelve elements of reality
//! and exhaustive checks against the nine perfect-correlation constraints.
//!
//! The six compound elements (`z1z1'`, `x1x1'`, `z2x2'`, `x2z2'`, ...) are
//! free ±1 variables. They are never computed from the single-observable
//! values.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::observables::MERMIN_SIGNS;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LhvError {
    #[error("unknown element of reality {0:?}")]
    UnknownElement(String),
    #[error("missing value for element {0}")]
    MissingElement(Element),
    #[error("element {element} has value {value}, expected ±1")]
    InvalidValue { element: Element, value: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Z1,
    Z1p,
    X1,
    X1p,
    Z1Z1p,
    X1X1p,
    Z2,
    Z2p,
    X2,
    X2p,
    Z2X2p,
    X2Z2p,
}

impl Element {
    /// Canonical order; also the significance order of the enumeration.
    pub const ALL: [Element; 12] = [
        Element::Z1,
        Element::Z1p,
        Element::X1,
        Element::X1p,
        Element::Z1Z1p,
        Element::X1X1p,
        Element::Z2,
        Element::Z2p,
        Element::X2,
        Element::X2p,
        Element::Z2X2p,
        Element::X2Z2p,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Element::Z1 => "z1",
            Element::Z1p => "z1'",
            Element::X1 => "x1",
            Element::X1p => "x1'",
            Element::Z1Z1p => "z1z1'",
            Element::X1X1p => "x1x1'",
            Element::Z2 => "z2",
            Element::Z2p => "z2'",
            Element::X2 => "x2",
            Element::X2p => "x2'",
            Element::Z2X2p => "z2x2'",
            Element::X2Z2p => "x2z2'",
        }
    }

    fn position(self) -> usize {
        self as usize
    }

    fn bit(self) -> u16 {
        1 << (11 - self.position())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v({})", self.name())
    }
}

impl FromStr for Element {
    type Err = LhvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bare = s
            .strip_prefix("v(")
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(s)
            .replace('′', "'");
        Element::ALL
            .into_iter()
            .find(|e| e.name() == bare)
            .ok_or_else(|| LhvError::UnknownElement(s.to_string()))
    }
}

fn mask_of(elements: &[Element]) -> u16 {
    elements.iter().fold(0, |m, e| m ^ e.bit())
}

fn elements_of(mask: u16) -> Vec<Element> {
    Element::ALL
        .into_iter()
        .filter(|e| mask & e.bit() != 0)
        .collect()
}

/// A ±1 value for each of the twelve elements. Bit `11 − k` of the packed
/// form is set when element `k` (canonical order) has value −1, so the
/// packed index runs lexicographically from all-(+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LhvAssignment(u16);

impl LhvAssignment {
    pub const COUNT: usize = 1 << 12;

    pub fn from_index(index: u16) -> Self {
        assert!(
            (index as usize) < Self::COUNT,
            "assignment index out of range"
        );
        Self(index)
    }

    pub fn all_plus() -> Self {
        Self(0)
    }

    pub fn index(self) -> u16 {
        self.0
    }

    pub fn value(self, e: Element) -> i8 {
        if self.0 & e.bit() != 0 {
            -1
        } else {
            1
        }
    }

    pub fn with_value(self, e: Element, value: i8) -> Self {
        if value < 0 {
            Self(self.0 | e.bit())
        } else {
            Self(self.0 & !e.bit())
        }
    }

    /// Flip the sign of every element whose bit is set in `mask`.
    pub fn flipped(self, mask: u16) -> Self {
        Self((self.0 ^ mask) & 0x0fff)
    }

    /// Build from a name → value table. Every element must be present with
    /// value ±1.
    pub fn from_values<'a, I>(values: I) -> Result<Self, LhvError>
    where
        I: IntoIterator<Item = (&'a str, i64)>,
    {
        let mut seen = BTreeMap::new();
        for (name, value) in values {
            let element: Element = name.parse()?;
            if value != 1 && value != -1 {
                return Err(LhvError::InvalidValue { element, value });
            }
            seen.insert(element, value);
        }
        let mut a = Self::all_plus();
        for e in Element::ALL {
            let v = seen.get(&e).ok_or(LhvError::MissingElement(e))?;
            a = a.with_value(e, *v as i8);
        }
        Ok(a)
    }

    pub fn values(self) -> impl Iterator<Item = (Element, i8)> {
        Element::ALL.into_iter().map(move |e| (e, self.value(e)))
    }

    /// Product of the values of the elements selected by `mask`.
    fn product(self, mask: u16) -> i8 {
        if (self.0 & mask).count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

impl Serialize for LhvAssignment {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(12))?;
        for (e, v) in self.values() {
            map.serialize_entry(e.name(), &v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for LhvAssignment {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = BTreeMap::<String, i64>::deserialize(deserializer)?;
        LhvAssignment::from_values(raw.iter().map(|(k, v)| (k.as_str(), *v)))
            .map_err(serde::de::Error::custom)
    }
}

/// Every assignment once, in lexicographic order starting from all-(+1).
pub fn enumerate_assignments() -> impl Iterator<Item = LhvAssignment> + Clone {
    (0..LhvAssignment::COUNT as u16).map(LhvAssignment)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LhvConstraint {
    pub id: u8,
    pub variables: Vec<Element>,
    pub required_product: i8,
}

impl LhvConstraint {
    pub fn mask(&self) -> u16 {
        mask_of(&self.variables)
    }

    pub fn product(&self, a: LhvAssignment) -> i8 {
        a.product(self.mask())
    }

    pub fn satisfied_by(&self, a: LhvAssignment) -> bool {
        self.product(a) == self.required_product
    }
}

/// The nine predicted value relations, one per eigenequation.
pub fn constraints() -> Vec<LhvConstraint> {
    use Element::*;
    let table: [(&[Element], i8); 9] = [
        (&[Z1, Z2], -1),
        (&[Z1p, Z2p], -1),
        (&[X1, X2], -1),
        (&[X1p, X2p], -1),
        (&[Z1Z1p, Z2, Z2p], 1),
        (&[X1X1p, X2, X2p], 1),
        (&[Z1, X1p, Z2X2p], 1),
        (&[X1, Z1p, X2Z2p], 1),
        (&[Z1Z1p, X1X1p, Z2X2p, X2Z2p], -1),
    ];
    table
        .iter()
        .enumerate()
        .map(|(i, (vars, req))| LhvConstraint {
            id: i as u8 + 1,
            variables: vars.to_vec(),
            required_product: *req,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckResult {
    pub satisfied: [bool; 9],
    pub count: u32,
}

pub fn check(a: LhvAssignment) -> CheckResult {
    let mut satisfied = [false; 9];
    for (slot, c) in satisfied.iter_mut().zip(constraints()) {
        *slot = c.satisfied_by(a);
    }
    CheckResult {
        satisfied,
        count: satisfied.iter().filter(|&&s| s).count() as u32,
    }
}

/// Value of the Bell–Mermin operator when every term is replaced by the
/// product of its predetermined values.
#[allow(non_snake_case)]
pub fn lhv_value_of_O(a: LhvAssignment) -> i32 {
    constraints()
        .iter()
        .zip(MERMIN_SIGNS)
        .map(|(c, sign)| sign as i32 * c.product(a) as i32)
        .sum()
}

/// Result of an exhaustive pass over a set of assignments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanSummary {
    pub scanned: usize,
    pub satisfied_max: u32,
    /// Lexicographically first assignment reaching `satisfied_max`.
    pub witness: LhvAssignment,
    pub max_o_value: i32,
    pub min_o_value: i32,
    pub fully_consistent: usize,
}

impl ScanSummary {
    fn of(a: LhvAssignment) -> Self {
        let count = check(a).count;
        let o = lhv_value_of_O(a);
        Self {
            scanned: 1,
            satisfied_max: count,
            witness: a,
            max_o_value: o,
            min_o_value: o,
            fully_consistent: usize::from(count == 9),
        }
    }

    /// Associative merge; ties on `satisfied_max` keep the smaller witness.
    fn merge(self, other: Self) -> Self {
        let (satisfied_max, witness) = match self.satisfied_max.cmp(&other.satisfied_max) {
            std::cmp::Ordering::Greater => (self.satisfied_max, self.witness),
            std::cmp::Ordering::Less => (other.satisfied_max, other.witness),
            std::cmp::Ordering::Equal => (self.satisfied_max, self.witness.min(other.witness)),
        };
        Self {
            scanned: self.scanned + other.scanned,
            satisfied_max,
            witness,
            max_o_value: self.max_o_value.max(other.max_o_value),
            min_o_value: self.min_o_value.min(other.min_o_value),
            fully_consistent: self.fully_consistent + other.fully_consistent,
        }
    }
}

pub fn scan() -> ScanSummary {
    enumerate_assignments()
        .map(ScanSummary::of)
        .reduce(ScanSummary::merge)
        .expect("non-empty enumeration")
}

/// Same result as [`scan`], split across the rayon pool.
pub fn scan_parallel() -> ScanSummary {
    (0..LhvAssignment::COUNT as u16)
        .into_par_iter()
        .with_min_len(256)
        .map(|i| ScanSummary::of(LhvAssignment(i)))
        .reduce_with(ScanSummary::merge)
        .expect("non-empty enumeration")
}

/// Multiply the value relations of rows 1–8 symbolically. Every single
/// element appears an even number of times, so squares cancel and what is
/// left is a relation on the compound elements alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityDerivation {
    pub multiplied_rows: Vec<u8>,
    /// Elements with odd multiplicity in the product.
    pub residual_elements: Vec<String>,
    /// Product of the right-hand sides of the multiplied rows.
    pub implied_product: i8,
    pub conflicting_row: u8,
    pub conflicting_required: i8,
}

impl ParityDerivation {
    /// The implied relation and the last row constrain the same elements
    /// to opposite products.
    pub fn is_contradiction(&self) -> bool {
        let rows = constraints();
        let last = &rows[self.conflicting_row as usize - 1];
        let names: Vec<String> = last
            .variables
            .iter()
            .map(|e| e.name().to_string())
            .collect();
        names == self.residual_elements && self.implied_product != self.conflicting_required
    }
}

pub fn parity_derivation() -> ParityDerivation {
    let rows = constraints();
    let (first, last) = rows.split_at(8);
    let mask = first.iter().fold(0u16, |m, c| m ^ c.mask());
    let implied_product = first.iter().map(|c| c.required_product).product();
    ParityDerivation {
        multiplied_rows: first.iter().map(|c| c.id).collect(),
        residual_elements: elements_of(mask)
            .iter()
            .map(|e| e.name().to_string())
            .collect(),
        implied_product,
        conflicting_row: last[0].id,
        conflicting_required: last[0].required_product,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowReport {
    pub id: u8,
    pub variables: Vec<String>,
    pub required_product: i8,
    pub witness_product: i8,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContradictionCertificate {
    pub element_order: Vec<String>,
    pub assignments_scanned: usize,
    pub fully_consistent: usize,
    pub satisfied_max: u32,
    pub witness: LhvAssignment,
    pub rows: Vec<RowReport>,
    pub max_o_value: i32,
    pub min_o_value: i32,
    pub parity: ParityDerivation,
    /// Product forced on the compound elements by rows 1–8.
    pub parity_product: i8,
}

pub fn contradiction_certificate() -> ContradictionCertificate {
    let summary = scan_parallel();
    let parity = parity_derivation();
    let rows = constraints()
        .iter()
        .map(|c| RowReport {
            id: c.id,
            variables: c.variables.iter().map(|e| e.name().to_string()).collect(),
            required_product: c.required_product,
            witness_product: c.product(summary.witness),
            satisfied: c.satisfied_by(summary.witness),
        })
        .collect();
    ContradictionCertificate {
        element_order: Element::ALL.iter().map(|e| e.name().to_string()).collect(),
        assignments_scanned: summary.scanned,
        fully_consistent: summary.fully_consistent,
        satisfied_max: summary.satisfied_max,
        witness: summary.witness,
        rows,
        max_o_value: summary.max_o_value,
        min_o_value: summary.min_o_value,
        parity_product: parity.implied_product,
        parity,
    }
}

impl ContradictionCertificate {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "assignments scanned: {}", self.assignments_scanned);
        let _ = writeln!(out, "fully consistent: {}", self.fully_consistent);
        let _ = writeln!(out, "max satisfied: {} of 9", self.satisfied_max);
        let _ = writeln!(
            out,
            "LHV <O> range: [{}, {}]",
            self.min_o_value, self.max_o_value
        );
        let _ = writeln!(out, "witness:");
        for (e, v) in self.witness.values() {
            let _ = writeln!(out, "  {:<10} {:+}", e.to_string(), v);
        }
        let _ = writeln!(out, "row  required  witness  ok   variables");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<4} {:+8}  {:+7}  {:<4} {}",
                r.id,
                r.required_product,
                r.witness_product,
                if r.satisfied { "yes" } else { "no" },
                r.variables.join(" ")
            );
        }
        let p = &self.parity;
        let _ = writeln!(
            out,
            "rows {:?} multiply to {} = {:+}; row {} requires {:+}",
            p.multiplied_rows,
            p.residual_elements
                .iter()
                .map(|n| format!("v({n})"))
                .collect::<String>(),
            p.implied_product,
            p.conflicting_row,
            p.conflicting_required
        );
        out
    }
}

/// Flip masks that leave every constraint product unchanged: each row
/// contains an even number of flipped elements.
pub fn preserving_flips() -> Vec<u16> {
    let rows = constraints();
    (0..LhvAssignment::COUNT as u16)
        .filter(|m| rows.iter().all(|c| (m & c.mask()).count_ones() % 2 == 0))
        .collect()
}

/// Element pairs that occur together in every row containing either one.
pub fn co_occurring_pairs() -> Vec<(Element, Element)> {
    let rows = constraints();
    let mut out = Vec::new();
    for (i, a) in Element::ALL.iter().enumerate() {
        for b in &Element::ALL[i + 1..] {
            let together = rows
                .iter()
                .all(|c| c.variables.contains(a) == c.variables.contains(b));
            if together {
                out.push((*a, *b));
            }
        }
    }
    out
}
