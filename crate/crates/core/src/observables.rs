//! The doubly entangled two-photon state, its Pauli-type observables, the
//! nine eigenequations it satisfies, and the Bell–Mermin operator built
//! from them.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::hilbert::{qubit, tensor_all, HilbertError, Operator, StateVector, C64, TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Photon {
    One,
    Two,
}

impl Photon {
    pub fn number(self) -> u8 {
        match self {
            Photon::One => 1,
            Photon::Two => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Photon::One),
            2 => Some(Photon::Two),
            _ => None,
        }
    }
}

/// Degree of freedom of a photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Dof {
    Polarization,
    Path,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Axis {
    X,
    Z,
}

/// One of the eight single-qubit observables `z_i, x_i` (polarization) and
/// `z_i′, x_i′` (path).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LocalObservable {
    pub photon: Photon,
    pub dof: Dof,
    pub axis: Axis,
}

impl LocalObservable {
    pub const fn new(photon: Photon, dof: Dof, axis: Axis) -> Self {
        Self { photon, dof, axis }
    }

    pub const Z1: Self = Self::new(Photon::One, Dof::Polarization, Axis::Z);
    pub const X1: Self = Self::new(Photon::One, Dof::Polarization, Axis::X);
    pub const Z1P: Self = Self::new(Photon::One, Dof::Path, Axis::Z);
    pub const X1P: Self = Self::new(Photon::One, Dof::Path, Axis::X);
    pub const Z2: Self = Self::new(Photon::Two, Dof::Polarization, Axis::Z);
    pub const X2: Self = Self::new(Photon::Two, Dof::Polarization, Axis::X);
    pub const Z2P: Self = Self::new(Photon::Two, Dof::Path, Axis::Z);
    pub const X2P: Self = Self::new(Photon::Two, Dof::Path, Axis::X);

    pub const ALL: [Self; 8] = [
        Self::Z1,
        Self::X1,
        Self::Z1P,
        Self::X1P,
        Self::Z2,
        Self::X2,
        Self::Z2P,
        Self::X2P,
    ];

    /// Position of the addressed qubit in the four-factor product.
    fn factor_slot(self) -> usize {
        let photon = match self.photon {
            Photon::One => 0,
            Photon::Two => 2,
        };
        let dof = match self.dof {
            Dof::Polarization => 0,
            Dof::Path => 1,
        };
        photon + dof
    }

    fn pauli(self) -> Operator {
        match self.axis {
            Axis::X => qubit::sigma_x(),
            Axis::Z => qubit::sigma_z(),
        }
    }

    /// Realization on the addressed photon's own 4-dimensional pol⊗path space.
    pub fn single_photon_operator(self) -> Operator {
        let (p, q) = match self.dof {
            Dof::Polarization => (self.pauli(), qubit::identity()),
            Dof::Path => (qubit::identity(), self.pauli()),
        };
        p.tensor(&q).expect("2x2 ⊗ 2x2")
    }
}

impl fmt::Display for LocalObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let axis = match self.axis {
            Axis::X => 'x',
            Axis::Z => 'z',
        };
        let prime = if self.dof == Dof::Path { "'" } else { "" };
        write!(f, "{axis}{}{prime}", self.photon.number())
    }
}

/// 16×16 realization of a local observable: the Pauli matrix on its own
/// factor, identity on the other three.
pub fn build_observable(o: LocalObservable) -> Operator {
    let mut factors = [
        qubit::identity(),
        qubit::identity(),
        qubit::identity(),
        qubit::identity(),
    ];
    factors[o.factor_slot()] = o.pauli();
    tensor_all(&factors).expect("four qubits fit in 16 dimensions")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProductParseError {
    #[error("empty locality group in {0:?}")]
    EmptyGroup(String),
    #[error("unrecognized observable near {0:?}")]
    Unrecognized(String),
    #[error("locality group {0:?} mixes photons")]
    MixedPhotons(String),
}

/// A product of local observables split into locality groups. Each group is
/// a single element of reality measured on one photon; groups are written
/// separated by `·`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObservableProduct {
    groups: Vec<Vec<LocalObservable>>,
}

impl ObservableProduct {
    pub fn new(groups: Vec<Vec<LocalObservable>>) -> Result<Self, ProductParseError> {
        for g in &groups {
            let first = g
                .first()
                .ok_or_else(|| ProductParseError::EmptyGroup(format!("{groups:?}")))?;
            if g.iter().any(|o| o.photon != first.photon) {
                return Err(ProductParseError::MixedPhotons(
                    g.iter().map(|o| o.to_string()).collect(),
                ));
            }
        }
        Ok(Self { groups })
    }

    pub fn groups(&self) -> &[Vec<LocalObservable>] {
        &self.groups
    }

    pub fn factors(&self) -> impl Iterator<Item = LocalObservable> + '_ {
        self.groups.iter().flatten().copied()
    }

    /// Groups located on the given photon, in order.
    pub fn groups_on(&self, photon: Photon) -> Vec<&[LocalObservable]> {
        self.groups
            .iter()
            .filter(|g| g[0].photon == photon)
            .map(Vec::as_slice)
            .collect()
    }

    /// Ordered operator product of every factor. Independent of grouping.
    pub fn operator(&self) -> Operator {
        self.factors()
            .map(build_observable)
            .reduce(|acc, o| &acc * &o)
            .expect("non-empty product")
    }
}

impl fmt::Display for ObservableProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.groups.iter().enumerate() {
            if i > 0 {
                f.write_str("·")?;
            }
            for o in g {
                write!(f, "{o}")?;
            }
        }
        Ok(())
    }
}

/// Parses notation such as `z1z1'·x1x1'·z2x2'·x2z2'`. `.` is accepted as a
/// group separator as well as `·`.
impl FromStr for ObservableProduct {
    type Err = ProductParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut groups = Vec::new();
        for group in s.split(['·', '.']) {
            let group = group.trim();
            if group.is_empty() {
                return Err(ProductParseError::EmptyGroup(s.to_string()));
            }
            let mut factors = Vec::new();
            let mut chars = group.chars().peekable();
            while let Some(c) = chars.next() {
                let axis = match c {
                    'x' => Axis::X,
                    'z' => Axis::Z,
                    _ => return Err(ProductParseError::Unrecognized(group.to_string())),
                };
                let photon = chars
                    .next()
                    .and_then(|d| d.to_digit(10))
                    .and_then(|d| Photon::from_number(d as u8))
                    .ok_or_else(|| ProductParseError::Unrecognized(group.to_string()))?;
                let dof = if matches!(chars.peek(), Some('\'') | Some('′')) {
                    chars.next();
                    Dof::Path
                } else {
                    Dof::Polarization
                };
                factors.push(LocalObservable::new(photon, dof, axis));
            }
            groups.push(factors);
        }
        Self::new(groups)
    }
}

/// One of the nine eigenequations `product·|Ψ⟩ = eigenvalue·|Ψ⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintRow {
    pub id: u8,
    pub product: ObservableProduct,
    pub eigenvalue: i8,
}

const ROW_TABLE: [(&str, i8); 9] = [
    ("z1·z2", -1),
    ("z1'·z2'", -1),
    ("x1·x2", -1),
    ("x1'·x2'", -1),
    ("z1z1'·z2·z2'", 1),
    ("x1x1'·x2·x2'", 1),
    ("z1·x1'·z2x2'", 1),
    ("x1·z1'·x2z2'", 1),
    ("z1z1'·x1x1'·z2x2'·x2z2'", -1),
];

/// Signs of the nine terms of the Bell–Mermin operator, in row order.
pub const MERMIN_SIGNS: [i8; 9] = [-1, -1, -1, -1, 1, 1, 1, 1, -1];

pub fn constraint_rows() -> Vec<ConstraintRow> {
    ROW_TABLE
        .iter()
        .enumerate()
        .map(|(i, (text, eigenvalue))| ConstraintRow {
            id: i as u8 + 1,
            product: text.parse().expect("row table parses"),
            eigenvalue: *eigenvalue,
        })
        .collect()
}

/// `½(|H⟩₁|V⟩₂ − |V⟩₁|H⟩₂)(|u⟩₁|d⟩₂ − |d⟩₁|u⟩₂)` on the flat basis.
pub fn build_psi() -> StateVector {
    let mut amps = vec![C64::new(0.0, 0.0); 16];
    let pol = [((0u8, 1u8), 1.0), ((1, 0), -1.0)];
    let path = [((0u8, 1u8), 1.0), ((1, 0), -1.0)];
    for ((pol1, pol2), s_pol) in pol {
        for ((path1, path2), s_path) in path {
            let idx = crate::hilbert::BasisIndex::new(pol1, path1, pol2, path2).flat();
            amps[idx] = C64::new(0.5 * s_pol * s_path, 0.0);
        }
    }
    StateVector::new(amps).expect("16 finite amplitudes")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenCheck {
    pub id: u8,
    pub eigenvalue: i8,
    pub residual: f64,
}

impl EigenCheck {
    pub fn passed(&self) -> bool {
        self.residual < TOL
    }
}

/// Max-abs residual of `row·|Ψ⟩ − λ|Ψ⟩` for each of the nine rows.
pub fn verify_eigenequations() -> Vec<EigenCheck> {
    let psi = build_psi();
    constraint_rows()
        .into_iter()
        .map(|row| {
            let lhs = row.product.operator().apply(&psi).expect("16-dim");
            let rhs = psi.scale(C64::new(row.eigenvalue as f64, 0.0));
            EigenCheck {
                id: row.id,
                eigenvalue: row.eigenvalue,
                residual: lhs.max_abs_diff(&rhs).expect("16-dim"),
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct MerminOperator {
    pub terms: Vec<(i8, ObservableProduct)>,
    pub realization: Operator,
}

pub fn build_mermin() -> MerminOperator {
    let terms: Vec<(i8, ObservableProduct)> = MERMIN_SIGNS
        .iter()
        .zip(constraint_rows())
        .map(|(&sign, row)| (sign, row.product))
        .collect();
    let realization = terms
        .iter()
        .map(|(sign, p)| p.operator().scale(*sign as f64))
        .reduce(|acc, t| &acc + &t)
        .expect("nine terms");
    MerminOperator { terms, realization }
}

/// Coefficients `c(j,k)` of `Σ c(j,k)|j⟩₁|k⟩₂` under `|H,u⟩≡|0⟩, |H,d⟩≡|1⟩,
/// |V,u⟩≡|2⟩, |V,d⟩≡|3⟩`.
pub fn qudit_relabel(s: &StateVector) -> Result<[[C64; 4]; 4], HilbertError> {
    if s.dim() != 16 {
        return Err(HilbertError::DimensionMismatch {
            left: 16,
            right: s.dim(),
        });
    }
    let mut grid = [[C64::new(0.0, 0.0); 4]; 4];
    for (idx, amp) in s.amps().iter().enumerate() {
        grid[idx >> 2][idx & 3] = *amp;
    }
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BellLabel {
    #[serde(rename = "psi+")]
    PsiPlus,
    #[serde(rename = "psi-")]
    PsiMinus,
    #[serde(rename = "phi+")]
    PhiPlus,
    #[serde(rename = "phi-")]
    PhiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
    ];

    pub fn ascii(self) -> &'static str {
        match self {
            BellLabel::PsiPlus => "psi+",
            BellLabel::PsiMinus => "psi-",
            BellLabel::PhiPlus => "phi+",
            BellLabel::PhiMinus => "phi-",
        }
    }

    pub fn position(self) -> usize {
        Self::ALL.iter().position(|&l| l == self).unwrap()
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellLabel::PsiPlus => "ψ+",
            BellLabel::PsiMinus => "ψ-",
            BellLabel::PhiPlus => "φ+",
            BellLabel::PhiMinus => "φ-",
        })
    }
}

impl FromStr for BellLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "psi+" | "ψ+" | "ψ⁺" => Ok(BellLabel::PsiPlus),
            "psi-" | "ψ-" | "ψ⁻" => Ok(BellLabel::PsiMinus),
            "phi+" | "φ+" | "φ⁺" => Ok(BellLabel::PhiPlus),
            "phi-" | "φ-" | "φ⁻" => Ok(BellLabel::PhiMinus),
            other => Err(format!("unknown Bell state {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellBasis {
    /// Two-photon polarization states `|Ψ±⟩, |Φ±⟩`, index `2·pol₁ + pol₂`.
    Polarization,
    /// Single-photon polarization–path states `|ψ±⟩, |φ±⟩`, index `2·pol + path`.
    PolPath,
}

/// The four Bell states in [`BellLabel::ALL`] order. In both bases the ψ
/// states pair anti-correlated labels (`|0,1⟩`, `|1,0⟩`) and the φ states
/// correlated ones.
pub fn build_bell_states(_basis: BellBasis) -> [StateVector; 4] {
    let h = FRAC_1_SQRT_2;
    let mk = |a: [f64; 4]| StateVector::from_real(&a).expect("4-dim");
    // |H⟩|V⟩ and |H⟩|d⟩ both sit at index 1, |V⟩|H⟩ and |V⟩|u⟩ at index 2,
    // so the two bases share amplitude vectors.
    [
        mk([0.0, h, h, 0.0]),
        mk([0.0, h, -h, 0.0]),
        mk([h, 0.0, 0.0, h]),
        mk([h, 0.0, 0.0, -h]),
    ]
}
