//! Linear-optics measurement apparatuses for single photons.
//!
//! A photon's 4-dimensional space is indexed `2·pol + path` (`H = u = 0`).
//! After an apparatus's optical elements, one detector sits behind each of
//! the four computational output modes, so detector `d` registers the
//! basis state `U†|d⟩`.
//!
//! Element conventions:
//! - BS: `|u⟩ → (|u⟩+|d⟩)/√2`, `|d⟩ → (|u⟩−|d⟩)/√2`, polarization untouched
//! - HWP at 45°: `|H⟩ → (|H⟩+|V⟩)/√2`, `|V⟩ → (|H⟩−|V⟩)/√2`, path untouched
//! - PBS: transmits H (path kept), reflects V (path swapped `u ↔ d`), no
//!   reflection phase
//! - PHASE: `|d⟩ → e^{iφ}|d⟩`

use std::fmt::{self, Write as _};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::hilbert::{qubit, HilbertError, Operator, StateVector, C64, TOL};
use crate::observables::{BellLabel, LocalObservable, Photon};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpticsError {
    #[error("no apparatus with id {0}; valid ids are 1..=6")]
    InvalidApparatus(u8),
    #[error("apparatus {id} acts on photon {actual}, expected photon {expected}")]
    WrongSide { id: u8, expected: u8, actual: u8 },
    #[error("apparatus {id}: detector {detector} is not a joint eigenstate of its observables")]
    Inconsistent { id: u8, detector: usize },
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

pub type Result<T> = std::result::Result<T, OpticsError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ElementKind {
    #[serde(rename = "BS")]
    BeamSplitter,
    #[serde(rename = "PBS")]
    PolarizingBeamSplitter,
    #[serde(rename = "HWP45")]
    HalfWavePlate45,
    #[serde(rename = "PHASE")]
    Phase,
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ElementKind::BeamSplitter => "BS",
            ElementKind::PolarizingBeamSplitter => "PBS",
            ElementKind::HalfWavePlate45 => "HWP45",
            ElementKind::Phase => "PHASE",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpticalElement {
    pub kind: ElementKind,
    pub photon: Photon,
    /// Position along the photon's beam line, 0 first.
    pub stage: usize,
    /// Phase in radians; only meaningful for [`ElementKind::Phase`].
    pub phase: f64,
}

impl OpticalElement {
    pub fn new(kind: ElementKind, photon: Photon, stage: usize) -> Self {
        Self {
            kind,
            photon,
            stage,
            phase: 0.0,
        }
    }

    pub fn phase_shift(photon: Photon, stage: usize, phase: f64) -> Self {
        Self {
            kind: ElementKind::Phase,
            photon,
            stage,
            phase,
        }
    }
}

/// Single-photon (4-dim) unitary of an element.
pub fn element_unitary(e: &OpticalElement) -> Operator {
    let u = match e.kind {
        ElementKind::BeamSplitter => qubit::identity().tensor(&qubit::hadamard()),
        ElementKind::HalfWavePlate45 => qubit::hadamard().tensor(&qubit::identity()),
        ElementKind::PolarizingBeamSplitter => Operator::from_real(
            4,
            &[
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        ),
        ElementKind::Phase => qubit::identity().tensor(&qubit::phase(e.phase)),
    };
    u.expect("element unitaries are 4x4")
}

/// Product of the element unitaries, first element applied first.
pub fn chain_unitary(elements: &[OpticalElement]) -> Operator {
    elements
        .iter()
        .fold(Operator::identity(4).unwrap(), |acc, e| {
            &element_unitary(e) * &acc
        })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Realization {
    Elements(Vec<OpticalElement>),
    JointEigenbasis,
}

/// Label pairs of the joint eigenbasis detectors, in detector order.
const JOINT_LABELS: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

#[derive(Debug, Clone)]
pub struct ApparatusSpec {
    pub id: u8,
    pub photon: Photon,
    /// The two commuting primary quantities; each may itself be a product
    /// of two local observables (e.g. `z1z1'`).
    pub primaries: [Vec<LocalObservable>; 2],
    pub realization: Realization,
    /// State registered by each detector.
    pub basis: [StateVector; 4],
    /// Detector → (v(A), v(B)).
    pub detector_map: [(i8, i8); 4],
}

fn group_name(group: &[LocalObservable]) -> String {
    group.iter().map(|o| o.to_string()).collect()
}

fn group_operator(group: &[LocalObservable]) -> Operator {
    group
        .iter()
        .map(|o| o.single_photon_operator())
        .reduce(|acc, o| &acc * &o)
        .expect("non-empty group")
}

impl ApparatusSpec {
    /// Names of the three quantities read out: A, B and A·B.
    pub fn quantity_names(&self) -> [String; 3] {
        let a = group_name(&self.primaries[0]);
        let b = group_name(&self.primaries[1]);
        let ab = format!("{a}·{b}");
        [a, b, ab]
    }

    /// 4-dim operator of quantity `slot` (0 = A, 1 = B, 2 = A·B).
    pub fn quantity_operator(&self, slot: usize) -> Operator {
        match slot {
            0 | 1 => group_operator(&self.primaries[slot]),
            2 => &self.quantity_operator(0) * &self.quantity_operator(1),
            _ => panic!("quantity slot {slot} out of range"),
        }
    }

    /// Values (v(A), v(B), v(A·B)) registered by `detector`.
    pub fn values(&self, detector: usize) -> [i8; 3] {
        let (a, b) = self.detector_map[detector];
        [a, b, a * b]
    }

    /// Which quantity slot reads the given locality groups, if any. One
    /// group must equal a primary; two groups must be both primaries.
    pub fn slot_for(&self, groups: &[&[LocalObservable]]) -> Option<usize> {
        let p = &self.primaries;
        match groups {
            [g] if *g == p[0].as_slice() => Some(0),
            [g] if *g == p[1].as_slice() => Some(1),
            [g, h] if *g == p[0].as_slice() && *h == p[1].as_slice() => Some(2),
            [g, h] if *g == p[1].as_slice() && *h == p[0].as_slice() => Some(2),
            _ => None,
        }
    }

    pub fn describe(&self) -> ApparatusDescription {
        let realization = match &self.realization {
            Realization::Elements(els) => els.iter().map(|e| e.kind.to_string()).collect(),
            Realization::JointEigenbasis => vec!["joint-eigenbasis".to_string()],
        };
        ApparatusDescription {
            id: self.id,
            photon: self.photon.number(),
            quantities: self.quantity_names().to_vec(),
            realization,
            detectors: (0..4)
                .map(|d| DetectorDescription {
                    detector: d,
                    state: self.basis[d].amps().iter().map(|a| [a.re, a.im]).collect(),
                    values: self.values(d),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectorDescription {
    pub detector: usize,
    /// Amplitudes as `[re, im]` over `|H,u⟩, |H,d⟩, |V,u⟩, |V,d⟩`.
    pub state: Vec<[f64; 2]>,
    pub values: [i8; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct ApparatusDescription {
    pub id: u8,
    pub photon: u8,
    pub quantities: Vec<String>,
    pub realization: Vec<String>,
    pub detectors: Vec<DetectorDescription>,
}

impl ApparatusDescription {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "apparatus {} (photon {}): {}",
            self.id,
            self.photon,
            self.quantities.join(", ")
        );
        let _ = writeln!(out, "  optics: {}", self.realization.join(" -> "));
        for d in &self.detectors {
            let amps: Vec<String> = d
                .state
                .iter()
                .map(|[re, im]| {
                    if im.abs() < TOL {
                        format!("{re:+.4}")
                    } else {
                        format!("{re:+.4}{im:+.4}i")
                    }
                })
                .collect();
            let _ = writeln!(
                out,
                "  detector {}: [{}] -> ({:+}, {:+}, {:+})",
                d.detector,
                amps.join(", "),
                d.values[0],
                d.values[1],
                d.values[2]
            );
        }
        out
    }
}

fn apparatus_table(id: u8) -> Option<(Photon, [Vec<LocalObservable>; 2])> {
    use LocalObservable as L;
    let entry = match id {
        1 => (Photon::One, [vec![L::Z1], vec![L::X1P]]),
        2 => (Photon::Two, [vec![L::X2], vec![L::X2P]]),
        3 => (Photon::One, [vec![L::X1], vec![L::Z1P]]),
        4 => (Photon::Two, [vec![L::Z2], vec![L::Z2P]]),
        5 => (Photon::One, [vec![L::Z1, L::Z1P], vec![L::X1, L::X1P]]),
        6 => (Photon::Two, [vec![L::Z2, L::X2P], vec![L::X2, L::Z2P]]),
        _ => return None,
    };
    Some(entry)
}

fn element_chain(id: u8, photon: Photon) -> Option<Vec<OpticalElement>> {
    use ElementKind::*;
    let kinds: &[ElementKind] = match id {
        1 => &[BeamSplitter, PolarizingBeamSplitter],
        2 => &[HalfWavePlate45, BeamSplitter, PolarizingBeamSplitter],
        3 => &[HalfWavePlate45, PolarizingBeamSplitter],
        4 => &[PolarizingBeamSplitter],
        _ => return None,
    };
    Some(
        kinds
            .iter()
            .enumerate()
            .map(|(stage, &k)| OpticalElement::new(k, photon, stage))
            .collect(),
    )
}

/// Element chain whose computational-basis readout matches apparatus 5 or 6:
/// a PBS acting as a polarization-controlled path flip followed by a HWP
/// maps the four pol–path Bell states onto the four output modes. For 6 a
/// BS first turns `z x′, x z′` into `z z′, x x′`.
pub fn erasure_chain(id: u8, photon: Photon) -> Option<Vec<OpticalElement>> {
    use ElementKind::*;
    let kinds: &[ElementKind] = match id {
        5 => &[PolarizingBeamSplitter, HalfWavePlate45],
        6 => &[BeamSplitter, PolarizingBeamSplitter, HalfWavePlate45],
        _ => return None,
    };
    Some(
        kinds
            .iter()
            .enumerate()
            .map(|(stage, &k)| OpticalElement::new(k, photon, stage))
            .collect(),
    )
}

/// Eigenvalue of `op` on `state`, or `None` if `state` is not an eigenvector
/// with eigenvalue ±1.
fn pm_eigenvalue(op: &Operator, state: &StateVector) -> Option<i8> {
    let image = op.apply(state).ok()?;
    [1i8, -1].into_iter().find(|&l| {
        image
            .max_abs_diff(&state.scale(C64::new(l as f64, 0.0)))
            .is_ok_and(|r| r < TOL)
    })
}

/// Rank-one joint eigenvector of commuting ±1 observables `a`, `b` with
/// eigenvalues `(la, lb)`, phase-fixed so its first non-zero amplitude is
/// real and positive.
fn joint_eigenvector(a: &Operator, b: &Operator, la: i8, lb: i8) -> StateVector {
    let id = Operator::identity(4).unwrap();
    let pa = &id + &a.scale(la as f64);
    let pb = &id + &b.scale(lb as f64);
    let proj = (&pa * &pb).scale(0.25);
    let column = |j: usize| {
        StateVector::new((0..4).map(|i| proj.entry(i, j)).collect()).expect("4-dim column")
    };
    let best = (0..4)
        .map(column)
        .max_by(|x, y| x.norm_sqr().total_cmp(&y.norm_sqr()))
        .expect("four columns");
    let v = best.normalized();
    let lead = v
        .amps()
        .iter()
        .find(|c| c.norm() > 1e-9)
        .copied()
        .expect("non-zero eigenvector");
    v.scale(lead.conj() / lead.norm())
}

pub fn build_apparatus(id: u8) -> Result<ApparatusSpec> {
    let (photon, primaries) = apparatus_table(id).ok_or(OpticsError::InvalidApparatus(id))?;
    let a = group_operator(&primaries[0]);
    let b = group_operator(&primaries[1]);

    let (realization, basis) = match element_chain(id, photon) {
        Some(elements) => {
            let u_dag = chain_unitary(&elements).adjoint();
            let basis = std::array::from_fn(|d| {
                u_dag
                    .apply(&StateVector::basis(4, d).unwrap())
                    .expect("4-dim")
            });
            (Realization::Elements(elements), basis)
        }
        None => {
            let basis = JOINT_LABELS.map(|(la, lb)| joint_eigenvector(&a, &b, la, lb));
            (Realization::JointEigenbasis, basis)
        }
    };

    let mut detector_map = [(0i8, 0i8); 4];
    for (d, state) in basis.iter().enumerate() {
        let la = pm_eigenvalue(&a, state);
        let lb = pm_eigenvalue(&b, state);
        match (la, lb) {
            (Some(la), Some(lb)) => detector_map[d] = (la, lb),
            _ => return Err(OpticsError::Inconsistent { id, detector: d }),
        }
    }

    Ok(ApparatusSpec {
        id,
        photon,
        primaries,
        realization,
        basis,
        detector_map,
    })
}

pub fn all_apparatuses() -> Vec<ApparatusSpec> {
    (1..=6)
        .map(|id| build_apparatus(id).expect("built-in apparatus"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DetectorPattern {
    pub photon1_detector: u8,
    pub photon2_detector: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShotRecord {
    pub apparatus: (u8, u8),
    pub pattern: DetectorPattern,
    /// (v(A), v(B), v(A·B)) on photon 1.
    pub photon1_values: [i8; 3],
    pub photon2_values: [i8; 3],
}

impl ShotRecord {
    /// `v(A)·v(B) = v(A·B)` on both sides.
    pub fn is_consistent(&self) -> bool {
        let ok = |v: [i8; 3]| v[0] * v[1] == v[2];
        ok(self.photon1_values) && ok(self.photon2_values)
    }
}

/// Joint Born distribution of one photon-1 apparatus and one photon-2
/// apparatus.
#[derive(Debug, Clone)]
pub struct PairSampler {
    alice: ApparatusSpec,
    bob: ApparatusSpec,
    /// Two-photon states for each detector pair, flat index `4·d1 + d2`.
    joint_basis: Vec<StateVector>,
}

/// Cumulative distribution over 16 outcomes.
#[derive(Debug, Clone, Copy)]
pub struct OutcomeTable {
    cumulative: [f64; 16],
    last_nonzero: usize,
}

impl OutcomeTable {
    pub fn new(probabilities: &[f64; 16]) -> Self {
        let mut cumulative = [0.0; 16];
        let mut acc = 0.0;
        for (c, p) in cumulative.iter_mut().zip(probabilities) {
            acc += p;
            *c = acc;
        }
        let last_nonzero = probabilities.iter().rposition(|&p| p > 0.0).unwrap_or(15);
        Self {
            cumulative,
            last_nonzero,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random::<f64>() * self.cumulative[15];
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.last_nonzero)
            .min(self.last_nonzero)
    }
}

impl PairSampler {
    pub fn new(alice: &ApparatusSpec, bob: &ApparatusSpec) -> Result<Self> {
        if alice.photon != Photon::One {
            return Err(OpticsError::WrongSide {
                id: alice.id,
                expected: 1,
                actual: alice.photon.number(),
            });
        }
        if bob.photon != Photon::Two {
            return Err(OpticsError::WrongSide {
                id: bob.id,
                expected: 2,
                actual: bob.photon.number(),
            });
        }
        let mut joint_basis = Vec::with_capacity(16);
        for b1 in &alice.basis {
            for b2 in &bob.basis {
                joint_basis.push(product_state(b1, b2));
            }
        }
        Ok(Self {
            alice: alice.clone(),
            bob: bob.clone(),
            joint_basis,
        })
    }

    pub fn alice(&self) -> &ApparatusSpec {
        &self.alice
    }

    pub fn bob(&self) -> &ApparatusSpec {
        &self.bob
    }

    /// `P(d1, d2) = |⟨b₁(d1) ⊗ b₂(d2)|s⟩|²`, flat index `4·d1 + d2`.
    pub fn probabilities(&self, state: &StateVector) -> Result<[f64; 16]> {
        let mut out = [0.0; 16];
        for (p, b) in out.iter_mut().zip(&self.joint_basis) {
            *p = b.inner(state)?.norm_sqr();
        }
        Ok(out)
    }

    pub fn record(&self, outcome: usize) -> ShotRecord {
        let (d1, d2) = (outcome / 4, outcome % 4);
        ShotRecord {
            apparatus: (self.alice.id, self.bob.id),
            pattern: DetectorPattern {
                photon1_detector: d1 as u8,
                photon2_detector: d2 as u8,
            },
            photon1_values: self.alice.values(d1),
            photon2_values: self.bob.values(d2),
        }
    }
}

/// `|a⟩₁ ⊗ |b⟩₂` in the flat pol₁ path₁ pol₂ path₂ ordering.
pub fn product_state(photon1: &StateVector, photon2: &StateVector) -> StateVector {
    photon1.tensor(photon2).expect("4 ⊗ 4 = 16")
}

/// Sample one shot of apparatus pair `(a1, a2)` on a two-photon state.
pub fn measure_pair<R: Rng + ?Sized>(
    a1: &ApparatusSpec,
    a2: &ApparatusSpec,
    s: &StateVector,
    rng: &mut R,
) -> Result<ShotRecord> {
    let sampler = PairSampler::new(a1, a2)?;
    let table = OutcomeTable::new(&sampler.probabilities(s)?);
    Ok(sampler.record(table.sample(rng)))
}

/// Single-photon Bell-state analyzer: PBS then HWP45, then one detector per
/// output mode.
pub fn bell_analyzer() -> Vec<OpticalElement> {
    vec![
        OpticalElement::new(ElementKind::PolarizingBeamSplitter, Photon::One, 0),
        OpticalElement::new(ElementKind::HalfWavePlate45, Photon::One, 1),
    ]
}

/// Label of the Bell state each analyzer output mode registers.
pub const BELL_DETECTOR_LABELS: [BellLabel; 4] = [
    BellLabel::PhiPlus,
    BellLabel::PsiPlus,
    BellLabel::PhiMinus,
    BellLabel::PsiMinus,
];

/// Outcome probabilities in [`BellLabel::ALL`] order.
pub fn bell_probabilities(s: &StateVector) -> Result<[f64; 4]> {
    let out = chain_unitary(&bell_analyzer()).apply(s)?;
    let mut probs = [0.0; 4];
    for (d, p) in out.probabilities().into_iter().enumerate() {
        probs[BELL_DETECTOR_LABELS[d].position()] += p;
    }
    Ok(probs)
}

pub fn bell_discriminate<R: Rng + ?Sized>(s: &StateVector, rng: &mut R) -> Result<BellLabel> {
    let probs = bell_probabilities(s)?;
    let total: f64 = probs.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(3);
    for (i, p) in probs.iter().enumerate() {
        if u < *p {
            return Ok(BellLabel::ALL[i]);
        }
        u -= p;
    }
    Ok(BellLabel::ALL[last])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::commutator_norm;
    use crate::observables::{build_bell_states, build_psi, BellBasis};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn el(kind: ElementKind) -> OpticalElement {
        OpticalElement::new(kind, Photon::One, 0)
    }

    fn ket(pol: usize, path: usize) -> StateVector {
        StateVector::basis(4, 2 * pol + path).unwrap()
    }

    #[test]
    fn elements_are_unitary() {
        for kind in [
            ElementKind::BeamSplitter,
            ElementKind::PolarizingBeamSplitter,
            ElementKind::HalfWavePlate45,
        ] {
            assert!(
                element_unitary(&el(kind)).unitarity_defect() < TOL,
                "{kind}"
            );
        }
        let p = element_unitary(&OpticalElement::phase_shift(Photon::Two, 0, 0.7));
        assert!(p.unitarity_defect() < TOL);
    }

    #[test]
    fn beam_splitter_on_u() {
        let bs = element_unitary(&el(ElementKind::BeamSplitter));
        for pol in 0..2 {
            let out = bs.apply(&ket(pol, 0)).unwrap();
            let want = &ket(pol, 0).scale(C64::new(FRAC_1_SQRT_2, 0.0))
                + &ket(pol, 1).scale(C64::new(FRAC_1_SQRT_2, 0.0));
            assert!(out.max_abs_diff(&want).unwrap() < TOL);
        }
    }

    #[test]
    fn half_wave_plate_on_v() {
        let hwp = element_unitary(&el(ElementKind::HalfWavePlate45));
        for path in 0..2 {
            let out = hwp.apply(&ket(1, path)).unwrap();
            let want = &ket(0, path).scale(C64::new(FRAC_1_SQRT_2, 0.0))
                - &ket(1, path).scale(C64::new(FRAC_1_SQRT_2, 0.0));
            assert!(out.max_abs_diff(&want).unwrap() < TOL);
        }
    }

    #[test]
    fn pbs_port_convention() {
        let pbs = element_unitary(&el(ElementKind::PolarizingBeamSplitter));
        assert_eq!(pbs.apply(&ket(0, 0)).unwrap(), ket(0, 0));
        assert_eq!(pbs.apply(&ket(0, 1)).unwrap(), ket(0, 1));
        assert_eq!(pbs.apply(&ket(1, 0)).unwrap(), ket(1, 1));
        assert_eq!(pbs.apply(&ket(1, 1)).unwrap(), ket(1, 0));
    }

    #[test]
    fn apparatus_one_basis() {
        let a = build_apparatus(1).unwrap();
        // {|H⟩,|V⟩} ⊗ {(|u⟩±|d⟩)/√2}, labels (v(z1), v(x1'))
        for (d, state) in a.basis.iter().enumerate() {
            let (z, x) = a.detector_map[d];
            let pol = if z == 1 { 0 } else { 1 };
            let want = &ket(pol, 0).scale(C64::new(FRAC_1_SQRT_2, 0.0))
                + &ket(pol, 1).scale(C64::new(x as f64 * FRAC_1_SQRT_2, 0.0));
            let overlap = want.inner(state).unwrap().norm();
            assert!((overlap - 1.0).abs() < TOL, "detector {d}");
        }
        assert_eq!(a.quantity_names(), ["z1", "x1'", "z1·x1'"]);
    }

    #[test]
    fn apparatus_four_is_computational() {
        let a = build_apparatus(4).unwrap();
        for state in &a.basis {
            let nonzero = state.amps().iter().filter(|c| c.norm() > TOL).count();
            assert_eq!(nonzero, 1);
        }
    }

    #[test]
    fn apparatus_five_is_bell_basis() {
        let a = build_apparatus(5).unwrap();
        let bell = build_bell_states(BellBasis::PolPath);
        // (+,+) φ+, (+,−) φ−, (−,+) ψ+, (−,−) ψ−
        let order = [2, 3, 0, 1];
        for (d, state) in a.basis.iter().enumerate() {
            let overlap = bell[order[d]].inner(state).unwrap().norm();
            assert!((overlap - 1.0).abs() < TOL, "detector {d}");
        }
    }

    #[test]
    fn apparatus_soundness() {
        for a in all_apparatuses() {
            let gram_defect = Operator::from_columns(&a.basis).unwrap().unitarity_defect();
            assert!(gram_defect < TOL, "apparatus {}", a.id);
            let ops: Vec<Operator> = (0..3).map(|k| a.quantity_operator(k)).collect();
            assert!(commutator_norm(&ops[0], &ops[1]).unwrap() < 1e-13);
            for (d, state) in a.basis.iter().enumerate() {
                for (k, op) in ops.iter().enumerate() {
                    let label = a.values(d)[k] as f64;
                    let r = op
                        .apply(state)
                        .unwrap()
                        .max_abs_diff(&state.scale(C64::new(label, 0.0)))
                        .unwrap();
                    assert!(r < TOL, "apparatus {} detector {d} slot {k}", a.id);
                }
            }
            let mut labels = a.detector_map.to_vec();
            labels.sort();
            labels.dedup();
            assert_eq!(labels.len(), 4, "apparatus {} labels distinct", a.id);
        }
    }

    #[test]
    fn apparatus_sides_follow_table() {
        let sides: Vec<u8> = all_apparatuses()
            .iter()
            .map(|a| a.photon.number())
            .collect();
        assert_eq!(sides, [1, 2, 1, 2, 1, 2]);
        assert_eq!(
            build_apparatus(0).unwrap_err(),
            OpticsError::InvalidApparatus(0)
        );
        assert!(build_apparatus(7).is_err());
    }

    #[test]
    fn erasure_chains_reproduce_joint_basis() {
        // Outcome distributions agree on a spread of single-photon states.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for id in [5u8, 6] {
            let a = build_apparatus(id).unwrap();
            let chain = chain_unitary(&erasure_chain(id, a.photon).unwrap());
            for _ in 0..50 {
                let amps = (0..4)
                    .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                    .collect();
                let s = StateVector::new(amps).unwrap().normalized();
                let via_optics = chain.apply(&s).unwrap().probabilities();
                for (d, b) in a.basis.iter().enumerate() {
                    let mode = chain.apply(b).unwrap().probabilities();
                    let port = mode.iter().position(|&p| (p - 1.0).abs() < TOL).unwrap();
                    let p_direct = b.inner(&s).unwrap().norm_sqr();
                    let p_optics = via_optics[port];
                    assert!((p_direct - p_optics).abs() < TOL, "id {id} detector {d}");
                }
            }
        }
    }

    #[test]
    fn product_state_correlations_on_psi() {
        let a1 = build_apparatus(1).unwrap();
        let a4 = build_apparatus(4).unwrap();
        let sampler = PairSampler::new(&a1, &a4).unwrap();
        let probs = sampler.probabilities(&build_psi()).unwrap();
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < TOL);
        for (outcome, p) in probs.iter().enumerate() {
            let r = sampler.record(outcome);
            if *p > TOL {
                assert_eq!(r.photon1_values[0] * r.photon2_values[0], -1);
            }
        }
    }

    #[test]
    fn wrong_sides_rejected() {
        let a1 = build_apparatus(1).unwrap();
        let a3 = build_apparatus(3).unwrap();
        let s = build_psi();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            measure_pair(&a1, &a3, &s, &mut rng),
            Err(OpticsError::WrongSide { id: 3, .. })
        ));
        let a2 = build_apparatus(2).unwrap();
        assert!(matches!(
            measure_pair(&a2, &a2, &s, &mut rng),
            Err(OpticsError::WrongSide {
                id: 2,
                expected: 1,
                ..
            })
        ));
    }

    #[test]
    fn product_ket_with_apparatus_one() {
        let a1 = build_apparatus(1).unwrap();
        let a4 = build_apparatus(4).unwrap();
        let huhu = StateVector::basis(16, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut plus = 0;
        let n = 20_000;
        for _ in 0..n {
            let r = measure_pair(&a1, &a4, &huhu, &mut rng).unwrap();
            assert_eq!(r.photon1_values[0], 1);
            assert!(r.is_consistent());
            plus += usize::from(r.photon1_values[1] == 1);
        }
        // Binomial(20000, ½): 5σ ≈ 354
        assert!((plus as i64 - n / 2).abs() < 354);
    }

    #[test]
    fn bell_analyzer_is_deterministic_on_bell_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (label, state) in BellLabel::ALL
            .iter()
            .zip(build_bell_states(BellBasis::PolPath))
        {
            let probs = bell_probabilities(&state).unwrap();
            assert!((probs[label.position()] - 1.0).abs() < TOL, "{label}");
            for _ in 0..100 {
                assert_eq!(bell_discriminate(&state, &mut rng).unwrap(), *label);
            }
        }
    }

    #[test]
    fn bell_analyzer_on_hu() {
        let probs = bell_probabilities(&ket(0, 0)).unwrap();
        assert!(probs[0].abs() < TOL && probs[1].abs() < TOL);
        assert!((probs[2] - 0.5).abs() < TOL && (probs[3] - 0.5).abs() < TOL);
    }

    #[test]
    fn description_lists_detectors() {
        let d = build_apparatus(6).unwrap().describe();
        assert_eq!(d.detectors.len(), 4);
        assert_eq!(d.realization, ["joint-eigenbasis"]);
        let text = d.to_text();
        assert!(text.contains("z2x2'·x2z2'"));
        let d1 = build_apparatus(2).unwrap().describe();
        assert_eq!(d1.realization, ["HWP45", "BS", "PBS"]);
    }
}
