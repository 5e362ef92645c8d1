//! White-noise model, exact and sampled correlations, and the visibility
//! sweep against the local-realistic bound.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hilbert::{HilbertError, Operator, StateVector, TOL};
use crate::observables::{build_mermin, build_psi, constraint_rows, Photon};
use crate::optics::{build_apparatus, OpticsError, OutcomeTable, PairSampler, ShotRecord};

/// Largest value of ⟨O⟩ any local-realistic assignment reaches.
pub const LHV_BOUND: f64 = 7.0;

pub const DEFAULT_SEED: u64 = 20_031_015;
pub const DEFAULT_SHOTS: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("visibility {0} is outside [0, 1]")]
    VisibilityOutOfRange(f64),
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("unknown quantity {0:?}; expected 1..9 or O")]
    UnknownQuantity(String),
    #[error("no apparatus pair reads row {0}")]
    UnmatchedRow(u8),
    #[error(transparent)]
    Optics(#[from] OpticsError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    visibility: f64,
}

impl NoiseModel {
    pub fn new(visibility: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&visibility) {
            Ok(Self { visibility })
        } else {
            Err(ExperimentError::VisibilityOutOfRange(visibility))
        }
    }

    pub fn visibility(self) -> f64 {
        self.visibility
    }

    /// `V·|Ψ⟩⟨Ψ| + (1−V)·I/16`, with the maximally mixed part written as an
    /// equal mixture of the 16 computational kets.
    pub fn state(self) -> DensityState {
        let v = self.visibility;
        let mut components = Vec::with_capacity(17);
        if v > 0.0 {
            components.push((v, build_psi()));
        }
        if v < 1.0 {
            let w = (1.0 - v) / 16.0;
            components.extend((0..16).map(|i| (w, StateVector::basis(16, i).unwrap())));
        }
        DensityState { components }
    }
}

/// A finite mixture of pure states.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    components: Vec<(f64, StateVector)>,
}

impl DensityState {
    pub fn pure(state: StateVector) -> Self {
        Self {
            components: vec![(1.0, state)],
        }
    }

    pub fn components(&self) -> &[(f64, StateVector)] {
        &self.components
    }

    pub fn is_pure(&self) -> bool {
        self.components.len() == 1
    }

    /// `Tr ρ = Σ wᵢ⟨ψᵢ|ψᵢ⟩`.
    pub fn trace(&self) -> f64 {
        self.components.iter().map(|(w, s)| w * s.norm_sqr()).sum()
    }

    pub fn expectation(&self, op: &Operator) -> Result<f64> {
        let mut acc = 0.0;
        for (w, s) in &self.components {
            acc += w * op.expectation(s)?;
        }
        Ok(acc)
    }
}

pub fn noisy_state(visibility: f64) -> Result<DensityState> {
    Ok(NoiseModel::new(visibility)?.state())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    Row(u8),
    Mermin,
}

impl Quantity {
    pub fn operator(self) -> Result<Operator> {
        match self {
            Quantity::Mermin => Ok(build_mermin().realization),
            Quantity::Row(id) => constraint_rows()
                .into_iter()
                .find(|r| r.id == id)
                .map(|r| r.product.operator())
                .ok_or_else(|| ExperimentError::UnknownQuantity(id.to_string())),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Row(id) => write!(f, "row{id}"),
            Quantity::Mermin => f.write_str("O"),
        }
    }
}

impl FromStr for Quantity {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "O" {
            return Ok(Quantity::Mermin);
        }
        match t.trim_start_matches("row").parse::<u8>() {
            Ok(id @ 1..=9) => Ok(Quantity::Row(id)),
            _ => Err(ExperimentError::UnknownQuantity(s.to_string())),
        }
    }
}

pub fn exact_expectation(q: Quantity, d: &DensityState) -> Result<f64> {
    d.expectation(&q.operator()?)
}

/// The apparatus pair and readout slots that measure one constraint row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RowSetting {
    pub row: u8,
    pub alice: u8,
    pub alice_slot: usize,
    pub bob: u8,
    pub bob_slot: usize,
    /// Sign of this row's term in O.
    pub sign: i8,
}

impl RowSetting {
    pub fn product(&self, shot: &ShotRecord) -> i8 {
        shot.photon1_values[self.alice_slot] * shot.photon2_values[self.bob_slot]
    }
}

/// For each row, the unique apparatus on each side whose readouts cover
/// that side's locality groups.
pub fn row_settings() -> Result<Vec<RowSetting>> {
    let apparatuses: Vec<_> = (1..=6)
        .map(build_apparatus)
        .collect::<std::result::Result<_, _>>()?;
    let signs = crate::observables::MERMIN_SIGNS;
    constraint_rows()
        .iter()
        .map(|row| {
            let pick = |photon: Photon| {
                let groups = row.product.groups_on(photon);
                apparatuses
                    .iter()
                    .filter(|a| a.photon == photon)
                    .find_map(|a| a.slot_for(&groups).map(|slot| (a.id, slot)))
            };
            match (pick(Photon::One), pick(Photon::Two)) {
                (Some((alice, alice_slot)), Some((bob, bob_slot))) => Ok(RowSetting {
                    row: row.id,
                    alice,
                    alice_slot,
                    bob,
                    bob_slot,
                    sign: signs[row.id as usize - 1],
                }),
                _ => Err(ExperimentError::UnmatchedRow(row.id)),
            }
        })
        .collect()
}

/// Samples shots of one apparatus pair from a mixture: each shot first
/// picks a mixture component by weight, then a detector pair by the Born
/// rule for that component.
#[derive(Debug, Clone)]
pub struct MixtureSampler {
    pair: PairSampler,
    cumulative_weights: Vec<f64>,
    tables: Vec<OutcomeTable>,
}

impl MixtureSampler {
    pub fn new(alice: u8, bob: u8, state: &DensityState) -> Result<Self> {
        let pair = PairSampler::new(&build_apparatus(alice)?, &build_apparatus(bob)?)?;
        let mut cumulative_weights = Vec::with_capacity(state.components().len());
        let mut tables = Vec::with_capacity(state.components().len());
        let mut acc = 0.0;
        for (w, s) in state.components() {
            acc += w;
            cumulative_weights.push(acc);
            tables.push(OutcomeTable::new(&pair.probabilities(s)?));
        }
        Ok(Self {
            pair,
            cumulative_weights,
            tables,
        })
    }

    pub fn shot<R: Rng + ?Sized>(&self, rng: &mut R) -> ShotRecord {
        let total = *self.cumulative_weights.last().expect("non-empty mixture");
        let u = rng.random::<f64>() * total;
        let k = self
            .cumulative_weights
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.tables.len() - 1);
        self.pair.record(self.tables[k].sample(rng))
    }
}

/// Running mean and standard error of a ±1-valued (or any real) variable.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningMean {
    n: u64,
    sum: f64,
    sum_sq: f64,
}

impl RunningMean {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum / self.n as f64
        }
    }

    /// Sample standard deviation over √n.
    pub fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let var = ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub quantity: String,
    pub shots: u64,
    pub estimate: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowEstimate {
    pub setting: RowSetting,
    pub estimate: CorrelationEstimate,
    pub exact: f64,
    /// Shots where `v(A)·v(B) ≠ v(A·B)` on either side.
    pub inconsistent_shots: u64,
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sample_row(
    setting: RowSetting,
    state: &DensityState,
    shots: u64,
    seed: u64,
    stream: u64,
) -> Result<RowEstimate> {
    let sampler = MixtureSampler::new(setting.alice, setting.bob, state)?;
    let mut rng = rng_for(seed, stream);
    let mut acc = RunningMean::default();
    let mut inconsistent = 0;
    for _ in 0..shots {
        let shot = sampler.shot(&mut rng);
        inconsistent += u64::from(!shot.is_consistent());
        acc.push(setting.product(&shot) as f64);
    }
    Ok(RowEstimate {
        setting,
        estimate: CorrelationEstimate {
            quantity: Quantity::Row(setting.row).to_string(),
            shots,
            estimate: acc.mean(),
            std_error: acc.std_error(),
        },
        exact: exact_expectation(Quantity::Row(setting.row), state)?,
        inconsistent_shots: inconsistent,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MerminEstimate {
    pub visibility: f64,
    pub seed: u64,
    pub exact: f64,
    pub total: CorrelationEstimate,
    pub rows: Vec<RowEstimate>,
}

impl MerminEstimate {
    pub fn inconsistent_shots(&self) -> u64 {
        self.rows.iter().map(|r| r.inconsistent_shots).sum()
    }
}

fn estimate_at(shots: u64, visibility: f64, seed: u64, point: u64) -> Result<MerminEstimate> {
    if shots == 0 {
        return Err(ExperimentError::ZeroShots);
    }
    let state = noisy_state(visibility)?;
    let rows = row_settings()?
        .into_par_iter()
        .map(|s| sample_row(s, &state, shots, seed, (point << 8) | s.row as u64))
        .collect::<Result<Vec<_>>>()?;
    let estimate = rows
        .iter()
        .map(|r| r.setting.sign as f64 * r.estimate.estimate)
        .sum();
    let std_error = rows
        .iter()
        .map(|r| r.estimate.std_error.powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(MerminEstimate {
        visibility,
        seed,
        exact: exact_expectation(Quantity::Mermin, &state)?,
        total: CorrelationEstimate {
            quantity: "O".to_string(),
            shots,
            estimate,
            std_error,
        },
        rows,
    })
}

/// Monte Carlo estimate of ⟨O⟩: each of the nine terms is measured with its
/// own apparatus pair for `shots_per_setting` shots.
#[allow(non_snake_case)]
pub fn estimate_O(shots_per_setting: u64, visibility: f64, seed: u64) -> Result<MerminEstimate> {
    estimate_at(shots_per_setting, visibility, seed, 0)
}

/// Estimate a single constraint row.
pub fn estimate_row(row: u8, shots: u64, visibility: f64, seed: u64) -> Result<RowEstimate> {
    if shots == 0 {
        return Err(ExperimentError::ZeroShots);
    }
    let setting = row_settings()?
        .into_iter()
        .find(|s| s.row == row)
        .ok_or_else(|| ExperimentError::UnknownQuantity(row.to_string()))?;
    sample_row(setting, &noisy_state(visibility)?, shots, seed, row as u64)
}

/// Visibility above which the white-noise state violates the bound.
pub fn threshold_visibility() -> f64 {
    let quantum = build_mermin()
        .realization
        .expectation(&build_psi())
        .expect("Hermitian");
    LHV_BOUND / quantum
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Violation {
    No,
    Boundary,
    Yes,
}

impl Violation {
    pub fn classify(exact_o: f64) -> Self {
        if (exact_o - LHV_BOUND).abs() <= TOL {
            Violation::Boundary
        } else if exact_o > LHV_BOUND {
            Violation::Yes
        } else {
            Violation::No
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Violation::No => "no",
            Violation::Boundary => "boundary",
            Violation::Yes => "yes",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub v: f64,
    #[serde(rename = "exact_O")]
    pub exact_o: f64,
    #[serde(rename = "est_O")]
    pub est_o: f64,
    pub std_err: f64,
    pub lhv_bound: f64,
    pub violated: Violation,
}

pub fn default_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (0..=7).map(|i| i as f64 / 10.0).collect();
    grid.extend([0.75, 0.77, 7.0 / 9.0, 0.78, 0.8, 0.85, 0.9, 0.95, 1.0]);
    grid
}

/// Exact and sampled ⟨O⟩ on each grid point. Points sample independent
/// RNG streams, so the table does not depend on evaluation order.
pub fn visibility_sweep(grid: &[f64], shots: u64, seed: u64) -> Result<Vec<SweepRow>> {
    for &v in grid {
        NoiseModel::new(v)?;
    }
    grid.iter()
        .enumerate()
        .map(|(i, &v)| {
            let est = estimate_at(shots, v, seed, i as u64 + 1)?;
            Ok(SweepRow {
                v,
                exact_o: est.exact,
                est_o: est.total.estimate,
                std_err: est.total.std_error,
                lhv_bound: LHV_BOUND,
                violated: Violation::classify(est.exact),
            })
        })
        .collect()
}

/// Exact column only; no sampling.
pub fn exact_sweep(grid: &[f64]) -> Result<Vec<(f64, f64, Violation)>> {
    let o = build_mermin().realization;
    grid.iter()
        .map(|&v| {
            let exact = noisy_state(v)?.expectation(&o)?;
            Ok((v, exact, Violation::classify(exact)))
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory CSV");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("UTF-8 CSV")
}

pub fn sweep_text(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>10} {:>10} {:>10} {:>9} {:>5}  violated",
        "V", "exact <O>", "est <O>", "std err", "LHV"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:>10.6} {:>10.6} {:>10.6} {:>9.6} {:>5}  {}",
            r.v, r.exact_o, r.est_o, r.std_err, r.lhv_bound, r.violated
        );
    }
    out
}

/// Local means and cross-correlations of one apparatus pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairSimulation {
    pub alice: u8,
    pub bob: u8,
    pub shots: u64,
    pub visibility: f64,
    pub seed: u64,
    pub local: Vec<CorrelationEstimate>,
    pub joint: Vec<CorrelationEstimate>,
    pub inconsistent_shots: u64,
}

pub fn simulate_pair(
    alice: u8,
    bob: u8,
    shots: u64,
    visibility: f64,
    seed: u64,
) -> Result<PairSimulation> {
    if shots == 0 {
        return Err(ExperimentError::ZeroShots);
    }
    let state = noisy_state(visibility)?;
    let sampler = MixtureSampler::new(alice, bob, &state)?;
    let names_a = build_apparatus(alice)?.quantity_names();
    let names_b = build_apparatus(bob)?.quantity_names();
    let mut rng = rng_for(seed, 0x1000 | ((alice as u64) << 4) | bob as u64);
    let mut local = [RunningMean::default(); 6];
    let mut joint = [RunningMean::default(); 9];
    let mut inconsistent = 0;
    for _ in 0..shots {
        let shot = sampler.shot(&mut rng);
        inconsistent += u64::from(!shot.is_consistent());
        for k in 0..3 {
            local[k].push(shot.photon1_values[k] as f64);
            local[3 + k].push(shot.photon2_values[k] as f64);
            for l in 0..3 {
                joint[3 * k + l].push((shot.photon1_values[k] * shot.photon2_values[l]) as f64);
            }
        }
    }
    let est = |quantity: String, m: &RunningMean| CorrelationEstimate {
        quantity,
        shots,
        estimate: m.mean(),
        std_error: m.std_error(),
    };
    let local_names = names_a.iter().chain(names_b.iter());
    Ok(PairSimulation {
        alice,
        bob,
        shots,
        visibility,
        seed,
        local: local_names
            .zip(&local)
            .map(|(n, m)| est(n.clone(), m))
            .collect(),
        joint: (0..9)
            .map(|i| {
                est(
                    format!("({})·({})", names_a[i / 3], names_b[i % 3]),
                    &joint[i],
                )
            })
            .collect(),
        inconsistent_shots: inconsistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn visibility_range() {
        assert!(noisy_state(-0.1).is_err());
        assert!(noisy_state(1.5).is_err());
        assert!(noisy_state(f64::NAN).is_err());
        assert!(noisy_state(1.0).unwrap().is_pure());
        assert_eq!(noisy_state(0.0).unwrap().components().len(), 16);
        for v in [0.0, 0.3, 1.0] {
            assert!(close(noisy_state(v).unwrap().trace(), 1.0, TOL));
        }
    }

    #[test]
    fn exact_values() {
        let o = |v| exact_expectation(Quantity::Mermin, &noisy_state(v).unwrap()).unwrap();
        assert!(close(o(1.0), 9.0, TOL));
        assert!(close(o(0.0), 0.0, TOL));
        assert!(close(o(7.0 / 9.0), 7.0, TOL));
        let r1 = |v| exact_expectation(Quantity::Row(1), &noisy_state(v).unwrap()).unwrap();
        assert!(close(r1(1.0), -1.0, TOL));
        assert!(close(r1(0.5), -0.5, TOL));
    }

    #[test]
    fn linearity_in_visibility() {
        let mut quantities: Vec<Quantity> = (1..=9).map(Quantity::Row).collect();
        quantities.push(Quantity::Mermin);
        for q in quantities {
            let op = q.operator().unwrap();
            assert!(op.trace().norm() < TOL, "{q} traceless");
            let pure = exact_expectation(q, &noisy_state(1.0).unwrap()).unwrap();
            for v in [0.0, 0.25, 0.5, 0.9] {
                let e = exact_expectation(q, &noisy_state(v).unwrap()).unwrap();
                assert!(close(e, v * pure, TOL), "{q} at {v}");
            }
        }
    }

    #[test]
    fn quantity_parsing() {
        assert_eq!("O".parse::<Quantity>().unwrap(), Quantity::Mermin);
        assert_eq!("row3".parse::<Quantity>().unwrap(), Quantity::Row(3));
        assert_eq!("9".parse::<Quantity>().unwrap(), Quantity::Row(9));
        assert!("0".parse::<Quantity>().is_err());
        assert!("10".parse::<Quantity>().is_err());
        assert!("P".parse::<Quantity>().is_err());
    }

    #[test]
    fn settings_follow_apparatus_list() {
        let table: Vec<(u8, usize, u8, usize)> = row_settings()
            .unwrap()
            .iter()
            .map(|s| (s.alice, s.alice_slot, s.bob, s.bob_slot))
            .collect();
        assert_eq!(
            table,
            [
                (1, 0, 4, 0), // z1 · z2
                (3, 1, 4, 1), // z1' · z2'
                (3, 0, 2, 0), // x1 · x2
                (1, 1, 2, 1), // x1' · x2'
                (5, 0, 4, 2), // z1z1' · z2·z2'
                (5, 1, 2, 2), // x1x1' · x2·x2'
                (1, 2, 6, 0), // z1·x1' · z2x2'
                (3, 2, 6, 1), // x1·z1' · x2z2'
                (5, 2, 6, 2), // z1z1'·x1x1' · z2x2'·x2z2'
            ]
        );
    }

    #[test]
    fn running_mean() {
        let mut m = RunningMean::default();
        for x in [1.0, -1.0, 1.0, 1.0] {
            m.push(x);
        }
        assert!(close(m.mean(), 0.5, 1e-15));
        // sample variance 1, so std error 1/2
        assert!(close(m.std_error(), 0.5, 1e-15));
    }

    #[test]
    fn estimate_is_deterministic() {
        let a = estimate_O(2_000, 0.8, 9).unwrap();
        let b = estimate_O(2_000, 0.8, 9).unwrap();
        assert_eq!(a, b);
        let c = estimate_O(2_000, 0.8, 10).unwrap();
        assert_ne!(a.total.estimate, c.total.estimate);
        assert_eq!(
            estimate_O(0, 0.8, 1).unwrap_err(),
            ExperimentError::ZeroShots
        );
    }

    #[test]
    fn perfect_correlations_at_full_visibility() {
        let est = estimate_O(5_000, 1.0, DEFAULT_SEED).unwrap();
        for r in &est.rows {
            assert_eq!(r.estimate.estimate, r.exact, "row {}", r.setting.row);
            assert_eq!(r.estimate.std_error, 0.0);
        }
        assert_eq!(est.total.estimate, 9.0);
        assert_eq!(est.inconsistent_shots(), 0);
    }

    #[test]
    fn half_visibility_estimate() {
        let est = estimate_O(100_000, 0.5, DEFAULT_SEED).unwrap();
        assert!(close(est.exact, 4.5, TOL));
        assert!(
            close(est.total.estimate, 4.5, 0.02),
            "{}",
            est.total.estimate
        );
    }

    #[test]
    fn violation_flags() {
        let grid = [0.7, 0.75, 7.0 / 9.0, 0.8, 1.0];
        let flags: Vec<Violation> = exact_sweep(&grid).unwrap().iter().map(|r| r.2).collect();
        assert_eq!(
            flags,
            [
                Violation::No,
                Violation::No,
                Violation::Boundary,
                Violation::Yes,
                Violation::Yes
            ]
        );
        assert!(close(threshold_visibility(), 7.0 / 9.0, TOL));
    }

    #[test]
    fn sweep_table() {
        let rows = visibility_sweep(&[0.0, 1.0], 1_000, 1).unwrap();
        assert!(close(rows[1].exact_o, 9.0, TOL));
        assert!(rows.iter().all(|r| r.lhv_bound == 7.0));
        let csv = sweep_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "v,exact_O,est_O,std_err,lhv_bound,violated"
        );
        assert!(lines.next().unwrap().ends_with(",no"));
        assert!(lines.next().unwrap().ends_with(",yes"));
        assert!(visibility_sweep(&[0.5, 1.2], 10, 1).is_err());
    }

    #[test]
    fn pair_simulation_reports_locals_and_products() {
        let sim = simulate_pair(1, 4, 10_000, 1.0, 3).unwrap();
        assert_eq!(sim.local.len(), 6);
        assert_eq!(sim.joint.len(), 9);
        assert_eq!(sim.joint[0].quantity, "(z1)·(z2)");
        assert_eq!(sim.joint[0].estimate, -1.0);
        assert_eq!(sim.inconsistent_shots, 0);
        assert!(simulate_pair(1, 3, 10, 1.0, 3).is_err());
    }
}
