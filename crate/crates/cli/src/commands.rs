use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use avn_core::experiment::{
    default_grid, estimate_O, simulate_pair, sweep_csv, sweep_text, visibility_sweep,
    ExperimentError, Violation, LHV_BOUND,
};
use avn_core::hilbert::{StateVector, C64};
use avn_core::lhv::contradiction_certificate;
use avn_core::observables::{
    build_bell_states, build_mermin, build_psi, constraint_rows, verify_eigenequations, BellBasis,
    BellLabel,
};
use avn_core::optics::{bell_discriminate, bell_probabilities, OpticsError};

use crate::{Failure, Format, Report};

const BELL_STATE_STREAM: u64 = 0xBE11;
const BELL_SHOT_STREAM: u64 = 0xBE12;

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

fn experiment_failure(e: ExperimentError) -> Failure {
    match e {
        ExperimentError::VisibilityOutOfRange(_)
        | ExperimentError::ZeroShots
        | ExperimentError::UnknownQuantity(_)
        | ExperimentError::Optics(OpticsError::InvalidApparatus(_))
        | ExperimentError::Optics(OpticsError::WrongSide { .. }) => Failure::Usage(e.to_string()),
        other => Failure::Check(other.to_string()),
    }
}

pub fn verify(format: Format) -> Result<Report, Failure> {
    let report = verify_eigenequations();
    let rows = constraint_rows();
    let body = match format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut s = String::from("id,eigenvalue,residual\n");
            for r in &report {
                let _ = writeln!(s, "{},{},{:e}", r.id, r.eigenvalue, r.residual);
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "{:<4} {:<26} {:>10} {:>10}  status\n",
                "row", "eigenequation", "eigenvalue", "residual"
            );
            for (r, row) in report.iter().zip(&rows) {
                let _ = writeln!(
                    s,
                    "{:<4} {:<26} {:>+10} {:>10.3e}  {}",
                    r.id,
                    row.product.to_string(),
                    r.eigenvalue,
                    r.residual,
                    if r.passed() { "PASS" } else { "FAIL" }
                );
            }
            s
        }
    };
    let failed: Vec<String> = report
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.id.to_string())
        .collect();
    Ok(Report {
        body,
        failure: (!failed.is_empty())
            .then(|| format!("residual above tolerance in row(s) {}", failed.join(", "))),
    })
}

pub fn lhv(format: Format) -> Result<Report, Failure> {
    let cert = contradiction_certificate();
    let quantum = build_mermin()
        .realization
        .expectation(&build_psi())
        .map_err(|e| Failure::Check(e.to_string()))?;
    let body = match format {
        Format::Json => json(&cert),
        _ => format!(
            "max satisfied: {} of 9; max LHV <O>: {}; QM: {}\n\n{}",
            cert.satisfied_max,
            cert.max_o_value,
            quantum.round(),
            cert.to_text()
        ),
    };
    let mut problems = Vec::new();
    if cert.satisfied_max != 8 {
        problems.push(format!(
            "satisfied_max = {}, expected 8",
            cert.satisfied_max
        ));
    }
    if cert.max_o_value != 7 {
        problems.push(format!("max LHV <O> = {}, expected 7", cert.max_o_value));
    }
    if cert.parity_product != 1 || !cert.parity.is_contradiction() {
        problems.push("parity derivation does not contradict row 9".to_string());
    }
    Ok(Report {
        body,
        failure: (!problems.is_empty()).then(|| problems.join("; ")),
    })
}

#[derive(Serialize)]
struct MerminRow {
    row: u8,
    alice: u8,
    bob: u8,
    sign: i8,
    exact: f64,
    estimate: f64,
    std_error: f64,
}

#[derive(Serialize)]
struct MerminReport {
    visibility: f64,
    seed: u64,
    shots: u64,
    exact: f64,
    estimate: f64,
    std_error: f64,
    lhv_bound: f64,
    violated: Violation,
    rows: Vec<MerminRow>,
}

pub fn mermin(format: Format, shots: u64, visibility: f64, seed: u64) -> Result<Report, Failure> {
    let est = estimate_O(shots, visibility, seed).map_err(experiment_failure)?;
    let report = MerminReport {
        visibility,
        seed,
        shots,
        exact: est.exact,
        estimate: est.total.estimate,
        std_error: est.total.std_error,
        lhv_bound: LHV_BOUND,
        violated: Violation::classify(est.exact),
        rows: est
            .rows
            .iter()
            .map(|r| MerminRow {
                row: r.setting.row,
                alice: r.setting.alice,
                bob: r.setting.bob,
                sign: r.setting.sign,
                exact: r.exact,
                estimate: r.estimate.estimate,
                std_error: r.estimate.std_error,
            })
            .collect(),
    };
    let body = match format {
        Format::Json => json(&report),
        _ => {
            let mut s = format!(
                "V = {visibility}, {shots} shots per setting, seed {seed}\n\
                 exact <O> = {:.6}\nsampled <O> = {:.6} +/- {:.6}\nLHV bound = {}; violated: {}\n\n",
                report.exact, report.estimate, report.std_error, LHV_BOUND, report.violated
            );
            let _ = writeln!(
                s,
                "{:<4} {:>5} {:>4} {:>5} {:>10} {:>10} {:>9}",
                "row", "A1", "A2", "sign", "exact", "estimate", "std err"
            );
            for r in &report.rows {
                let _ = writeln!(
                    s,
                    "{:<4} {:>5} {:>4} {:>+5} {:>10.6} {:>10.6} {:>9.6}",
                    r.row, r.alice, r.bob, r.sign, r.exact, r.estimate, r.std_error
                );
            }
            s
        }
    };
    let expected = 9.0 * visibility;
    let failure = ((report.exact - expected).abs() > 1e-12)
        .then(|| format!("exact <O> = {} but 9V = {expected}", report.exact));
    Ok(Report { body, failure })
}

pub fn simulate(
    format: Format,
    alice: u8,
    bob: u8,
    shots: u64,
    visibility: f64,
    seed: u64,
) -> Result<Report, Failure> {
    let sim = simulate_pair(alice, bob, shots, visibility, seed).map_err(experiment_failure)?;
    let body = match format {
        Format::Json => json(&sim),
        Format::Csv => {
            let mut s = String::from("kind,quantity,shots,estimate,std_error\n");
            for (kind, list) in [("local", &sim.local), ("joint", &sim.joint)] {
                for e in list.iter() {
                    let _ = writeln!(
                        s,
                        "{kind},{},{},{},{}",
                        e.quantity, e.shots, e.estimate, e.std_error
                    );
                }
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "apparatus {alice} (photon 1) x apparatus {bob} (photon 2), V = {visibility}, {shots} shots, seed {seed}\n\n"
            );
            for (title, list) in [("local means", &sim.local), ("correlations", &sim.joint)] {
                let _ = writeln!(s, "{title}:");
                for e in list.iter() {
                    let _ = writeln!(
                        s,
                        "  {:<24} {:>+10.6} +/- {:.6}",
                        e.quantity, e.estimate, e.std_error
                    );
                }
            }
            let _ = writeln!(s, "inconsistent shots: {}", sim.inconsistent_shots);
            s
        }
    };
    Ok(Report {
        body,
        failure: (sim.inconsistent_shots > 0)
            .then(|| format!("{} shots broke v(A)v(B) = v(AB)", sim.inconsistent_shots)),
    })
}

pub fn sweep(
    format: Format,
    grid: Option<Vec<f64>>,
    shots: u64,
    seed: u64,
) -> Result<Report, Failure> {
    let grid = grid.unwrap_or_else(default_grid);
    if grid.is_empty() {
        return Err(Failure::Usage("empty --grid".to_string()));
    }
    let rows = visibility_sweep(&grid, shots, seed).map_err(experiment_failure)?;
    let body = match format {
        Format::Csv => sweep_csv(&rows),
        Format::Json => json(&rows),
        Format::Text => sweep_text(&rows),
    };
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| (r.exact_o - 9.0 * r.v).abs() > 1e-12)
        .map(|r| r.v.to_string())
        .collect();
    Ok(Report {
        body,
        failure: (!bad.is_empty()).then(|| format!("exact <O> != 9V at {}", bad.join(", "))),
    })
}

#[derive(Serialize)]
struct BellCount {
    label: &'static str,
    probability: f64,
    count: u64,
}

#[derive(Serialize)]
struct BellReport {
    state: String,
    shots: u64,
    seed: u64,
    /// Input amplitudes as `[re, im]` over `|H,u⟩, |H,d⟩, |V,u⟩, |V,d⟩`.
    amplitudes: Vec<[f64; 2]>,
    histogram: Vec<BellCount>,
}

fn random_state(seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(BELL_STATE_STREAM);
    let amps = (0..4)
        .map(|_| {
            C64::new(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        })
        .collect();
    StateVector::new(amps)
        .expect("finite amplitudes")
        .normalized()
}

pub fn bell(format: Format, state: &str, shots: u64, seed: u64) -> Result<Report, Failure> {
    let (name, input, expected) = if state == "random" {
        ("random".to_string(), random_state(seed), None)
    } else {
        let label: BellLabel = state.parse().map_err(Failure::Usage)?;
        let s = build_bell_states(BellBasis::PolPath)[label.position()].clone();
        (label.ascii().to_string(), s, Some(label))
    };
    let probs = bell_probabilities(&input).map_err(|e| Failure::Check(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(BELL_SHOT_STREAM);
    let mut counts = [0u64; 4];
    for _ in 0..shots {
        let label =
            bell_discriminate(&input, &mut rng).map_err(|e| Failure::Check(e.to_string()))?;
        counts[label.position()] += 1;
    }
    let report = BellReport {
        state: name,
        shots,
        seed,
        amplitudes: input.amps().iter().map(|a| [a.re, a.im]).collect(),
        histogram: BellLabel::ALL
            .iter()
            .map(|l| BellCount {
                label: l.ascii(),
                probability: probs[l.position()],
                count: counts[l.position()],
            })
            .collect(),
    };
    let body = match format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut s = String::from("label,probability,count\n");
            for h in &report.histogram {
                let _ = writeln!(s, "{},{},{}", h.label, h.probability, h.count);
            }
            s
        }
        Format::Text => {
            let mut s = format!("state {}, {shots} shots, seed {seed}\n", report.state);
            for h in &report.histogram {
                let _ = writeln!(
                    s,
                    "  {:<5} p = {:.6}  count {}",
                    h.label, h.probability, h.count
                );
            }
            s
        }
    };
    let failure = expected.and_then(|label| {
        (counts[label.position()] != shots).then(|| {
            format!(
                "{} shots of {} registered a different label",
                shots - counts[label.position()],
                label.ascii()
            )
        })
    });
    Ok(Report { body, failure })
}
