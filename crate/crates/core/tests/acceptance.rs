//! Exit criteria. Each criterion prints one PASS/FAIL line; the test fails
//! if any criterion fails. Run with `--nocapture` to see the report.

use std::time::{Duration, Instant};

use avn_core::experiment::{
    default_grid, estimate_O, exact_expectation, noisy_state, sweep_csv, visibility_sweep,
    Quantity, Violation, DEFAULT_SEED, LHV_BOUND,
};
use avn_core::hilbert::{commutator_norm, Operator, StateVector, C64, TOL};
use avn_core::lhv::{self, check, enumerate_assignments, lhv_value_of_O};
use avn_core::observables::{
    build_bell_states, build_mermin, build_psi, qudit_relabel, verify_eigenequations, BellBasis,
    BellLabel,
};
use avn_core::optics::{all_apparatuses, bell_discriminate, bell_probabilities};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Criterion = (u8, &'static str, Box<dyn FnOnce() -> (bool, String)>);

struct Outcome {
    id: u8,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn timed<F: FnOnce() -> (bool, String)>(limit: Duration, f: F) -> (bool, String) {
    let start = Instant::now();
    let (ok, detail) = f();
    let elapsed = start.elapsed();
    let in_time = elapsed < limit;
    (
        ok && in_time,
        format!(
            "{detail}; {:.3}s (limit {}s)",
            elapsed.as_secs_f64(),
            limit.as_secs()
        ),
    )
}

fn eigenequations() -> (bool, String) {
    let report = verify_eigenequations();
    let signs: Vec<i8> = report.iter().map(|r| r.eigenvalue).collect();
    let worst = report.iter().map(|r| r.residual).fold(0.0, f64::max);
    let ok = report.len() == 9
        && signs == [-1, -1, -1, -1, 1, 1, 1, 1, -1]
        && report.iter().all(|r| r.residual < 1e-12);
    (ok, format!("signs {signs:?}, max residual {worst:.2e}"))
}

fn mermin_eigenvalue() -> (bool, String) {
    let o = build_mermin().realization;
    let psi = build_psi();
    let value = o.expectation(&psi).unwrap();
    let residual = o
        .apply(&psi)
        .unwrap()
        .max_abs_diff(&psi.scale(C64::new(9.0, 0.0)))
        .unwrap();
    let ok = (value - 9.0).abs() < 1e-12 && residual < 1e-12;
    (
        ok,
        format!("<O> = {value}, |O psi - 9 psi| = {residual:.2e}"),
    )
}

fn lhv_brute_force() -> (bool, String) {
    let mut consistent = 0;
    let mut max_satisfied = 0;
    let mut max_o = i32::MIN;
    for a in enumerate_assignments() {
        let k = check(a).count;
        consistent += usize::from(k == 9);
        max_satisfied = max_satisfied.max(k);
        max_o = max_o.max(lhv_value_of_O(a));
    }
    let cert = lhv::contradiction_certificate();
    let witness_o = lhv_value_of_O(cert.witness);
    let ok = consistent == 0
        && max_satisfied == 8
        && max_o == 7
        && cert.satisfied_max == 8
        && cert.max_o_value == 7
        && witness_o == 7
        && check(cert.witness).count == 8;
    (
        ok,
        format!(
            "{consistent} consistent of 4096, max satisfied {max_satisfied}, max LHV <O> {max_o}, witness #{} gives {witness_o}",
            cert.witness.index()
        ),
    )
}

fn parity_certificate() -> (bool, String) {
    let p = lhv::parity_derivation();
    let ok = p.implied_product == 1
        && p.conflicting_required == -1
        && p.residual_elements == ["z1z1'", "x1x1'", "z2x2'", "x2z2'"]
        && p.is_contradiction();
    (
        ok,
        format!(
            "rows 1-8 imply product {:+} on {:?}; row 9 requires {:+}",
            p.implied_product, p.residual_elements, p.conflicting_required
        ),
    )
}

fn visibility_exact() -> (bool, String) {
    let o = build_mermin().realization;
    let traceless = o.trace().norm() < TOL;
    let mut linear = true;
    for i in 0..=100 {
        let v = i as f64 / 100.0;
        let e = exact_expectation(Quantity::Mermin, &noisy_state(v).unwrap()).unwrap();
        linear &= (e - 9.0 * v).abs() < TOL;
        let expected = if v > 7.0 / 9.0 {
            Violation::Yes
        } else {
            Violation::No
        };
        linear &= Violation::classify(e) == expected;
    }
    let at = exact_expectation(Quantity::Mermin, &noisy_state(7.0 / 9.0).unwrap()).unwrap();
    let boundary = Violation::classify(at) == Violation::Boundary;
    let ok = traceless && linear && boundary;
    (
        ok,
        format!("traceless {traceless}, <O>(V) = 9V on 101 points {linear}, <O>(7/9) = {at}"),
    )
}

fn visibility_sampled() -> (bool, String) {
    let rows = visibility_sweep(&default_grid(), 100_000, DEFAULT_SEED).unwrap();
    let csv = sweep_csv(&rows);
    let flag = |v: f64| {
        rows.iter()
            .find(|r| (r.v - v).abs() < 1e-15)
            .map(|r| r.violated)
    };
    let crossing = flag(0.77) == Some(Violation::No) && flag(0.78) == Some(Violation::Yes);
    let monotone = rows.iter().all(|r| {
        r.lhv_bound == LHV_BOUND
            && match r.violated {
                Violation::Yes => r.v > 7.0 / 9.0,
                Violation::No => r.v < 7.0 / 9.0,
                Violation::Boundary => (r.v - 7.0 / 9.0).abs() < 1e-15,
            }
    });
    let header = csv.lines().next() == Some("v,exact_O,est_O,std_err,lhv_bound,violated");
    (
        crossing && monotone && header,
        format!(
            "{} grid points, crossing between 0.77 and 0.78: {crossing}",
            rows.len()
        ),
    )
}

fn apparatus_soundness() -> (bool, String) {
    let mut worst = 0.0f64;
    let mut ok = true;
    for a in all_apparatuses() {
        worst = worst.max(Operator::from_columns(&a.basis).unwrap().unitarity_defect());
        let ops: Vec<Operator> = (0..3).map(|k| a.quantity_operator(k)).collect();
        ok &= commutator_norm(&ops[0], &ops[1]).unwrap() < 1e-13;
        for (d, state) in a.basis.iter().enumerate() {
            for (k, op) in ops.iter().enumerate() {
                let label = a.values(d)[k] as f64;
                let r = op
                    .apply(state)
                    .unwrap()
                    .max_abs_diff(&state.scale(C64::new(label, 0.0)))
                    .unwrap();
                worst = worst.max(r);
            }
        }
    }
    ok &= worst < 1e-12;
    (ok, format!("6 apparatuses, worst residual {worst:.2e}"))
}

fn sampling_consistency() -> (bool, String) {
    let est = estimate_O(1_000_000, 1.0, DEFAULT_SEED).unwrap();
    let worst = est
        .rows
        .iter()
        .map(|r| (r.estimate.estimate - r.exact).abs())
        .fold(0.0, f64::max);
    let signs_ok = est
        .rows
        .iter()
        .zip(verify_eigenequations())
        .all(|(r, e)| r.exact == e.eigenvalue as f64);
    let inconsistent = est.inconsistent_shots();
    let ok = worst < 5e-3 && signs_ok && inconsistent == 0;
    (
        ok,
        format!(
            "9 x 10^6 shots, worst |est - exact| = {worst:.2e}, {inconsistent} inconsistent shots"
        ),
    )
}

fn bell_discrimination() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut ok = true;
    let mut cross = 0usize;
    for (label, state) in BellLabel::ALL
        .iter()
        .zip(build_bell_states(BellBasis::PolPath))
    {
        let probs = bell_probabilities(&state).unwrap();
        ok &= (probs[label.position()] - 1.0).abs() < TOL;
        for _ in 0..10_000 {
            cross += usize::from(bell_discriminate(&state, &mut rng).unwrap() != *label);
        }
    }
    ok &= cross == 0;
    (ok, format!("4 x 10^4 shots, {cross} cross-label counts"))
}

fn qudit_relabeling() -> (bool, String) {
    let grid = qudit_relabel(&build_psi()).unwrap();
    let mut expected = [[C64::new(0.0, 0.0); 4]; 4];
    expected[0][3] = C64::new(0.5, 0.0);
    expected[1][2] = C64::new(-0.5, 0.0);
    expected[2][1] = C64::new(-0.5, 0.0);
    expected[3][0] = C64::new(0.5, 0.0);
    let ok = grid == expected;
    // also check against the qudit ket built directly
    let direct = {
        let mut amps = vec![C64::new(0.0, 0.0); 16];
        for (j, k, c) in [(0, 3, 0.5), (1, 2, -0.5), (2, 1, -0.5), (3, 0, 0.5)] {
            amps[4 * j + k] = C64::new(c, 0.0);
        }
        StateVector::new(amps).unwrap()
    };
    let same = direct == build_psi();
    (
        ok && same,
        "1/2(|0>|3> - |1>|2> - |2>|1> + |3>|0>)".to_string(),
    )
}

#[test]
fn acceptance() {
    let one = Duration::from_secs(1);
    let criteria: Vec<Criterion> = vec![
        (
            1,
            "eigenequation suite",
            Box::new(move || timed(one, eigenequations)),
        ),
        (
            2,
            "Mermin eigenvalue",
            Box::new(move || timed(one, mermin_eigenvalue)),
        ),
        (
            3,
            "LHV brute force",
            Box::new(move || timed(one, lhv_brute_force)),
        ),
        (4, "parity certificate", Box::new(parity_certificate)),
        (
            5,
            "visibility threshold (exact)",
            Box::new(move || timed(one, visibility_exact)),
        ),
        (
            5,
            "visibility threshold (sampled sweep)",
            Box::new(|| timed(Duration::from_secs(60), visibility_sampled)),
        ),
        (6, "apparatus soundness", Box::new(apparatus_soundness)),
        (
            7,
            "sampling consistency",
            Box::new(|| timed(Duration::from_secs(120), sampling_consistency)),
        ),
        (8, "Bell discrimination", Box::new(bell_discrimination)),
        (9, "qudit relabeling", Box::new(qudit_relabeling)),
    ];

    let outcomes: Vec<Outcome> = criteria
        .into_iter()
        .map(|(id, name, run)| {
            let (passed, detail) = run();
            Outcome {
                id,
                name,
                passed,
                detail,
            }
        })
        .collect();

    for o in &outcomes {
        println!(
            "[{}] AC{} {}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.detail
        );
    }
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| format!("AC{} {}", o.id, o.name))
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
