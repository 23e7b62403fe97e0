//! Acceptance suite: one test per criterion, each printing a PASS line.
//! All comparisons are exact (literal zero in rational arithmetic) at the
//! tracked valid order. Run with `--nocapture` to see the per-criterion
//! lines:
//!
//!     cargo test -p csbf-cli --test acceptance -- --nocapture

use std::path::PathBuf;
use std::process::Command;
use std::sync::{Mutex, MutexGuard};
use std::time::Instant;

use csbf_core::chern::{
    eom_residuals, interpolation_identity, q_general, splitting_check, superpotential_diffeo,
    superpotential_gauge, transgression, transgression_alt, VariableChoice,
};
use csbf_core::gauge::{covariant_d, curvature};
use csbf_core::liealg::LieAlgebraSpec;
use csbf_core::rat::rat;
use csbf_core::sample::Sampler;
use csbf_core::scenario::run_scenario_source;
use csbf_core::suite::{
    check_bianchi, check_d_squared, check_graded_leibniz, check_jacobi, check_trace_cyclic,
    identity_sources, mutated_sources, run_instance_check, run_symbolic_check, run_verify,
    SuiteConfig, SuiteKind, T_SWEEP,
};

const CAP: u32 = 4;
const SEED: u64 = 2024;

// The criteria with wall-time budgets must not contend with the other
// (CPU-heavy) criteria, so every test runs under one lock.
static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf()
}

fn both_algebras() -> [LieAlgebraSpec; 2] {
    [LieAlgebraSpec::sl2(), LieAlgebraSpec::sl3()]
}

fn source(id: &str) -> csbf_core::suite::IdentitySource {
    identity_sources()
        .into_iter()
        .find(|s| s.id == id)
        .expect("known check id")
}

#[test]
fn c01_transgression_dual_presentation() {
    let _guard = serial();
    let started = Instant::now();
    for spec in both_algebras() {
        for trial in 0..50u64 {
            let mut s = Sampler::for_trial(SEED, "acceptance_dual", trial);
            let w0 = s.connection(&spec, CAP);
            let w1 = s.connection(&spec, CAP);
            let q = transgression(&w1, &w0).unwrap();
            let q_alt = transgression_alt(&w1, &w0).unwrap();
            let (equal, _) = q.eq_at_common_order(&q_alt);
            assert!(equal, "{}: trial {trial} dual presentations differ", spec.name());
        }
    }
    let symbolic = run_symbolic_check(&source("transgression_dual")).unwrap();
    assert!(symbolic.pass, "symbolic certificate: {:?}", symbolic.certificate);
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 10, "took {elapsed:?}, budget is 10 s");
    println!("acceptance 01 (dual transgression presentations, 2x50 instances + symbolic): PASS");
}

#[test]
fn c02_transgression_antisymmetry() {
    let _guard = serial();
    for spec in both_algebras() {
        for trial in 0..50u64 {
            let mut s = Sampler::for_trial(SEED, "acceptance_antisym", trial);
            let w0 = s.connection(&spec, CAP);
            let w1 = s.connection(&spec, CAP);
            let q10 = transgression(&w1, &w0).unwrap();
            let q01 = transgression(&w0, &w1).unwrap();
            let sum = q10.add(&q01).unwrap();
            assert!(
                sum.is_zero_at(sum.valid_order()),
                "{}: trial {trial} antisymmetry fails",
                spec.name()
            );
        }
    }
    let symbolic = run_symbolic_check(&source("transgression_antisym")).unwrap();
    assert!(symbolic.pass, "symbolic certificate: {:?}", symbolic.certificate);
    println!("acceptance 02 (transgression antisymmetry, 2x50 instances + symbolic): PASS");
}

#[test]
fn c03_chern_simons_splitting() {
    let _guard = serial();
    let spec = LieAlgebraSpec::sl2();
    for trial in 0..50u64 {
        let mut s = Sampler::for_trial(SEED, "acceptance_splitting", trial);
        let w0 = s.connection(&spec, CAP);
        let w1 = s.connection(&spec, CAP);
        let q = transgression(&w1, &w0).unwrap();
        let split = splitting_check(&w1, &w0).unwrap();
        let (equal, order) = q.eq_at_common_order(&split);
        assert!(equal, "trial {trial}: splitting differs from transgression");
        assert!(order >= CAP - 2, "trial {trial}: order {order} below cap-2");
    }
    let symbolic = run_symbolic_check(&source("cs_splitting")).unwrap();
    assert!(symbolic.pass, "symbolic certificate: {:?}", symbolic.certificate);
    println!("acceptance 03 (splitting into Chern-Simons difference, 50 instances + symbolic): PASS");
}

#[test]
fn c04_interpolated_identity_family() {
    let _guard = serial();
    let spec = LieAlgebraSpec::sl2();
    for (n, d) in T_SWEEP {
        let choice = VariableChoice::from_ints(n, d).unwrap();
        for trial in 0..20u64 {
            let mut s = Sampler::for_trial(SEED, "acceptance_family", trial);
            let w0 = s.connection(&spec, CAP);
            let w1 = s.connection(&spec, CAP);
            let a = w1.difference(&w0).unwrap();
            let [e1, e2, e3] = interpolation_identity(&w0, &w1, &choice).unwrap();
            let order = e1.valid_order().min(e2.valid_order()).min(e3.valid_order());
            assert!(
                e1.eq_at(&e2, order) && e2.eq_at(&e3, order),
                "t = {n}/{d}, trial {trial}: three-way identity fails"
            );
            let wt = w0.shifted(choice.t(), &a).unwrap();
            let q = transgression(&w1, &w0).unwrap();
            let qt = q_general(&wt, &a, &choice).unwrap();
            let (equal, _) = q.eq_at_common_order(&qt);
            assert!(equal, "t = {n}/{d}, trial {trial}: general Lagrangian differs");
        }
        // Symbolic certification at this exact parameter value.
        for id in ["interpolated_identity", "interpolated_lagrangian"] {
            let src = source(id);
            let lhs = csbf_core::dsl::parse(src.lhs).unwrap();
            let rhs = csbf_core::dsl::parse(src.rhs).unwrap();
            let verdict = csbf_core::symdga::verify_identity(&lhs, &rhs, &rat(n, d)).unwrap();
            assert!(verdict.pass, "{id} fails symbolically at t = {n}/{d}");
        }
    }
    println!("acceptance 04 (interpolated identity family, 5 parameter values x 20 instances + symbolic): PASS");
}

#[test]
fn c05_equations_of_motion_on_flat_pairs() {
    let _guard = serial();
    let spec = LieAlgebraSpec::sl2();
    for trial in 0..20u64 {
        let mut s = Sampler::for_trial(SEED, "acceptance_eom", trial);
        let w0 = s.flat_connection(&spec, CAP);
        let w1 = s.flat_connection(&spec, CAP);
        let a = w1.difference(&w0).unwrap();
        for (n, d) in T_SWEEP {
            let choice = VariableChoice::from_ints(n, d).unwrap();
            let wt = w0.shifted(choice.t(), &a).unwrap();
            let res = eom_residuals(&wt, &a, &choice).unwrap();
            assert!(res.both_vanish(), "trial {trial}, t = {n}/{d}: residuals nonzero");
            if (n, d) == (1, 2) {
                // The average-connection equations, written out directly.
                let direct_curv = curvature(&wt)
                    .unwrap()
                    .add(&a.wedge(&a).unwrap().scale(&rat(1, 4)))
                    .unwrap();
                let direct_cov = covariant_d(&wt, &a).unwrap();
                let order = res.valid_order();
                assert!(res.r_curv.eq_at(&direct_curv, order), "trial {trial}: curvature residual form");
                assert!(res.r_cov.eq_at(&direct_cov, order), "trial {trial}: covariant residual form");
                assert!(direct_curv.is_zero_at(order) && direct_cov.is_zero_at(order));
            }
        }
    }
    println!("acceptance 05 (equations of motion vanish on 20 flat pairs across 5 parameter values): PASS");
}

#[test]
fn c06_worked_value_matches_committed_golden_and_oracle() {
    let _guard = serial();
    let root = repo_root();
    let golden_path = root.join("goldens/worked_sl2.golden");
    let golden = std::fs::read_to_string(&golden_path).expect("committed golden");
    // The standalone oracle regenerates the golden byte-for-byte.
    let oracle = Command::new(env!("CARGO_BIN_EXE_worked-oracle"))
        .output()
        .expect("oracle runs");
    assert!(oracle.status.success());
    assert_eq!(
        String::from_utf8(oracle.stdout).unwrap(),
        golden,
        "committed golden is stale; regenerate with the worked-oracle binary"
    );
    // The engine reproduces the golden values through the scenario path.
    let src = std::fs::read_to_string(root.join("scenarios/worked_sl2.scn")).unwrap();
    let report = run_scenario_source("worked_sl2", &src).unwrap();
    assert!(report.all_passed(), "{}", report.to_text());
    for line in golden.lines() {
        let (id, expected) = line.split_once(" = ").expect("golden line layout");
        let record = report
            .checks
            .iter()
            .find(|c| c.id == id)
            .unwrap_or_else(|| panic!("scenario lacks eval '{id}'"));
        assert_eq!(record.value.as_deref(), Some(expected), "value of {id}");
    }
    println!("acceptance 06 (worked sl2 values match the oracle-generated golden): PASS");
}

#[test]
fn c07_superpotential_invariance() {
    let _guard = serial();
    let spec = LieAlgebraSpec::sl2();
    for trial in 0..20u64 {
        let mut s = Sampler::for_trial(SEED, "acceptance_superpotential", trial);
        let w0 = s.connection(&spec, CAP);
        let w1 = s.connection(&spec, CAP);
        let chi = s.lie_matrix(&spec, CAP);
        let xi = s.vector_field(CAP);
        let a = w1.difference(&w0).unwrap();
        // U(chi) never references the variable choice; recomputing the
        // tensorial form after any reparametrization gives the same 1-form.
        let u_ref = superpotential_gauge(&a, &chi).unwrap();
        for (n, d) in T_SWEEP {
            let t = rat(n, d);
            let wt = w0.shifted(&t, &a).unwrap();
            let back1 = wt.form().add(&a.scale(&(rat(1, 1) - t.clone()))).unwrap();
            let back0 = wt.form().sub(&a.scale(&t)).unwrap();
            let u = superpotential_gauge(&back1.sub(&back0).unwrap(), &chi).unwrap();
            let (equal, _) = u_ref.eq_at_common_order(&u);
            assert!(equal, "trial {trial}, t = {n}/{d}: U(chi) changed");
        }
        // U(xi) through the change of variables at t = 0, 1/2, 1.
        let mut reference = None;
        for (n, d) in [(0i64, 1i64), (1, 2), (1, 1)] {
            let choice = VariableChoice::from_ints(n, d).unwrap();
            let wt = w0.shifted(choice.t(), &a).unwrap();
            let u = superpotential_diffeo(&a, &wt, &choice, &xi).unwrap();
            match &reference {
                None => reference = Some(u),
                Some(prev) => {
                    let (equal, _) = prev.eq_at_common_order(&u);
                    assert!(equal, "trial {trial}, t = {n}/{d}: U(xi) changed");
                }
            }
        }
    }
    println!("acceptance 07 (superpotentials invariant across presentations, 20 instances): PASS");
}

#[test]
fn c08_structural_suites() {
    let _guard = serial();
    let spec = LieAlgebraSpec::sl2();
    let trials = 100;
    for (name, outcome) in [
        ("d^2 = 0", check_d_squared(&spec, CAP, SEED, trials)),
        ("graded Leibniz", check_graded_leibniz(&spec, CAP, SEED, trials)),
        ("Bianchi", check_bianchi(&spec, CAP, SEED, trials)),
        ("trace graded-cyclicity", check_trace_cyclic(&spec, CAP, SEED, trials)),
        ("Jacobi", check_jacobi(&spec, CAP, SEED, trials)),
    ] {
        assert!(outcome.pass, "{name}: {:?}", outcome.certificate);
    }
    println!("acceptance 08 (structural laws on 100 random values each): PASS");
}

#[test]
fn c09_mutation_sensitivity() {
    let _guard = serial();
    let spec = LieAlgebraSpec::sl2();
    let mutations = mutated_sources();
    assert_eq!(mutations.len(), 6);
    for source in mutations {
        let symbolic = run_symbolic_check(&source).unwrap();
        assert!(!symbolic.pass, "{}: mutation passed symbolically", source.id);
        assert!(
            symbolic.certificate.is_some(),
            "{}: no certificate on symbolic failure",
            source.id
        );
        let instance = run_instance_check(&source, &spec, CAP, SEED, 5).unwrap();
        assert!(!instance.pass, "{}: mutation passed on all concrete instances", source.id);
    }
    println!("acceptance 09 (6 seeded mutations refuted symbolically and concretely): PASS");
}

#[test]
fn c10_determinism_and_wall_time() {
    let _guard = serial();
    // Byte-identical JSON across binary invocations with one seed.
    let run = |args: &[&str]| {
        let out = Command::new(env!("CARGO_BIN_EXE_csbf"))
            .args(args)
            .output()
            .expect("binary runs");
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let args = [
        "verify", "--suite", "all", "--seed", "9", "--trials", "6", "--format", "json",
        "--no-timing",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first, second, "reports differ across runs with the same seed");
    // Full suite at default parameters stays under the wall-time budget.
    let started = Instant::now();
    let cfg = SuiteConfig { suite: SuiteKind::All, seed: 9, ..SuiteConfig::default() };
    let report = run_verify(&cfg).unwrap();
    assert!(report.all_passed(), "{}", report.to_text());
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "full suite took {elapsed:?}, budget is 60 s");
    println!(
        "acceptance 10 (byte-identical seeded reports; full suite in {:.1} s < 60 s): PASS",
        elapsed.as_secs_f64()
    );
}
