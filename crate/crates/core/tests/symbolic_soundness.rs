//! Cross-checks between the two backends: whatever the symbolic
//! normalizer proves must hold on random concrete instances, and whatever
//! it refutes must fail on at least one concrete instance.

use csbf_core::dsl::parse;
use csbf_core::eval::{compare, eval, Env, Value};
use csbf_core::liealg::LieAlgebraSpec;
use csbf_core::rat::Rat;
use csbf_core::sample::Sampler;
use csbf_core::suite::{identity_sources, mutated_sources, run_symbolic_check, IdentitySource};
use csbf_core::symdga;

const CAP: u32 = 4;
const INSTANCES: u32 = 20;

fn t_values(source: &IdentitySource) -> Vec<Rat> {
    if source.sweep_t {
        csbf_core::suite::t_sweep()
    } else {
        vec![Rat::from_integer(0.into())]
    }
}

/// Evaluates one source on `INSTANCES` random pairs; returns true when
/// every instance satisfied it.
fn holds_on_instances(source: &IdentitySource, spec: &LieAlgebraSpec, seed: u64) -> bool {
    let lhs = parse(source.lhs).unwrap();
    let rhs = parse(source.rhs).unwrap();
    for trial in 0..INSTANCES {
        let mut sampler = Sampler::for_trial(seed, source.id, u64::from(trial));
        let w0 = sampler.connection(spec, CAP);
        let w1 = sampler.connection(spec, CAP);
        for t in t_values(source) {
            let mut env = Env::new(spec.clone(), CAP).with_t(t);
            env.bind("w0", Value::Matrix(w0.form().clone()));
            env.bind("w1", Value::Matrix(w1.form().clone()));
            let l = eval(&lhs, &env).unwrap();
            let r = eval(&rhs, &env).unwrap();
            if !compare(&l, &r, &env).unwrap().equal {
                return false;
            }
        }
    }
    true
}

#[test]
fn symbolic_passes_hold_concretely() {
    let spec = LieAlgebraSpec::sl2();
    for source in identity_sources() {
        let symbolic = run_symbolic_check(&source).unwrap();
        assert!(symbolic.pass, "{} failed symbolically", source.id);
        assert!(
            holds_on_instances(&source, &spec, 101),
            "{} passed symbolically but failed concretely",
            source.id
        );
    }
}

#[test]
fn symbolic_failures_fail_concretely() {
    let spec = LieAlgebraSpec::sl2();
    for source in mutated_sources() {
        let symbolic = run_symbolic_check(&source).unwrap();
        assert!(!symbolic.pass, "{} passed symbolically", source.id);
        assert!(
            symbolic.certificate.is_some(),
            "{} failed without a certificate",
            source.id
        );
        assert!(
            !holds_on_instances(&source, &spec, 202),
            "{} was refuted symbolically but held on every concrete instance",
            source.id
        );
    }
}

#[test]
fn evaluator_agrees_with_dedicated_functionals() {
    // The expression route and the direct functional route compute the
    // transgression identically on random pairs.
    let spec = LieAlgebraSpec::sl2();
    let src = parse(
        "tr(2*F(w0)^(w1 - w0) + D(w0; w1 - w0)^(w1 - w0) + (2/3)*((w1 - w0)^(w1 - w0)^(w1 - w0)))",
    )
    .unwrap();
    for trial in 0..10u64 {
        let mut sampler = Sampler::for_trial(77, "cross_route", trial);
        let w0 = sampler.connection(&spec, CAP);
        let w1 = sampler.connection(&spec, CAP);
        let mut env = Env::new(spec.clone(), CAP);
        env.bind("w0", Value::Matrix(w0.form().clone()));
        env.bind("w1", Value::Matrix(w1.form().clone()));
        let via_eval = match eval(&src, &env).unwrap() {
            Value::Scalar(s) => s,
            other => panic!("expected scalar form, got {other:?}"),
        };
        let direct = csbf_core::chern::transgression(&w1, &w0).unwrap();
        let (equal, _) = via_eval.eq_at_common_order(&direct);
        assert!(equal, "trial {trial}: expression route differs from functional route");
    }
}

#[test]
fn parameter_sweep_certifies_quadratic_dependence() {
    // The swept identities are at most quadratic in the parameter, so
    // five exact points pin them down; each point passes independently.
    for source in identity_sources().iter().filter(|s| s.sweep_t) {
        let lhs = parse(source.lhs).unwrap();
        let rhs = parse(source.rhs).unwrap();
        for t in csbf_core::suite::t_sweep() {
            let verdict = symdga::verify_identity(&lhs, &rhs, &t).unwrap();
            assert!(verdict.pass, "{} failed at t = {}", source.id, t);
        }
    }
}
