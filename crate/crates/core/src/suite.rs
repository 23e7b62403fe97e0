//! Built-in verification suites.
//!
//! Eight identity checks are written once as expression sources and run
//! through two independent backends: the symbolic normalizer (universal
//! proof) and the concrete evaluator on randomized instances. The
//! instance suite adds coded checks that need constructions outside the
//! expression language (flat-connection factories, contraction sweeps,
//! structural laws).

use std::time::Instant;

use num_traits::One;
use thiserror::Error;

use crate::chern::{
    eom_residuals, superpotential_diffeo, superpotential_gauge, VariableChoice,
};
use crate::dsl::{parse, Ast};
use crate::eval::{compare, eval, Env, Value};
use crate::gauge::{covariant_d, curvature};
use crate::liealg::LieAlgebraSpec;
use crate::rat::{fmt_rat, rat, Rat};
use crate::report::{Backend, CheckRecord, Report, Verdict};
use crate::sample::Sampler;
use crate::symdga;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum SuiteError {
    #[error("cap too small for splitting check (needs >= 3)")]
    CapTooSmall,
    #[error("unknown suite '{0}' (expected symbolic, instance, or all)")]
    UnknownSuite(String),
    #[error(transparent)]
    Algebra(#[from] crate::liealg::AlgebraError),
    #[error("internal expression failed to parse: {0}")]
    SourceParse(String),
    #[error("evaluation failed in '{check}': {message}")]
    Eval { check: String, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteKind {
    Symbolic,
    Instance,
    All,
}

impl SuiteKind {
    pub fn parse(s: &str) -> Result<SuiteKind, SuiteError> {
        match s {
            "symbolic" => Ok(SuiteKind::Symbolic),
            "instance" => Ok(SuiteKind::Instance),
            "all" => Ok(SuiteKind::All),
            other => Err(SuiteError::UnknownSuite(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::Symbolic => "symbolic",
            SuiteKind::Instance => "instance",
            SuiteKind::All => "all",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub suite: SuiteKind,
    pub seed: u64,
    pub trials: u32,
    pub cap: u32,
    pub algebra: String,
    pub timing: bool,
}

impl Default for SuiteConfig {
    fn default() -> SuiteConfig {
        SuiteConfig {
            suite: SuiteKind::All,
            seed: 0,
            trials: 20,
            cap: 4,
            algebra: "sl2".to_string(),
            timing: false,
        }
    }
}

/// Exact parameter values used wherever a check sweeps the interpolation
/// parameter. Five points certify identities that are at most quadratic
/// in the parameter.
pub const T_SWEEP: [(i64, i64); 5] = [(0, 1), (1, 5), (1, 2), (4, 5), (1, 1)];

/// Parameter values for the superpotential reparametrization check.
pub const T_ENDPOINTS: [(i64, i64); 3] = [(0, 1), (1, 2), (1, 1)];

pub fn t_sweep() -> Vec<Rat> {
    T_SWEEP.iter().map(|&(n, d)| rat(n, d)).collect()
}

/// One identity written as two expression sources over the free symbols
/// w0, w1 (and t where swept). Both backends consume the same sources.
#[derive(Clone, Copy, Debug)]
pub struct IdentitySource {
    pub id: &'static str,
    pub lhs: &'static str,
    pub rhs: &'static str,
    /// Sweep the interpolation parameter over `T_SWEEP`.
    pub sweep_t: bool,
}

const Q_BASE: &str = "tr(2*F(w0)^(w1 - w0) + D(w0; w1 - w0)^(w1 - w0) + (2/3)*((w1 - w0)^(w1 - w0)^(w1 - w0)))";

/// The eight identity checks of the symbolic suite, in report order.
pub fn identity_sources() -> [IdentitySource; 8] {
    [
        IdentitySource {
            id: "transgression_dual",
            lhs: Q_BASE,
            rhs: "tr(2*F(w1)^(w1 - w0) - D(w1; w1 - w0)^(w1 - w0) + (2/3)*((w1 - w0)^(w1 - w0)^(w1 - w0)))",
            sweep_t: false,
        },
        IdentitySource {
            id: "transgression_antisym",
            lhs: "tr(2*F(w0)^(w1 - w0) + D(w0; w1 - w0)^(w1 - w0) + (2/3)*((w1 - w0)^(w1 - w0)^(w1 - w0))) \
                  + tr(2*F(w1)^(w0 - w1) + D(w1; w0 - w1)^(w0 - w1) + (2/3)*((w0 - w1)^(w0 - w1)^(w0 - w1)))",
            rhs: "0",
            sweep_t: false,
        },
        IdentitySource {
            id: "cs_splitting",
            lhs: Q_BASE,
            rhs: "tr(F(w1)^w1 - (1/3)*(w1^w1^w1)) - tr(F(w0)^w0 - (1/3)*(w0^w0^w0)) + d(tr(w0^w1))",
            sweep_t: false,
        },
        IdentitySource {
            id: "two_connection_identity",
            lhs: "2*F(w0) + D(w0; w1 - w0)",
            rhs: "F(w0) + F(w1) - (w1 - w0)^(w1 - w0)",
            sweep_t: false,
        },
        IdentitySource {
            id: "bf_average_form",
            lhs: Q_BASE,
            rhs: "2*tr(F(w0 + (1/2)*(w1 - w0))^(w1 - w0) + (1/12)*((w1 - w0)^(w1 - w0)^(w1 - w0)))",
            sweep_t: false,
        },
        IdentitySource {
            id: "interpolated_identity",
            lhs: "2*F(w1) - D(w1; w1 - w0)",
            rhs: "2*F(w0 + t*(w1 - w0)) - 2*t*(1 - t)*((w1 - w0)^(w1 - w0)) - (2*t - 1)*D(w0 + t*(w1 - w0); w1 - w0)",
            sweep_t: true,
        },
        IdentitySource {
            id: "interpolated_lagrangian",
            lhs: Q_BASE,
            rhs: "2*tr(F(w0 + t*(w1 - w0))^(w1 - w0) - (t - 1/2)*(D(w0 + t*(w1 - w0); w1 - w0)^(w1 - w0)) + (1/3 - t + t*t)*((w1 - w0)^(w1 - w0)^(w1 - w0)))",
            sweep_t: true,
        },
        IdentitySource {
            id: "affine_reparam",
            lhs: "t*w1 + (t - 1)*w0",
            rhs: "(2*t - 1)*(w0 + t*(w1 - w0)) + 2*t*(1 - t)*(w1 - w0)",
            sweep_t: true,
        },
    ]
}

/// Seeded single-coefficient mutations of the splitting, average-form,
/// and general-parameter identities. Every one must fail symbolically and
/// on concrete instances; they guard the suites against vacuous passes.
pub fn mutated_sources() -> [IdentitySource; 6] {
    [
        IdentitySource {
            id: "mutation_splitting_sign",
            lhs: Q_BASE,
            rhs: "tr(F(w1)^w1 - (1/3)*(w1^w1^w1)) - tr(F(w0)^w0 - (1/3)*(w0^w0^w0)) - d(tr(w0^w1))",
            sweep_t: false,
        },
        IdentitySource {
            id: "mutation_splitting_cubic",
            lhs: Q_BASE,
            rhs: "tr(F(w1)^w1 - (1/4)*(w1^w1^w1)) - tr(F(w0)^w0 - (1/3)*(w0^w0^w0)) + d(tr(w0^w1))",
            sweep_t: false,
        },
        IdentitySource {
            id: "mutation_average_twelfth",
            lhs: Q_BASE,
            rhs: "2*tr(F(w0 + (1/2)*(w1 - w0))^(w1 - w0) + (1/6)*((w1 - w0)^(w1 - w0)^(w1 - w0)))",
            sweep_t: false,
        },
        IdentitySource {
            id: "mutation_average_prefactor",
            lhs: Q_BASE,
            rhs: "3*tr(F(w0 + (1/2)*(w1 - w0))^(w1 - w0) + (1/12)*((w1 - w0)^(w1 - w0)^(w1 - w0)))",
            sweep_t: false,
        },
        IdentitySource {
            id: "mutation_general_mid",
            lhs: Q_BASE,
            rhs: "2*tr(F(w0 + t*(w1 - w0))^(w1 - w0) - (t - 1/3)*(D(w0 + t*(w1 - w0); w1 - w0)^(w1 - w0)) + (1/3 - t + t*t)*((w1 - w0)^(w1 - w0)^(w1 - w0)))",
            sweep_t: true,
        },
        IdentitySource {
            id: "mutation_general_cubic",
            lhs: Q_BASE,
            rhs: "2*tr(F(w0 + t*(w1 - w0))^(w1 - w0) - (t - 1/2)*(D(w0 + t*(w1 - w0); w1 - w0)^(w1 - w0)) + (1/3 + t + t*t)*((w1 - w0)^(w1 - w0)^(w1 - w0)))",
            sweep_t: true,
        },
    ]
}

/// Outcome of one check before packaging into a report record.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub pass: bool,
    pub valid_order: Option<u32>,
    pub certificate: Option<String>,
}

impl CheckOutcome {
    fn pass() -> CheckOutcome {
        CheckOutcome { pass: true, valid_order: None, certificate: None }
    }

    fn fail(certificate: String) -> CheckOutcome {
        CheckOutcome { pass: false, valid_order: None, certificate: Some(certificate) }
    }

    fn merge_order(&mut self, order: Option<u32>) {
        self.valid_order = match (self.valid_order, order) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }
}

fn parse_source(src: &str) -> Result<Ast, SuiteError> {
    parse(src).map_err(|e| SuiteError::SourceParse(e.to_string()))
}

fn source_t_values(source: &IdentitySource) -> Vec<Rat> {
    if source.sweep_t {
        t_sweep()
    } else {
        vec![Rat::from_integer(0.into())]
    }
}

/// Symbolic verification of one identity source at every parameter value.
pub fn run_symbolic_check(source: &IdentitySource) -> Result<CheckOutcome, SuiteError> {
    let lhs = parse_source(source.lhs)?;
    let rhs = parse_source(source.rhs)?;
    for t in source_t_values(source) {
        let verdict = symdga::verify_identity(&lhs, &rhs, &t).map_err(|e| SuiteError::Eval {
            check: source.id.to_string(),
            message: e.to_string(),
        })?;
        if !verdict.pass {
            return Ok(CheckOutcome::fail(
                verdict.certificate.unwrap_or_else(|| "nonzero normal form".to_string()),
            ));
        }
    }
    Ok(CheckOutcome::pass())
}

fn uses_param(ast: &Ast) -> bool {
    match ast {
        Ast::TParam => true,
        Ast::Rational(_) | Ast::Coord(_) | Ast::Covector(_) | Ast::Sym(..) => false,
        Ast::Neg(a) | Ast::ExteriorD(a) | Ast::Trace(a) | Ast::Curvature(a) => uses_param(a),
        Ast::Add(a, b)
        | Ast::Sub(a, b)
        | Ast::ScalarMul(a, b)
        | Ast::Wedge(a, b)
        | Ast::Bracket(a, b)
        | Ast::CovariantD(a, b)
        | Ast::Contract(a, b) => uses_param(a) || uses_param(b),
        Ast::VecField(a, b, c) => uses_param(a) || uses_param(b) || uses_param(c),
    }
}

/// Instance verification of one identity source on `trials` random
/// connection pairs.
pub fn run_instance_check(
    source: &IdentitySource,
    spec: &LieAlgebraSpec,
    cap: u32,
    seed: u64,
    trials: u32,
) -> Result<CheckOutcome, SuiteError> {
    let lhs = parse_source(source.lhs)?;
    let rhs = parse_source(source.rhs)?;
    let eval_err = |e: crate::eval::EvalError| SuiteError::Eval {
        check: source.id.to_string(),
        message: e.to_string(),
    };
    let mut outcome = CheckOutcome::pass();
    for trial in 0..trials {
        let mut sampler = Sampler::for_trial(seed, source.id, u64::from(trial));
        let w0 = sampler.connection(spec, cap);
        let w1 = sampler.connection(spec, cap);
        let mut env = Env::new(spec.clone(), cap);
        env.bind("w0", Value::Matrix(w0.form().clone()));
        env.bind("w1", Value::Matrix(w1.form().clone()));
        // Sides that never mention the parameter are evaluated once per
        // trial, not once per swept value.
        let fixed_lhs = (!uses_param(&lhs))
            .then(|| eval(&lhs, &env))
            .transpose()
            .map_err(eval_err)?;
        let fixed_rhs = (!uses_param(&rhs))
            .then(|| eval(&rhs, &env))
            .transpose()
            .map_err(eval_err)?;
        for t in source_t_values(source) {
            env.t = Some(t.clone());
            let l = match &fixed_lhs {
                Some(v) => v.clone(),
                None => eval(&lhs, &env).map_err(eval_err)?,
            };
            let r = match &fixed_rhs {
                Some(v) => v.clone(),
                None => eval(&rhs, &env).map_err(eval_err)?,
            };
            let cmp = compare(&l, &r, &env).map_err(eval_err)?;
            outcome.merge_order(cmp.valid_order);
            if !cmp.equal {
                outcome.pass = false;
                outcome.certificate = Some(format!(
                    "trial {trial}, t = {}: {}",
                    fmt_rat(&t),
                    cmp.difference.unwrap_or_else(|| "difference".to_string())
                ));
                return Ok(outcome);
            }
        }
    }
    Ok(outcome)
}

fn fail_at(trial: u32, t: Option<&Rat>, what: &str) -> CheckOutcome {
    let mut msg = format!("trial {trial}");
    if let Some(t) = t {
        msg.push_str(&format!(", t = {}", fmt_rat(t)));
    }
    msg.push_str(": ");
    msg.push_str(what);
    CheckOutcome::fail(msg)
}

/// Reconstructing w0 = wt - t a and w1 = wt + (1-t) a recovers the
/// originals exactly, at every swept parameter.
pub fn check_inverse_change(
    spec: &LieAlgebraSpec,
    cap: u32,
    seed: u64,
    trials: u32,
) -> CheckOutcome {
    let mut outcome = CheckOutcome::pass();
    for trial in 0..trials {
        let mut s = Sampler::for_trial(seed, "inverse_change_of_variables", u64::from(trial));
        let w0 = s.connection(spec, cap);
        let w1 = s.connection(spec, cap);
        let a = w1.difference(&w0).expect("sizes match");
        for t in t_sweep() {
            let wt = w0.shifted(&t, &a).expect("degree 1");
            let back0 = wt.form().sub(&a.scale(&t)).expect("degree 1");
            let back1 = wt
                .form()
                .add(&a.scale(&(Rat::one() - t.clone())))
                .expect("degree 1");
            outcome.merge_order(Some(cap));
            if !back0.eq_at(w0.form(), cap) || !back1.eq_at(w1.form(), cap) {
                return fail_at(trial, Some(&t), "reconstruction differs");
            }
        }
    }
    outcome
}

/// Curvature of the interpolated connection matches
/// t F(w1) + (1-t) F(w0) - t(1-t) a^a at every swept parameter.
pub fn check_curvature_interpolation(
    spec: &LieAlgebraSpec,
    cap: u32,
    seed: u64,
    trials: u32,
) -> CheckOutcome {
    let mut outcome = CheckOutcome::pass();
    for trial in 0..trials {
        let mut s = Sampler::for_trial(seed, "curvature_interpolation", u64::from(trial));
        let w0 = s.connection(spec, cap);
        let w1 = s.connection(spec, cap);
        let a = w1.difference(&w0).expect("sizes match");
        let om0 = curvature(&w0).expect("order");
        let om1 = curvature(&w1).expect("order");
        let asq = a.wedge(&a).expect("sizes match");
        for t in t_sweep() {
            let wt = w0.shifted(&t, &a).expect("degree 1");
            let lhs = curvature(&wt).expect("order");
            let rhs = crate::forms::scale_add(&t, &om1, &(Rat::one() - t.clone()), &om0)
                .expect("degree")
                .sub(&asq.scale(&(t.clone() * (Rat::one() - t.clone()))))
                .expect("degree");
            let order = lhs.valid_order().min(rhs.valid_order());
            outcome.merge_order(Some(order));
            if !lhs.eq_at(&rhs, order) {
                return fail_at(trial, Some(&t), "interpolated curvature differs");
            }
        }
    }
    outcome
}

/// On pure-gauge pairs both equation-of-motion residuals vanish for every
/// swept parameter; the t = 1/2 slice is additionally checked against the
/// average-connection equations written out directly.
pub fn check_eom_flat_pair(
    spec: &LieAlgebraSpec,
    cap: u32,
    seed: u64,
    trials: u32,
) -> CheckOutcome {
    let mut outcome = CheckOutcome::pass();
    for trial in 0..trials {
        let mut s = Sampler::for_trial(seed, "eom_flat_pair", u64::from(trial));
        let w0 = s.flat_connection(spec, cap);
        let w1 = s.flat_connection(spec, cap);
        let a = w1.difference(&w0).expect("sizes match");
        for t in t_sweep() {
            let choice = VariableChoice::new(t.clone()).expect("swept t is in range");
            let wt = w0.shifted(&t, &a).expect("degree 1");
            let res = eom_residuals(&wt, &a, &choice).expect("order");
            outcome.merge_order(Some(res.valid_order()));
            if !res.both_vanish() {
                return fail_at(trial, Some(&t), "residuals do not vanish on a flat pair");
            }
            if t == rat(1, 2) {
                let direct_curv = curvature(&wt)
                    .expect("order")
                    .add(&a.wedge(&a).expect("size").scale(&rat(1, 4)))
                    .expect("degree");
                let direct_cov = covariant_d(&wt, &a).expect("order");
                let order = res.valid_order();
                if !res.r_curv.eq_at(&direct_curv, order) || !res.r_cov.eq_at(&direct_cov, order)
                {
                    return fail_at(
                        trial,
                        Some(&t),
                        "average-connection residuals disagree with the direct expressions",
                    );
                }
            }
        }
    }
    outcome
}

/// Random (generically non-flat) inputs must produce a nonzero residual
/// in at least one trial, guarding the vanishing checks against vacuity.
pub fn check_eom_generic_nonvanishing(
    spec: &LieAlgebraSpec,
    cap: u32,
    seed: u64,
    trials: u32,
) -> CheckOutcome {
    let mut found = false;
    let mut order_seen = None;
    for trial in 0..trials {
        let mut s = Sampler::for_trial(seed, "eom_generic_nonvanishing", u64::from(trial));
        let w0 = s.connection(spec, cap);
        let w1 = s.connection(spec, cap);
        let a = w1.difference(&w0).expect("sizes match");
        let choice = VariableChoice::average();
        let wt = w0.shifted(choice.t(), &a).expect("degree 1");
        let res = eom_residuals(&wt, &a, &choice).expect("order");
        order_seen = Some(res.valid_order());
        if !res.both_vanish() {
            found = true;
            break;
        }
    }
    CheckOutcome {
        pass: found,
        valid_order: order_seen,
        certificate: (!found)
            .then(|| "all random instances satisfied the equations of motion".to_string()),
    }
}

/// U(chi) depends only on the tensorial form: recomputing it after the
/// change of variables at any swept parameter gives the same 1-form.
pub fn check_superpotential_gauge(
    spec: &LieAlgebraSpec,
    cap: u32,
    seed: u64,
    trials: u32,
) -> CheckOutcome {
    let mut outcome = CheckOutcome::pass();
    for trial in 0..trials {
        let mut s = Sampler::for_trial(seed, "superpotential_gauge_invariance", u64::from(trial));
        let w0 = s.connection(spec, cap);
        let w1 = s.connection(spec, cap);
        let chi = s.lie_matrix(spec, cap);
        let a = w1.difference(&w0).expect("sizes match");
        let reference = superpotential_gauge(&a, &chi).expect("sizes match");
        for t in t_sweep() {
            let wt = w0.shifted(&t, &a).expect("degree 1");
            let back1 = wt
                .form()
                .add(&a.scale(&(Rat::one() - t.clone())))
                .expect("degree");
            let back0 = wt.form().sub(&a.scale(&t)).expect("degree");
            let a_again = back1.sub(&back0).expect("degree");
            let u = superpotential_gauge(&a_again, &chi).expect("sizes match");
            let (equal, order) = reference.eq_at_common_order(&u);
            outcome.merge_order(Some(order));
            if !equal {
                return fail_at(trial, Some(&t), "gauge superpotential changed under reparametrization");
            }
        }
    }
    outcome
}

/// U(xi) evaluated through the change of variables at t = 0, 1/2, 1 with
/// the same underlying pair yields one and the same 1-form.
pub fn check_superpotential_diffeo(
    spec: &LieAlgebraSpec,
    cap: u32,
    seed: u64,
    trials: u32,
) -> CheckOutcome {
    let mut outcome = CheckOutcome::pass();
    for trial in 0..trials {
        let mut s = Sampler::for_trial(seed, "superpotential_diffeo_invariance", u64::from(trial));
        let w0 = s.connection(spec, cap);
        let w1 = s.connection(spec, cap);
        let xi = s.vector_field(cap);
        let a = w1.difference(&w0).expect("sizes match");
        let mut reference: Option<crate::forms::ScalarForm> = None;
        for (n, d) in T_ENDPOINTS {
            let choice = VariableChoice::from_ints(n, d).expect("in range");
            let wt = w0.shifted(choice.t(), &a).expect("degree 1");
            let u = superpotential_diffeo(&a, &wt, &choice, &xi).expect("sizes match");
            match &reference {
                None => reference = Some(u),
                Some(prev) => {
                    let (equal, order) = prev.eq_at_common_order(&u);
                    outcome.merge_order(Some(order));
                    if !equal {
                        return fail_at(
                            trial,
                            Some(choice.t()),
                            "diffeomorphism superpotential depends on the parameter",
                        );
                    }
                }
            }
        }
    }
    outcome
}

/// d(d(A)) = 0 on random forms of every degree.
pub fn check_d_squared(spec: &LieAlgebraSpec, cap: u32, seed: u64, trials: u32) -> CheckOutcome {
    let mut outcome = CheckOutcome::pass();
    for trial in 0..trials {
        let mut s = Sampler::for_trial(seed, "d_squared_zero", u64::from(trial));
        let degree = (trial % 4) as u8;
        let a = s.gform(spec, degree, cap);
        let dda = a
            .exterior_d()
            .and_then(|da| da.exterior_d())
            .expect("cap is at least 2");
        let order = dda.valid_order();
        outcome.merge_order(Some(order));
        if !dda.is_zero_at(order) {
            return fail_at(trial, None, "d^2 did not vanish");
        }
    }
    outcome
}

const LEIBNIZ_DEGREES: [(u8, u8); 8] =
    [(0, 0), (0, 1), (1, 0), (1, 1), (1, 2), (2, 1), (0, 2), (2, 0)];

/// d(A^B) = dA^B + (-1)^{deg A} A^dB.
pub fn check_graded_leibniz(
    spec: &LieAlgebraSpec,
    cap: u32,
    seed: u64,
    trials: u32,
) -> CheckOutcome {
    let mut outcome = CheckOutcome::pass();
    for trial in 0..trials {
        let mut s = Sampler::for_trial(seed, "graded_leibniz", u64::from(trial));
        let (p, q) = LEIBNIZ_DEGREES[trial as usize % LEIBNIZ_DEGREES.len()];
        let a = s.gform(spec, p, cap);
        let b = s.gform(spec, q, cap);
        let lhs = a.wedge(&b).expect("size").exterior_d().expect("order");
        let mut rhs = a
            .exterior_d()
            .expect("order")
            .wedge(&b)
            .expect("size");
        let second = a.wedge(&b.exterior_d().expect("order")).expect("size");
        rhs = if p % 2 == 1 {
            rhs.sub(&second).expect("degree")
        } else {
            rhs.add(&second).expect("degree")
        };
        let order = lhs.valid_order().min(rhs.valid_order());
        outcome.merge_order(Some(order));
        if !lhs.eq_at(&rhs, order) {
            return fail_at(trial, None, &format!("Leibniz failed on degrees ({p}, {q})"));
        }
    }
    outcome
}

/// Bianchi identity: the covariant derivative of the curvature vanishes.
pub fn check_bianchi(spec: &LieAlgebraSpec, cap: u32, seed: u64, trials: u32) -> CheckOutcome {
    let mut outcome = CheckOutcome::pass();
    for trial in 0..trials {
        let mut s = Sampler::for_trial(seed, "bianchi_identity", u64::from(trial));
        let w = s.connection(spec, cap);
        let omega = curvature(&w).expect("order");
        let dw_omega = covariant_d(&w, &omega).expect("order");
        let order = dw_omega.valid_order();
        outcome.merge_order(Some(order));
        if !dw_omega.is_zero_at(order) {
            return fail_at(trial, None, "Bianchi identity failed");
        }
    }
    outcome
}

/// Graded cyclicity of the trace: tr(A^B) = (-1)^{pq} tr(B^A).
pub fn check_trace_cyclic(
    spec: &LieAlgebraSpec,
    cap: u32,
    seed: u64,
    trials: u32,
) -> CheckOutcome {
    let mut outcome = CheckOutcome::pass();
    for trial in 0..trials {
        let mut s = Sampler::for_trial(seed, "trace_graded_cyclic", u64::from(trial));
        let (p, q) = LEIBNIZ_DEGREES[trial as usize % LEIBNIZ_DEGREES.len()];
        let a = s.gform(spec, p, cap);
        let b = s.gform(spec, q, cap);
        let lhs = a.wedge(&b).expect("size").trace();
        let mut rhs = b.wedge(&a).expect("size").trace();
        if (u32::from(p) * u32::from(q)) % 2 == 1 {
            rhs = rhs.neg();
        }
        let (equal, order) = lhs.eq_at_common_order(&rhs);
        outcome.merge_order(Some(order));
        if !equal {
            return fail_at(trial, None, &format!("cyclicity failed on degrees ({p}, {q})"));
        }
    }
    outcome
}

/// Jacobi identity on random matrix triples.
pub fn check_jacobi(spec: &LieAlgebraSpec, cap: u32, seed: u64, trials: u32) -> CheckOutcome {
    let mut outcome = CheckOutcome::pass();
    for trial in 0..trials {
        let mut s = Sampler::for_trial(seed, "jacobi_identity", u64::from(trial));
        let x = s.lie_matrix(spec, cap);
        let y = s.lie_matrix(spec, cap);
        let z = s.lie_matrix(spec, cap);
        let sum = x
            .bracket(&y.bracket(&z).expect("size"))
            .expect("size")
            .add(&y.bracket(&z.bracket(&x).expect("size")).expect("size"))
            .add(&z.bracket(&x.bracket(&y).expect("size")).expect("size"));
        outcome.merge_order(Some(cap));
        if !sum.is_zero_at(cap) {
            return fail_at(trial, None, "Jacobi identity failed");
        }
    }
    outcome
}

type CodedCheck = fn(&LieAlgebraSpec, u32, u64, u32) -> CheckOutcome;

/// Instance-only checks that need constructions beyond the expression
/// language, with their report ids.
pub fn coded_checks() -> [(&'static str, CodedCheck); 11] {
    [
        ("inverse_change_of_variables", check_inverse_change),
        ("curvature_interpolation", check_curvature_interpolation),
        ("eom_flat_pair", check_eom_flat_pair),
        ("eom_generic_nonvanishing", check_eom_generic_nonvanishing),
        ("superpotential_gauge_invariance", check_superpotential_gauge),
        ("superpotential_diffeo_invariance", check_superpotential_diffeo),
        ("d_squared_zero", check_d_squared),
        ("graded_leibniz", check_graded_leibniz),
        ("bianchi_identity", check_bianchi),
        ("trace_graded_cyclic", check_trace_cyclic),
        ("jacobi_identity", check_jacobi),
    ]
}

fn record(
    id: &str,
    backend: Backend,
    outcome: CheckOutcome,
    started: Option<Instant>,
) -> CheckRecord {
    CheckRecord {
        id: id.to_string(),
        backend,
        verdict: if outcome.pass { Verdict::Pass } else { Verdict::Fail },
        valid_order: outcome.valid_order,
        certificate: outcome.certificate,
        value: None,
        wall_ms: started.map(|s| s.elapsed().as_secs_f64() * 1e3),
    }
}

/// Runs the requested suite and assembles the report. Instance suites
/// require cap >= 3 so that the splitting check retains a usable order
/// after differentiation.
pub fn run_verify(cfg: &SuiteConfig) -> Result<Report, SuiteError> {
    let spec = LieAlgebraSpec::by_name(&cfg.algebra)?;
    let run_instances = matches!(cfg.suite, SuiteKind::Instance | SuiteKind::All);
    if run_instances && cfg.cap < 3 {
        return Err(SuiteError::CapTooSmall);
    }
    let mut checks = Vec::new();
    if matches!(cfg.suite, SuiteKind::Symbolic | SuiteKind::All) {
        for source in identity_sources() {
            let started = cfg.timing.then(Instant::now);
            let outcome = run_symbolic_check(&source)?;
            checks.push(record(source.id, Backend::Symbolic, outcome, started));
        }
    }
    if run_instances {
        for source in identity_sources() {
            let started = cfg.timing.then(Instant::now);
            let outcome = run_instance_check(&source, &spec, cfg.cap, cfg.seed, cfg.trials)?;
            checks.push(record(source.id, Backend::Instance, outcome, started));
        }
        for (id, check) in coded_checks() {
            let started = cfg.timing.then(Instant::now);
            let outcome = check(&spec, cfg.cap, cfg.seed, cfg.trials);
            checks.push(record(id, Backend::Instance, outcome, started));
        }
    }
    let mut report = Report::new(cfg.suite.name(), checks);
    report.algebra = Some(cfg.algebra.clone());
    report.seed = Some(cfg.seed);
    report.trials = Some(cfg.trials);
    report.cap = Some(cfg.cap);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbolic_suite_has_eight_passing_checks() {
        let cfg = SuiteConfig { suite: SuiteKind::Symbolic, ..SuiteConfig::default() };
        let report = run_verify(&cfg).unwrap();
        assert_eq!(report.checks.len(), 8);
        assert!(report.all_passed(), "{}", report.to_text());
    }

    #[test]
    fn instance_suite_passes_on_small_trial_count() {
        let cfg = SuiteConfig {
            suite: SuiteKind::Instance,
            trials: 3,
            seed: 11,
            ..SuiteConfig::default()
        };
        let report = run_verify(&cfg).unwrap();
        assert_eq!(report.checks.len(), 19);
        assert!(report.all_passed(), "{}", report.to_text());
    }

    #[test]
    fn cap_below_three_rejected_for_instances() {
        let cfg = SuiteConfig {
            suite: SuiteKind::Instance,
            cap: 2,
            ..SuiteConfig::default()
        };
        assert_eq!(run_verify(&cfg).unwrap_err(), SuiteError::CapTooSmall);
        assert_eq!(
            SuiteError::CapTooSmall.to_string(),
            "cap too small for splitting check (needs >= 3)"
        );
        // The symbolic suite has no cap precondition.
        let sym = SuiteConfig { suite: SuiteKind::Symbolic, cap: 2, ..SuiteConfig::default() };
        assert!(run_verify(&sym).is_ok());
    }

    #[test]
    fn same_seed_same_json() {
        let cfg = SuiteConfig {
            suite: SuiteKind::Instance,
            trials: 2,
            seed: 5,
            ..SuiteConfig::default()
        };
        let a = run_verify(&cfg).unwrap().to_json();
        let b = run_verify(&cfg).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn mutations_fail_symbolically() {
        for source in mutated_sources() {
            let outcome = run_symbolic_check(&source).unwrap();
            assert!(!outcome.pass, "{} unexpectedly passed", source.id);
            assert!(outcome.certificate.is_some());
        }
    }

    #[test]
    fn mutations_fail_on_instances() {
        let spec = LieAlgebraSpec::sl2();
        for source in mutated_sources() {
            let outcome = run_instance_check(&source, &spec, 4, 3, 5).unwrap();
            assert!(!outcome.pass, "{} unexpectedly passed on instances", source.id);
        }
    }

    #[test]
    fn unknown_suite_name_rejected() {
        assert!(matches!(
            SuiteKind::parse("everything"),
            Err(SuiteError::UnknownSuite(_))
        ));
    }
}
