//! Browser bindings: string-in / JSON-out wrappers around the engine for
//! the static demo page in `www/`. Everything runs exactly as on the
//! command line — exact rationals, literal zero tests — just compiled to
//! WebAssembly.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use csbf_core::chern::{eom_residuals, q_general, transgression, VariableChoice};
use csbf_core::dsl;
use csbf_core::rat::{fmt_rat, parse_rat};
use csbf_core::sample::Sampler;
use csbf_core::scenario::run_scenario_source;
use csbf_core::suite::{run_verify, SuiteConfig, SuiteKind};
use csbf_core::LieAlgebraSpec;

#[derive(Serialize)]
struct ErrorOut {
    error: String,
}

fn err_json(message: impl Into<String>) -> String {
    serde_json::to_string(&ErrorOut { error: message.into() }).expect("serializes")
}

#[derive(Serialize)]
struct ProofPoint {
    t: String,
    pass: bool,
    certificate: Option<String>,
}

#[derive(Serialize)]
struct ProofOut {
    pass: bool,
    lhs_canonical: String,
    rhs_canonical: String,
    points: Vec<ProofPoint>,
}

/// Universal verification of `lhs == rhs` in the free graded algebra on
/// w0, w1, wt, a, chi, at each comma-separated rational parameter value.
#[wasm_bindgen]
pub fn prove_identity(lhs: &str, rhs: &str, t_values: &str) -> String {
    let lhs_ast = match dsl::parse(lhs) {
        Ok(a) => a,
        Err(e) => return err_json(format!("left side: {e}")),
    };
    let rhs_ast = match dsl::parse(rhs) {
        Ok(a) => a,
        Err(e) => return err_json(format!("right side: {e}")),
    };
    let mut ts = Vec::new();
    for part in t_values.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        match parse_rat(part) {
            Some(r) => ts.push(r),
            None => return err_json(format!("bad rational '{part}' in t list")),
        }
    }
    if ts.is_empty() {
        ts.push(csbf_core::rat::rint(0));
    }
    let mut points = Vec::new();
    let mut all_pass = true;
    for t in ts {
        match csbf_core::symdga::verify_identity(&lhs_ast, &rhs_ast, &t) {
            Ok(v) => {
                all_pass &= v.pass;
                points.push(ProofPoint { t: fmt_rat(&t), pass: v.pass, certificate: v.certificate });
            }
            Err(e) => return err_json(e.to_string()),
        }
    }
    serde_json::to_string(&ProofOut {
        pass: all_pass,
        lhs_canonical: dsl::pretty_print(&lhs_ast),
        rhs_canonical: dsl::pretty_print(&rhs_ast),
        points,
    })
    .expect("serializes")
}

/// Runs a scenario given as text; returns the report (or an error) as JSON.
#[wasm_bindgen]
pub fn run_scenario(src: &str) -> String {
    match run_scenario_source("web", src) {
        Ok(report) => report.to_json(),
        Err(e) => err_json(e.to_string()),
    }
}

/// Runs a built-in suite; returns the report as JSON. Timing is always
/// suppressed in the browser build.
#[wasm_bindgen]
pub fn run_suite(suite: &str, seed: u32, trials: u32, cap: u32, algebra: &str) -> String {
    let kind = match SuiteKind::parse(suite) {
        Ok(k) => k,
        Err(e) => return err_json(e.to_string()),
    };
    let cfg = SuiteConfig {
        suite: kind,
        seed: u64::from(seed),
        trials,
        cap,
        algebra: algebra.to_string(),
        timing: false,
    };
    match run_verify(&cfg) {
        Ok(report) => report.to_json(),
        Err(e) => err_json(e.to_string()),
    }
}

#[derive(Serialize)]
struct EomOut {
    t: String,
    flat_pair: bool,
    curvature_residual: String,
    covariant_residual: String,
    residuals_vanish: bool,
    transgression: String,
    general_lagrangian: String,
    lagrangians_agree: bool,
}

/// Equation-of-motion explorer: builds a seeded pair of connections
/// (pure-gauge when `flat` is set), forms the interpolated variables at
/// t = t_num/t_den, and reports the two residual 2-forms together with
/// the transgression in both presentations.
#[wasm_bindgen]
pub fn explore_eom(seed: u32, flat: bool, t_num: u32, t_den: u32, algebra: &str) -> String {
    if t_den == 0 || t_num > t_den {
        return err_json("t must be a rational in [0, 1]");
    }
    let spec = match LieAlgebraSpec::by_name(algebra) {
        Ok(s) => s,
        Err(e) => return err_json(e.to_string()),
    };
    let cap = 4;
    let mut sampler = Sampler::for_trial(u64::from(seed), "web_eom", 0);
    let (w0, w1) = if flat {
        (sampler.flat_connection(&spec, cap), sampler.flat_connection(&spec, cap))
    } else {
        (sampler.connection(&spec, cap), sampler.connection(&spec, cap))
    };
    let run = || -> Result<EomOut, String> {
        let choice = VariableChoice::from_ints(i64::from(t_num), i64::from(t_den))
            .map_err(|e| e.to_string())?;
        let a = w1.difference(&w0).map_err(|e| e.to_string())?;
        let wt = w0.shifted(choice.t(), &a).map_err(|e| e.to_string())?;
        let res = eom_residuals(&wt, &a, &choice).map_err(|e| e.to_string())?;
        let q = transgression(&w1, &w0).map_err(|e| e.to_string())?;
        let qt = q_general(&wt, &a, &choice).map_err(|e| e.to_string())?;
        let (agree, _) = q.eq_at_common_order(&qt);
        Ok(EomOut {
            t: fmt_rat(choice.t()),
            flat_pair: flat,
            curvature_residual: res.r_curv.to_string(),
            covariant_residual: res.r_cov.to_string(),
            residuals_vanish: res.both_vanish(),
            transgression: q.to_string(),
            general_lagrangian: qt.to_string(),
            lagrangians_agree: agree,
        })
    };
    match run() {
        Ok(out) => serde_json::to_string(&out).expect("serializes"),
        Err(e) => err_json(e),
    }
}
