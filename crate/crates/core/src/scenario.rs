//! Scenario files: a minimal key-value header, `let` declarations in the
//! expression language, and a list of checks. Checks either compare two
//! expressions or invoke a built-in identity against the declared names.
//!
//! ```text
//! algebra: sl2          # sl2 | sl3 (default sl2)
//! cap: 4                # jet truncation order (default 4)
//! tvalues: 0, 1/2, 1    # parameter values for swept checks (optional)
//!
//! let w0 = E^dx
//! let w1 = F_^dy
//! check flat_family: builtin eom_residuals
//! check bf_curvature: F((1/2)*(w0 + w1)) == (-1/4)*((w1 - w0)^(w1 - w0))
//! eval q: tr(2*F(w0)^(w1 - w0) + ...)
//! ```

use num_traits::One;
use thiserror::Error;

use crate::chern::{eom_residuals, superpotential_diffeo, superpotential_gauge, VariableChoice};
use crate::dsl::{parse_at, Ast, Pos};
use crate::eval::{compare, eval, Env, EvalError, Value};
use crate::forms::VectorFieldSym;
use crate::gauge::Connection;
use crate::liealg::LieAlgebraSpec;
use crate::rat::{fmt_rat, in_unit_interval, parse_rat, rat, Rat};
use crate::report::{Backend, CheckRecord, Report, Verdict};
use crate::suite::{identity_sources, CheckOutcome, IdentitySource};

#[derive(Error, Debug, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Syntax { line: u32, message: String },
    #[error("{0}")]
    Expr(String),
    #[error("check '{check}': {message}")]
    Check { check: String, message: String },
}

impl From<EvalError> for ScenarioError {
    fn from(e: EvalError) -> ScenarioError {
        ScenarioError::Expr(e.to_string())
    }
}

#[derive(Clone, Debug)]
enum CheckBody {
    /// lhs == rhs, with absolute source positions for diagnostics.
    Compare { lhs: String, lhs_pos: Pos, rhs: String, rhs_pos: Pos },
    Builtin(String),
}

#[derive(Clone, Debug)]
enum Statement {
    Let { name: String, expr: String, pos: Pos },
    Check { id: String, body: CheckBody },
    Eval { id: String, expr: String, pos: Pos },
}

/// Parsed scenario file.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub algebra: String,
    pub cap: u32,
    pub t_values: Vec<Rat>,
    statements: Vec<Statement>,
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(idx) => &line[..idx],
        None => line,
    }
}

fn syntax(line: u32, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Syntax { line, message: message.into() }
}

impl Scenario {
    pub fn parse(src: &str) -> Result<Scenario, ScenarioError> {
        let mut scenario = Scenario {
            algebra: "sl2".to_string(),
            cap: 4,
            t_values: vec![rat(0, 1), rat(1, 2), rat(1, 1)],
            statements: Vec::new(),
        };
        let mut in_header = true;
        for (idx, raw_line) in src.lines().enumerate() {
            let line_no = idx as u32 + 1;
            let line = strip_comment(raw_line);
            if line.trim().is_empty() {
                continue;
            }
            let trimmed = line.trim_start();
            let indent = (line.len() - trimmed.len()) as u32;
            let starts_statement = trimmed.starts_with("let ")
                || trimmed.starts_with("check ")
                || trimmed.starts_with("eval ");
            if in_header && !starts_statement {
                let Some((key, value)) = trimmed.split_once(':') else {
                    return Err(syntax(line_no, "expected 'key: value' header line"));
                };
                scenario.apply_header(line_no, key.trim(), value.trim())?;
                continue;
            }
            in_header = false;
            if !starts_statement {
                return Err(syntax(
                    line_no,
                    "expected 'let', 'check', or 'eval' statement",
                ));
            }
            scenario.statements.push(parse_statement(trimmed, line_no, indent)?);
        }
        Ok(scenario)
    }

    fn apply_header(&mut self, line: u32, key: &str, value: &str) -> Result<(), ScenarioError> {
        match key {
            "algebra" => match value {
                "sl2" | "sl3" => {
                    self.algebra = value.to_string();
                    Ok(())
                }
                other => Err(syntax(line, format!("unknown algebra '{other}'"))),
            },
            "cap" => {
                let cap: u32 = value
                    .parse()
                    .map_err(|_| syntax(line, format!("invalid cap '{value}'")))?;
                self.cap = cap;
                Ok(())
            }
            "tvalues" => {
                let mut values = Vec::new();
                for part in value.split(',') {
                    let r = parse_rat(part)
                        .ok_or_else(|| syntax(line, format!("invalid rational '{}'", part.trim())))?;
                    if !in_unit_interval(&r) {
                        return Err(syntax(
                            line,
                            format!("t value {} lies outside [0, 1]", fmt_rat(&r)),
                        ));
                    }
                    values.push(r);
                }
                if values.is_empty() {
                    return Err(syntax(line, "empty tvalues list"));
                }
                self.t_values = values;
                Ok(())
            }
            other => Err(syntax(line, format!("unknown header key '{other}'"))),
        }
    }
}

fn parse_statement(trimmed: &str, line: u32, indent: u32) -> Result<Statement, ScenarioError> {
    let col_of = |offset_in_trimmed: usize| Pos {
        line,
        col: indent + offset_in_trimmed as u32 + 1,
    };
    if let Some(rest) = trimmed.strip_prefix("let ") {
        let Some((name, expr)) = rest.split_once('=') else {
            return Err(syntax(line, "expected 'let name = expression'"));
        };
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(syntax(line, format!("invalid name '{name}'")));
        }
        let expr_offset = 4 + rest.find('=').unwrap() + 1;
        let leading_ws = expr.len() - expr.trim_start().len();
        Ok(Statement::Let {
            name: name.to_string(),
            expr: expr.trim().to_string(),
            pos: col_of(expr_offset + leading_ws),
        })
    } else if let Some(rest) = trimmed.strip_prefix("check ") {
        let Some((id, body)) = rest.split_once(':') else {
            return Err(syntax(line, "expected 'check id: ...'"));
        };
        let id = id.trim().to_string();
        let body_text = body.trim();
        if let Some(builtin) = body_text.strip_prefix("builtin ") {
            return Ok(Statement::Check {
                id,
                body: CheckBody::Builtin(builtin.trim().to_string()),
            });
        }
        let Some(eq_idx) = body_text.find("==") else {
            return Err(syntax(line, "expected 'lhs == rhs' or 'builtin name'"));
        };
        let lhs = body_text[..eq_idx].trim();
        let rhs = body_text[eq_idx + 2..].trim();
        let body_offset = 6 + rest.find(':').unwrap() + 1;
        let body_start = body_offset + (body.len() - body.trim_start().len());
        let rhs_in_body = eq_idx + 2 + (body_text[eq_idx + 2..].len() - rhs.len());
        Ok(Statement::Check {
            id,
            body: CheckBody::Compare {
                lhs: lhs.to_string(),
                lhs_pos: col_of(body_start),
                rhs: rhs.to_string(),
                rhs_pos: col_of(body_start + rhs_in_body),
            },
        })
    } else if let Some(rest) = trimmed.strip_prefix("eval ") {
        let Some((id, expr)) = rest.split_once(':') else {
            return Err(syntax(line, "expected 'eval id: expression'"));
        };
        let expr_offset = 5 + rest.find(':').unwrap() + 1;
        let leading_ws = expr.len() - expr.trim_start().len();
        Ok(Statement::Eval {
            id: id.trim().to_string(),
            expr: expr.trim().to_string(),
            pos: col_of(expr_offset + leading_ws),
        })
    } else {
        Err(syntax(line, "expected 'let', 'check', or 'eval' statement"))
    }
}

fn parse_expr(src: &str, pos: Pos) -> Result<Ast, ScenarioError> {
    parse_at(src, pos).map_err(|e| ScenarioError::Expr(e.to_string()))
}

fn required_connection(env: &Env, name: &str, check: &str) -> Result<Connection, ScenarioError> {
    match env.bindings.get(name) {
        Some(Value::Matrix(m)) if m.degree() == 1 => {
            Connection::new(m.clone()).map_err(|e| ScenarioError::Check {
                check: check.to_string(),
                message: e.to_string(),
            })
        }
        Some(other) => Err(ScenarioError::Check {
            check: check.to_string(),
            message: format!("'{name}' must be a degree-1 matrix form, got {}", other.render()),
        }),
        None => Err(ScenarioError::Check {
            check: check.to_string(),
            message: format!("builtin needs a declaration 'let {name} = ...'"),
        }),
    }
}

fn run_builtin(
    name: &str,
    env: &Env,
    t_values: &[Rat],
    check_id: &str,
) -> Result<CheckOutcome, ScenarioError> {
    // The eight identity sources run against the declared pair.
    if let Some(source) = identity_sources().iter().find(|s| s.id == name) {
        return run_source_on_env(source, env, t_values, check_id);
    }
    let w0 = required_connection(env, "w0", check_id)?;
    let w1 = required_connection(env, "w1", check_id)?;
    let a = w1.difference(&w0).map_err(check_err(check_id))?;
    let mut outcome = CheckOutcome { pass: true, valid_order: None, certificate: None };
    let merge = |o: u32, outcome: &mut CheckOutcome| {
        outcome.valid_order = Some(outcome.valid_order.map_or(o, |p| p.min(o)));
    };
    match name {
        "eom_residuals" => {
            for t in t_values {
                let choice = VariableChoice::new(t.clone()).map_err(check_err(check_id))?;
                let wt = w0.shifted(t, &a).map_err(check_err(check_id))?;
                let res = eom_residuals(&wt, &a, &choice).map_err(check_err(check_id))?;
                merge(res.valid_order(), &mut outcome);
                if !res.both_vanish() {
                    outcome.pass = false;
                    outcome.certificate =
                        Some(format!("t = {}: residuals do not vanish", fmt_rat(t)));
                    break;
                }
            }
            Ok(outcome)
        }
        "inverse_change_of_variables" => {
            for t in t_values {
                let wt = w0.shifted(t, &a).map_err(check_err(check_id))?;
                let back0 = wt.form().sub(&a.scale(t)).map_err(check_err(check_id))?;
                let back1 = wt
                    .form()
                    .add(&a.scale(&(Rat::one() - t.clone())))
                    .map_err(check_err(check_id))?;
                merge(env.cap, &mut outcome);
                if !back0.eq_at(w0.form(), env.cap) || !back1.eq_at(w1.form(), env.cap) {
                    outcome.pass = false;
                    outcome.certificate =
                        Some(format!("t = {}: reconstruction differs", fmt_rat(t)));
                    break;
                }
            }
            Ok(outcome)
        }
        "superpotential_gauge_invariance" => {
            let chi = match env.bindings.get("chi") {
                Some(Value::Matrix(m)) if m.degree() == 0 => m.component(0).clone(),
                _ => {
                    return Err(ScenarioError::Check {
                        check: check_id.to_string(),
                        message: "builtin needs 'let chi = <degree-0 matrix>'".to_string(),
                    })
                }
            };
            let reference = superpotential_gauge(&a, &chi).map_err(check_err(check_id))?;
            for t in t_values {
                let wt = w0.shifted(t, &a).map_err(check_err(check_id))?;
                let back1 = wt
                    .form()
                    .add(&a.scale(&(Rat::one() - t.clone())))
                    .map_err(check_err(check_id))?;
                let back0 = wt.form().sub(&a.scale(t)).map_err(check_err(check_id))?;
                let again = back1.sub(&back0).map_err(check_err(check_id))?;
                let u = superpotential_gauge(&again, &chi).map_err(check_err(check_id))?;
                let (equal, order) = reference.eq_at_common_order(&u);
                merge(order, &mut outcome);
                if !equal {
                    outcome.pass = false;
                    outcome.certificate =
                        Some(format!("t = {}: gauge superpotential differs", fmt_rat(t)));
                    break;
                }
            }
            Ok(outcome)
        }
        "superpotential_diffeo_invariance" => {
            let xi: VectorFieldSym = match env.bindings.get("xi") {
                Some(Value::Vector(v)) => v.clone(),
                _ => {
                    return Err(ScenarioError::Check {
                        check: check_id.to_string(),
                        message: "builtin needs 'let xi = vec(..., ..., ...)'".to_string(),
                    })
                }
            };
            let mut reference: Option<crate::forms::ScalarForm> = None;
            for t in t_values {
                let choice = VariableChoice::new(t.clone()).map_err(check_err(check_id))?;
                let wt = w0.shifted(t, &a).map_err(check_err(check_id))?;
                let u = superpotential_diffeo(&a, &wt, &choice, &xi)
                    .map_err(check_err(check_id))?;
                match &reference {
                    None => reference = Some(u),
                    Some(prev) => {
                        let (equal, order) = prev.eq_at_common_order(&u);
                        merge(order, &mut outcome);
                        if !equal {
                            outcome.pass = false;
                            outcome.certificate = Some(format!(
                                "t = {}: diffeomorphism superpotential differs",
                                fmt_rat(t)
                            ));
                            break;
                        }
                    }
                }
            }
            Ok(outcome)
        }
        other => Err(ScenarioError::Check {
            check: check_id.to_string(),
            message: format!("unknown builtin '{other}'"),
        }),
    }
}

fn check_err<E: std::fmt::Display>(
    check: &str,
) -> impl Fn(E) -> ScenarioError + '_ {
    move |e| ScenarioError::Check { check: check.to_string(), message: e.to_string() }
}

fn run_source_on_env(
    source: &IdentitySource,
    env: &Env,
    t_values: &[Rat],
    check_id: &str,
) -> Result<CheckOutcome, ScenarioError> {
    let lhs = crate::dsl::parse(source.lhs)
        .map_err(|e| ScenarioError::Expr(e.to_string()))?;
    let rhs = crate::dsl::parse(source.rhs)
        .map_err(|e| ScenarioError::Expr(e.to_string()))?;
    let ts: Vec<Rat> = if source.sweep_t {
        t_values.to_vec()
    } else {
        vec![rat(0, 1)]
    };
    let mut outcome = CheckOutcome { pass: true, valid_order: None, certificate: None };
    for t in ts {
        let mut scoped = Env::new(env.algebra.clone(), env.cap).with_t(t.clone());
        for (k, v) in &env.bindings {
            scoped.bind(k.clone(), v.clone());
        }
        let result = (|| -> Result<crate::eval::Comparison, EvalError> {
            let l = eval(&lhs, &scoped)?;
            let r = eval(&rhs, &scoped)?;
            compare(&l, &r, &scoped)
        })()
        .map_err(|e| ScenarioError::Check {
            check: check_id.to_string(),
            message: e.to_string(),
        })?;
        outcome.valid_order = match (outcome.valid_order, result.valid_order) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        if !result.equal {
            outcome.pass = false;
            outcome.certificate = Some(format!(
                "t = {}: {}",
                fmt_rat(&t),
                result.difference.unwrap_or_else(|| "difference".to_string())
            ));
            break;
        }
    }
    Ok(outcome)
}

/// Evaluates a parsed scenario: binds declarations in order, runs every
/// check and eval statement, and assembles a report.
pub fn run_scenario(name: &str, scenario: &Scenario) -> Result<Report, ScenarioError> {
    let spec = LieAlgebraSpec::by_name(&scenario.algebra)
        .map_err(|e| ScenarioError::Expr(e.to_string()))?;
    let mut env = Env::new(spec, scenario.cap);
    let mut checks = Vec::new();
    for statement in &scenario.statements {
        match statement {
            Statement::Let { name, expr, pos } => {
                let ast = parse_expr(expr, *pos)?;
                let value = eval(&ast, &env)?;
                env.bind(name.clone(), value);
            }
            Statement::Check { id, body } => {
                let outcome = match body {
                    CheckBody::Compare { lhs, lhs_pos, rhs, rhs_pos } => {
                        let lhs_ast = parse_expr(lhs, *lhs_pos)?;
                        let rhs_ast = parse_expr(rhs, *rhs_pos)?;
                        let l = eval(&lhs_ast, &env)?;
                        let r = eval(&rhs_ast, &env)?;
                        let cmp = compare(&l, &r, &env)?;
                        CheckOutcome {
                            pass: cmp.equal,
                            valid_order: cmp.valid_order,
                            certificate: (!cmp.equal).then(|| {
                                cmp.difference.unwrap_or_else(|| "difference".to_string())
                            }),
                        }
                    }
                    CheckBody::Builtin(builtin) => {
                        run_builtin(builtin, &env, &scenario.t_values, id)?
                    }
                };
                checks.push(CheckRecord {
                    id: id.clone(),
                    backend: Backend::Instance,
                    verdict: if outcome.pass { Verdict::Pass } else { Verdict::Fail },
                    valid_order: outcome.valid_order,
                    certificate: outcome.certificate,
                    value: None,
                    wall_ms: None,
                });
            }
            Statement::Eval { id, expr, pos } => {
                let ast = parse_expr(expr, *pos)?;
                let value = eval(&ast, &env)?;
                checks.push(CheckRecord {
                    id: id.clone(),
                    backend: Backend::Instance,
                    verdict: Verdict::Pass,
                    valid_order: None,
                    certificate: None,
                    value: Some(value.render()),
                    wall_ms: None,
                });
            }
        }
    }
    let mut report = Report::new(format!("scenario:{name}"), checks);
    report.algebra = Some(scenario.algebra.clone());
    report.cap = Some(scenario.cap);
    Ok(report)
}

/// Parses and runs a scenario from source text.
pub fn run_scenario_source(name: &str, src: &str) -> Result<Report, ScenarioError> {
    let scenario = Scenario::parse(src)?;
    run_scenario(name, &scenario)
}
