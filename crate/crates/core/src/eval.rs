//! Concrete evaluator: interprets expressions against an environment of
//! jet-valued bindings over a chosen algebra. This is the instance
//! backend; the symbolic backend lives in `symdga`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::dsl::{pretty_print, Ast, Pos};
use crate::forms::{wedge_gform_scalar, GForm, ScalarForm, VectorFieldSym};
use crate::gauge::{covariant_d, curvature, Connection};
use crate::jet::Jet;
use crate::liealg::LieAlgebraSpec;
use crate::rat::{fmt_rat, Rat};

#[derive(Error, Debug, PartialEq, Eq)]
pub enum EvalError {
    #[error("unknown symbol '{name}' at {pos}")]
    UnknownSymbol { name: String, pos: Pos },
    #[error("degree mismatch: {left} (degree {left_deg}) vs {right} (degree {right_deg})")]
    DegreeMismatch { left: String, left_deg: u8, right: String, right_deg: u8 },
    #[error("type mismatch in '{context}': {detail}")]
    TypeMismatch { context: String, detail: String },
    #[error("parameter t is not bound in this context")]
    UnboundParameter,
    #[error("{0}")]
    Form(String),
}

impl From<crate::forms::FormError> for EvalError {
    fn from(e: crate::forms::FormError) -> EvalError {
        EvalError::Form(e.to_string())
    }
}

impl From<crate::chern::ChernError> for EvalError {
    fn from(e: crate::chern::ChernError) -> EvalError {
        EvalError::Form(e.to_string())
    }
}

/// A concrete value: exact rational, scalar-valued form, matrix-valued
/// form (degree 0 covers plain matrices), or a vector field.
#[derive(Clone, Debug)]
pub enum Value {
    Rational(Rat),
    Scalar(ScalarForm),
    Matrix(GForm),
    Vector(VectorFieldSym),
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::Rational(_) => "rational",
            Value::Scalar(_) => "scalar form",
            Value::Matrix(_) => "matrix form",
            Value::Vector(_) => "vector field",
        }
    }

    pub fn render(&self) -> String {
        match self {
            Value::Rational(r) => fmt_rat(r),
            Value::Scalar(s) => s.to_string(),
            Value::Matrix(m) => m.to_string(),
            Value::Vector(v) => format!(
                "vec({}, {}, {})",
                v.component(crate::jet::Axis::X),
                v.component(crate::jet::Axis::Y),
                v.component(crate::jet::Axis::Z)
            ),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// Evaluation environment: the active algebra (whose basis names resolve
/// as constant matrices), the jet cap for literals, an optional exact
/// parameter value, and named bindings.
pub struct Env {
    pub algebra: LieAlgebraSpec,
    pub cap: u32,
    pub t: Option<Rat>,
    pub bindings: BTreeMap<String, Value>,
}

impl Env {
    pub fn new(algebra: LieAlgebraSpec, cap: u32) -> Env {
        Env { algebra, cap, t: None, bindings: BTreeMap::new() }
    }

    pub fn with_t(mut self, t: Rat) -> Env {
        self.t = Some(t);
        self
    }

    pub fn bind(&mut self, name: impl Into<String>, value: Value) {
        self.bindings.insert(name.into(), value);
    }
}

fn rational_to_scalar(r: &Rat, cap: u32) -> ScalarForm {
    ScalarForm::from_jet(Jet::constant(r.clone(), cap))
}

fn type_err(context: &Ast, detail: String) -> EvalError {
    EvalError::TypeMismatch { context: pretty_print(context), detail }
}

pub fn eval(ast: &Ast, env: &Env) -> Result<Value, EvalError> {
    match ast {
        Ast::Rational(r) => Ok(Value::Rational(r.clone())),
        Ast::TParam => env
            .t
            .clone()
            .map(Value::Rational)
            .ok_or(EvalError::UnboundParameter),
        Ast::Coord(ax) => Ok(Value::Scalar(ScalarForm::from_jet(Jet::var(*ax, env.cap)))),
        Ast::Covector(ax) => Ok(Value::Scalar(ScalarForm::monomial(
            1u8 << ax.index(),
            Jet::one(env.cap),
        ))),
        Ast::Sym(name, pos) => {
            if let Some(v) = env.bindings.get(name) {
                return Ok(v.clone());
            }
            if let Some(idx) = env.algebra.basis_index(name) {
                return Ok(Value::Matrix(GForm::from_matrix(
                    env.algebra.basis_matrix(idx, env.cap),
                )));
            }
            Err(EvalError::UnknownSymbol { name: name.clone(), pos: *pos })
        }
        Ast::Neg(inner) => match eval(inner, env)? {
            Value::Rational(r) => Ok(Value::Rational(-r)),
            Value::Scalar(s) => Ok(Value::Scalar(s.neg())),
            Value::Matrix(m) => Ok(Value::Matrix(m.neg())),
            Value::Vector(_) => Err(type_err(ast, "cannot negate a vector field".into())),
        },
        Ast::Add(l, r) => add_values(ast, eval(l, env)?, eval(r, env)?, env, false),
        Ast::Sub(l, r) => add_values(ast, eval(l, env)?, eval(r, env)?, env, true),
        Ast::ScalarMul(l, r) => scalar_mul(ast, eval(l, env)?, eval(r, env)?),
        Ast::Wedge(l, r) => wedge_values(ast, eval(l, env)?, eval(r, env)?),
        Ast::Bracket(l, r) => match (eval(l, env)?, eval(r, env)?) {
            (Value::Matrix(a), Value::Matrix(b)) => Ok(Value::Matrix(a.gbracket(&b)?)),
            (a, b) => Err(type_err(
                ast,
                format!("bracket needs matrix forms, got {} and {}", a.kind(), b.kind()),
            )),
        },
        Ast::ExteriorD(inner) => match eval(inner, env)? {
            Value::Matrix(m) => Ok(Value::Matrix(m.exterior_d()?)),
            Value::Scalar(s) => Ok(Value::Scalar(s.exterior_d()?)),
            Value::Rational(_) => Ok(Value::Scalar(ScalarForm::zero(1, env.cap.saturating_sub(1)))),
            Value::Vector(_) => Err(type_err(ast, "cannot differentiate a vector field".into())),
        },
        Ast::Trace(inner) => match eval(inner, env)? {
            Value::Matrix(m) => Ok(Value::Scalar(m.trace())),
            other => Err(type_err(ast, format!("tr needs a matrix form, got {}", other.kind()))),
        },
        Ast::Curvature(inner) => match eval(inner, env)? {
            Value::Matrix(m) => {
                let w = Connection::new(m).map_err(EvalError::from)?;
                Ok(Value::Matrix(curvature(&w)?))
            }
            other => Err(type_err(
                ast,
                format!("F needs a degree-1 matrix form, got {}", other.kind()),
            )),
        },
        Ast::CovariantD(w_ast, a_ast) => match (eval(w_ast, env)?, eval(a_ast, env)?) {
            (Value::Matrix(w), Value::Matrix(a)) => {
                let w = Connection::new(w).map_err(EvalError::from)?;
                Ok(Value::Matrix(covariant_d(&w, &a)?))
            }
            (a, b) => Err(type_err(
                ast,
                format!("D needs matrix forms, got {} and {}", a.kind(), b.kind()),
            )),
        },
        Ast::Contract(xi_ast, a_ast) => {
            let xi = match eval(xi_ast, env)? {
                Value::Vector(v) => v,
                other => {
                    return Err(type_err(
                        ast,
                        format!("ic needs a vector field first, got {}", other.kind()),
                    ))
                }
            };
            match eval(a_ast, env)? {
                Value::Matrix(m) => Ok(Value::Matrix(m.contract(&xi)?)),
                Value::Scalar(s) => Ok(Value::Scalar(s.contract(&xi)?)),
                other => Err(type_err(
                    ast,
                    format!("ic needs a form second, got {}", other.kind()),
                )),
            }
        }
        Ast::VecField(a, b, c) => {
            let comp = |node: &Ast| -> Result<Jet, EvalError> {
                match eval(node, env)? {
                    Value::Rational(r) => Ok(Jet::constant(r, env.cap)),
                    Value::Scalar(s) if s.degree() == 0 => Ok(s.component(0).clone()),
                    other => Err(type_err(
                        node,
                        format!("vector components must be scalar functions, got {}", other.kind()),
                    )),
                }
            };
            Ok(Value::Vector(VectorFieldSym::new([comp(a)?, comp(b)?, comp(c)?])))
        }
    }
}

fn add_values(
    ctx: &Ast,
    left: Value,
    right: Value,
    env: &Env,
    subtract: bool,
) -> Result<Value, EvalError> {
    let right = if subtract {
        match right {
            Value::Rational(r) => Value::Rational(-r),
            Value::Scalar(s) => Value::Scalar(s.neg()),
            Value::Matrix(m) => Value::Matrix(m.neg()),
            v @ Value::Vector(_) => v,
        }
    } else {
        right
    };
    match (left, right) {
        (Value::Rational(a), Value::Rational(b)) => Ok(Value::Rational(a + b)),
        // A literal zero acts as the zero element of any degree.
        (Value::Rational(r), other) if r.is_zero() => Ok(other),
        (other, Value::Rational(r)) if r.is_zero() => Ok(other),
        (Value::Rational(a), Value::Scalar(s)) | (Value::Scalar(s), Value::Rational(a)) => {
            if s.degree() != 0 {
                return Err(EvalError::DegreeMismatch {
                    left: fmt_rat(&a),
                    left_deg: 0,
                    right: s.to_string(),
                    right_deg: s.degree(),
                });
            }
            Ok(Value::Scalar(rational_to_scalar(&a, env.cap).add(&s)?))
        }
        (Value::Scalar(a), Value::Scalar(b)) => {
            if a.degree() != b.degree() {
                return Err(EvalError::DegreeMismatch {
                    left: a.to_string(),
                    left_deg: a.degree(),
                    right: b.to_string(),
                    right_deg: b.degree(),
                });
            }
            Ok(Value::Scalar(a.add(&b)?))
        }
        (Value::Matrix(a), Value::Matrix(b)) => {
            if a.degree() != b.degree() {
                return Err(EvalError::DegreeMismatch {
                    left: format!("left operand of {}", pretty_print(ctx)),
                    left_deg: a.degree(),
                    right: "right operand".to_string(),
                    right_deg: b.degree(),
                });
            }
            Ok(Value::Matrix(a.add(&b)?))
        }
        (a, b) => Err(type_err(
            ctx,
            format!("cannot add {} and {}", a.kind(), b.kind()),
        )),
    }
}

fn scalar_mul(ctx: &Ast, left: Value, right: Value) -> Result<Value, EvalError> {
    match (left, right) {
        (Value::Rational(a), Value::Rational(b)) => Ok(Value::Rational(a * b)),
        (Value::Rational(r), Value::Scalar(s)) | (Value::Scalar(s), Value::Rational(r)) => {
            Ok(Value::Scalar(s.scale(&r)))
        }
        (Value::Rational(r), Value::Matrix(m)) | (Value::Matrix(m), Value::Rational(r)) => {
            Ok(Value::Matrix(m.scale(&r)))
        }
        (Value::Scalar(s), Value::Matrix(m)) | (Value::Matrix(m), Value::Scalar(s)) => {
            if s.degree() != 0 {
                return Err(type_err(
                    ctx,
                    "scalar multiplication by a form of positive degree; use ^".to_string(),
                ));
            }
            Ok(Value::Matrix(m.scale_jet(s.component(0))))
        }
        (Value::Scalar(a), Value::Scalar(b)) => {
            if a.degree() != 0 && b.degree() != 0 {
                return Err(type_err(
                    ctx,
                    "scalar multiplication of two positive-degree forms; use ^".to_string(),
                ));
            }
            Ok(Value::Scalar(a.wedge(&b)))
        }
        (a, b) => Err(type_err(
            ctx,
            format!("cannot multiply {} by {}", a.kind(), b.kind()),
        )),
    }
}

fn wedge_values(ctx: &Ast, left: Value, right: Value) -> Result<Value, EvalError> {
    match (left, right) {
        (Value::Matrix(a), Value::Matrix(b)) => Ok(Value::Matrix(a.wedge(&b)?)),
        (Value::Scalar(a), Value::Scalar(b)) => Ok(Value::Scalar(a.wedge(&b))),
        (Value::Scalar(s), Value::Matrix(m)) => Ok(Value::Matrix(s.wedge_gform(&m))),
        (Value::Matrix(m), Value::Scalar(s)) => Ok(Value::Matrix(wedge_gform_scalar(&m, &s))),
        (Value::Rational(r), Value::Scalar(s)) | (Value::Scalar(s), Value::Rational(r)) => {
            Ok(Value::Scalar(s.scale(&r)))
        }
        (Value::Rational(r), Value::Matrix(m)) | (Value::Matrix(m), Value::Rational(r)) => {
            Ok(Value::Matrix(m.scale(&r)))
        }
        (a, b) => Err(type_err(
            ctx,
            format!("cannot wedge {} and {}", a.kind(), b.kind()),
        )),
    }
}

/// Result of comparing two evaluated values at the common valid order.
pub struct Comparison {
    pub equal: bool,
    /// Jet order at which equality was asserted, when meaningful.
    pub valid_order: Option<u32>,
    /// Highest-degree differing term on failure.
    pub difference: Option<String>,
}

/// Compares two values for equality at their common valid order. A bare
/// rational compares against degree-0 forms and against zero forms of any
/// degree.
pub fn compare(left: &Value, right: &Value, env: &Env) -> Result<Comparison, EvalError> {
    match (left, right) {
        (Value::Rational(a), Value::Rational(b)) => Ok(Comparison {
            equal: a == b,
            valid_order: None,
            difference: (a != b).then(|| format!("{} vs {}", fmt_rat(a), fmt_rat(b))),
        }),
        (Value::Rational(r), Value::Scalar(s)) | (Value::Scalar(s), Value::Rational(r)) => {
            if r.is_zero() {
                let order = s.valid_order();
                let equal = s.is_zero_at(order);
                let zero = ScalarForm::zero(s.degree(), order);
                return Ok(Comparison {
                    equal,
                    valid_order: Some(order),
                    difference: if equal { None } else { s.describe_difference(&zero, order) },
                });
            }
            if s.degree() != 0 {
                return Err(EvalError::DegreeMismatch {
                    left: fmt_rat(r),
                    left_deg: 0,
                    right: s.to_string(),
                    right_deg: s.degree(),
                });
            }
            let lifted = rational_to_scalar(r, env.cap);
            let (equal, order) = lifted.eq_at_common_order(s);
            Ok(Comparison {
                equal,
                valid_order: Some(order),
                difference: if equal { None } else { lifted.describe_difference(s, order) },
            })
        }
        (Value::Rational(r), Value::Matrix(m)) | (Value::Matrix(m), Value::Rational(r)) => {
            if !r.is_zero() {
                return Err(EvalError::TypeMismatch {
                    context: "comparison".to_string(),
                    detail: format!(
                        "nonzero rational {} compared against a matrix form",
                        fmt_rat(r)
                    ),
                });
            }
            let order = m.valid_order();
            let equal = m.is_zero_at(order);
            let zero = GForm::zero(m.degree(), m.matrix_size(), order);
            Ok(Comparison {
                equal,
                valid_order: Some(order),
                difference: if equal { None } else { m.describe_difference(&zero, order) },
            })
        }
        (Value::Scalar(a), Value::Scalar(b)) => {
            if a.degree() != b.degree() {
                return Err(EvalError::DegreeMismatch {
                    left: a.to_string(),
                    left_deg: a.degree(),
                    right: b.to_string(),
                    right_deg: b.degree(),
                });
            }
            let (equal, order) = a.eq_at_common_order(b);
            Ok(Comparison {
                equal,
                valid_order: Some(order),
                difference: if equal { None } else { a.describe_difference(b, order) },
            })
        }
        (Value::Matrix(a), Value::Matrix(b)) => {
            if a.degree() != b.degree() {
                return Err(EvalError::DegreeMismatch {
                    left: "left matrix form".to_string(),
                    left_deg: a.degree(),
                    right: "right matrix form".to_string(),
                    right_deg: b.degree(),
                });
            }
            let (equal, order) = a.eq_at_common_order(b);
            Ok(Comparison {
                equal,
                valid_order: Some(order),
                difference: if equal { None } else { a.describe_difference(b, order) },
            })
        }
        (a, b) => Err(EvalError::TypeMismatch {
            context: "comparison".to_string(),
            detail: format!("cannot compare {} with {}", a.kind(), b.kind()),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;
    use crate::rat::{rat, rint};

    fn env() -> Env {
        Env::new(LieAlgebraSpec::sl2(), 4)
    }

    fn eval_str(src: &str, env: &Env) -> Value {
        eval(&parse(src).unwrap(), env).unwrap()
    }

    #[test]
    fn worked_constant_example_through_evaluator() {
        let mut e = env();
        let alpha = eval_str("E^dx + F_^dy + H^dz", &e);
        e.bind("al", alpha);
        e.bind("w0", eval_str("0*(E^dx)", &e));
        let q = eval_str(
            "tr(2*F(w0)^al + D(w0; al)^al + (2/3)*(al^al^al))",
            &e,
        );
        match q {
            Value::Scalar(s) => assert_eq!(s.to_string(), "4 dx^dy^dz"),
            other => panic!("expected scalar form, got {}", other.kind()),
        }
    }

    #[test]
    fn gauge_superpotential_through_evaluator() {
        let mut e = env();
        let alpha = eval_str("E^dx + F_^dy + H^dz", &e);
        e.bind("al", alpha);
        let u = eval_str("tr(al^H)", &e);
        assert_eq!(u.render(), "2 dz");
    }

    #[test]
    fn unknown_symbol_has_position() {
        let mut e = env();
        e.bind("w0", eval_str("x*(E^dy)", &e));
        let err = eval(&parse("w0 + beta").unwrap(), &e).unwrap_err();
        match err {
            EvalError::UnknownSymbol { name, pos } => {
                assert_eq!(name, "beta");
                assert_eq!((pos.line, pos.col), (1, 6));
            }
            other => panic!("expected unknown symbol, got {other}"),
        }
    }

    #[test]
    fn degree_mismatch_reports_degrees() {
        let e = env();
        let err = eval(&parse("dx + dx^dy").unwrap(), &e).unwrap_err();
        match err {
            EvalError::DegreeMismatch { left_deg, right_deg, .. } => {
                assert_eq!((left_deg, right_deg), (1, 2));
            }
            other => panic!("expected degree mismatch, got {other}"),
        }
    }

    #[test]
    fn zero_literal_is_polymorphic() {
        let mut e = env();
        e.bind("w0", eval_str("0*(E^dx)", &e));
        let d = eval_str("D(w0; E^dx) - d(E^dx)", &e);
        let cmp = compare(&d, &Value::Rational(rint(0)), &e).unwrap();
        assert!(cmp.equal);
    }

    #[test]
    fn parameter_binding() {
        let mut e = env().with_t(rat(1, 2));
        e.bind("w0", eval_str("x*(E^dy)", &e));
        e.bind("w1", eval_str("y*(F_^dz)", &e));
        let wt = eval_str("w0 + t*(w1 - w0)", &e);
        let avg = eval_str("(1/2)*(w0 + w1)", &e);
        let cmp = compare(&wt, &avg, &e).unwrap();
        assert!(cmp.equal);
        assert_eq!(cmp.valid_order, Some(4));
    }

    #[test]
    fn unbound_parameter_errors() {
        let e = env();
        let err = eval(&parse("t").unwrap(), &e).unwrap_err();
        assert_eq!(err, EvalError::UnboundParameter);
    }

    #[test]
    fn contraction_through_evaluator() {
        let e = env();
        let v = eval_str("ic(vec(1, 0, 0); H^dx^dy)", &e);
        assert_eq!(v.render().lines().next().unwrap(), "dy:");
    }

    #[test]
    fn scalar_jet_coefficients() {
        let e = env();
        let v = eval_str("x*E^dy", &e);
        match v {
            Value::Matrix(m) => {
                assert_eq!(m.degree(), 1);
                assert!(!m.is_zero_at(4));
            }
            other => panic!("expected matrix form, got {}", other.kind()),
        }
    }

    #[test]
    fn comparison_failure_names_offending_term() {
        let e = env();
        let a = eval_str("2*dx^dy^dz", &e);
        let b = eval_str("3*dx^dy^dz", &e);
        let cmp = compare(&a, &b, &e).unwrap();
        assert!(!cmp.equal);
        let diff = cmp.difference.unwrap();
        assert!(diff.contains("dx^dy^dz"), "difference: {diff}");
        assert!(diff.contains("2 vs 3"), "difference: {diff}");
    }
}
