//! Exact verification engine for the identities relating three-dimensional
//! Chern-Simons and BF theories.
//!
//! Every computation runs over arbitrary-precision rationals on a single
//! coordinate chart, so each identity check is a literal zero test rather
//! than an approximate comparison. Two independent backends cover each
//! identity: a concrete one that evaluates both sides on randomized
//! jet-valued connections, and a symbolic one that normalizes both sides in
//! the free graded differential algebra with a graded-cyclic trace.

pub mod chern;
pub mod dsl;
pub mod eval;
pub mod forms;
pub mod gauge;
pub mod jet;
pub mod liealg;
pub mod rat;
pub mod report;
pub mod sample;
pub mod scenario;
pub mod suite;
pub mod symdga;

pub use chern::{EomResiduals, VariableChoice};
pub use forms::{GForm, ScalarForm, VectorFieldSym};
pub use gauge::{Connection, GroupJet};
pub use jet::{Axis, Jet, JetError};
pub use liealg::{from_coefficients, trace_form, AlgebraError, LieAlgebraSpec, LieMatrix};
pub use rat::{fmt_rat, parse_rat, rat, rint, Rat};
pub use report::Report;
pub use scenario::{run_scenario_source, Scenario, ScenarioError};
pub use suite::{run_verify, SuiteConfig, SuiteError, SuiteKind};
