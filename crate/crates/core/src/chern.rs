//! The functionals under verification: the transgression 3-form in its
//! presentations, the Chern-Simons Lagrangian and its splitting, the
//! interpolated-variable Lagrangian, equation-of-motion residuals, and the
//! two superpotentials.
//!
//! Each presentation is implemented as its own literal expression; the
//! equalities between presentations are checked by the suites, never
//! assumed by simplifying one into another.

use num_traits::One;
use thiserror::Error;

use crate::forms::{FormError, GForm, ScalarForm, VectorFieldSym};
use crate::gauge::{covariant_d, curvature, Connection};
use crate::liealg::LieMatrix;
use crate::rat::{fmt_rat, in_unit_interval, rat, Rat};

#[derive(Error, Debug, PartialEq, Eq)]
pub enum ChernError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("interpolation parameter {0} lies outside [0, 1]")]
    ParameterRange(String),
}

/// The dynamical-variable choice: an exact interpolation parameter in
/// [0, 1]. 0 and 1 select the single-connection presentations, 1/2 the
/// average-connection (BF) presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableChoice {
    t: Rat,
}

impl VariableChoice {
    pub fn new(t: Rat) -> Result<VariableChoice, ChernError> {
        if !in_unit_interval(&t) {
            return Err(ChernError::ParameterRange(fmt_rat(&t)));
        }
        Ok(VariableChoice { t })
    }

    pub fn from_ints(num: i64, den: i64) -> Result<VariableChoice, ChernError> {
        VariableChoice::new(rat(num, den))
    }

    pub fn average() -> VariableChoice {
        VariableChoice { t: rat(1, 2) }
    }

    pub fn t(&self) -> &Rat {
        &self.t
    }
}

/// Residuals of the equations of motion in the (w_t, a) variables. Both
/// vanish at the valid order exactly when the equations hold.
#[derive(Clone, Debug)]
pub struct EomResiduals {
    /// Curvature residual: Omega_t + t(1-t) a^a.
    pub r_curv: GForm,
    /// Covariant residual: D_t a - (2t-1) a^a.
    pub r_cov: GForm,
}

impl EomResiduals {
    pub fn both_vanish(&self) -> bool {
        self.r_curv.is_zero_at(self.r_curv.valid_order())
            && self.r_cov.is_zero_at(self.r_cov.valid_order())
    }

    pub fn valid_order(&self) -> u32 {
        self.r_curv.valid_order().min(self.r_cov.valid_order())
    }
}

/// Transgression 3-form in the base-connection presentation:
/// tr(2 Omega_0 ^ a + D_0 a ^ a + 2/3 a^3) with a = w1 - w0.
pub fn transgression(w1: &Connection, w0: &Connection) -> Result<ScalarForm, ChernError> {
    let a = w1.difference(w0)?;
    let omega0 = curvature(w0)?;
    let d0a = covariant_d(w0, &a)?;
    let term1 = omega0.wedge(&a)?.scale(&rat(2, 1));
    let term2 = d0a.wedge(&a)?;
    let term3 = a.wedge(&a)?.wedge(&a)?.scale(&rat(2, 3));
    Ok(term1.add(&term2)?.add(&term3)?.trace())
}

/// The same 3-form written against the target connection:
/// tr(2 Omega_1 ^ a - D_1 a ^ a + 2/3 a^3).
pub fn transgression_alt(w1: &Connection, w0: &Connection) -> Result<ScalarForm, ChernError> {
    let a = w1.difference(w0)?;
    let omega1 = curvature(w1)?;
    let d1a = covariant_d(w1, &a)?;
    let term1 = omega1.wedge(&a)?.scale(&rat(2, 1));
    let term2 = d1a.wedge(&a)?;
    let term3 = a.wedge(&a)?.wedge(&a)?.scale(&rat(2, 3));
    Ok(term1.sub(&term2)?.add(&term3)?.trace())
}

/// Chart-dependent Chern-Simons Lagrangian tr(Omega ^ w - 1/3 w^3).
pub fn chern_simons(w: &Connection) -> Result<ScalarForm, ChernError> {
    let omega = curvature(w)?;
    let term1 = omega.wedge(w.form())?;
    let term2 = w
        .form()
        .wedge(w.form())?
        .wedge(w.form())?
        .scale(&rat(1, 3));
    Ok(term1.sub(&term2)?.trace())
}

/// The splitting CS(w1) - CS(w0) + d tr(w0 ^ w1); must agree with the
/// transgression at the common valid order. Inputs need valid order at
/// least 2 so the comparison retains a usable order after the derivative.
pub fn splitting_check(w1: &Connection, w0: &Connection) -> Result<ScalarForm, ChernError> {
    if w1.valid_order().min(w0.valid_order()) < 2 {
        return Err(ChernError::Form(FormError::DegenerateOrder));
    }
    let cs1 = chern_simons(w1)?;
    let cs0 = chern_simons(w0)?;
    let cross = w0.form().wedge(w1.form())?.trace().exterior_d()?;
    Ok(cs1.sub(&cs0)?.add(&cross)?)
}

/// General-parameter Lagrangian in the (w_t, a) variables:
/// 2 tr(Omega_t ^ a - (t - 1/2) D_t a ^ a + (1/3 - t + t^2) a^3).
pub fn q_general(
    w_t: &Connection,
    a: &GForm,
    choice: &VariableChoice,
) -> Result<ScalarForm, ChernError> {
    let t = choice.t();
    let omega_t = curvature(w_t)?;
    let dta = covariant_d(w_t, a)?;
    let c_mid = t.clone() - rat(1, 2);
    let c_cube = rat(1, 3) - t.clone() + t.clone() * t.clone();
    let term1 = omega_t.wedge(a)?;
    let term2 = dta.wedge(a)?.scale(&c_mid);
    let term3 = a.wedge(a)?.wedge(a)?.scale(&c_cube);
    Ok(term1.sub(&term2)?.add(&term3)?.trace().scale(&rat(2, 1)))
}

/// The three equal presentations of the combined two-connection identity:
/// 2 Omega_1 - D_1 a, 2 Omega_0 + D_0 a, and the interpolated
/// 2 Omega_t - 2t(1-t) a^2 - (2t-1) D_t a. Returned for pairwise
/// comparison at the common valid order; at t = 1/2 the third reduces to
/// Omega_0 + Omega_1 - a^2.
pub fn interpolation_identity(
    w0: &Connection,
    w1: &Connection,
    choice: &VariableChoice,
) -> Result<[GForm; 3], ChernError> {
    let t = choice.t();
    let a = w1.difference(w0)?;
    let e1 = curvature(w1)?
        .scale(&rat(2, 1))
        .sub(&covariant_d(w1, &a)?)?;
    let e2 = curvature(w0)?
        .scale(&rat(2, 1))
        .add(&covariant_d(w0, &a)?)?;
    let w_t = w0.shifted(t, &a)?;
    let c_sq = rat(2, 1) * t.clone() * (Rat::one() - t.clone());
    let c_cov = rat(2, 1) * t.clone() - Rat::one();
    let e3 = curvature(&w_t)?
        .scale(&rat(2, 1))
        .sub(&a.wedge(&a)?.scale(&c_sq))?
        .sub(&covariant_d(&w_t, &a)?.scale(&c_cov))?;
    Ok([e1, e2, e3])
}

/// Equation-of-motion residuals in the (w_t, a) presentation.
pub fn eom_residuals(
    w_t: &Connection,
    a: &GForm,
    choice: &VariableChoice,
) -> Result<EomResiduals, ChernError> {
    let t = choice.t();
    let asq = a.wedge(a)?;
    let c_curv = t.clone() * (Rat::one() - t.clone());
    let c_cov = rat(2, 1) * t.clone() - Rat::one();
    let r_curv = curvature(w_t)?.add(&asq.scale(&c_curv))?;
    let r_cov = covariant_d(w_t, a)?.sub(&asq.scale(&c_cov))?;
    Ok(EomResiduals { r_curv, r_cov })
}

/// Gauge-symmetry superpotential U(chi) = tr(a chi). Depends only on the
/// tensorial form, never on the variable choice.
pub fn superpotential_gauge(a: &GForm, chi: &LieMatrix) -> Result<ScalarForm, ChernError> {
    let chi_form = GForm::from_matrix(chi.clone());
    Ok(a.wedge(&chi_form)?.trace())
}

/// Diffeomorphism superpotential U(xi) = tr[a (2 w_t(xi) + (1-2t) a(xi))].
/// The printed expression depends on the variable choice; its value does
/// not, because 2 w_t(xi) + (1-2t) a(xi) = 2 wbar(xi) for every t.
pub fn superpotential_diffeo(
    a: &GForm,
    w_t: &Connection,
    choice: &VariableChoice,
    xi: &VectorFieldSym,
) -> Result<ScalarForm, ChernError> {
    let t = choice.t();
    let w_xi = w_t.form().contract(xi)?;
    let a_xi = a.contract(xi)?;
    let c = Rat::one() - rat(2, 1) * t.clone();
    let inner = w_xi.scale(&rat(2, 1)).add(&a_xi.scale(&c))?;
    Ok(a.wedge(&inner)?.trace())
}
