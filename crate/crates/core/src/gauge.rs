//! Connections, curvature, covariant derivatives, gauge transformations,
//! and a factory for flat connections built from local group elements.

use thiserror::Error;

use crate::forms::{FormError, GForm};
use crate::jet::{Axis, Jet};
use crate::liealg::LieMatrix;
use crate::rat::Rat;
use num_traits::{One, Zero};

#[derive(Error, Debug, PartialEq, Eq)]
pub enum GaugeError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("constant term of the matrix is singular")]
    Singular,
}

/// A connection 1-form.
#[derive(Clone, Debug)]
pub struct Connection {
    form: GForm,
}

impl Connection {
    pub fn new(form: GForm) -> Result<Connection, FormError> {
        if form.degree() != 1 {
            return Err(FormError::WrongDegree { want: 1, got: form.degree() });
        }
        Ok(Connection { form })
    }

    pub fn zero(size: usize, cap: u32) -> Connection {
        Connection { form: GForm::zero(1, size, cap) }
    }

    pub fn form(&self) -> &GForm {
        &self.form
    }

    pub fn into_form(self) -> GForm {
        self.form
    }

    pub fn valid_order(&self) -> u32 {
        self.form.valid_order()
    }

    pub fn matrix_size(&self) -> usize {
        self.form.matrix_size()
    }

    /// Difference of connections: the tensorial 1-form between them.
    pub fn difference(&self, other: &Connection) -> Result<GForm, FormError> {
        self.form.sub(&other.form)
    }

    /// The shifted connection self + c * a.
    pub fn shifted(&self, c: &Rat, a: &GForm) -> Result<Connection, FormError> {
        Connection::new(self.form.add(&a.scale(c))?)
    }
}

/// Curvature dw + w^w of a connection.
pub fn curvature(w: &Connection) -> Result<GForm, FormError> {
    let dw = w.form().exterior_d()?;
    let sq = w.form().wedge(w.form())?;
    dw.add(&sq)
}

/// Covariant derivative da + [w, a] of a form `a` with respect to `w`.
pub fn covariant_d(w: &Connection, a: &GForm) -> Result<GForm, FormError> {
    let da = a.exterior_d()?;
    let br = w.form().gbracket(a)?;
    da.add(&br)
}

/// Local gauge-group element: a jet matrix with invertible constant term,
/// carrying its cached inverse.
#[derive(Clone, Debug)]
pub struct GroupJet {
    matrix: LieMatrix,
    inverse: LieMatrix,
}

/// Inverts the constant rational part of a matrix by Gauss-Jordan
/// elimination. `None` when singular.
fn invert_constant_part(m: &LieMatrix) -> Option<Vec<Rat>> {
    let n = m.size();
    let mut a: Vec<Rat> = (0..n * n)
        .map(|idx| m.entry(idx / n, idx % n).constant_term())
        .collect();
    let mut inv: Vec<Rat> = (0..n * n)
        .map(|idx| if idx / n == idx % n { Rat::one() } else { Rat::zero() })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r * n + col].is_zero())?;
        for idx in 0..n {
            a.swap(col * n + idx, pivot * n + idx);
            inv.swap(col * n + idx, pivot * n + idx);
        }
        let scale = Rat::one() / a[col * n + col].clone();
        for idx in 0..n {
            a[col * n + idx] = a[col * n + idx].clone() * scale.clone();
            inv[col * n + idx] = inv[col * n + idx].clone() * scale.clone();
        }
        for row in 0..n {
            if row == col || a[row * n + col].is_zero() {
                continue;
            }
            let factor = a[row * n + col].clone();
            for idx in 0..n {
                let da = factor.clone() * a[col * n + idx].clone();
                a[row * n + idx] = a[row * n + idx].clone() - da;
                let di = factor.clone() * inv[col * n + idx].clone();
                inv[row * n + idx] = inv[row * n + idx].clone() - di;
            }
        }
    }
    Some(inv)
}

impl GroupJet {
    /// Builds a group element from any jet matrix whose constant term is
    /// invertible; the inverse is computed once and cached.
    pub fn new(matrix: LieMatrix) -> Result<GroupJet, GaugeError> {
        let n = matrix.size();
        let cap = matrix.cap();
        let const_inv = invert_constant_part(&matrix).ok_or(GaugeError::Singular)?;
        let c_inv = LieMatrix::from_entries(
            n,
            const_inv.into_iter().map(|r| Jet::constant(r, cap)).collect(),
        );
        // matrix = C + M with M of positive valuation, so
        // matrix^{-1} = (sum_k (-C^{-1} M)^k) C^{-1}; the series terminates.
        let c_part = c_inv.mul(&matrix).sub(&LieMatrix::identity(n, cap));
        let step = c_part.neg();
        let mut acc = LieMatrix::identity(n, cap);
        let mut power = LieMatrix::identity(n, cap);
        for _ in 0..cap {
            power = power.mul(&step);
            if power.is_zero_at(cap) {
                break;
            }
            acc = acc.add(&power);
        }
        let inverse = acc.mul(&c_inv);
        debug_assert!(matrix.mul(&inverse).eq_at(&LieMatrix::identity(n, cap), cap));
        Ok(GroupJet { matrix, inverse })
    }

    pub fn identity(size: usize, cap: u32) -> GroupJet {
        let id = LieMatrix::identity(size, cap);
        GroupJet { matrix: id.clone(), inverse: id }
    }

    pub fn matrix(&self) -> &LieMatrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &LieMatrix {
        &self.inverse
    }

    pub fn size(&self) -> usize {
        self.matrix.size()
    }

    pub fn cap(&self) -> u32 {
        self.matrix.cap()
    }
}

/// dg as a matrix-valued 1-form: components are the partials of g.
fn matrix_exterior_d(m: &LieMatrix) -> GForm {
    let comps = Axis::ALL.iter().map(|&ax| m.partial(ax)).collect();
    GForm::from_components(1, m.cap().saturating_sub(1), comps)
}

/// Conjugation g^{-1} (component) g applied to every component of a form.
fn conjugate_form(g: &GroupJet, a: &GForm) -> GForm {
    let comps = a
        .components()
        .map(|(_, m)| g.inverse().mul(m).mul(g.matrix()))
        .collect();
    GForm::from_components(a.degree(), a.valid_order(), comps)
}

/// Standard gauge transformation g^{-1} w g + g^{-1} dg.
pub fn gauge_transform(g: &GroupJet, w: &Connection) -> Result<Connection, GaugeError> {
    let conjugated = conjugate_form(g, w.form());
    let dg = matrix_exterior_d(g.matrix());
    let comps = dg.components().map(|(_, m)| g.inverse().mul(m)).collect();
    let inhomogeneous = GForm::from_components(1, dg.valid_order(), comps);
    Ok(Connection::new(conjugated.add(&inhomogeneous)?)?)
}

/// Conjugates a tensorial form: g^{-1} a g (no inhomogeneous term).
pub fn adjoint_transform(g: &GroupJet, a: &GForm) -> GForm {
    conjugate_form(g, a)
}

/// The pure-gauge connection g^{-1} dg; its curvature vanishes at the
/// valid order by construction.
pub fn flat_connection(g: &GroupJet) -> Connection {
    let dg = matrix_exterior_d(g.matrix());
    let comps = dg.components().map(|(_, m)| g.inverse().mul(m)).collect();
    Connection { form: GForm::from_components(1, dg.valid_order(), comps) }
}
