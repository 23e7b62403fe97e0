//! Graded exterior algebra of matrix-valued and scalar-valued differential
//! forms on the three-dimensional chart.
//!
//! Basis covectors are stored on the fixed ordered basis dx < dy < dz;
//! degree-k components are indexed by ascending covector subsets encoded as
//! bitmasks. Degrees above 3 have an empty basis, so such forms are
//! identically zero but still carry their nominal degree.
//!
//! Every form tracks a `valid_order`: the jet total degree up to which its
//! coefficients are trustworthy. Exterior differentiation lowers it by one
//! and binary operations take the minimum; equality is only ever asserted
//! up to the common valid order.

use std::fmt;

use thiserror::Error;

use crate::jet::{Axis, Jet};
use crate::liealg::LieMatrix;
use crate::rat::Rat;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum FormError {
    #[error("matrix size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(u8, u8),
    #[error("valid order is 0: differentiation would produce a fully degenerate value")]
    DegenerateOrder,
    #[error("cannot contract a 0-form")]
    ContractDegreeZero,
    #[error("expected a form of degree {want}, got degree {got}")]
    WrongDegree { want: u8, got: u8 },
}

/// Ascending covector subsets per degree, encoded as bitmasks over
/// {dx=1, dy=2, dz=4}; index order fixes the component layout.
const DEG0: [u8; 1] = [0b000];
const DEG1: [u8; 3] = [0b001, 0b010, 0b100];
const DEG2: [u8; 3] = [0b011, 0b101, 0b110];
const DEG3: [u8; 1] = [0b111];

pub fn basis_masks(degree: u8) -> &'static [u8] {
    match degree {
        0 => &DEG0,
        1 => &DEG1,
        2 => &DEG2,
        3 => &DEG3,
        _ => &[],
    }
}

fn mask_position(mask: u8) -> usize {
    basis_masks(mask.count_ones() as u8)
        .iter()
        .position(|&m| m == mask)
        .expect("valid covector mask")
}

fn mask_axes(mask: u8) -> impl Iterator<Item = Axis> {
    (0..3u8).filter(move |b| mask & (1 << b) != 0).map(|b| Axis::from_index(b as usize))
}

/// Sign of sorting the concatenation of two disjoint ascending covector
/// sets; `None` when they overlap (the wedge vanishes).
fn wedge_sign(left: u8, right: u8) -> Option<i8> {
    if left & right != 0 {
        return None;
    }
    let mut inversions = 0u32;
    for b in 0..3u8 {
        if right & (1 << b) != 0 {
            inversions += (left >> (b + 1)).count_ones();
        }
    }
    Some(if inversions.is_multiple_of(2) { 1 } else { -1 })
}

/// Sign of dx_a ^ dx_mask relative to the sorted result: move dx_a past
/// every smaller covector already present.
fn d_sign(axis_bit: u8, mask: u8) -> i8 {
    let below = (mask & (axis_bit - 1)).count_ones();
    if below.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn mask_name(mask: u8) -> String {
    if mask == 0 {
        return "1".to_string();
    }
    mask_axes(mask)
        .map(|a| format!("d{}", a.name()))
        .collect::<Vec<_>>()
        .join("^")
}

/// Coefficient objects a form can carry: jets for scalar-valued forms,
/// jet matrices for Lie-algebra-valued ones.
pub trait Coefficient: Clone {
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, s: &Rat) -> Self;
    fn scale_jet(&self, s: &Jet) -> Self;
    fn partial(&self, axis: Axis) -> Self;
    fn cap(&self) -> u32;
    fn truncate(&self, cap: u32) -> Self;
    fn is_zero_at(&self, order: u32) -> bool;
    fn eq_at(&self, other: &Self, order: u32) -> bool;
}

impl Coefficient for Jet {
    fn add(&self, other: &Self) -> Self {
        Jet::add(self, other)
    }
    fn neg(&self) -> Self {
        Jet::neg(self)
    }
    fn scale(&self, s: &Rat) -> Self {
        Jet::scale(self, s)
    }
    fn scale_jet(&self, s: &Jet) -> Self {
        self.mul(s)
    }
    fn partial(&self, axis: Axis) -> Self {
        Jet::partial(self, axis)
    }
    fn cap(&self) -> u32 {
        Jet::cap(self)
    }
    fn truncate(&self, cap: u32) -> Self {
        Jet::truncate(self, cap)
    }
    fn is_zero_at(&self, order: u32) -> bool {
        Jet::is_zero_at(self, order)
    }
    fn eq_at(&self, other: &Self, order: u32) -> bool {
        Jet::eq_at(self, other, order)
    }
}

impl Coefficient for LieMatrix {
    fn add(&self, other: &Self) -> Self {
        LieMatrix::add(self, other)
    }
    fn neg(&self) -> Self {
        LieMatrix::neg(self)
    }
    fn scale(&self, s: &Rat) -> Self {
        LieMatrix::scale(self, s)
    }
    fn scale_jet(&self, s: &Jet) -> Self {
        LieMatrix::scale_jet(self, s)
    }
    fn partial(&self, axis: Axis) -> Self {
        LieMatrix::partial(self, axis)
    }
    fn cap(&self) -> u32 {
        LieMatrix::cap(self)
    }
    fn truncate(&self, cap: u32) -> Self {
        LieMatrix::truncate(self, cap)
    }
    fn is_zero_at(&self, order: u32) -> bool {
        LieMatrix::is_zero_at(self, order)
    }
    fn eq_at(&self, other: &Self, order: u32) -> bool {
        LieMatrix::eq_at(self, other, order)
    }
}

/// Shared component machinery for scalar and matrix-valued forms.
#[derive(Clone, Debug)]
struct FormCore<C> {
    degree: u8,
    valid_order: u32,
    comps: Vec<C>,
}

impl<C: Coefficient> FormCore<C> {
    fn new(degree: u8, valid_order: u32, comps: Vec<C>) -> FormCore<C> {
        debug_assert_eq!(comps.len(), basis_masks(degree).len());
        let cap = comps
            .iter()
            .map(Coefficient::cap)
            .min()
            .unwrap_or(valid_order);
        let valid_order = valid_order.min(cap);
        let comps = comps.iter().map(|c| c.truncate(cap)).collect();
        FormCore { degree, valid_order, comps }
    }

    fn zero_with(degree: u8, valid_order: u32, make: impl Fn() -> C) -> FormCore<C> {
        let comps = basis_masks(degree).iter().map(|_| make()).collect();
        FormCore { degree, valid_order, comps }
    }

    fn comp(&self, mask: u8) -> &C {
        &self.comps[mask_position(mask)]
    }

    fn map(&self, f: impl Fn(&C) -> C) -> FormCore<C> {
        FormCore {
            degree: self.degree,
            valid_order: self.valid_order,
            comps: self.comps.iter().map(f).collect(),
        }
    }

    fn add(&self, other: &FormCore<C>) -> Result<FormCore<C>, FormError> {
        if self.degree != other.degree {
            return Err(FormError::DegreeMismatch(self.degree, other.degree));
        }
        Ok(FormCore {
            degree: self.degree,
            valid_order: self.valid_order.min(other.valid_order),
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    /// Wedge with a caller-supplied coefficient product (matrix-matrix,
    /// jet-jet, or mixed), including the basis reordering signs.
    fn wedge_with<B, R: Coefficient>(
        &self,
        other: &FormCore<B>,
        mul: impl Fn(&C, &B) -> R,
        zero: impl Fn() -> R,
    ) -> FormCore<R> {
        let degree = self.degree + other.degree;
        let mut out = FormCore::zero_with(degree, self.valid_order.min(other.valid_order), &zero);
        for (ia, mask_a) in basis_masks(self.degree).iter().enumerate() {
            for (ib, mask_b) in basis_masks(other.degree).iter().enumerate() {
                let Some(sign) = wedge_sign(*mask_a, *mask_b) else {
                    continue;
                };
                let prod = mul(&self.comps[ia], &other.comps[ib]);
                let prod = if sign < 0 { prod.neg() } else { prod };
                let pos = mask_position(mask_a | mask_b);
                out.comps[pos] = out.comps[pos].add(&prod);
            }
        }
        out
    }

    fn exterior_d(&self) -> Result<FormCore<C>, FormError> {
        if self.valid_order == 0 {
            return Err(FormError::DegenerateOrder);
        }
        let degree = self.degree + 1;
        let valid = self.valid_order - 1;
        let mut comps: Vec<Option<C>> = basis_masks(degree).iter().map(|_| None).collect();
        for (idx, mask) in basis_masks(self.degree).iter().enumerate() {
            for axis in Axis::ALL {
                let bit = 1u8 << axis.index();
                if mask & bit != 0 {
                    continue;
                }
                if degree > 3 {
                    continue;
                }
                let sign = d_sign(bit, *mask);
                let mut term = self.comps[idx].partial(axis);
                if sign < 0 {
                    term = term.neg();
                }
                let pos = mask_position(mask | bit);
                comps[pos] = Some(match comps[pos].take() {
                    Some(acc) => acc.add(&term),
                    None => term,
                });
            }
        }
        let comps: Vec<C> = comps
            .into_iter()
            .map(|c| c.expect("every higher covector is reachable"))
            .collect();
        Ok(FormCore::new(degree, valid, comps))
    }

    fn contract(&self, xi: &VectorFieldSym) -> Result<FormCore<C>, FormError> {
        if self.degree == 0 {
            return Err(FormError::ContractDegreeZero);
        }
        let degree = self.degree - 1;
        let xi_cap = xi.comps.iter().map(Jet::cap).min().unwrap_or(0);
        let mut out: Vec<Option<C>> = basis_masks(degree).iter().map(|_| None).collect();
        for (idx, mask) in basis_masks(self.degree).iter().enumerate() {
            for (slot, axis) in mask_axes(*mask).enumerate() {
                let bit = 1u8 << axis.index();
                let mut term = self.comps[idx].scale_jet(&xi.comps[axis.index()]);
                if slot % 2 == 1 {
                    term = term.neg();
                }
                let pos = mask_position(mask & !bit);
                out[pos] = Some(match out[pos].take() {
                    Some(acc) => acc.add(&term),
                    None => term,
                });
            }
        }
        let comps: Vec<C> = out
            .into_iter()
            .map(|c| c.expect("every lower covector is reachable"))
            .collect();
        Ok(FormCore::new(degree, self.valid_order.min(xi_cap), comps))
    }

    fn is_zero_at(&self, order: u32) -> bool {
        self.comps.iter().all(|c| c.is_zero_at(order))
    }

    fn eq_at(&self, other: &FormCore<C>, order: u32) -> bool {
        self.degree == other.degree
            && self
                .comps
                .iter()
                .zip(&other.comps)
                .all(|(a, b)| a.eq_at(b, order))
    }
}

/// Symbolic vector field on the chart: three jet components.
#[derive(Clone, Debug)]
pub struct VectorFieldSym {
    comps: [Jet; 3],
}

impl VectorFieldSym {
    pub fn new(comps: [Jet; 3]) -> VectorFieldSym {
        let cap = comps.iter().map(Jet::cap).min().unwrap_or(0);
        VectorFieldSym {
            comps: [
                comps[0].truncate(cap),
                comps[1].truncate(cap),
                comps[2].truncate(cap),
            ],
        }
    }

    /// The constant coordinate vector field along `axis`.
    pub fn coordinate(axis: Axis, cap: u32) -> VectorFieldSym {
        let mut comps = [Jet::zero(cap), Jet::zero(cap), Jet::zero(cap)];
        comps[axis.index()] = Jet::one(cap);
        VectorFieldSym::new(comps)
    }

    pub fn zero(cap: u32) -> VectorFieldSym {
        VectorFieldSym::new([Jet::zero(cap), Jet::zero(cap), Jet::zero(cap)])
    }

    pub fn component(&self, axis: Axis) -> &Jet {
        &self.comps[axis.index()]
    }

    pub fn cap(&self) -> u32 {
        self.comps.iter().map(Jet::cap).min().unwrap_or(0)
    }
}

/// Lie-algebra-valued (generally matrix-valued) exterior form.
#[derive(Clone, Debug)]
pub struct GForm {
    size: usize,
    core: FormCore<LieMatrix>,
}

impl GForm {
    pub fn zero(degree: u8, size: usize, cap: u32) -> GForm {
        GForm {
            size,
            core: FormCore::zero_with(degree, cap, || LieMatrix::zero(size, cap)),
        }
    }

    /// Builds a form from components listed in basis-mask order for the
    /// degree; `valid_order` is clamped to the common cap.
    pub fn from_components(degree: u8, valid_order: u32, comps: Vec<LieMatrix>) -> GForm {
        let size = comps.first().map(LieMatrix::size).unwrap_or(1);
        assert!(comps.iter().all(|m| m.size() == size), "uniform matrix size");
        GForm { size, core: FormCore::new(degree, valid_order, comps) }
    }

    /// Degree-0 form holding a single matrix.
    pub fn from_matrix(m: LieMatrix) -> GForm {
        let valid = m.cap();
        GForm::from_components(0, valid, vec![m])
    }

    /// A matrix attached to a single basis covector.
    pub fn monomial(mask: u8, m: LieMatrix) -> GForm {
        let degree = mask.count_ones() as u8;
        let valid = m.cap();
        let mut comps: Vec<LieMatrix> = basis_masks(degree)
            .iter()
            .map(|_| LieMatrix::zero(m.size(), m.cap()))
            .collect();
        comps[mask_position(mask)] = m;
        GForm::from_components(degree, valid, comps)
    }

    pub fn degree(&self) -> u8 {
        self.core.degree
    }

    pub fn valid_order(&self) -> u32 {
        self.core.valid_order
    }

    pub fn matrix_size(&self) -> usize {
        self.size
    }

    pub fn component(&self, mask: u8) -> &LieMatrix {
        self.core.comp(mask)
    }

    pub fn components(&self) -> impl Iterator<Item = (u8, &LieMatrix)> {
        basis_masks(self.degree()).iter().copied().zip(self.core.comps.iter())
    }

    fn check_size(&self, other: &GForm) -> Result<(), FormError> {
        if self.size != other.size {
            return Err(FormError::SizeMismatch(self.size, other.size));
        }
        Ok(())
    }

    pub fn add(&self, other: &GForm) -> Result<GForm, FormError> {
        self.check_size(other)?;
        Ok(GForm { size: self.size, core: self.core.add(&other.core)? })
    }

    pub fn sub(&self, other: &GForm) -> Result<GForm, FormError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GForm {
        GForm { size: self.size, core: self.core.map(LieMatrix::neg) }
    }

    pub fn scale(&self, s: &Rat) -> GForm {
        GForm { size: self.size, core: self.core.map(|m| m.scale(s)) }
    }

    pub fn scale_jet(&self, s: &Jet) -> GForm {
        GForm { size: self.size, core: self.core.map(|m| m.scale_jet(s)) }
    }

    /// Matrix-valued wedge: coefficients multiply as matrices, covectors
    /// antisymmetrize. Degrees beyond 3 are identically zero (empty basis).
    /// Accumulation is fused per output entry to keep the exact-rational
    /// inner loop free of intermediate matrices.
    pub fn wedge(&self, other: &GForm) -> Result<GForm, FormError> {
        self.check_size(other)?;
        let n = self.size;
        let degree = self.core.degree + other.core.degree;
        let valid = self.core.valid_order.min(other.core.valid_order);
        let cap = self
            .core
            .comps
            .first()
            .map(LieMatrix::cap)
            .unwrap_or(valid)
            .min(other.core.comps.first().map(LieMatrix::cap).unwrap_or(valid));
        let out_masks = basis_masks(degree);
        let mut pairs: Vec<Vec<(usize, usize, i8)>> = vec![Vec::new(); out_masks.len()];
        for (ia, ma) in basis_masks(self.core.degree).iter().enumerate() {
            for (ib, mb) in basis_masks(other.core.degree).iter().enumerate() {
                if let Some(sign) = wedge_sign(*ma, *mb) {
                    pairs[mask_position(ma | mb)].push((ia, ib, sign));
                }
            }
        }
        let mut comps = Vec::with_capacity(out_masks.len());
        for contributions in &pairs {
            let mut entries = Vec::with_capacity(n * n);
            for row in 0..n {
                for col in 0..n {
                    let mut acc = crate::jet::DenseAcc::new(cap);
                    for &(ia, ib, sign) in contributions {
                        let a = &self.core.comps[ia];
                        let b = &other.core.comps[ib];
                        for k in 0..n {
                            let x = a.entry(row, k);
                            let y = b.entry(k, col);
                            if x.is_zero() || y.is_zero() {
                                continue;
                            }
                            if sign < 0 {
                                acc.sub_product(x, y);
                            } else {
                                acc.add_product(x, y);
                            }
                        }
                    }
                    entries.push(acc.into_jet());
                }
            }
            comps.push(LieMatrix::from_entries(n, entries));
        }
        Ok(GForm { size: n, core: FormCore::new(degree, valid, comps) })
    }

    /// Graded bracket [A, B] = A^B - (-1)^{pq} B^A.
    pub fn gbracket(&self, other: &GForm) -> Result<GForm, FormError> {
        let ab = self.wedge(other)?;
        let ba = other.wedge(self)?;
        let sign_flip = (self.degree() as u32 * other.degree() as u32) % 2 == 1;
        if sign_flip {
            ab.add(&ba)
        } else {
            ab.sub(&ba)
        }
    }

    pub fn exterior_d(&self) -> Result<GForm, FormError> {
        Ok(GForm { size: self.size, core: self.core.exterior_d()? })
    }

    pub fn trace(&self) -> ScalarForm {
        ScalarForm {
            core: FormCore {
                degree: self.core.degree,
                valid_order: self.core.valid_order,
                comps: self.core.comps.iter().map(LieMatrix::trace).collect(),
            },
        }
    }

    pub fn contract(&self, xi: &VectorFieldSym) -> Result<GForm, FormError> {
        Ok(GForm { size: self.size, core: self.core.contract(xi)? })
    }

    pub fn is_zero_at(&self, order: u32) -> bool {
        self.core.is_zero_at(order)
    }

    pub fn eq_at(&self, other: &GForm, order: u32) -> bool {
        self.size == other.size && self.core.eq_at(&other.core, order)
    }

    /// Equality at the common valid order, together with that order.
    pub fn eq_at_common_order(&self, other: &GForm) -> (bool, u32) {
        let order = self.valid_order().min(other.valid_order());
        (self.eq_at(other, order), order)
    }

    /// Highest-degree differing term for failure certificates.
    pub fn describe_difference(&self, other: &GForm, order: u32) -> Option<String> {
        for (mask, mine) in self.components() {
            let theirs = other.component(mask);
            for row in 0..self.size {
                for col in 0..self.size {
                    if let Some((mi, a, b)) =
                        mine.entry(row, col).max_diff_term(theirs.entry(row, col), order)
                    {
                        return Some(format!(
                            "component {}, entry ({row},{col}), monomial x^{} y^{} z^{}: {} vs {}",
                            mask_name(mask),
                            mi[0],
                            mi[1],
                            mi[2],
                            crate::rat::fmt_rat(&a),
                            crate::rat::fmt_rat(&b),
                        ));
                    }
                }
            }
        }
        None
    }
}

/// Linear combination c1*A + c2*B of two equal-degree forms.
pub fn scale_add(c1: &Rat, a: &GForm, c2: &Rat, b: &GForm) -> Result<GForm, FormError> {
    a.scale(c1).add(&b.scale(c2))
}

/// Scalar-valued exterior form (trace results and scalar test data).
#[derive(Clone, Debug)]
pub struct ScalarForm {
    core: FormCore<Jet>,
}

impl ScalarForm {
    pub fn zero(degree: u8, cap: u32) -> ScalarForm {
        ScalarForm { core: FormCore::zero_with(degree, cap, || Jet::zero(cap)) }
    }

    pub fn from_components(degree: u8, valid_order: u32, comps: Vec<Jet>) -> ScalarForm {
        ScalarForm { core: FormCore::new(degree, valid_order, comps) }
    }

    pub fn from_jet(j: Jet) -> ScalarForm {
        let valid = j.cap();
        ScalarForm::from_components(0, valid, vec![j])
    }

    pub fn monomial(mask: u8, j: Jet) -> ScalarForm {
        let degree = mask.count_ones() as u8;
        let valid = j.cap();
        let mut comps: Vec<Jet> = basis_masks(degree).iter().map(|_| Jet::zero(j.cap())).collect();
        comps[mask_position(mask)] = j;
        ScalarForm::from_components(degree, valid, comps)
    }

    pub fn degree(&self) -> u8 {
        self.core.degree
    }

    pub fn valid_order(&self) -> u32 {
        self.core.valid_order
    }

    pub fn component(&self, mask: u8) -> &Jet {
        self.core.comp(mask)
    }

    pub fn components(&self) -> impl Iterator<Item = (u8, &Jet)> {
        basis_masks(self.degree()).iter().copied().zip(self.core.comps.iter())
    }

    pub fn add(&self, other: &ScalarForm) -> Result<ScalarForm, FormError> {
        Ok(ScalarForm { core: self.core.add(&other.core)? })
    }

    pub fn sub(&self, other: &ScalarForm) -> Result<ScalarForm, FormError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ScalarForm {
        ScalarForm { core: self.core.map(Jet::neg) }
    }

    pub fn scale(&self, s: &Rat) -> ScalarForm {
        ScalarForm { core: self.core.map(|j| j.scale(s)) }
    }

    pub fn scale_jet(&self, s: &Jet) -> ScalarForm {
        ScalarForm { core: self.core.map(|j| j.mul(s)) }
    }

    pub fn wedge(&self, other: &ScalarForm) -> ScalarForm {
        let degree = self.core.degree + other.core.degree;
        let valid = self.core.valid_order.min(other.core.valid_order);
        let cap = self
            .core
            .comps
            .first()
            .map(Jet::cap)
            .unwrap_or(valid)
            .min(other.core.comps.first().map(Jet::cap).unwrap_or(valid));
        let out_masks = basis_masks(degree);
        let mut accs: Vec<crate::jet::DenseAcc> =
            out_masks.iter().map(|_| crate::jet::DenseAcc::new(cap)).collect();
        for (ia, ma) in basis_masks(self.core.degree).iter().enumerate() {
            for (ib, mb) in basis_masks(other.core.degree).iter().enumerate() {
                let Some(sign) = wedge_sign(*ma, *mb) else { continue };
                let acc = &mut accs[mask_position(ma | mb)];
                if sign < 0 {
                    acc.sub_product(&self.core.comps[ia], &other.core.comps[ib]);
                } else {
                    acc.add_product(&self.core.comps[ia], &other.core.comps[ib]);
                }
            }
        }
        let comps = accs.into_iter().map(crate::jet::DenseAcc::into_jet).collect();
        ScalarForm { core: FormCore::new(degree, valid, comps) }
    }

    /// Scalar form wedge matrix form: coefficients multiply the matrices.
    pub fn wedge_gform(&self, other: &GForm) -> GForm {
        let size = other.matrix_size();
        let core = self.core.wedge_with(
            &other.core,
            |j, m| m.scale_jet(j),
            || LieMatrix::zero(size, self.core.valid_order.min(other.core.valid_order)),
        );
        GForm { size, core }
    }

    pub fn exterior_d(&self) -> Result<ScalarForm, FormError> {
        Ok(ScalarForm { core: self.core.exterior_d()? })
    }

    pub fn contract(&self, xi: &VectorFieldSym) -> Result<ScalarForm, FormError> {
        Ok(ScalarForm { core: self.core.contract(xi)? })
    }

    pub fn is_zero_at(&self, order: u32) -> bool {
        self.core.is_zero_at(order)
    }

    pub fn eq_at(&self, other: &ScalarForm, order: u32) -> bool {
        self.core.eq_at(&other.core, order)
    }

    pub fn eq_at_common_order(&self, other: &ScalarForm) -> (bool, u32) {
        let order = self.valid_order().min(other.valid_order());
        (self.eq_at(other, order), order)
    }

    pub fn describe_difference(&self, other: &ScalarForm, order: u32) -> Option<String> {
        for (mask, mine) in self.components() {
            if let Some((mi, a, b)) = mine.max_diff_term(other.component(mask), order) {
                return Some(format!(
                    "component {}, monomial x^{} y^{} z^{}: {} vs {}",
                    mask_name(mask),
                    mi[0],
                    mi[1],
                    mi[2],
                    crate::rat::fmt_rat(&a),
                    crate::rat::fmt_rat(&b),
                ));
            }
        }
        None
    }
}

/// GForm wedge ScalarForm (matrix coefficients times scalar jets).
pub fn wedge_gform_scalar(a: &GForm, b: &ScalarForm) -> GForm {
    let size = a.matrix_size();
    let core = a.core.wedge_with(
        &b.core,
        |m, j| m.scale_jet(j),
        || LieMatrix::zero(size, a.core.valid_order.min(b.core.valid_order)),
    );
    GForm { size, core }
}

impl fmt::Display for ScalarForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (mask, jet) in self.components() {
            if jet.is_zero() {
                continue;
            }
            let coeff = jet.to_string();
            let basis = mask_name(mask);
            if mask == 0 {
                parts.push(coeff);
            } else if coeff == "1" {
                parts.push(basis);
            } else if coeff.contains(' ') || coeff.contains('+') || coeff.contains('-') {
                // Multi-term or negative jet coefficients get parentheses.
                if coeff.starts_with('-') && !coeff[1..].contains([' ', '+', '-']) {
                    parts.push(format!("-{} {}", &coeff[1..], basis));
                } else {
                    parts.push(format!("({coeff}) {basis}"));
                }
            } else {
                parts.push(format!("{coeff} {basis}"));
            }
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Display for GForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (mask, m) in self.components() {
            if m.is_zero_at(m.cap()) {
                continue;
            }
            if !first {
                writeln!(f)?;
            }
            first = false;
            write!(f, "{}:\n{}", mask_name(mask), m)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::LieAlgebraSpec;
    use crate::rat::{rat, rint};

    fn sl2_basis(cap: u32) -> (LieMatrix, LieMatrix, LieMatrix) {
        let sl2 = LieAlgebraSpec::sl2();
        (
            sl2.basis_matrix(0, cap),
            sl2.basis_matrix(1, cap),
            sl2.basis_matrix(2, cap),
        )
    }

    const DX: u8 = 0b001;
    const DY: u8 = 0b010;
    const DZ: u8 = 0b100;
    const DXDY: u8 = 0b011;
    const DXDZ: u8 = 0b101;
    const DYDZ: u8 = 0b110;
    const DXDYDZ: u8 = 0b111;

    #[test]
    fn wedge_sign_table() {
        assert_eq!(wedge_sign(DX, DY), Some(1));
        assert_eq!(wedge_sign(DY, DX), Some(-1));
        assert_eq!(wedge_sign(DX, DX), None);
        assert_eq!(wedge_sign(DXDZ, DY), Some(-1));
        assert_eq!(wedge_sign(DYDZ, DX), Some(1));
        assert_eq!(wedge_sign(DXDY, DZ), Some(1));
    }

    #[test]
    fn wedge_basis_case() {
        let (e, f, _) = sl2_basis(3);
        let a = GForm::monomial(DX, e.clone());
        let b = GForm::monomial(DY, f.clone());
        let ab = a.wedge(&b).unwrap();
        assert_eq!(ab.degree(), 2);
        assert_eq!(*ab.component(DXDY), e.mul(&f));
        assert!(ab.component(DXDZ).is_zero_at(3));
    }

    #[test]
    fn wedge_repeated_covector_vanishes() {
        let (e, f, _) = sl2_basis(3);
        let a = GForm::monomial(DX, e);
        let b = GForm::monomial(DX, f);
        assert!(a.wedge(&b).unwrap().is_zero_at(3));
    }

    #[test]
    fn wedge_alpha_squared_matches_oracle() {
        // alpha = E dx + F dy + H dz; oracle expands all nine products by hand
        // over the three covector pairs with their reordering signs.
        let (e, f, h) = sl2_basis(4);
        let alpha = GForm::from_components(
            1,
            4,
            vec![e.clone(), f.clone(), h.clone()],
        );
        let sq = alpha.wedge(&alpha).unwrap();
        // dx^dy: EF - FE = H; dx^dz: EH - HE = -2E; dy^dz: FH - HF = 2F.
        assert_eq!(*sq.component(DXDY), e.mul(&f).sub(&f.mul(&e)));
        assert_eq!(*sq.component(DXDZ), e.mul(&h).sub(&h.mul(&e)));
        assert_eq!(*sq.component(DYDZ), f.mul(&h).sub(&h.mul(&f)));
        assert_eq!(*sq.component(DXDY), h);
        assert_eq!(*sq.component(DXDZ), e.scale(&rint(-2)));
        assert_eq!(*sq.component(DYDZ), f.scale(&rint(2)));
    }

    #[test]
    fn gbracket_of_odd_form_doubles_square() {
        let (e, f, h) = sl2_basis(4);
        let omega = GForm::from_components(
            1,
            4,
            vec![
                e.scale_jet(&Jet::var(Axis::Y, 4)),
                f.clone(),
                h.scale_jet(&Jet::var(Axis::X, 4)),
            ],
        );
        let br = omega.gbracket(&omega).unwrap();
        let doubled = omega.wedge(&omega).unwrap().scale(&rint(2));
        assert!(br.eq_at(&doubled, 4));
    }

    #[test]
    fn gbracket_degree_zero_is_pointwise_bracket() {
        let (e, _, h) = sl2_basis(3);
        let a = GForm::from_matrix(e.clone());
        let b = GForm::from_matrix(h.clone());
        let br = a.gbracket(&b).unwrap();
        assert_eq!(*br.component(0), e.bracket(&h).unwrap());
    }

    #[test]
    fn gbracket_mixed_degree() {
        // [E dx, H] = [E, H] dx = -2E dx.
        let (e, _, h) = sl2_basis(3);
        let a = GForm::monomial(DX, e.clone());
        let b = GForm::from_matrix(h.clone());
        let br = a.gbracket(&b).unwrap();
        assert_eq!(*br.component(DX), e.bracket(&h).unwrap());
        assert_eq!(*br.component(DX), e.scale(&rint(-2)));
    }

    #[test]
    fn exterior_d_single_partial() {
        let (e, _, _) = sl2_basis(3);
        let a = GForm::monomial(DY, e.scale_jet(&Jet::var(Axis::X, 3)));
        let da = a.exterior_d().unwrap();
        assert_eq!(da.degree(), 2);
        assert_eq!(da.valid_order(), 2);
        assert!(da.component(DXDY).eq_at(&e, 2));
        assert!(da.component(DXDZ).is_zero_at(2));
        assert!(da.component(DYDZ).is_zero_at(2));
    }

    #[test]
    fn exterior_d_constant_vanishes() {
        let (_, f, _) = sl2_basis(3);
        let a = GForm::monomial(DZ, f);
        assert!(a.exterior_d().unwrap().is_zero_at(2));
    }

    #[test]
    fn exterior_d_degenerate_order_errors() {
        let (e, _, _) = sl2_basis(0);
        let a = GForm::monomial(DX, e);
        assert_eq!(a.exterior_d().unwrap_err(), FormError::DegenerateOrder);
    }

    #[test]
    fn trace_examples() {
        let (_, _, h) = sl2_basis(3);
        let a = GForm::monomial(DZ, h.clone());
        assert!(a.trace().is_zero_at(3));
        let h2 = GForm::monomial(DXDYDZ, h.mul(&h));
        let traced = h2.trace();
        assert_eq!(*traced.component(DXDYDZ), Jet::constant(rint(2), 3));
        assert!(GForm::zero(2, 2, 3).trace().is_zero_at(3));
    }

    #[test]
    fn contract_dual_pairing() {
        let (e, _, h) = sl2_basis(3);
        let xi_x = VectorFieldSym::coordinate(Axis::X, 3);
        let xi_y = VectorFieldSym::coordinate(Axis::Y, 3);
        let a = GForm::monomial(DX, e.clone());
        assert_eq!(*a.contract(&xi_x).unwrap().component(0), e);
        assert!(a.contract(&xi_y).unwrap().is_zero_at(3));
        // First-slot convention: contraction of dx^dy along x leaves +dy.
        let b = GForm::monomial(DXDY, h.clone());
        let c = b.contract(&xi_x).unwrap();
        assert_eq!(*c.component(DY), h);
        assert!(c.component(DX).is_zero_at(3));
        // ...and along y leaves -dx.
        let c2 = b.contract(&xi_y).unwrap();
        assert_eq!(*c2.component(DX), h.neg());
    }

    #[test]
    fn contract_degree_zero_errors() {
        let (e, _, _) = sl2_basis(3);
        let a = GForm::from_matrix(e);
        let xi = VectorFieldSym::coordinate(Axis::X, 3);
        assert_eq!(a.contract(&xi).unwrap_err(), FormError::ContractDegreeZero);
    }

    #[test]
    fn scale_add_cases() {
        let (e, f, _) = sl2_basis(3);
        let a = GForm::monomial(DX, e);
        let b = GForm::monomial(DY, f);
        let just_a = scale_add(&rint(1), &a, &rint(0), &b).unwrap();
        assert!(just_a.eq_at(&a, 3));
        let cancel = scale_add(&rint(1), &a, &rint(-1), &a).unwrap();
        assert!(cancel.is_zero_at(3));
        let avg = scale_add(&rat(1, 2), &a, &rat(1, 2), &b).unwrap();
        assert!(avg.component(DX).eq_at(&a.component(DX).scale(&rat(1, 2)), 3));
    }

    #[test]
    fn scale_add_degree_mismatch() {
        let (e, f, _) = sl2_basis(3);
        let a = GForm::monomial(DX, e);
        let b = GForm::from_matrix(f);
        assert_eq!(
            scale_add(&rint(1), &a, &rint(1), &b).unwrap_err(),
            FormError::DegreeMismatch(1, 0)
        );
    }

    #[test]
    fn wedge_above_top_degree_is_zero() {
        let (e, f, _) = sl2_basis(3);
        let two = GForm::monomial(DXDY, e);
        let other = GForm::monomial(DYDZ, f);
        let four = two.wedge(&other).unwrap();
        assert_eq!(four.degree(), 4);
        assert!(four.is_zero_at(3));
    }

    #[test]
    fn scalar_form_display() {
        let q = ScalarForm::monomial(DXDYDZ, Jet::constant(rint(4), 3));
        assert_eq!(q.to_string(), "4 dx^dy^dz");
        let u = ScalarForm::monomial(DZ, Jet::constant(rint(2), 3));
        assert_eq!(u.to_string(), "2 dz");
        assert_eq!(ScalarForm::zero(2, 3).to_string(), "0");
    }
}
