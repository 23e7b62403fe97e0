//! Matrix realizations of the structure Lie algebras over the jet ring.
//!
//! Two rational-basis algebras are built in: sl(2) in the fundamental 2x2
//! representation with basis (E, F_, H), and sl(3) with the elementary
//! (Chevalley) basis. "Trace" always means the matrix trace of the
//! fundamental representation.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::jet::Jet;
use crate::rat::{rint, Rat};

#[derive(Error, Debug, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("matrix size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("coefficient count {got} does not match algebra dimension {want}")]
    CoefficientCount { got: usize, want: usize },
    #[error("basis matrices are linearly dependent")]
    DependentBasis,
    #[error("bracket of basis elements {0} and {1} leaves the rational span")]
    NotClosed(usize, usize),
    #[error("Jacobi identity fails on basis triple ({0}, {1}, {2})")]
    JacobiFailure(usize, usize, usize),
    #[error("unknown algebra '{0}'")]
    UnknownAlgebra(String),
}

/// A named Lie algebra given by rational basis matrices in a faithful
/// matrix representation.
#[derive(Clone, Debug)]
pub struct LieAlgebraSpec {
    name: String,
    matrix_size: usize,
    basis: Vec<Vec<Rat>>,
    basis_names: Vec<String>,
}

fn mat_from_i64(size: usize, rows: &[&[i64]]) -> Vec<Rat> {
    let mut out = Vec::with_capacity(size * size);
    for row in rows {
        for &v in *row {
            out.push(rint(v));
        }
    }
    out
}

fn rat_mat_mul(size: usize, a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); size * size];
    for i in 0..size {
        for k in 0..size {
            let aik = &a[i * size + k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..size {
                let prod = aik.clone() * b[k * size + j].clone();
                out[i * size + j] += prod;
            }
        }
    }
    out
}

fn rat_mat_bracket(size: usize, a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let ab = rat_mat_mul(size, a, b);
    let ba = rat_mat_mul(size, b, a);
    ab.into_iter().zip(ba).map(|(x, y)| x - y).collect()
}

/// Solves for coefficients expressing `target` in the span of `basis`
/// (each a flattened size*size matrix). Returns `None` when inconsistent.
fn solve_in_span(basis: &[Vec<Rat>], target: &[Rat]) -> Option<Vec<Rat>> {
    let rows = target.len();
    let cols = basis.len();
    // Augmented system: columns are basis vectors, rhs is the target.
    let mut aug: Vec<Vec<Rat>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rat> = basis.iter().map(|b| b[r].clone()).collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..cols {
        let Some(sel) = (pivot_row..rows).find(|&r| !aug[r][col].is_zero()) else {
            continue;
        };
        aug.swap(pivot_row, sel);
        let inv = Rat::one() / aug[pivot_row][col].clone();
        for v in aug[pivot_row][col..=cols].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        let pivot_vals = aug[pivot_row][col..=cols].to_vec();
        for (r, row) in aug.iter_mut().enumerate() {
            if r == pivot_row || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (dst, pv) in row[col..=cols].iter_mut().zip(&pivot_vals) {
                *dst = dst.clone() - factor.clone() * pv.clone();
            }
        }
        pivots.push(col);
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    // Inconsistent if any zero row has nonzero rhs.
    if aug[pivot_row..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut coeffs = vec![Rat::zero(); cols];
    for (row, &col) in pivots.iter().enumerate() {
        coeffs[col] = aug[row][cols].clone();
    }
    Some(coeffs)
}

impl LieAlgebraSpec {
    /// sl(2) with `E = [[0,1],[0,0]]`, `F_ = [[0,0],[1,0]]`, `H = [[1,0],[0,-1]]`.
    pub fn sl2() -> LieAlgebraSpec {
        let spec = LieAlgebraSpec {
            name: "sl2".into(),
            matrix_size: 2,
            basis: vec![
                mat_from_i64(2, &[&[0, 1], &[0, 0]]),
                mat_from_i64(2, &[&[0, 0], &[1, 0]]),
                mat_from_i64(2, &[&[1, 0], &[0, -1]]),
            ],
            basis_names: vec!["E".into(), "F_".into(), "H".into()],
        };
        debug_assert!(spec.validate().is_ok());
        spec
    }

    /// sl(3) with the six elementary off-diagonal matrices and the two
    /// traceless diagonal generators H1 = E11-E22, H2 = E22-E33.
    pub fn sl3() -> LieAlgebraSpec {
        let mut basis = Vec::new();
        let mut names = Vec::new();
        for (i, j) in [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)] {
            let mut m = vec![Rat::zero(); 9];
            m[i * 3 + j] = Rat::one();
            basis.push(m);
            names.push(format!("E{}{}", i + 1, j + 1));
        }
        basis.push(mat_from_i64(3, &[&[1, 0, 0], &[0, -1, 0], &[0, 0, 0]]));
        names.push("H1".into());
        basis.push(mat_from_i64(3, &[&[0, 0, 0], &[0, 1, 0], &[0, 0, -1]]));
        names.push("H2".into());
        let spec = LieAlgebraSpec { name: "sl3".into(), matrix_size: 3, basis, basis_names: names };
        debug_assert!(spec.validate().is_ok());
        spec
    }

    pub fn by_name(name: &str) -> Result<LieAlgebraSpec, AlgebraError> {
        match name {
            "sl2" => Ok(LieAlgebraSpec::sl2()),
            "sl3" => Ok(LieAlgebraSpec::sl3()),
            other => Err(AlgebraError::UnknownAlgebra(other.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn matrix_size(&self) -> usize {
        self.matrix_size
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    pub fn basis_index(&self, name: &str) -> Option<usize> {
        self.basis_names.iter().position(|n| n == name)
    }

    /// Basis element as a constant-coefficient `LieMatrix` at the given cap.
    pub fn basis_matrix(&self, idx: usize, cap: u32) -> LieMatrix {
        let entries = self.basis[idx]
            .iter()
            .map(|c| Jet::constant(c.clone(), cap))
            .collect();
        LieMatrix::from_entries(self.matrix_size, entries)
    }

    /// Checks linear independence, closure under the bracket, and the
    /// Jacobi identity on all basis triples.
    pub fn validate(&self) -> Result<(), AlgebraError> {
        let n = self.matrix_size;
        // Independence: no basis vector is a combination of the previous ones.
        for k in 1..self.basis.len() {
            if solve_in_span(&self.basis[..k], &self.basis[k]).is_some() {
                return Err(AlgebraError::DependentBasis);
            }
        }
        for i in 0..self.basis.len() {
            for j in 0..self.basis.len() {
                let br = rat_mat_bracket(n, &self.basis[i], &self.basis[j]);
                if solve_in_span(&self.basis, &br).is_none() {
                    return Err(AlgebraError::NotClosed(i, j));
                }
            }
        }
        for i in 0..self.basis.len() {
            for j in 0..self.basis.len() {
                for k in 0..self.basis.len() {
                    let a = &self.basis[i];
                    let b = &self.basis[j];
                    let c = &self.basis[k];
                    let mut sum = rat_mat_bracket(n, a, &rat_mat_bracket(n, b, c));
                    for (s, t) in sum
                        .iter_mut()
                        .zip(rat_mat_bracket(n, b, &rat_mat_bracket(n, c, a)))
                    {
                        *s += t;
                    }
                    for (s, t) in sum
                        .iter_mut()
                        .zip(rat_mat_bracket(n, c, &rat_mat_bracket(n, a, b)))
                    {
                        *s += t;
                    }
                    if sum.iter().any(|v| !v.is_zero()) {
                        return Err(AlgebraError::JacobiFailure(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Square matrix of jets; the Lie-algebra-valued (or general matrix-valued)
/// component functions of differential forms. All entries share one cap,
/// normalized to the minimum at construction.
#[derive(Clone, Debug)]
pub struct LieMatrix {
    size: usize,
    cap: u32,
    entries: Vec<Jet>,
}

impl LieMatrix {
    pub fn from_entries(size: usize, entries: Vec<Jet>) -> LieMatrix {
        assert_eq!(entries.len(), size * size, "entry count must be size^2");
        let cap = entries.iter().map(Jet::cap).min().unwrap_or(0);
        let entries = entries.iter().map(|j| j.truncate(cap)).collect();
        LieMatrix { size, cap, entries }
    }

    pub fn zero(size: usize, cap: u32) -> LieMatrix {
        LieMatrix { size, cap, entries: vec![Jet::zero(cap); size * size] }
    }

    pub fn identity(size: usize, cap: u32) -> LieMatrix {
        let mut m = LieMatrix::zero(size, cap);
        for i in 0..size {
            m.entries[i * size + i] = Jet::one(cap);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn entry(&self, row: usize, col: usize) -> &Jet {
        &self.entries[row * self.size + col]
    }

    pub fn entries(&self) -> &[Jet] {
        &self.entries
    }

    pub fn truncate(&self, cap: u32) -> LieMatrix {
        if cap >= self.cap {
            let mut out = self.clone();
            out.cap = cap.min(self.cap);
            return out;
        }
        LieMatrix {
            size: self.size,
            cap,
            entries: self.entries.iter().map(|j| j.truncate(cap)).collect(),
        }
    }

    fn check_size(&self, other: &LieMatrix) -> Result<(), AlgebraError> {
        if self.size != other.size {
            return Err(AlgebraError::SizeMismatch(self.size, other.size));
        }
        Ok(())
    }

    pub fn add(&self, other: &LieMatrix) -> LieMatrix {
        debug_assert_eq!(self.size, other.size);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        LieMatrix::from_entries(self.size, entries)
    }

    pub fn sub(&self, other: &LieMatrix) -> LieMatrix {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LieMatrix {
        LieMatrix {
            size: self.size,
            cap: self.cap,
            entries: self.entries.iter().map(Jet::neg).collect(),
        }
    }

    pub fn scale(&self, s: &Rat) -> LieMatrix {
        LieMatrix {
            size: self.size,
            cap: self.cap,
            entries: self.entries.iter().map(|j| j.scale(s)).collect(),
        }
    }

    pub fn scale_jet(&self, s: &Jet) -> LieMatrix {
        let entries = self.entries.iter().map(|j| j.mul(s)).collect();
        LieMatrix::from_entries(self.size, entries)
    }

    pub fn mul(&self, other: &LieMatrix) -> LieMatrix {
        debug_assert_eq!(self.size, other.size);
        let n = self.size;
        let cap = self.cap.min(other.cap);
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = crate::jet::DenseAcc::new(cap);
                for k in 0..n {
                    let aik = &self.entries[i * n + k];
                    let bkj = &other.entries[k * n + j];
                    if aik.is_zero() || bkj.is_zero() {
                        continue;
                    }
                    acc.add_product(aik, bkj);
                }
                entries.push(acc.into_jet());
            }
        }
        LieMatrix { size: n, cap, entries }
    }

    /// Pointwise bracket XY - YX.
    pub fn bracket(&self, other: &LieMatrix) -> Result<LieMatrix, AlgebraError> {
        self.check_size(other)?;
        Ok(self.mul(other).sub(&other.mul(self)))
    }

    pub fn trace(&self) -> Jet {
        let mut t = Jet::zero(self.cap);
        for i in 0..self.size {
            t = t.add(self.entry(i, i));
        }
        t
    }

    pub fn partial(&self, axis: crate::jet::Axis) -> LieMatrix {
        let entries = self.entries.iter().map(|j| j.partial(axis)).collect();
        LieMatrix::from_entries(self.size, entries)
    }

    pub fn is_zero_at(&self, order: u32) -> bool {
        self.entries.iter().all(|j| j.is_zero_at(order))
    }

    pub fn eq_at(&self, other: &LieMatrix, order: u32) -> bool {
        self.size == other.size
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.eq_at(b, order))
    }

    pub fn is_constant(&self) -> bool {
        self.entries
            .iter()
            .all(|j| j.terms().all(|(mi, _)| crate::jet::total_degree(mi) == 0))
    }
}

impl PartialEq for LieMatrix {
    fn eq(&self, other: &LieMatrix) -> bool {
        self.size == other.size && self.eq_at(other, self.cap.min(other.cap))
    }
}

impl fmt::Display for LieMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in 0..self.size {
            write!(f, "[")?;
            for col in 0..self.size {
                if col > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.entry(row, col))?;
            }
            write!(f, "]")?;
            if row + 1 < self.size {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Trace pairing tr(XY), the bilinear form used throughout.
pub fn trace_form(x: &LieMatrix, y: &LieMatrix) -> Result<Jet, AlgebraError> {
    if x.size() != y.size() {
        return Err(AlgebraError::SizeMismatch(x.size(), y.size()));
    }
    Ok(x.mul(y).trace())
}

/// Linear combination of basis matrices with jet coefficients.
pub fn from_coefficients(
    spec: &LieAlgebraSpec,
    coeffs: &[Jet],
) -> Result<LieMatrix, AlgebraError> {
    if coeffs.len() != spec.dim() {
        return Err(AlgebraError::CoefficientCount { got: coeffs.len(), want: spec.dim() });
    }
    let cap = coeffs.iter().map(Jet::cap).min().unwrap_or(0);
    let mut acc = LieMatrix::zero(spec.matrix_size(), cap);
    for (idx, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        acc = acc.add(&spec.basis_matrix(idx, cap).scale_jet(c));
    }
    Ok(acc)
}
