//! Truncated multivariate polynomials ("jets") in the three chart
//! coordinates x, y, z over exact rationals.
//!
//! A `Jet` keeps every monomial of total degree at most its `cap` and
//! nothing beyond; truncation by total degree is a ring quotient, so ring
//! identities that hold for polynomials hold verbatim for jets. Binary
//! operations truncate to the smaller cap of the two operands, and formal
//! differentiation lowers the cap by one: an order-D truncation only
//! determines its derivative to order D-1.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::rat::{fmt_rat, Rat};

/// A chart coordinate direction.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i]
    }
}

/// Exponents (i, j, k) of the monomial x^i y^j z^k.
pub type MultiIndex = [u8; 3];

pub fn total_degree(mi: &MultiIndex) -> u32 {
    mi.iter().map(|&e| u32::from(e)).sum()
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum JetError {
    #[error("not a unit: zero constant term")]
    NotAUnit,
}

/// Sparse truncated polynomial. Invariants: no stored coefficient is zero
/// and no stored monomial exceeds `cap` in total degree.
#[derive(Clone, Debug)]
pub struct Jet {
    cap: u32,
    terms: BTreeMap<MultiIndex, Rat>,
}

impl Jet {
    pub fn zero(cap: u32) -> Jet {
        Jet { cap, terms: BTreeMap::new() }
    }

    pub fn one(cap: u32) -> Jet {
        Jet::constant(Rat::one(), cap)
    }

    pub fn constant(value: Rat, cap: u32) -> Jet {
        let mut j = Jet::zero(cap);
        j.insert([0, 0, 0], value);
        j
    }

    /// The coordinate function along `axis`. Truncates to zero at cap 0.
    pub fn var(axis: Axis, cap: u32) -> Jet {
        let mut mi = [0u8; 3];
        mi[axis.index()] = 1;
        Jet::monomial(mi, Rat::one(), cap)
    }

    /// `coeff * x^i y^j z^k`, dropped entirely if the degree exceeds `cap`.
    pub fn monomial(mi: MultiIndex, coeff: Rat, cap: u32) -> Jet {
        let mut j = Jet::zero(cap);
        j.insert(mi, coeff);
        j
    }

    pub fn from_terms(cap: u32, terms: impl IntoIterator<Item = (MultiIndex, Rat)>) -> Jet {
        let mut j = Jet::zero(cap);
        for (mi, c) in terms {
            j.add_term(mi, c);
        }
        j
    }

    fn insert(&mut self, mi: MultiIndex, coeff: Rat) {
        if !coeff.is_zero() && total_degree(&mi) <= self.cap {
            self.terms.insert(mi, coeff);
        }
    }

    fn add_term(&mut self, mi: MultiIndex, coeff: Rat) {
        if coeff.is_zero() || total_degree(&mi) > self.cap {
            return;
        }
        match self.terms.get_mut(&mi) {
            Some(c) => {
                *c += coeff;
                if c.is_zero() {
                    self.terms.remove(&mi);
                }
            }
            None => {
                self.terms.insert(mi, coeff);
            }
        }
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mi: MultiIndex) -> Rat {
        self.terms.get(&mi).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff([0, 0, 0])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every stored term of total degree <= `order` vanishes.
    pub fn is_zero_at(&self, order: u32) -> bool {
        self.terms.keys().all(|mi| total_degree(mi) > order)
    }

    /// Termwise agreement on all monomials of total degree <= `order`.
    pub fn eq_at(&self, other: &Jet, order: u32) -> bool {
        let lhs = self.terms.iter().filter(|(mi, _)| total_degree(mi) <= order);
        let rhs = other.terms.iter().filter(|(mi, _)| total_degree(mi) <= order);
        lhs.eq(rhs)
    }

    /// Drops terms above `new_cap` and lowers the cap. Raising the cap is a
    /// no-op on the terms but widens what later operations may keep.
    pub fn truncate(&self, new_cap: u32) -> Jet {
        let mut out = Jet::zero(new_cap);
        for (mi, c) in &self.terms {
            out.insert(*mi, c.clone());
        }
        out
    }

    pub fn add(&self, other: &Jet) -> Jet {
        let cap = self.cap.min(other.cap);
        let mut out = self.truncate(cap);
        for (mi, c) in &other.terms {
            out.add_term(*mi, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Jet {
        let mut out = Jet::zero(self.cap);
        for (mi, c) in &self.terms {
            out.terms.insert(*mi, -c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Rat) -> Jet {
        if s.is_zero() {
            return Jet::zero(self.cap);
        }
        let mut out = Jet::zero(self.cap);
        for (mi, c) in &self.terms {
            out.terms.insert(*mi, c.clone() * s);
        }
        out
    }

    /// Convolution product truncated to the smaller cap.
    pub fn mul(&self, other: &Jet) -> Jet {
        let cap = self.cap.min(other.cap);
        let mut acc = DenseAcc::new(cap);
        acc.add_product(self, other);
        acc.into_jet()
    }

    /// Formal partial derivative; the result cap drops by one. A cap-0
    /// input yields the cap-0 zero jet, which carries no trustworthy
    /// information at all (the fully degenerate case).
    pub fn partial(&self, axis: Axis) -> Jet {
        let new_cap = self.cap.saturating_sub(1);
        let ai = axis.index();
        let mut out = Jet::zero(new_cap);
        for (mi, c) in &self.terms {
            let e = mi[ai];
            if e == 0 {
                continue;
            }
            let mut lowered = *mi;
            lowered[ai] -= 1;
            out.add_term(lowered, c.clone() * Rat::from_integer(e.into()));
        }
        out
    }

    /// Multiplicative inverse in the truncated ring. Errors when the
    /// constant term is zero.
    pub fn inverse(&self) -> Result<Jet, JetError> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(JetError::NotAUnit);
        }
        let inv_c0 = Rat::one() / c0.clone();
        // self = c0 + h with h of positive valuation, so
        // 1/self = (1/c0) * sum_k (-h/c0)^k, and the series terminates at cap.
        let mut h = self.clone();
        h.terms.remove(&[0, 0, 0]);
        let step = h.scale(&-inv_c0.clone());
        let mut acc = Jet::one(self.cap);
        let mut power = Jet::one(self.cap);
        for _ in 0..self.cap {
            power = power.mul(&step);
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power);
        }
        Ok(acc.scale(&inv_c0))
    }

    /// Polynomial evaluation at an exact point.
    pub fn eval(&self, point: &[Rat; 3]) -> Rat {
        let mut total = Rat::zero();
        for (mi, c) in &self.terms {
            let mut term = c.clone();
            for (ai, &e) in mi.iter().enumerate() {
                for _ in 0..e {
                    term *= point[ai].clone();
                }
            }
            total += term;
        }
        total
    }

    /// Largest total degree among differing terms, for failure reports.
    pub fn max_diff_term(&self, other: &Jet, order: u32) -> Option<(MultiIndex, Rat, Rat)> {
        let mut keys: Vec<MultiIndex> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .copied()
            .filter(|mi| total_degree(mi) <= order)
            .collect();
        keys.sort_by_key(total_degree);
        keys.dedup();
        keys.into_iter()
            .rev()
            .map(|mi| (mi, self.coeff(mi), other.coeff(mi)))
            .find(|(_, a, b)| a != b)
    }
}

/// Compares only terms of total degree up to the smaller cap; jets with
/// different caps are equal when they agree on the common range.
impl PartialEq for Jet {
    fn eq(&self, other: &Jet) -> bool {
        self.eq_at(other, self.cap.min(other.cap))
    }
}

/// Pulls a jet onto a common denominator: returns (lcm of denominators,
/// terms as (index, total degree, integer numerator over the lcm)).
fn integerize(j: &Jet, cap: u32) -> (BigInt, Vec<(MultiIndex, u32, BigInt)>) {
    use num_integer::Integer;
    let mut den = BigInt::from(1);
    for (mi, c) in &j.terms {
        if total_degree(mi) <= cap {
            den = den.lcm(c.denom());
        }
    }
    let terms = j
        .terms
        .iter()
        .filter(|(mi, _)| total_degree(mi) <= cap)
        .map(|(mi, c)| (*mi, total_degree(mi), c.numer() * (&den / c.denom())))
        .collect();
    (den, terms)
}

/// Dense convolution accumulator: a flat table over all exponent triples
/// up to the cap, so product accumulation avoids per-term map traffic.
/// This is the hot path of every wedge and matrix product.
pub(crate) struct DenseAcc {
    cap: u32,
    stride: usize,
    slots: Vec<Option<Rat>>,
}

impl DenseAcc {
    pub(crate) fn new(cap: u32) -> DenseAcc {
        let stride = cap as usize + 1;
        DenseAcc { cap, stride, slots: vec![None; stride * stride * stride] }
    }

    #[inline]
    fn slot(&self, mi: &MultiIndex) -> usize {
        (mi[0] as usize * self.stride + mi[1] as usize) * self.stride + mi[2] as usize
    }

    /// Accumulates the full truncated product a * b.
    pub(crate) fn add_product(&mut self, a: &Jet, b: &Jet) {
        self.accumulate::<false>(a, b);
    }

    /// Accumulates -(a * b).
    pub(crate) fn sub_product(&mut self, a: &Jet, b: &Jet) {
        self.accumulate::<true>(a, b);
    }

    fn accumulate<const NEGATE: bool>(&mut self, a: &Jet, b: &Jet) {
        // Clear each factor's denominators up front so the convolution
        // itself runs over integers: one multiply and one add per term
        // pair, no gcd until the batch folds back into the slots.
        let cap = self.cap;
        let (den_a, int_a) = integerize(a, cap);
        let (den_b, int_b) = integerize(b, cap);
        if int_a.is_empty() || int_b.is_empty() {
            return;
        }
        let mut batch: Vec<Option<BigInt>> = vec![None; self.slots.len()];
        let mut touched: Vec<usize> = Vec::new();
        for (mi_a, deg_a, ca) in &int_a {
            for (mi_b, deg_b, cb) in &int_b {
                if deg_a + deg_b > cap {
                    continue;
                }
                let mi = [mi_a[0] + mi_b[0], mi_a[1] + mi_b[1], mi_a[2] + mi_b[2]];
                let idx = self.slot(&mi);
                let prod = ca * cb;
                match &mut batch[idx] {
                    Some(acc) => *acc += prod,
                    slot => {
                        *slot = Some(prod);
                        touched.push(idx);
                    }
                }
            }
        }
        let den = den_a * den_b;
        for idx in touched {
            let Some(num) = batch[idx].take() else { continue };
            if num.is_zero() {
                continue;
            }
            let num = if NEGATE { -num } else { num };
            let value = Rat::new(num, den.clone());
            match &mut self.slots[idx] {
                Some(acc) => *acc += value,
                slot => *slot = Some(value),
            }
        }
    }

    pub(crate) fn into_jet(self) -> Jet {
        let stride = self.stride;
        let mut terms = BTreeMap::new();
        for (idx, slot) in self.slots.into_iter().enumerate() {
            let Some(c) = slot else { continue };
            if c.is_zero() {
                continue;
            }
            let i = idx / (stride * stride);
            let j = (idx / stride) % stride;
            let k = idx % stride;
            terms.insert([i as u8, j as u8, k as u8], c);
        }
        Jet { cap: self.cap, terms }
    }
}

fn fmt_monomial(mi: &MultiIndex) -> String {
    let mut parts = Vec::new();
    for (ai, &e) in mi.iter().enumerate() {
        if e == 1 {
            parts.push(Axis::from_index(ai).name().to_string());
        } else if e > 1 {
            parts.push(format!("{}^{}", Axis::from_index(ai).name(), e));
        }
    }
    parts.join("*")
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Sort by (total degree, lex) for a stable, readable layout.
        let mut entries: Vec<(&MultiIndex, &Rat)> = self.terms.iter().collect();
        entries.sort_by_key(|(mi, _)| (total_degree(mi), **mi));
        let mut out = String::new();
        for (i, (mi, c)) in entries.iter().enumerate() {
            let mono = fmt_monomial(mi);
            let coeff = fmt_rat(c);
            let (sign, mag) = match coeff.strip_prefix('-') {
                Some(rest) => ("-", rest.to_string()),
                None => ("+", coeff),
            };
            if i == 0 {
                if sign == "-" {
                    out.push('-');
                }
            } else {
                out.push_str(if sign == "-" { " - " } else { " + " });
            }
            if mono.is_empty() {
                out.push_str(&mag);
            } else if mag == "1" {
                out.push_str(&mono);
            } else {
                out.push_str(&mag);
                out.push(' ');
                out.push_str(&mono);
            }
        }
        write!(f, "{out}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rint};

    /// Untruncated polynomial arithmetic: the independent oracle for the
    /// truncating operations below.
    #[derive(Clone, Default)]
    struct Poly(BTreeMap<MultiIndex, Rat>);

    impl Poly {
        fn term(mut self, mi: MultiIndex, c: Rat) -> Poly {
            let entry = self.0.entry(mi).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                self.0.remove(&mi);
            }
            self
        }

        fn add(&self, other: &Poly) -> Poly {
            let mut out = self.clone();
            for (mi, c) in &other.0 {
                out = out.term(*mi, c.clone());
            }
            out
        }

        fn mul(&self, other: &Poly) -> Poly {
            let mut out = Poly::default();
            for (a, ca) in &self.0 {
                for (b, cb) in &other.0 {
                    out = out.term([a[0] + b[0], a[1] + b[1], a[2] + b[2]], ca.clone() * cb.clone());
                }
            }
            out
        }

        fn truncate(&self, cap: u32) -> Jet {
            Jet::from_terms(cap, self.0.clone())
        }
    }

    fn p(terms: &[(MultiIndex, i64)]) -> Poly {
        let mut out = Poly::default();
        for &(mi, c) in terms {
            out = out.term(mi, rint(c));
        }
        out
    }

    #[test]
    fn add_cancels() {
        let a = Jet::from_terms(3, [([0, 0, 0], rint(1)), ([1, 0, 0], rint(1))]);
        let b = Jet::from_terms(3, [([0, 0, 0], rint(1)), ([1, 0, 0], rint(-1))]);
        assert_eq!(a.add(&b), Jet::constant(rint(2), 3));
    }

    #[test]
    fn add_identity() {
        let p = Jet::from_terms(4, [([1, 1, 0], rat(3, 2)), ([0, 0, 2], rint(-1))]);
        assert_eq!(Jet::zero(4).add(&p), p);
    }

    #[test]
    fn add_mixed_caps_truncates() {
        // Oracle: untruncated addition followed by truncation at the min cap.
        let a_poly = p(&[([2, 1, 0], 1)]); // x^2 y
        let b_poly = p(&[([1, 2, 0], 1)]); // x y^2
        let a = a_poly.truncate(3);
        let b = b_poly.truncate(2);
        let expected = a_poly.add(&b_poly).truncate(2);
        let got = a.add(&b);
        assert_eq!(got.cap(), 2);
        assert_eq!(got, expected);
        assert!(got.is_zero()); // both terms have degree 3 > 2
    }

    #[test]
    fn mul_difference_of_squares() {
        let one_plus_x = Jet::from_terms(2, [([0, 0, 0], rint(1)), ([1, 0, 0], rint(1))]);
        let one_minus_x = Jet::from_terms(2, [([0, 0, 0], rint(1)), ([1, 0, 0], rint(-1))]);
        let expected = Jet::from_terms(2, [([0, 0, 0], rint(1)), ([2, 0, 0], rint(-1))]);
        assert_eq!(one_plus_x.mul(&one_minus_x), expected);
    }

    #[test]
    fn mul_truncates_at_cap_one() {
        let one_plus_x = Jet::from_terms(1, [([0, 0, 0], rint(1)), ([1, 0, 0], rint(1))]);
        let one_minus_x = Jet::from_terms(1, [([0, 0, 0], rint(1)), ([1, 0, 0], rint(-1))]);
        assert_eq!(one_plus_x.mul(&one_minus_x), Jet::one(1));
    }

    #[test]
    fn mul_square_of_sum() {
        // Oracle: schoolbook expansion of (x + y)^2.
        let xy = p(&[([1, 0, 0], 1), ([0, 1, 0], 1)]);
        let expected = xy.mul(&xy).truncate(2);
        let x_plus_y = xy.truncate(2);
        assert_eq!(x_plus_y.mul(&x_plus_y), expected);
        assert_eq!(
            expected,
            Jet::from_terms(2, [([2, 0, 0], rint(1)), ([1, 1, 0], rint(2)), ([0, 2, 0], rint(1))])
        );
    }

    #[test]
    fn partial_basic() {
        let x2y = Jet::monomial([2, 1, 0], rint(1), 4);
        let got = x2y.partial(Axis::X);
        assert_eq!(got.cap(), 3);
        assert_eq!(got, Jet::monomial([1, 1, 0], rint(2), 3));
    }

    #[test]
    fn partial_of_constant() {
        assert!(Jet::constant(rint(7), 3).partial(Axis::Z).is_zero());
    }

    #[test]
    fn partial_of_truncated_cube() {
        // (1+x)^3 = 1 + 3x + 3x^2 + x^3; derivative 3 + 6x + 3x^2 at cap 2.
        let one_plus_x = p(&[([0, 0, 0], 1), ([1, 0, 0], 1)]);
        let cube = one_plus_x.mul(&one_plus_x).mul(&one_plus_x).truncate(3);
        let got = cube.partial(Axis::X);
        assert_eq!(got.cap(), 2);
        let expected = Jet::from_terms(
            2,
            [([0, 0, 0], rint(3)), ([1, 0, 0], rint(6)), ([2, 0, 0], rint(3))],
        );
        assert_eq!(got, expected);
    }

    #[test]
    fn partial_at_cap_zero_degenerates() {
        let c = Jet::constant(rint(5), 0);
        let d = c.partial(Axis::X);
        assert_eq!(d.cap(), 0);
        assert!(d.is_zero());
    }

    #[test]
    fn inverse_geometric_series() {
        let one_plus_x = Jet::from_terms(3, [([0, 0, 0], rint(1)), ([1, 0, 0], rint(1))]);
        let inv = one_plus_x.inverse().unwrap();
        // Oracle: multiplying back must give 1 at the cap.
        assert_eq!(one_plus_x.mul(&inv), Jet::one(3));
        let expected = Jet::from_terms(
            3,
            [
                ([0, 0, 0], rint(1)),
                ([1, 0, 0], rint(-1)),
                ([2, 0, 0], rint(1)),
                ([3, 0, 0], rint(-1)),
            ],
        );
        assert_eq!(inv, expected);
    }

    #[test]
    fn inverse_of_constant() {
        assert_eq!(Jet::constant(rint(2), 4).inverse().unwrap(), Jet::constant(rat(1, 2), 4));
    }

    #[test]
    fn inverse_of_non_unit_errors() {
        assert_eq!(Jet::var(Axis::X, 3).inverse(), Err(JetError::NotAUnit));
    }

    #[test]
    fn eval_examples() {
        let x2y = Jet::monomial([2, 1, 0], rint(1), 4);
        assert_eq!(x2y.eval(&[rint(2), rint(3), rint(0)]), rint(12));
        assert_eq!(Jet::zero(4).eval(&[rint(9), rint(-2), rint(5)]), rint(0));
        let q = Jet::from_terms(
            2,
            [([0, 0, 0], rint(1)), ([1, 0, 0], rint(-1)), ([2, 0, 0], rint(1))],
        );
        assert_eq!(q.eval(&[rat(1, 2), rint(0), rint(0)]), rat(3, 4));
    }

    #[test]
    fn display_is_readable() {
        let j = Jet::from_terms(
            3,
            [([0, 0, 0], rat(3, 2)), ([1, 0, 0], rint(-1)), ([2, 1, 0], rint(2))],
        );
        assert_eq!(j.to_string(), "3/2 - x + 2 x^2*y");
        assert_eq!(Jet::zero(2).to_string(), "0");
    }
}
