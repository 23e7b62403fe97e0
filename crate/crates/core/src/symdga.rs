//! Universal, instance-free identity prover.
//!
//! Expressions are normalized in the free graded differential algebra on
//! the symbols w0 (degree 1), a (degree 1), chi (degree 0) and their
//! d-images, with a graded-cyclic trace: tr(AB) = (-1)^{|A||B|} tr(BA).
//! The composite symbols are eliminated up front — w1 becomes w0 + a and
//! wt becomes w0 + t a with t an exact rational — so an identity holds
//! universally exactly when its two sides have identical normal forms.
//!
//! Matrix-valued (untraced) identities normalize to free noncommutative
//! polynomials; scalar-valued ones to combinations of canonicalized trace
//! words. Words of degree above 3 are kept: the identities are algebraic
//! and do not rely on the chart dimension.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::dsl::Ast;
use crate::rat::{fmt_rat, Rat};

#[derive(Error, Debug, PartialEq, Eq)]
pub enum SymError {
    #[error("symbol '{0}' has no symbolic meaning (only w0, w1, wt, a, chi here)")]
    ConcreteAtom(String),
    #[error("degree mismatch in sum: {left} (degree {left_deg}) vs {right} (degree {right_deg})")]
    DegreeMismatch { left: String, left_deg: u8, right: String, right_deg: u8 },
    #[error("sort mismatch: cannot combine {0} with {1}")]
    SortMismatch(String, String),
    #[error("'{op}' needs a homogeneous matrix-valued argument, got {got}")]
    BadOperand { op: &'static str, got: String },
}

/// Generators of the free graded differential algebra. Declaration order
/// is the fixed total order used by cyclic canonicalization: primitives
/// before d-images.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GSym {
    A,
    Chi,
    W0,
    W1,
    DA,
    DChi,
    DW0,
    DW1,
}

impl GSym {
    pub fn degree(self) -> u8 {
        match self {
            GSym::Chi => 0,
            GSym::A | GSym::W0 | GSym::W1 | GSym::DChi => 1,
            GSym::DA | GSym::DW0 | GSym::DW1 => 2,
        }
    }

    /// The image under d; `None` for d-image symbols (d of a d-image is 0).
    pub fn d_image(self) -> Option<GSym> {
        match self {
            GSym::A => Some(GSym::DA),
            GSym::Chi => Some(GSym::DChi),
            GSym::W0 => Some(GSym::DW0),
            GSym::W1 => Some(GSym::DW1),
            _ => None,
        }
    }

    pub fn is_d_image(self) -> bool {
        self.d_image().is_none()
    }

    pub fn name(self) -> &'static str {
        match self {
            GSym::A => "a",
            GSym::Chi => "chi",
            GSym::W0 => "w0",
            GSym::W1 => "w1",
            GSym::DA => "d(a)",
            GSym::DChi => "d(chi)",
            GSym::DW0 => "d(w0)",
            GSym::DW1 => "d(w1)",
        }
    }
}

pub type Word = Vec<GSym>;

fn word_degree(w: &[GSym]) -> u32 {
    w.iter().map(|s| u32::from(s.degree())).sum()
}

fn fmt_word(w: &[GSym]) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    w.iter().map(|s| s.name()).collect::<Vec<_>>().join(" ")
}

/// Free noncommutative polynomial: the normal form of matrix-valued
/// (untraced) expressions.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FreePoly {
    terms: BTreeMap<Word, Rat>,
}

impl FreePoly {
    pub fn zero() -> FreePoly {
        FreePoly::default()
    }

    pub fn generator(s: GSym) -> FreePoly {
        FreePoly::from_term(vec![s], Rat::from_integer(1.into()))
    }

    pub fn from_term(word: Word, coeff: Rat) -> FreePoly {
        let mut p = FreePoly::zero();
        p.add_term(word, coeff);
        p
    }

    fn add_term(&mut self, word: Word, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&word) {
            Some(c) => {
                *c += coeff;
                if c.is_zero() {
                    self.terms.remove(&word);
                }
            }
            None => {
                self.terms.insert(word, coeff);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &FreePoly) -> FreePoly {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &FreePoly) -> FreePoly {
        self.add(&other.scale(&Rat::from_integer((-1).into())))
    }

    pub fn scale(&self, s: &Rat) -> FreePoly {
        if s.is_zero() {
            return FreePoly::zero();
        }
        FreePoly {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c.clone() * s))
                .collect(),
        }
    }

    /// Concatenation product of the free algebra.
    pub fn mul(&self, other: &FreePoly) -> FreePoly {
        let mut out = FreePoly::zero();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let mut word = wa.clone();
                word.extend_from_slice(wb);
                out.add_term(word, ca.clone() * cb.clone());
            }
        }
        out
    }

    /// Graded Leibniz derivative: d passes each letter with the sign of
    /// the degree of the prefix it crossed.
    pub fn apply_d(&self) -> FreePoly {
        let mut out = FreePoly::zero();
        for (word, coeff) in &self.terms {
            let mut prefix_degree = 0u32;
            for (i, s) in word.iter().enumerate() {
                if let Some(ds) = s.d_image() {
                    let mut new_word = word.clone();
                    new_word[i] = ds;
                    let signed = if prefix_degree % 2 == 1 {
                        -coeff.clone()
                    } else {
                        coeff.clone()
                    };
                    out.add_term(new_word, signed);
                }
                prefix_degree += u32::from(s.degree());
            }
        }
        out
    }

    /// `Some(degree)` when all words share one total degree (the empty
    /// polynomial counts as homogeneous of any degree, reported as None).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(|w| word_degree(w));
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rat)> {
        self.terms.iter()
    }
}

impl fmt::Display for FreePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| format!("{} {}", fmt_rat(c), fmt_word(w)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Canonicalizes a trace word under graded rotations. Rotating the first
/// letter s to the end multiplies by (-1)^{|s| * (deg - |s|)}. Returns the
/// lexicographically least rotation with its accumulated sign, or `None`
/// when some rotation maps the word to minus itself (the trace vanishes).
pub fn cyclic_normalize(word: &[GSym]) -> Option<(Word, i8)> {
    if word.is_empty() {
        return Some((Vec::new(), 1));
    }
    let total = word_degree(word);
    let mut best: Option<(Word, i8)> = None;
    let mut rotation: Word = word.to_vec();
    let mut sign = 1i8;
    for _ in 0..word.len() {
        match &mut best {
            None => best = Some((rotation.clone(), sign)),
            Some((bw, bs)) => {
                if rotation < *bw {
                    *bw = rotation.clone();
                    *bs = sign;
                } else if rotation == *bw && sign != *bs {
                    // The same rotation occurs with both signs: tr = -tr.
                    return None;
                }
            }
        }
        // Rotate: move the first letter to the end.
        let s = rotation.remove(0);
        rotation.push(s);
        let s_deg = u32::from(s.degree());
        if (s_deg * (total - s_deg)) % 2 == 1 {
            sign = -sign;
        }
    }
    // A final consistency pass: the starting word must reappear with +1.
    if rotation == word && sign != 1 {
        return None;
    }
    best
}

/// Rational combination of canonicalized trace words: the normal form of
/// scalar-valued expressions. Empty map means the identity holds.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TWPolynomial {
    terms: BTreeMap<Word, Rat>,
}

impl TWPolynomial {
    pub fn zero() -> TWPolynomial {
        TWPolynomial::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_word(&mut self, word: Word, coeff: Rat) {
        let Some((canonical, sign)) = cyclic_normalize(&word) else {
            return;
        };
        let signed = if sign < 0 { -coeff } else { coeff };
        if signed.is_zero() {
            return;
        }
        match self.terms.get_mut(&canonical) {
            Some(c) => {
                *c += signed;
                if c.is_zero() {
                    self.terms.remove(&canonical);
                }
            }
            None => {
                self.terms.insert(canonical, signed);
            }
        }
    }

    /// Trace of a free polynomial: every word is cyclically canonicalized.
    pub fn trace_of(p: &FreePoly) -> TWPolynomial {
        let mut out = TWPolynomial::zero();
        for (w, c) in &p.terms {
            out.add_word(w.clone(), c.clone());
        }
        out
    }

    pub fn add(&self, other: &TWPolynomial) -> TWPolynomial {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_word(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &TWPolynomial) -> TWPolynomial {
        self.add(&other.scale(&Rat::from_integer((-1).into())))
    }

    pub fn scale(&self, s: &Rat) -> TWPolynomial {
        if s.is_zero() {
            return TWPolynomial::zero();
        }
        TWPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c.clone() * s))
                .collect(),
        }
    }

    /// d through the trace: Leibniz on a representative word, then
    /// re-canonicalization. Compatible with the cyclic identification.
    pub fn apply_d(&self) -> TWPolynomial {
        let mut out = TWPolynomial::zero();
        for (word, coeff) in &self.terms {
            let free = FreePoly::from_term(word.clone(), coeff.clone());
            for (w, c) in free.apply_d().terms {
                out.add_word(w, c);
            }
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rat)> {
        self.terms.iter()
    }
}

impl fmt::Display for TWPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| format!("{} tr({})", fmt_rat(c), fmt_word(w)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Normal form of a symbolic expression, by sort.
#[derive(Clone, Debug, PartialEq)]
pub enum Normal {
    /// Commuting scalar constant (rational arithmetic, including t).
    Const(Rat),
    /// Matrix-valued expression in the free algebra.
    Matrix(FreePoly),
    /// Scalar-valued (traced) expression.
    Scalar(TWPolynomial),
}

impl Normal {
    pub fn is_zero(&self) -> bool {
        match self {
            Normal::Const(r) => r.is_zero(),
            Normal::Matrix(p) => p.is_zero(),
            Normal::Scalar(p) => p.is_zero(),
        }
    }

    fn sort_name(&self) -> &'static str {
        match self {
            Normal::Const(_) => "scalar constant",
            Normal::Matrix(_) => "matrix-valued expression",
            Normal::Scalar(_) => "traced expression",
        }
    }
}

impl fmt::Display for Normal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Normal::Const(r) => write!(f, "{}", fmt_rat(r)),
            Normal::Matrix(p) => write!(f, "{p}"),
            Normal::Scalar(p) => write!(f, "{p}"),
        }
    }
}

fn add_normals(a: Normal, b: Normal) -> Result<Normal, SymError> {
    match (a, b) {
        (Normal::Const(x), Normal::Const(y)) => Ok(Normal::Const(x + y)),
        // Zero constants absorb into either sort.
        (Normal::Const(x), other) if x.is_zero() => Ok(other),
        (other, Normal::Const(y)) if y.is_zero() => Ok(other),
        (Normal::Matrix(x), Normal::Matrix(y)) => {
            match (x.homogeneous_degree(), y.homogeneous_degree()) {
                (Some(dx), Some(dy)) if dx != dy && !x.is_zero() && !y.is_zero() => {
                    Err(SymError::DegreeMismatch {
                        left: x.to_string(),
                        left_deg: dx as u8,
                        right: y.to_string(),
                        right_deg: dy as u8,
                    })
                }
                _ => Ok(Normal::Matrix(x.add(&y))),
            }
        }
        (Normal::Scalar(x), Normal::Scalar(y)) => Ok(Normal::Scalar(x.add(&y))),
        (a, b) => Err(SymError::SortMismatch(
            a.sort_name().to_string(),
            b.sort_name().to_string(),
        )),
    }
}

fn mul_normals(a: Normal, b: Normal) -> Result<Normal, SymError> {
    match (a, b) {
        (Normal::Const(x), Normal::Const(y)) => Ok(Normal::Const(x * y)),
        (Normal::Const(x), Normal::Matrix(p)) | (Normal::Matrix(p), Normal::Const(x)) => {
            Ok(Normal::Matrix(p.scale(&x)))
        }
        (Normal::Const(x), Normal::Scalar(p)) | (Normal::Scalar(p), Normal::Const(x)) => {
            Ok(Normal::Scalar(p.scale(&x)))
        }
        (Normal::Matrix(x), Normal::Matrix(y)) => Ok(Normal::Matrix(x.mul(&y))),
        (a, b) => Err(SymError::SortMismatch(
            a.sort_name().to_string(),
            b.sort_name().to_string(),
        )),
    }
}

fn as_matrix(n: Normal, op: &'static str) -> Result<FreePoly, SymError> {
    match n {
        Normal::Matrix(p) => Ok(p),
        Normal::Const(r) if r.is_zero() => Ok(FreePoly::zero()),
        other => Err(SymError::BadOperand { op, got: other.sort_name().to_string() }),
    }
}

/// Expands an expression to its normal form with the parameter bound to
/// the exact rational `t`. The substitutions w1 -> w0 + a and
/// wt -> w0 + t a happen at the atoms; curvature, covariant derivative,
/// and bracket unfold to their definitions.
pub fn expand(ast: &Ast, t: &Rat) -> Result<Normal, SymError> {
    match ast {
        Ast::Rational(r) => Ok(Normal::Const(r.clone())),
        Ast::TParam => Ok(Normal::Const(t.clone())),
        Ast::Sym(name, _) => match name.as_str() {
            "w0" => Ok(Normal::Matrix(FreePoly::generator(GSym::W0))),
            "a" => Ok(Normal::Matrix(FreePoly::generator(GSym::A))),
            "chi" => Ok(Normal::Matrix(FreePoly::generator(GSym::Chi))),
            "w1" => Ok(Normal::Matrix(
                FreePoly::generator(GSym::W0).add(&FreePoly::generator(GSym::A)),
            )),
            "wt" => Ok(Normal::Matrix(
                FreePoly::generator(GSym::W0).add(&FreePoly::generator(GSym::A).scale(t)),
            )),
            other => Err(SymError::ConcreteAtom(other.to_string())),
        },
        Ast::Coord(ax) => Err(SymError::ConcreteAtom(ax.name().to_string())),
        Ast::Covector(ax) => Err(SymError::ConcreteAtom(format!("d{}", ax.name()))),
        Ast::VecField(..) | Ast::Contract(..) => {
            Err(SymError::ConcreteAtom("vector-field expression".to_string()))
        }
        Ast::Neg(inner) => {
            let n = expand(inner, t)?;
            mul_normals(Normal::Const(Rat::from_integer((-1).into())), n)
        }
        Ast::Add(lhs, rhs) => add_normals(expand(lhs, t)?, expand(rhs, t)?),
        Ast::Sub(lhs, rhs) => {
            let r = expand(rhs, t)?;
            let neg_r = mul_normals(Normal::Const(Rat::from_integer((-1).into())), r)?;
            add_normals(expand(lhs, t)?, neg_r)
        }
        Ast::ScalarMul(lhs, rhs) | Ast::Wedge(lhs, rhs) => {
            mul_normals(expand(lhs, t)?, expand(rhs, t)?)
        }
        Ast::Bracket(lhs, rhs) => {
            let x = as_matrix(expand(lhs, t)?, "bracket")?;
            let y = as_matrix(expand(rhs, t)?, "bracket")?;
            bracket(&x, &y)
        }
        Ast::ExteriorD(inner) => match expand(inner, t)? {
            Normal::Matrix(p) => Ok(Normal::Matrix(p.apply_d())),
            Normal::Scalar(p) => Ok(Normal::Scalar(p.apply_d())),
            Normal::Const(_) => Ok(Normal::Const(Rat::zero())),
        },
        Ast::Trace(inner) => {
            let p = as_matrix(expand(inner, t)?, "tr")?;
            Ok(Normal::Scalar(TWPolynomial::trace_of(&p)))
        }
        Ast::Curvature(inner) => {
            let w = as_matrix(expand(inner, t)?, "F")?;
            if !matches!(w.homogeneous_degree(), None | Some(1)) {
                return Err(SymError::BadOperand { op: "F", got: w.to_string() });
            }
            Ok(Normal::Matrix(w.apply_d().add(&w.mul(&w))))
        }
        Ast::CovariantD(w_ast, a_ast) => {
            let w = as_matrix(expand(w_ast, t)?, "D")?;
            let b = as_matrix(expand(a_ast, t)?, "D")?;
            if !matches!(w.homogeneous_degree(), None | Some(1)) {
                return Err(SymError::BadOperand { op: "D", got: w.to_string() });
            }
            let br = bracket_free(&w, &b)?;
            Ok(Normal::Matrix(b.apply_d().add(&br)))
        }
    }
}

/// Graded bracket [x, y] = xy - (-1)^{pq} yx of homogeneous free
/// polynomials.
fn bracket_free(x: &FreePoly, y: &FreePoly) -> Result<FreePoly, SymError> {
    if x.is_zero() || y.is_zero() {
        return Ok(FreePoly::zero());
    }
    let p = x.homogeneous_degree().ok_or(SymError::BadOperand {
        op: "bracket",
        got: x.to_string(),
    })?;
    let q = y.homogeneous_degree().ok_or(SymError::BadOperand {
        op: "bracket",
        got: y.to_string(),
    })?;
    let xy = x.mul(y);
    let yx = y.mul(x);
    Ok(if (p * q) % 2 == 1 { xy.add(&yx) } else { xy.sub(&yx) })
}

fn bracket(x: &FreePoly, y: &FreePoly) -> Result<Normal, SymError> {
    Ok(Normal::Matrix(bracket_free(x, y)?))
}

/// Verdict of a universal identity check at one parameter value.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub pass: bool,
    /// The nonzero normal form of lhs - rhs on failure.
    pub certificate: Option<String>,
}

/// PASS exactly when expand(lhs) - expand(rhs) is the empty normal form.
pub fn verify_identity(lhs: &Ast, rhs: &Ast, t: &Rat) -> Result<Verdict, SymError> {
    let l = expand(lhs, t)?;
    let r = expand(rhs, t)?;
    let diff = add_normals(l, mul_normals(Normal::Const(Rat::from_integer((-1).into())), r)?)?;
    if diff.is_zero() {
        Ok(Verdict { pass: true, certificate: None })
    } else {
        Ok(Verdict {
            pass: false,
            certificate: Some(format!("t = {}: {}", fmt_rat(t), diff)),
        })
    }
}
