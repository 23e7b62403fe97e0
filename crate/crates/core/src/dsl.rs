//! Surface syntax for identities, scenario declarations, and checks.
//!
//! ASCII-only grammar with fixed spellings. Operator precedence, tightest
//! first: scalar multiply `*`, wedge `^`, unary minus, binary `+`/`-`.
//! `d`, `tr`, `F`, `D`, `ic`, and `vec` are function-call forms with
//! mandatory parentheses; `D(w; a)`, `ic(xi; a)` take two arguments split
//! by a semicolon and `vec(a, b, c)` builds a vector field from three
//! scalar components.
//!
//! ```text
//! expr    := neg (("+" | "-") neg)*
//! neg     := "-" neg | wedge
//! wedge   := scalar ("^" scalar)*
//! scalar  := atom ("*" scalar)?
//! atom    := RATIONAL | ident | call | "(" expr ")" | "[" expr "," expr "]"
//! call    := "d" "(" expr ")" | "tr" "(" expr ")" | "F" "(" expr ")"
//!          | "D" "(" expr ";" expr ")" | "ic" "(" expr ";" expr ")"
//!          | "vec" "(" expr "," expr "," expr ")"
//! RATIONAL := INT ("/" INT)?
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;
use thiserror::Error;

use crate::jet::Axis;
use crate::rat::Rat;

/// Source position, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum ParseError {
    #[error("unbalanced parenthesis at {0}")]
    Unbalanced(Pos),
    #[error("unexpected character '{ch}' at {pos}")]
    UnexpectedChar { ch: char, pos: Pos },
    #[error("expected {expected} at {pos}, found {found}")]
    Expected { expected: String, found: String, pos: Pos },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Unbalanced(p) => *p,
            ParseError::UnexpectedChar { pos, .. } => *pos,
            ParseError::Expected { pos, .. } => *pos,
        }
    }
}

/// Expression node. Symbols keep their source position so later passes
/// can report unknown names with a location.
#[derive(Clone, Debug)]
pub enum Ast {
    Rational(Rat),
    TParam,
    Coord(Axis),
    Covector(Axis),
    Sym(String, Pos),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    ScalarMul(Box<Ast>, Box<Ast>),
    Wedge(Box<Ast>, Box<Ast>),
    Bracket(Box<Ast>, Box<Ast>),
    ExteriorD(Box<Ast>),
    Trace(Box<Ast>),
    Curvature(Box<Ast>),
    CovariantD(Box<Ast>, Box<Ast>),
    Contract(Box<Ast>, Box<Ast>),
    VecField(Box<Ast>, Box<Ast>, Box<Ast>),
}

/// Structural equality ignoring source positions.
impl PartialEq for Ast {
    fn eq(&self, other: &Ast) -> bool {
        use Ast::*;
        match (self, other) {
            (Rational(a), Rational(b)) => a == b,
            (TParam, TParam) => true,
            (Coord(a), Coord(b)) => a == b,
            (Covector(a), Covector(b)) => a == b,
            (Sym(a, _), Sym(b, _)) => a == b,
            (Neg(a), Neg(b)) => a == b,
            (Add(a1, a2), Add(b1, b2)) => a1 == b1 && a2 == b2,
            (Sub(a1, a2), Sub(b1, b2)) => a1 == b1 && a2 == b2,
            (ScalarMul(a1, a2), ScalarMul(b1, b2)) => a1 == b1 && a2 == b2,
            (Wedge(a1, a2), Wedge(b1, b2)) => a1 == b1 && a2 == b2,
            (Bracket(a1, a2), Bracket(b1, b2)) => a1 == b1 && a2 == b2,
            (ExteriorD(a), ExteriorD(b)) => a == b,
            (Trace(a), Trace(b)) => a == b,
            (Curvature(a), Curvature(b)) => a == b,
            (CovariantD(a1, a2), CovariantD(b1, b2)) => a1 == b1 && a2 == b2,
            (Contract(a1, a2), Contract(b1, b2)) => a1 == b1 && a2 == b2,
            (VecField(a1, a2, a3), VecField(b1, b2, b3)) => a1 == b1 && a2 == b2 && a3 == b3,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Int(n) => format!("'{n}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Caret => "'^'".into(),
            Tok::Slash => "'/'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Comma => "','".into(),
            Tok::Semi => "';'".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    chars: Vec<char>,
    idx: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, start: Pos) -> Lexer<'a> {
        Lexer { src, chars: src.chars().collect(), idx: 0, line: start.line, col: start.col }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, Pos)>, ParseError> {
        let _ = self.src;
        let mut out = Vec::new();
        while self.idx < self.chars.len() {
            let c = self.chars[self.idx];
            let pos = Pos { line: self.line, col: self.col };
            match c {
                ' ' | '\t' | '\r' => self.advance(),
                '\n' => {
                    self.idx += 1;
                    self.line += 1;
                    self.col = 1;
                }
                '#' => {
                    while self.idx < self.chars.len() && self.chars[self.idx] != '\n' {
                        self.advance();
                    }
                }
                '+' => self.push_simple(&mut out, Tok::Plus, pos),
                '-' => self.push_simple(&mut out, Tok::Minus, pos),
                '*' => self.push_simple(&mut out, Tok::Star, pos),
                '^' => self.push_simple(&mut out, Tok::Caret, pos),
                '/' => self.push_simple(&mut out, Tok::Slash, pos),
                '(' => self.push_simple(&mut out, Tok::LParen, pos),
                ')' => self.push_simple(&mut out, Tok::RParen, pos),
                '[' => self.push_simple(&mut out, Tok::LBracket, pos),
                ']' => self.push_simple(&mut out, Tok::RBracket, pos),
                ',' => self.push_simple(&mut out, Tok::Comma, pos),
                ';' => self.push_simple(&mut out, Tok::Semi, pos),
                c if c.is_ascii_digit() => {
                    let mut digits = String::new();
                    while self.idx < self.chars.len() && self.chars[self.idx].is_ascii_digit() {
                        digits.push(self.chars[self.idx]);
                        self.advance();
                    }
                    out.push((Tok::Int(digits.parse().expect("digits")), pos));
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut ident = String::new();
                    while self.idx < self.chars.len()
                        && (self.chars[self.idx].is_ascii_alphanumeric()
                            || self.chars[self.idx] == '_')
                    {
                        ident.push(self.chars[self.idx]);
                        self.advance();
                    }
                    out.push((Tok::Ident(ident), pos));
                }
                other => return Err(ParseError::UnexpectedChar { ch: other, pos }),
            }
        }
        Ok(out)
    }

    fn advance(&mut self) {
        self.idx += 1;
        self.col += 1;
    }

    fn push_simple(&mut self, out: &mut Vec<(Tok, Pos)>, tok: Tok, pos: Pos) {
        out.push((tok, pos));
        self.advance();
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    idx: usize,
    end: Pos,
    open_delims: u32,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.idx).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(t, _)| t.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn err_expected(&self, expected: &str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError::Expected {
                expected: expected.to_string(),
                found: t.describe(),
                pos: self.pos(),
            },
            // Out of input with delimiters still open reads as an
            // unbalanced-parenthesis diagnostic.
            None if self.open_delims > 0 => ParseError::Unbalanced(self.end),
            None => ParseError::Expected {
                expected: expected.to_string(),
                found: "end of input".to_string(),
                pos: self.end,
            },
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.bump();
            Ok(())
        } else {
            Err(self.err_expected(expected))
        }
    }

    fn parse_expr(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.parse_neg()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.parse_neg()?;
                    lhs = Ast::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.parse_neg()?;
                    lhs = Ast::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_neg(&mut self) -> Result<Ast, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            let inner = self.parse_neg()?;
            // Fold a negated literal into a negative rational so printing
            // and reparsing agree structurally.
            if let Ast::Rational(r) = inner {
                return Ok(Ast::Rational(-r));
            }
            return Ok(Ast::Neg(Box::new(inner)));
        }
        self.parse_wedge()
    }

    fn parse_wedge(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.parse_scalar()?;
        while self.peek() == Some(&Tok::Caret) {
            self.bump();
            let rhs = self.parse_scalar()?;
            lhs = Ast::Wedge(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_scalar(&mut self) -> Result<Ast, ParseError> {
        let lhs = self.parse_atom()?;
        if self.peek() == Some(&Tok::Star) {
            self.bump();
            let rhs = self.parse_scalar()?;
            return Ok(Ast::ScalarMul(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn parse_atom(&mut self) -> Result<Ast, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(n)) => {
                // RATIONAL := INT ("/" INT)?
                if self.peek() == Some(&Tok::Slash) {
                    self.bump();
                    match self.bump() {
                        Some(Tok::Int(d)) => Ok(Ast::Rational(Rat::new(n, d))),
                        _ => {
                            self.idx -= 1;
                            Err(self.err_expected("integer denominator"))
                        }
                    }
                } else {
                    Ok(Ast::Rational(Rat::from_integer(n)))
                }
            }
            Some(Tok::LParen) => {
                self.open_delims += 1;
                let inner = self.parse_expr()?;
                self.expect(Tok::RParen, "')'")?;
                self.open_delims -= 1;
                Ok(inner)
            }
            Some(Tok::LBracket) => {
                self.open_delims += 1;
                let lhs = self.parse_expr()?;
                self.expect(Tok::Comma, "','")?;
                let rhs = self.parse_expr()?;
                self.expect(Tok::RBracket, "']'")?;
                self.open_delims -= 1;
                Ok(Ast::Bracket(Box::new(lhs), Box::new(rhs)))
            }
            Some(Tok::Ident(name)) => self.parse_ident(name, pos),
            Some(other) => Err(ParseError::Expected {
                expected: "expression".to_string(),
                found: other.describe(),
                pos,
            }),
            None => {
                self.idx = self.toks.len();
                Err(self.err_expected("expression"))
            }
        }
    }

    fn parse_ident(&mut self, name: String, pos: Pos) -> Result<Ast, ParseError> {
        match name.as_str() {
            "t" => Ok(Ast::TParam),
            "x" => Ok(Ast::Coord(Axis::X)),
            "y" => Ok(Ast::Coord(Axis::Y)),
            "z" => Ok(Ast::Coord(Axis::Z)),
            "dx" => Ok(Ast::Covector(Axis::X)),
            "dy" => Ok(Ast::Covector(Axis::Y)),
            "dz" => Ok(Ast::Covector(Axis::Z)),
            "d" => {
                let inner = self.parse_call1("d")?;
                Ok(Ast::ExteriorD(Box::new(inner)))
            }
            "tr" => {
                let inner = self.parse_call1("tr")?;
                Ok(Ast::Trace(Box::new(inner)))
            }
            "F" => {
                let inner = self.parse_call1("F")?;
                Ok(Ast::Curvature(Box::new(inner)))
            }
            "D" => {
                let (w, a) = self.parse_call2("D")?;
                Ok(Ast::CovariantD(Box::new(w), Box::new(a)))
            }
            "ic" => {
                let (xi, a) = self.parse_call2("ic")?;
                Ok(Ast::Contract(Box::new(xi), Box::new(a)))
            }
            "vec" => {
                self.expect(Tok::LParen, "'(' after 'vec'")?;
                self.open_delims += 1;
                let a = self.parse_expr()?;
                self.expect(Tok::Comma, "','")?;
                let b = self.parse_expr()?;
                self.expect(Tok::Comma, "','")?;
                let c = self.parse_expr()?;
                self.expect(Tok::RParen, "')'")?;
                self.open_delims -= 1;
                Ok(Ast::VecField(Box::new(a), Box::new(b), Box::new(c)))
            }
            _ => Ok(Ast::Sym(name, pos)),
        }
    }

    fn parse_call1(&mut self, name: &str) -> Result<Ast, ParseError> {
        self.expect(Tok::LParen, &format!("'(' after '{name}'"))?;
        self.open_delims += 1;
        let inner = self.parse_expr()?;
        self.expect(Tok::RParen, "')'")?;
        self.open_delims -= 1;
        Ok(inner)
    }

    fn parse_call2(&mut self, name: &str) -> Result<(Ast, Ast), ParseError> {
        self.expect(Tok::LParen, &format!("'(' after '{name}'"))?;
        self.open_delims += 1;
        let first = self.parse_expr()?;
        self.expect(Tok::Semi, "';'")?;
        let second = self.parse_expr()?;
        self.expect(Tok::RParen, "')'")?;
        self.open_delims -= 1;
        Ok((first, second))
    }
}

/// Parses an expression starting at position (1, 1).
pub fn parse(src: &str) -> Result<Ast, ParseError> {
    parse_at(src, Pos { line: 1, col: 1 })
}

/// Parses an expression whose first character sits at `start` in some
/// enclosing file, so diagnostics carry absolute positions.
pub fn parse_at(src: &str, start: Pos) -> Result<Ast, ParseError> {
    let toks = Lexer::new(src, start).tokens()?;
    // End position: one past the last character of the final line.
    let end = {
        let mut line = start.line;
        let mut col = start.col;
        for c in src.chars() {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        Pos { line, col }
    };
    let mut parser = Parser { toks, idx: 0, end, open_delims: 0 };
    let ast = parser.parse_expr()?;
    if let Some(t) = parser.peek() {
        return Err(ParseError::Expected {
            expected: "end of input".to_string(),
            found: t.describe(),
            pos: parser.pos(),
        });
    }
    Ok(ast)
}

fn rat_literal(r: &Rat) -> String {
    crate::rat::fmt_rat(r)
}

/// Binding strength used by the printer; larger binds tighter.
fn level(ast: &Ast) -> u8 {
    match ast {
        Ast::Add(..) | Ast::Sub(..) => 1,
        Ast::Neg(..) => 2,
        Ast::Wedge(..) => 3,
        Ast::ScalarMul(..) => 4,
        Ast::Rational(r) if r.is_negative() => 0, // always parenthesized
        _ => 5,
    }
}

fn print_at(ast: &Ast, min_level: u8, out: &mut String) {
    let lvl = level(ast);
    let need_parens = lvl < min_level;
    if need_parens {
        out.push('(');
    }
    match ast {
        Ast::Rational(r) => {
            if r.is_negative() {
                out.push('-');
                out.push_str(&rat_literal(&-r.clone()));
            } else {
                out.push_str(&rat_literal(r));
            }
        }
        Ast::TParam => out.push('t'),
        Ast::Coord(ax) => out.push_str(ax.name()),
        Ast::Covector(ax) => {
            out.push('d');
            out.push_str(ax.name());
        }
        Ast::Sym(name, _) => out.push_str(name),
        Ast::Neg(inner) => {
            out.push('-');
            print_at(inner, 3, out);
        }
        Ast::Add(a, b) => {
            print_at(a, 1, out);
            out.push_str(" + ");
            print_at(b, 2, out);
        }
        Ast::Sub(a, b) => {
            print_at(a, 1, out);
            out.push_str(" - ");
            print_at(b, 2, out);
        }
        Ast::Wedge(a, b) => {
            print_at(a, 3, out);
            out.push('^');
            print_at(b, 4, out);
        }
        Ast::ScalarMul(a, b) => {
            print_at(a, 5, out);
            out.push('*');
            print_at(b, 4, out);
        }
        Ast::Bracket(a, b) => {
            out.push('[');
            print_at(a, 0, out);
            out.push_str(", ");
            print_at(b, 0, out);
            out.push(']');
        }
        Ast::ExteriorD(a) => print_call1("d", a, out),
        Ast::Trace(a) => print_call1("tr", a, out),
        Ast::Curvature(a) => print_call1("F", a, out),
        Ast::CovariantD(a, b) => print_call2("D", a, b, out),
        Ast::Contract(a, b) => print_call2("ic", a, b, out),
        Ast::VecField(a, b, c) => {
            out.push_str("vec(");
            print_at(a, 0, out);
            out.push_str(", ");
            print_at(b, 0, out);
            out.push_str(", ");
            print_at(c, 0, out);
            out.push(')');
        }
    }
    if need_parens {
        out.push(')');
    }
}

fn print_call1(name: &str, a: &Ast, out: &mut String) {
    out.push_str(name);
    out.push('(');
    print_at(a, 0, out);
    out.push(')');
}

fn print_call2(name: &str, a: &Ast, b: &Ast, out: &mut String) {
    out.push_str(name);
    out.push('(');
    print_at(a, 0, out);
    out.push_str("; ");
    print_at(b, 0, out);
    out.push(')');
}

/// Canonical text form; `parse(pretty_print(a))` equals `a` structurally.
pub fn pretty_print(ast: &Ast) -> String {
    let mut out = String::new();
    print_at(ast, 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn round_trips(src: &str) -> Ast {
        let ast = parse(src).unwrap();
        let printed = pretty_print(&ast);
        let reparsed = parse(&printed)
            .unwrap_or_else(|e| panic!("printed form '{printed}' failed: {e}"));
        assert_eq!(ast, reparsed, "print/reparse mismatch for '{src}' -> '{printed}'");
        ast
    }

    #[test]
    fn parse_trace_of_wedge() {
        let ast = round_trips("tr(d(w0) ^ w1)");
        match ast {
            Ast::Trace(inner) => match *inner {
                Ast::Wedge(a, b) => {
                    assert!(matches!(*a, Ast::ExteriorD(_)));
                    assert!(matches!(*b, Ast::Sym(ref n, _) if n == "w1"));
                }
                other => panic!("expected wedge, got {other:?}"),
            },
            other => panic!("expected trace, got {other:?}"),
        }
    }

    #[test]
    fn parse_general_lagrangian_transcription() {
        let src = "2*tr(F(wt)^a - (t - 1/2)*(D(wt; a)^a) + (1/3 - t + t*t)*(a^a^a))";
        round_trips(src);
    }

    #[test]
    fn unbalanced_parenthesis_reported_with_position() {
        let err = parse("tr(w0 ^").unwrap_err();
        assert_eq!(err, ParseError::Unbalanced(Pos { line: 1, col: 8 }));
        assert_eq!(err.to_string(), "unbalanced parenthesis at 1:8");
    }

    #[test]
    fn precedence_scalar_multiply_tighter_than_wedge() {
        let ast = parse("2*a ^ b").unwrap();
        match ast {
            Ast::Wedge(l, r) => {
                assert!(matches!(*l, Ast::ScalarMul(..)));
                assert!(matches!(*r, Ast::Sym(ref n, _) if n == "b"));
            }
            other => panic!("expected wedge at top, got {other:?}"),
        }
    }

    #[test]
    fn precedence_unary_minus_looser_than_wedge() {
        let ast = parse("-a^b").unwrap();
        assert!(matches!(ast, Ast::Neg(inner) if matches!(*inner, Ast::Wedge(..))));
    }

    #[test]
    fn rational_literals_lowest_terms() {
        let ast = parse("4/6").unwrap();
        assert_eq!(ast, Ast::Rational(rat(2, 3)));
        assert_eq!(pretty_print(&ast), "2/3");
        let neg = parse("-1/2").unwrap();
        assert_eq!(neg, Ast::Rational(rat(-1, 2)));
        assert_eq!(pretty_print(&neg), "-1/2");
        assert_eq!(parse("(-1/2)").unwrap(), neg);
        // In binding positions the negative literal is parenthesized.
        let prod = parse("(-1/2)*a").unwrap();
        assert_eq!(pretty_print(&prod), "(-1/2)*a");
        assert_eq!(parse(&pretty_print(&prod)).unwrap(), prod);
    }

    #[test]
    fn every_production_reachable() {
        // One expression touching each node kind, golden-printed.
        let src = "tr([w0, a]) + d(F(w1))^ic(vec(x, y, 1); D(w0; a)) - 2*t*dz - -chi";
        let ast = round_trips(src);
        let printed = pretty_print(&ast);
        assert_eq!(
            printed,
            "tr([w0, a]) + d(F(w1))^ic(vec(x, y, 1); D(w0; a)) - 2*t*dz - -chi"
        );
    }

    #[test]
    fn transgression_transcription_golden() {
        let src = "tr(2*F(w0)^(w1 - w0) + D(w0; w1 - w0)^(w1 - w0) + (2/3)*((w1 - w0)^(w1 - w0)^(w1 - w0)))";
        let ast = round_trips(src);
        let golden = "tr(2*F(w0)^(w1 - w0) + D(w0; w1 - w0)^(w1 - w0) + 2/3*((w1 - w0)^(w1 - w0)^(w1 - w0)))";
        assert_eq!(pretty_print(&ast), golden);
        // Printing is idempotent.
        assert_eq!(pretty_print(&parse(golden).unwrap()), golden);
    }

    #[test]
    fn unknown_character_rejected() {
        let err = parse("w0 @ w1").unwrap_err();
        assert!(matches!(err, ParseError::UnexpectedChar { ch: '@', .. }));
    }

    #[test]
    fn missing_argument_reports_expected_set() {
        let err = parse("D(w0)").unwrap_err();
        assert!(matches!(err, ParseError::Expected { .. }));
        let msg = err.to_string();
        assert!(msg.contains("';'"), "message: {msg}");
    }

    #[test]
    fn trailing_garbage_rejected() {
        let err = parse("w0 w1").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("end of input"), "message: {msg}");
    }
}
