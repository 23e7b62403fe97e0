//! Standalone brute-force oracle for the bundled constant-coefficient
//! scenario (`scenarios/worked_sl2.scn`). It recomputes the two reported
//! values from first principles — plain integer 2x2 matrices and an
//! explicit sum over index permutations — without touching the engine,
//! and emits the golden file the acceptance suite compares against.
//!
//! Regenerate with:
//!     cargo run -p csbf-cli --bin worked-oracle -- --write goldens/worked_sl2.golden

use std::env;
use std::fs;
use std::process::ExitCode;

type M2 = [[i64; 2]; 2];

const E: M2 = [[0, 1], [0, 0]];
const F: M2 = [[0, 0], [1, 0]];
const H: M2 = [[1, 0], [0, -1]];

fn mul(a: M2, b: M2) -> M2 {
    let mut out = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn trace(a: M2) -> i64 {
    a[0][0] + a[1][1]
}

/// Minimal exact fraction so the 2/3 prefactor stays exact.
#[derive(Clone, Copy, PartialEq, Eq)]
struct Frac {
    num: i64,
    den: i64,
}

impl Frac {
    fn new(num: i64, den: i64) -> Frac {
        assert!(den != 0);
        let g = gcd(num.abs().max(1), den.abs());
        let sign = if den < 0 { -1 } else { 1 };
        Frac { num: sign * num / g, den: sign * den / g }
    }

    fn render(self) -> String {
        if self.den == 1 {
            format!("{}", self.num)
        } else {
            format!("{}/{}", self.num, self.den)
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// dx^dy^dz coefficient of a^3 for the constant 1-form
/// `a = m[0] dx + m[1] dy + m[2] dz`: sum over all permutations (i, j, k)
/// of (0, 1, 2) of `sign(i, j, k) * m[i] m[j] m[k]`.
fn alpha_cubed_trace(m: [M2; 3]) -> i64 {
    const PERMS: [([usize; 3], i64); 6] = [
        ([0, 1, 2], 1),
        ([0, 2, 1], -1),
        ([1, 0, 2], -1),
        ([1, 2, 0], 1),
        ([2, 0, 1], 1),
        ([2, 1, 0], -1),
    ];
    let mut total = 0;
    for (perm, sign) in PERMS {
        total += sign * trace(mul(mul(m[perm[0]], m[perm[1]]), m[perm[2]]));
    }
    total
}

/// Renders a constant-coefficient 1-form given its (dx, dy, dz)
/// coefficients, in the same layout the engine uses.
fn render_one_form(coeffs: [Frac; 3]) -> String {
    let names = ["dx", "dy", "dz"];
    let mut parts = Vec::new();
    for (c, name) in coeffs.iter().zip(names) {
        if c.num == 0 {
            continue;
        }
        if c.num == 1 && c.den == 1 {
            parts.push(name.to_string());
        } else {
            parts.push(format!("{} {name}", c.render()));
        }
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

fn golden_text() -> String {
    let alpha = [E, F, H];
    // With w0 = 0 and constant coefficients, d(alpha) = 0 and F(w0) = 0,
    // so the transgression reduces to 2/3 tr(alpha^3).
    let cubed = alpha_cubed_trace(alpha);
    let q = Frac::new(2 * cubed, 3);
    let q_line = if q.num == 0 {
        "0".to_string()
    } else if q == Frac::new(1, 1) {
        "dx^dy^dz".to_string()
    } else {
        format!("{} dx^dy^dz", q.render())
    };
    // U(chi) = tr(alpha chi) with chi = H: one coefficient per covector.
    let u = [
        Frac::new(trace(mul(E, H)), 1),
        Frac::new(trace(mul(F, H)), 1),
        Frac::new(trace(mul(H, H)), 1),
    ];
    format!("q_value = {q_line}\nu_gauge = {}\n", render_one_form(u))
}

fn main() -> ExitCode {
    let args: Vec<String> = env::args().skip(1).collect();
    let text = golden_text();
    match args.as_slice() {
        [] => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        [flag, path] if flag == "--write" => match fs::write(path, &text) {
            Ok(()) => {
                eprintln!("wrote {path}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: cannot write {path}: {e}");
                ExitCode::from(2)
            }
        },
        _ => {
            eprintln!("usage: worked-oracle [--write <path>]");
            ExitCode::from(2)
        }
    }
}
