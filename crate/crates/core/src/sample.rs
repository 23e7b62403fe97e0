//! Deterministic randomized instance generation for the verification
//! suites. Coefficients are small rationals (numerator in [-3, 3],
//! denominator in {1, 2, 3}) at roughly half density, which keeps exact
//! arithmetic fast while exercising noncommutativity.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::forms::{GForm, VectorFieldSym};
use crate::gauge::{flat_connection, Connection, GroupJet};
use crate::jet::{Jet, MultiIndex};
use crate::liealg::{from_coefficients, LieAlgebraSpec, LieMatrix};
use crate::rat::{rat, Rat};

pub struct Sampler {
    rng: ChaCha8Rng,
}

fn mix(seed: u64, label: &str, trial: u64) -> u64 {
    // FNV-1a over the label, folded with seed and trial index.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h ^ seed.rotate_left(17) ^ trial.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent stream for one trial of one named check, so trials can
    /// run in any order (or in parallel) with identical results.
    pub fn for_trial(seed: u64, label: &str, trial: u64) -> Sampler {
        Sampler::new(mix(seed, label, trial))
    }

    fn below(&mut self, n: u64) -> u64 {
        self.rng.next_u64() % n
    }

    fn flip(&mut self) -> bool {
        self.rng.next_u64().is_multiple_of(2)
    }

    /// Nonzero rational with numerator in [-3, 3] and denominator in
    /// {1, 2, 3}.
    pub fn coeff(&mut self) -> Rat {
        let numer = loop {
            let n = self.below(7) as i64 - 3;
            if n != 0 {
                break n;
            }
        };
        let denom = self.below(3) as i64 + 1;
        rat(numer, denom)
    }

    /// Sparse jet at ~50% monomial density.
    pub fn jet(&mut self, cap: u32) -> Jet {
        self.jet_filtered(cap, false)
    }

    /// Jet with zero constant term (positive valuation).
    pub fn jet_no_constant(&mut self, cap: u32) -> Jet {
        self.jet_filtered(cap, true)
    }

    fn jet_filtered(&mut self, cap: u32, skip_constant: bool) -> Jet {
        let mut terms = Vec::new();
        let top = cap.min(u32::from(u8::MAX)) as u8;
        for i in 0..=top {
            for j in 0..=top - i {
                for k in 0..=top - i - j {
                    if skip_constant && i == 0 && j == 0 && k == 0 {
                        continue;
                    }
                    if self.flip() {
                        let mi: MultiIndex = [i, j, k];
                        terms.push((mi, self.coeff()));
                    }
                }
            }
        }
        Jet::from_terms(cap, terms)
    }

    pub fn lie_matrix(&mut self, spec: &LieAlgebraSpec, cap: u32) -> LieMatrix {
        let coeffs: Vec<Jet> = (0..spec.dim()).map(|_| self.jet(cap)).collect();
        from_coefficients(spec, &coeffs).expect("dimension matches")
    }

    pub fn gform(&mut self, spec: &LieAlgebraSpec, degree: u8, cap: u32) -> GForm {
        let comps: Vec<LieMatrix> = crate::forms::basis_masks(degree)
            .iter()
            .map(|_| self.lie_matrix(spec, cap))
            .collect();
        GForm::from_components(degree, cap, comps)
    }

    pub fn connection(&mut self, spec: &LieAlgebraSpec, cap: u32) -> Connection {
        Connection::new(self.gform(spec, 1, cap)).expect("degree 1")
    }

    /// Group element I + N with N a Lie-algebra-valued jet of positive
    /// valuation; invertibility is automatic in the truncated ring.
    pub fn group_jet(&mut self, spec: &LieAlgebraSpec, cap: u32) -> GroupJet {
        let coeffs: Vec<Jet> = (0..spec.dim()).map(|_| self.jet_no_constant(cap)).collect();
        let n = from_coefficients(spec, &coeffs).expect("dimension matches");
        GroupJet::new(LieMatrix::identity(spec.matrix_size(), cap).add(&n))
            .expect("unipotent perturbation is invertible")
    }

    pub fn flat_connection(&mut self, spec: &LieAlgebraSpec, cap: u32) -> Connection {
        flat_connection(&self.group_jet(spec, cap))
    }

    pub fn vector_field(&mut self, cap: u32) -> VectorFieldSym {
        VectorFieldSym::new([self.jet(cap), self.jet(cap), self.jet(cap)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = Sampler::for_trial(7, "check", 3);
        let mut b = Sampler::for_trial(7, "check", 3);
        let sl2 = LieAlgebraSpec::sl2();
        assert_eq!(a.jet(4), b.jet(4));
        assert!(a.lie_matrix(&sl2, 4).eq_at(&b.lie_matrix(&sl2, 4), 4));
    }

    #[test]
    fn different_labels_differ() {
        let mut a = Sampler::for_trial(7, "check-a", 0);
        let mut b = Sampler::for_trial(7, "check-b", 0);
        // Overwhelmingly likely to differ; a collision would be a bug in
        // the stream separation.
        assert_ne!(a.jet(4), b.jet(4));
    }

    #[test]
    fn no_constant_term_when_skipped() {
        let mut s = Sampler::new(123);
        for _ in 0..20 {
            use num_traits::Zero;
            assert!(s.jet_no_constant(3).constant_term().is_zero());
        }
    }
}
