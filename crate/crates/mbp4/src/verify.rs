//! Degeneracy-aware outcome classification and brute-force oracles.
//!
//! A decoding that returns any stabilizer-equivalent of the true error is a
//! success; classification therefore works on the residual `estimate * error`
//! and its coset, not on string equality alone.

use crate::bp::{DecodeResult, DecodeStatus};
use crate::codes::Code;
use crate::pauli::PauliString;

/// Classification of one decoding trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    /// The estimate equals the error exactly.
    Exact,
    /// The estimate differs but the residual is a stabilizer.
    Degenerate,
    /// The decoder failed, or the estimate's syndrome is wrong.
    DetectedFailure,
    /// Syndrome-matched estimate whose residual is a logical operator.
    UndetectedLogical,
}

impl Outcome {
    /// True for the outcomes that count as logical error events.
    pub fn is_error_event(self) -> bool {
        matches!(self, Outcome::DetectedFailure | Outcome::UndetectedLogical)
    }
}

/// Coset membership through the precomputed echelon basis of the code.
pub fn in_stabilizer_group(p: &PauliString, code: &Code) -> bool {
    code.in_stabilizer_group(p)
}

/// Classifies a decode result against the true error.
pub fn classify(error: &PauliString, result: &DecodeResult, z: &[bool], code: &Code) -> Outcome {
    if result.status == DecodeStatus::Fail {
        return Outcome::DetectedFailure;
    }
    // convergence soundness: a converged estimate always matches z
    debug_assert_eq!(code.syndrome(&result.estimate), z);
    if result.estimate == *error {
        return Outcome::Exact;
    }
    let residual = result.estimate.mul(error);
    if code.in_stabilizer_group(&residual) {
        Outcome::Degenerate
    } else if code.syndrome(&residual).iter().all(|&b| !b) {
        Outcome::UndetectedLogical
    } else {
        // unreachable for converged results; kept for arbitrary inputs
        Outcome::DetectedFailure
    }
}

/// Exhaustive coset oracle: enumerates all products of the independent
/// generators by Gray code. Usable only for small codes.
pub fn brute_force_coset(p: &PauliString, code: &Code) -> bool {
    let gens = code.independent_generators();
    assert!(
        gens.len() <= 20,
        "brute-force coset enumeration needs N - K <= 20, got {}",
        gens.len()
    );
    if p.is_identity() {
        return true;
    }
    let mut acc = PauliString::identity(code.n());
    let total = 1u64 << gens.len();
    for i in 1..total {
        let flip = i.trailing_zeros() as usize;
        acc.mul_assign(&gens[flip]);
        if acc == *p {
            return true;
        }
    }
    false
}

/// Brute-force minimum distance: the lightest member of N(S) \ S, found by
/// scanning every stabilizer times every nontrivial logical combination.
pub fn brute_force_distance(code: &Code) -> usize {
    let gens = code.independent_generators();
    assert!(
        gens.len() <= 20 && code.k() <= 4,
        "brute-force distance needs N - K <= 20 and K <= 4"
    );
    let logical_combos: Vec<PauliString> = {
        let mut combos = Vec::new();
        let flat: Vec<&PauliString> = code.logicals().iter().flat_map(|(x, z)| [x, z]).collect();
        for mask in 1u32..(1 << flat.len()) {
            let mut p = PauliString::identity(code.n());
            for (i, l) in flat.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    p.mul_assign(l);
                }
            }
            combos.push(p);
        }
        combos
    };
    let mut best = usize::MAX;
    let mut acc = PauliString::identity(code.n());
    let total = 1u64 << gens.len();
    for i in 0..total {
        if i > 0 {
            let flip = i.trailing_zeros() as usize;
            acc.mul_assign(&gens[flip]);
        }
        for l in &logical_combos {
            best = best.min(acc.mul(l).weight());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::{decode, DecoderConfig};
    use crate::channel::ChannelPrior;
    use crate::codes::{gen_five_qubit, gen_surface, gen_toric};
    use crate::pauli::{Pauli1, PauliString};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn membership_basics() {
        let code = gen_five_qubit();
        assert!(in_stabilizer_group(&ps("IIIII"), &code));
        assert!(in_stabilizer_group(&ps("XZZXI"), &code));
        let (xbar, zbar) = &code.logicals()[0];
        assert!(!in_stabilizer_group(xbar, &code));
        assert!(!in_stabilizer_group(zbar, &code));
        assert!(!brute_force_coset(xbar, &code));
        assert!(brute_force_coset(&ps("IIIII"), &code));
    }

    #[test]
    fn membership_equals_brute_force_on_all_five_qubit_strings() {
        let code = gen_five_qubit();
        let mut count_members = 0;
        for idx in 0..1024u32 {
            let paulis: Vec<Pauli1> =
                (0..5).map(|q| Pauli1::ALL[(idx >> (2 * q) & 3) as usize]).collect();
            let p = PauliString::from_paulis(&paulis);
            let fast = in_stabilizer_group(&p, &code);
            let slow = brute_force_coset(&p, &code);
            assert_eq!(fast, slow, "disagreement on {p}");
            count_members += fast as usize;
        }
        assert_eq!(count_members, 16, "the group has 2^(N-K) phase-free elements");
    }

    #[test]
    fn membership_equals_brute_force_on_random_surface3_strings() {
        let code = gen_surface(3).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        for _ in 0..2000 {
            // half random strings, half randomized stabilizer products
            let p = if rng.gen_bool(0.5) {
                let paulis: Vec<Pauli1> =
                    (0..9).map(|_| Pauli1::ALL[rng.gen_range(0..4)]).collect();
                PauliString::from_paulis(&paulis)
            } else {
                let mut p = PauliString::identity(9);
                for row in code.checks().rows() {
                    if rng.gen_bool(0.5) {
                        p.mul_assign(row);
                    }
                }
                p
            };
            assert_eq!(in_stabilizer_group(&p, &code), brute_force_coset(&p, &code));
        }
    }

    #[test]
    fn surface7_degenerate_pair_from_golden_trace() {
        let code = gen_surface(7).unwrap();
        use Pauli1::{X, Y, Z};
        let sp = |entries: &[(usize, Pauli1)]| {
            PauliString::from_sparse(
                49,
                &entries.iter().map(|&(q, w)| (q - 1, w)).collect::<Vec<_>>(),
            )
        };
        let error = sp(&[(4, X), (15, Z), (16, Z), (23, Y), (33, Z), (39, Y), (40, Y)]);
        let estimate = sp(&[(3, X), (22, Z), (23, X), (32, X), (33, Y), (39, Z), (40, Z)]);
        assert_eq!(code.syndrome(&error), code.syndrome(&estimate));
        let residual = estimate.mul(&error);
        assert!(in_stabilizer_group(&residual, &code), "golden estimates are degenerate");
        // and indeed equal to the product of the three anchor stabilizers
        let anchors = sp(&[(3, X), (4, X)])
            .mul(&sp(&[(15, Z), (16, Z), (22, Z), (23, Z)]))
            .mul(&sp(&[(32, X), (33, X), (39, X), (40, X)]));
        assert_eq!(residual, anchors);
    }

    #[test]
    fn classify_covers_all_outcomes() {
        let code = gen_five_qubit();
        let error = ps("IIIYI");
        let z = code.syndrome(&error);
        let mk = |estimate: PauliString, status| DecodeResult {
            status,
            estimate,
            iterations: 1,
            alpha_used: 1.0,
            energy_trace: None,
            decision_trace: None,
            gamma_trace: None,
        };
        assert_eq!(
            classify(&error, &mk(error.clone(), DecodeStatus::Converge), &z, &code),
            Outcome::Exact
        );
        assert_eq!(
            classify(&error, &mk(error.clone(), DecodeStatus::Fail), &z, &code),
            Outcome::DetectedFailure
        );
        // degenerate: multiply by a stabilizer row
        let degen = error.mul(&ps("XZZXI"));
        assert_eq!(
            classify(&error, &mk(degen, DecodeStatus::Converge), &z, &code),
            Outcome::Degenerate
        );
        // undetected logical: multiply by a logical
        let (xbar, _) = &code.logicals()[0];
        let masked = error.mul(xbar);
        assert_eq!(code.syndrome(&masked), z);
        assert_eq!(
            classify(&error, &mk(masked, DecodeStatus::Converge), &z, &code),
            Outcome::UndetectedLogical
        );
    }

    #[test]
    fn converged_decodes_always_have_zero_mismatch() {
        let code = gen_five_qubit();
        let prior = ChannelPrior::depolarizing(5, 0.05).unwrap();
        let cfg = DecoderConfig { alpha: 1.5, ..DecoderConfig::default() };
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        for _ in 0..200 {
            let e = prior.sample_error(&mut rng);
            let z = code.syndrome(&e);
            let r = decode(&code, &z, &prior, &cfg);
            if r.converged() {
                assert_eq!(crate::energy::j_s_mismatch(&r.estimate, &code, &z), 0);
                let outcome = classify(&e, &r, &z, &code);
                assert_ne!(outcome, Outcome::DetectedFailure);
            } else {
                assert_eq!(classify(&e, &r, &z, &code), Outcome::DetectedFailure);
            }
        }
    }

    #[test]
    fn brute_force_distances_of_small_lattices() {
        assert_eq!(brute_force_distance(&gen_surface(3).unwrap()), 3);
        assert_eq!(brute_force_distance(&gen_toric(4).unwrap()), 4);
        assert_eq!(brute_force_distance(&gen_five_qubit()), 3);
    }
}
