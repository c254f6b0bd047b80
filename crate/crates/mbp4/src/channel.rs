//! Depolarizing-error sampling and channel-statistics (prior LLR)
//! initialization.

use rand::Rng;
use thiserror::Error;

use crate::pauli::{Pauli1, PauliString};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("depolarizing rate must lie strictly inside (0, 1), got {0}")]
    RateOutOfRange(f64),
    #[error("qubit probabilities must be strictly positive and sum to 1, got {0:?}")]
    BadQuadruple([f64; 4]),
}

/// Per-qubit error probabilities and the derived prior LLR triples
/// `(ln p_I/p_X, ln p_I/p_Y, ln p_I/p_Z)`.
#[derive(Debug, Clone)]
pub struct ChannelPrior {
    probs: Vec<[f64; 4]>,
    llrs: Vec<[f64; 3]>,
}

impl ChannelPrior {
    /// Uniform depolarizing prior: each qubit suffers X, Y, or Z with
    /// probability eps/3. All three LLRs equal `ln(3(1-eps)/eps)`.
    pub fn depolarizing(n: usize, eps: f64) -> Result<Self, ChannelError> {
        if !eps.is_finite() || eps <= 0.0 || eps >= 1.0 {
            return Err(ChannelError::RateOutOfRange(eps));
        }
        let q = [1.0 - eps, eps / 3.0, eps / 3.0, eps / 3.0];
        Self::from_quadruples(vec![q; n])
    }

    /// General per-qubit quadruples `(p_I, p_X, p_Y, p_Z)`.
    pub fn from_quadruples(probs: Vec<[f64; 4]>) -> Result<Self, ChannelError> {
        let mut llrs = Vec::with_capacity(probs.len());
        for q in &probs {
            let sum: f64 = q.iter().sum();
            if q.iter().any(|&p| !p.is_finite() || p <= 0.0) || (sum - 1.0).abs() > 1e-9 {
                return Err(ChannelError::BadQuadruple(*q));
            }
            llrs.push([(q[0] / q[1]).ln(), (q[0] / q[2]).ln(), (q[0] / q[3]).ln()]);
        }
        Ok(ChannelPrior { probs, llrs })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `(p_I, p_X, p_Y, p_Z)` for qubit `n`.
    #[inline]
    pub fn probs(&self, n: usize) -> [f64; 4] {
        self.probs[n]
    }

    /// Prior LLR triple for qubit `n`.
    #[inline]
    pub fn llr(&self, n: usize) -> [f64; 3] {
        self.llrs[n]
    }

    pub fn llrs(&self) -> &[[f64; 3]] {
        &self.llrs
    }

    /// Draws an error with each qubit sampled independently from its
    /// quadruple. Deterministic for a fixed RNG state.
    pub fn sample_error<R: Rng>(&self, rng: &mut R) -> PauliString {
        let mut paulis = Vec::with_capacity(self.len());
        for q in &self.probs {
            let u: f64 = rng.gen();
            let p = if u < q[0] {
                Pauli1::I
            } else if u < q[0] + q[1] {
                Pauli1::X
            } else if u < q[0] + q[1] + q[2] {
                Pauli1::Y
            } else {
                Pauli1::Z
            };
            paulis.push(p);
        }
        PauliString::from_paulis(&paulis)
    }
}
