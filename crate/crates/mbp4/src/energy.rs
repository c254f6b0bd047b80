//! Energy-landscape diagnostics for the decoder: the distance and
//! check-satisfaction terms, their exact gradient, the per-edge weights
//! behind the gradient-descent reference update, and the bounded / Taylor /
//! negative-only / mismatch-count approximations.

use crate::bp::{self, ATANH_CLAMP};
use crate::channel::ChannelPrior;
use crate::codes::Code;
use crate::pauli::{Pauli1, PauliString};

/// Default weight on the check-satisfaction term when a single combined
/// energy is reported. The two terms are always available separately.
pub const DEFAULT_ETA: f64 = 1e6;

/// Default clip of the bounded check-satisfaction approximation; covers
/// per-check belief differences up to |delta| ~ 0.99.
pub const DEFAULT_BOUND: f64 = 6.0;

#[derive(Debug, Clone, Copy)]
pub struct EnergyParams {
    /// Weight on the check-satisfaction term.
    pub eta: f64,
    /// Clip bound of the bounded approximation.
    pub bound: f64,
    /// Order of the Taylor approximation (odd).
    pub taylor_order: usize,
}

impl Default for EnergyParams {
    fn default() -> Self {
        EnergyParams { eta: DEFAULT_ETA, bound: DEFAULT_BOUND, taylor_order: 1 }
    }
}

impl EnergyParams {
    pub fn validate(&self) -> Result<(), String> {
        if !self.eta.is_finite() || self.eta <= 0.0 {
            return Err(format!("eta must be positive, got {}", self.eta));
        }
        if !self.bound.is_finite() || self.bound <= 0.0 {
            return Err(format!("bound must be positive, got {}", self.bound));
        }
        if self.taylor_order.is_multiple_of(2) {
            return Err(format!("taylor order must be odd, got {}", self.taylor_order));
        }
        Ok(())
    }
}

/// Distance term: half the squared distance between the LLR state and the
/// channel statistics.
pub fn j_d(gamma: &[[f64; 3]], prior: &ChannelPrior) -> f64 {
    assert_eq!(gamma.len(), prior.len());
    let mut sum = 0.0;
    for (g, l) in gamma.iter().zip(prior.llrs()) {
        for w in 0..3 {
            let d = g[w] - l[w];
            sum += d * d;
        }
    }
    0.5 * sum
}

/// Per-check log-domain messages `Delta_m` with the full (non-extrinsic)
/// product over the check support, signed by the syndrome.
pub fn check_deltas(gamma: &[[f64; 3]], code: &Code, z: &[bool]) -> Vec<f64> {
    let checks = code.checks();
    assert_eq!(gamma.len(), checks.num_qubits());
    assert_eq!(z.len(), checks.num_checks());
    z.iter()
        .enumerate()
        .map(|(m, &zm)| {
            let mut prod = 1.0;
            for e in checks.check_neighbors(m) {
                prod *= (bp::lambda_w_raw(gamma[e.node], e.pauli) / 2.0).tanh();
            }
            let sign = if zm { -1.0 } else { 1.0 };
            2.0 * (sign * prod).clamp(-ATANH_CLAMP, ATANH_CLAMP).atanh()
        })
        .collect()
}

/// Check-satisfaction term: minus the sum of the per-check messages. Each
/// satisfied check contributes negatively.
pub fn j_s(gamma: &[[f64; 3]], code: &Code, z: &[bool]) -> f64 {
    -check_deltas(gamma, code, z).iter().sum::<f64>()
}

/// Bounded variant: per-check messages clipped to `[-b, b]`.
pub fn j_s_bounded(gamma: &[[f64; 3]], code: &Code, z: &[bool], b: f64) -> f64 {
    -check_deltas(gamma, code, z)
        .iter()
        .map(|&d| d.signum() * d.abs().min(b))
        .sum::<f64>()
}

/// Taylor approximation of the check-satisfaction term from signed per-check
/// belief differences: `-2 sum_m (d + d^3/3 + ... + d^l/l)`.
pub fn j_s_taylor(deltas: &[f64], l: usize) -> f64 {
    assert!(l % 2 == 1, "taylor order must be odd");
    let mut sum = 0.0;
    for &d in deltas {
        debug_assert!(d.abs() <= 1.0);
        let d2 = d * d;
        let mut pow = d;
        let mut acc = 0.0;
        let mut j = 1;
        while j <= l {
            acc += pow / j as f64;
            pow *= d2;
            j += 2;
        }
        sum += acc;
    }
    -2.0 * sum
}

/// Signed per-check belief differences from linear-domain output
/// distributions: `delta_m = (-1)^{z_m} prod_n ((q_I + q_{S_mn}) - sum q_W')`.
pub fn linear_check_deltas(beliefs: &[[f64; 4]], code: &Code, z: &[bool]) -> Vec<f64> {
    let checks = code.checks();
    assert_eq!(beliefs.len(), checks.num_qubits());
    (0..checks.num_checks())
        .map(|m| {
            let mut prod = 1.0;
            for e in checks.check_neighbors(m) {
                let q = beliefs[e.node];
                let commute = q[0] + q[bp::pauli_axis(e.pauli) + 1];
                prod *= 2.0 * commute - 1.0;
            }
            if z[m] {
                -prod
            } else {
                prod
            }
        })
        .collect()
}

/// Negative-only variant: `sum_m min(0, Delta_m)`.
pub fn j_s_negative_only(deltas: &[f64]) -> f64 {
    deltas.iter().map(|&d| d.min(0.0)).sum()
}

/// Mismatch count: minus the Hamming distance between the target syndrome
/// and the estimate's syndrome. Zero iff the syndromes agree.
pub fn j_s_mismatch(estimate: &PauliString, code: &Code, z: &[bool]) -> i64 {
    let zhat = code.syndrome(estimate);
    -(z.iter().zip(&zhat).filter(|(a, b)| a != b).count() as i64)
}

/// The per-edge factor relating check messages to the gradient:
/// `(1 - tanh^2(lambda/2)) / (1 - prod^2)`, always positive.
pub fn g_mn_at(gamma: &[[f64; 3]], code: &Code, m: usize, n: usize) -> f64 {
    let checks = code.checks();
    let adj = checks.check_neighbors(m);
    let own = adj
        .iter()
        .find(|e| e.node == n)
        .expect("edge (m, n) must exist in the Tanner graph");
    let t_own = (bp::lambda_w_raw(gamma[n], own.pauli) / 2.0).tanh();
    let mut prod = 1.0;
    for e in adj {
        prod *= (bp::lambda_w_raw(gamma[e.node], e.pauli) / 2.0).tanh();
    }
    let prod = prod.clamp(-ATANH_CLAMP, ATANH_CLAMP);
    (1.0 - t_own * t_own) / (1.0 - prod * prod)
}

/// `1/g` at the uniform depolarizing prior, where every per-edge tanh equals
/// `t = 1 - 4 eps / 3`, in closed form `(1 - t^(2k)) / (1 - t^2)` for a
/// weight-k check.
pub fn inv_g_channel(eps: f64, k: usize) -> f64 {
    assert!(eps > 0.0 && eps < 0.75, "eps must lie in (0, 3/4)");
    assert!(k >= 2, "check weight must be at least 2");
    let t = 1.0 - 4.0 * eps / 3.0;
    let t2 = t * t;
    (1.0 - t2.powi(k as i32)) / (1.0 - t2)
}

/// Per-check extrinsic products and g factors shared by the gradient and the
/// reference update.
struct EdgeTerms {
    /// For each check: (qubit, edge pauli, delta_tilde, g).
    per_check: Vec<Vec<(usize, Pauli1, f64, f64)>>,
}

fn edge_terms(gamma: &[[f64; 3]], code: &Code, z: &[bool]) -> EdgeTerms {
    let checks = code.checks();
    let mut per_check = Vec::with_capacity(checks.num_checks());
    for (m, &zm) in z.iter().enumerate() {
        let adj = checks.check_neighbors(m);
        let t: Vec<f64> = adj
            .iter()
            .map(|e| (bp::lambda_w_raw(gamma[e.node], e.pauli) / 2.0).tanh())
            .collect();
        let sign = if zm { -1.0 } else { 1.0 };
        let full: f64 = t.iter().product();
        let denom = (1.0 - (full * full).min(ATANH_CLAMP * ATANH_CLAMP)).max(f64::MIN_POSITIVE);
        // extrinsic products by prefix/suffix
        let k = adj.len();
        let mut ext = vec![1.0; k];
        let mut pre = 1.0;
        for i in 0..k {
            ext[i] = pre;
            pre *= t[i];
        }
        let mut suf = 1.0;
        for i in (0..k).rev() {
            ext[i] *= suf;
            suf *= t[i];
        }
        per_check.push(
            adj.iter()
                .enumerate()
                .map(|(i, e)| {
                    let g = (1.0 - t[i] * t[i]) / denom;
                    (e.node, e.pauli, sign * ext[i], g)
                })
                .collect(),
        );
    }
    EdgeTerms { per_check }
}

/// Exact gradient of `J_D + eta * J_S` with respect to every LLR component.
pub fn grad_j(
    gamma: &[[f64; 3]],
    prior: &ChannelPrior,
    code: &Code,
    z: &[bool],
    params: &EnergyParams,
) -> Vec<[f64; 3]> {
    assert_eq!(gamma.len(), code.n());
    let terms = edge_terms(gamma, code, z);
    let mut grad: Vec<[f64; 3]> = gamma
        .iter()
        .zip(prior.llrs())
        .map(|(g, l)| [g[0] - l[0], g[1] - l[1], g[2] - l[2]])
        .collect();
    for per_edge in &terms.per_check {
        for &(n, u, delta_tilde, g) in per_edge {
            let eg = params.eta * g * delta_tilde;
            let ui = bp::pauli_axis(u);
            let exps = [(-gamma[n][0]).exp(), (-gamma[n][1]).exp(), (-gamma[n][2]).exp()];
            let anti_den = (exps[0] + exps[1] + exps[2] - exps[ui]).max(f64::MIN_POSITIVE);
            for w in 0..3 {
                if w == ui {
                    grad[n][w] += eg * exps[w] / (1.0 + exps[w]);
                } else {
                    grad[n][w] -= eg * exps[w] / anti_den;
                }
            }
        }
    }
    grad
}

/// One gradient-descent reference step (unit step size): the update rewrites
/// as the channel statistics plus the omega-weighted extrinsic messages.
pub fn gd_step(
    gamma: &[[f64; 3]],
    prior: &ChannelPrior,
    code: &Code,
    z: &[bool],
    params: &EnergyParams,
) -> Vec<[f64; 3]> {
    assert_eq!(gamma.len(), code.n());
    let terms = edge_terms(gamma, code, z);
    let mut out: Vec<[f64; 3]> = prior.llrs().to_vec();
    for per_edge in &terms.per_check {
        for &(n, u, delta_tilde, g) in per_edge {
            let ui = bp::pauli_axis(u);
            let exps = [(-gamma[n][0]).exp(), (-gamma[n][1]).exp(), (-gamma[n][2]).exp()];
            let anti_den = (exps[0] + exps[1] + exps[2] - exps[ui]).max(f64::MIN_POSITIVE);
            for w in 0..3 {
                if w == ui {
                    let omega0 = params.eta * g * exps[w] / (1.0 + exps[w]);
                    debug_assert!(omega0 >= 0.0);
                    out[n][w] -= omega0 * delta_tilde;
                } else {
                    let omega1 = params.eta * g * exps[w] / anti_den;
                    debug_assert!(omega1 >= 0.0);
                    out[n][w] += omega1 * delta_tilde;
                }
            }
        }
    }
    out
}
