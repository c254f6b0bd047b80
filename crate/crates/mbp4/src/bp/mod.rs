//! The quaternary belief-propagation decoder family.
//!
//! [`decode`] runs the log-domain algorithm: messages are combined with the
//! boxplus rule at the checks (horizontal step), qubit LLR triples are formed
//! with step scale 1/alpha and optional beta term (vertical step), and the
//! return messages subtract the incoming check message at full strength
//! (fixed inhibition). `alpha = 1, beta = 0` is conventional BP4. Message
//! normalization ([`Mode::NormalizedBp`]) scales the inhibition along with
//! the sums instead. [`decode_linear`] is the same decoder carried out on
//! probability quadruples, and [`decode_adaptive`] retries a descending
//! alpha grid until the syndrome is matched.

mod linear;
mod log_domain;

use crate::channel::ChannelPrior;
use crate::codes::Code;
use crate::energy;
use crate::pauli::{Pauli1, PauliString};

/// Product clamp applied before inverse-tanh in check combining.
pub(crate) const ATANH_CLAMP: f64 = 1.0 - 1e-12;

/// Message-passing schedule.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    /// All checks, then all variables, once per iteration.
    Parallel,
    /// Sweep qubits in ascending index, refreshing incident check messages
    /// from the latest state before each qubit update.
    Serial,
    /// Partition of the qubits; serial inside each group, groups see only
    /// start-of-iteration messages from other groups.
    GroupedSerial(Vec<Vec<usize>>),
}

/// Vertical-step variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Memory BP: inhibition at full strength (the default decoder).
    Mbp,
    /// Classical-style message normalization: inhibition scaled by 1/alpha.
    NormalizedBp,
}

/// Arithmetic domain of the decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Log,
    Linear,
}

#[derive(Debug, Clone)]
pub struct DecoderConfig {
    /// 1/alpha scales the summed check messages in the vertical step.
    pub alpha: f64,
    /// Weight of the same-Pauli inhibition term (log-domain MBP only).
    pub beta: f64,
    pub mode: Mode,
    pub schedule: Schedule,
    pub t_max: usize,
    /// Magnitude bound applied to scalarized messages and LLR components.
    pub clip: f64,
    /// Descending alpha grid for [`decode_adaptive`].
    pub alpha_grid: Option<Vec<f64>>,
    /// Build the decoding prior from this rate instead of the channel rate.
    pub fixed_eps0: Option<f64>,
    pub domain: Domain,
    /// Record per-iteration energies and hard decisions.
    pub trace: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            alpha: 1.0,
            beta: 0.0,
            mode: Mode::Mbp,
            schedule: Schedule::Parallel,
            t_max: 30,
            clip: 30.0,
            alpha_grid: None,
            fixed_eps0: None,
            domain: Domain::Log,
            trace: false,
        }
    }
}

impl DecoderConfig {
    /// Checks the config invariants; `n` is the code's qubit count.
    pub fn validate(&self, n: usize) -> Result<(), String> {
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return Err(format!("alpha must be positive, got {}", self.alpha));
        }
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(format!("beta must be >= 0, got {}", self.beta));
        }
        if self.mode == Mode::NormalizedBp && self.beta != 0.0 {
            return Err("normalized BP has no beta term".into());
        }
        if self.t_max == 0 {
            return Err("t_max must be at least 1".into());
        }
        if !self.clip.is_finite() || self.clip <= 0.0 {
            return Err(format!("clip must be positive, got {}", self.clip));
        }
        if let Some(grid) = &self.alpha_grid {
            if grid.is_empty() {
                return Err("alpha grid must be nonempty".into());
            }
            if grid.iter().any(|&a| !a.is_finite() || a <= 0.0) {
                return Err("alpha grid entries must be positive".into());
            }
            if grid.windows(2).any(|w| w[0] <= w[1]) {
                return Err("alpha grid must be strictly decreasing".into());
            }
        }
        if let Some(e0) = self.fixed_eps0 {
            if !e0.is_finite() || e0 <= 0.0 || e0 >= 1.0 {
                return Err(format!("fixed eps0 must lie in (0,1), got {e0}"));
            }
        }
        if let Schedule::GroupedSerial(groups) = &self.schedule {
            let mut seen = vec![false; n];
            for g in groups {
                for &q in g {
                    if q >= n || seen[q] {
                        return Err("groups must partition the qubits".into());
                    }
                    seen[q] = true;
                }
            }
            if seen.iter().any(|&s| !s) {
                return Err("groups must cover every qubit".into());
            }
        }
        Ok(())
    }

    /// Sweep groups for the serial-style schedules; `None` means parallel.
    pub(crate) fn sweep_groups(&self, n: usize) -> Option<Vec<Vec<usize>>> {
        match &self.schedule {
            Schedule::Parallel => None,
            Schedule::Serial => Some(vec![(0..n).collect()]),
            Schedule::GroupedSerial(groups) => Some(groups.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeStatus {
    Converge,
    Fail,
}

/// Per-iteration diagnostic energies recorded when tracing is enabled.
#[derive(Debug, Clone, Copy)]
pub struct EnergyTraceRow {
    pub iter: usize,
    pub j_s_bounded: f64,
    pub j_s_mismatch: i64,
}

#[derive(Debug, Clone)]
pub struct DecodeResult {
    pub status: DecodeStatus,
    /// Final hard decision (syndrome-matched iff status is Converge).
    pub estimate: PauliString,
    pub iterations: usize,
    pub alpha_used: f64,
    pub energy_trace: Option<Vec<EnergyTraceRow>>,
    /// Hard decision after every iteration (tracing only).
    pub decision_trace: Option<Vec<PauliString>>,
    /// LLR state after every iteration (tracing only).
    pub gamma_trace: Option<Vec<Vec<[f64; 3]>>>,
}

impl DecodeResult {
    pub fn converged(&self) -> bool {
        self.status == DecodeStatus::Converge
    }
}

#[inline]
pub(crate) fn pauli_axis(w: Pauli1) -> usize {
    match w {
        Pauli1::X => 0,
        Pauli1::Y => 1,
        Pauli1::Z => 2,
        Pauli1::I => unreachable!("identity has no LLR axis"),
    }
}

/// Scalarization of an LLR triple against Pauli `w`: the log-ratio of the
/// probability that the qubit error commutes with `w` versus anticommutes.
/// Unclipped; the two anticommuting terms are summed directly so the
/// denominator stays positive.
pub(crate) fn lambda_w_raw(gamma: [f64; 3], w: Pauli1) -> f64 {
    let wi = pauli_axis(w);
    let num = (-gamma[wi]).exp().ln_1p();
    let (a, b) = match wi {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let den = ((-gamma[a]).exp() + (-gamma[b]).exp()).max(f64::MIN_POSITIVE);
    num - den.ln()
}

/// The lambda scalarization clamped to `[-clip, clip]`.
pub fn lambda_w(gamma: [f64; 3], w: Pauli1, clip: f64) -> f64 {
    lambda_w_raw(gamma, w).clamp(-clip, clip)
}

/// Check-node combining rule `2 tanh^-1( prod tanh(a/2) )`, with the product
/// clamped away from +-1.
pub fn boxplus(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut prod = 1.0;
    let mut any = false;
    for a in values {
        prod *= (a / 2.0).tanh();
        any = true;
    }
    debug_assert!(any, "boxplus of an empty sequence");
    2.0 * prod.clamp(-ATANH_CLAMP, ATANH_CLAMP).atanh()
}

/// Hard decision from an LLR triple: identity unless some component is
/// negative, in which case the smallest component wins (ties in X < Y < Z
/// order; a zero component ties with identity and identity is preferred).
#[inline]
pub(crate) fn hard_decision(gamma: [f64; 3]) -> Pauli1 {
    let mut min_axis = 0;
    for i in 1..3 {
        if gamma[i] < gamma[min_axis] {
            min_axis = i;
        }
    }
    if gamma[min_axis] >= 0.0 {
        Pauli1::I
    } else {
        Pauli1::NON_IDENTITY[min_axis]
    }
}

fn check_dimensions(code: &Code, z: &[bool], prior: &ChannelPrior, cfg: &DecoderConfig) {
    assert_eq!(z.len(), code.m(), "syndrome length must equal the check count");
    assert_eq!(prior.len(), code.n(), "prior length must equal the qubit count");
    if let Err(e) = cfg.validate(code.n()) {
        panic!("invalid decoder config: {e}");
    }
}

/// Log-domain decoding of the syndrome `z`.
pub fn decode(code: &Code, z: &[bool], prior: &ChannelPrior, cfg: &DecoderConfig) -> DecodeResult {
    check_dimensions(code, z, prior, cfg);
    log_domain::run(code, z, prior, cfg)
}

/// Linear-domain decoding (probability quadruples, beta = 0).
pub fn decode_linear(
    code: &Code,
    z: &[bool],
    prior: &ChannelPrior,
    cfg: &DecoderConfig,
) -> DecodeResult {
    check_dimensions(code, z, prior, cfg);
    assert_eq!(cfg.beta, 0.0, "the linear-domain decoder requires beta = 0");
    assert_eq!(cfg.mode, Mode::Mbp, "the linear-domain decoder has no normalized mode");
    linear::run(code, z, prior, cfg)
}

/// Runs the decoder over the descending alpha grid, returning the first
/// syndrome-matched result (beta is fixed to 0 as part of the procedure).
/// After exhausting the grid the last run's result is returned with
/// status Fail.
pub fn decode_adaptive(
    code: &Code,
    z: &[bool],
    prior: &ChannelPrior,
    cfg: &DecoderConfig,
) -> DecodeResult {
    check_dimensions(code, z, prior, cfg);
    let grid = cfg
        .alpha_grid
        .clone()
        .expect("decode_adaptive requires cfg.alpha_grid");
    let mut sub = cfg.clone();
    sub.alpha_grid = None;
    sub.beta = 0.0;
    let mut last = None;
    for &alpha in &grid {
        sub.alpha = alpha;
        let result = match cfg.domain {
            Domain::Log => log_domain::run(code, z, prior, &sub),
            Domain::Linear => linear::run(code, z, prior, &sub),
        };
        if result.converged() {
            return result;
        }
        last = Some(result);
    }
    last.expect("grid validated nonempty")
}

/// Parses an alpha grid of the form `start:end:step` into the descending
/// sequence `{start, start-step, ..., end}`.
pub fn parse_alpha_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("alpha grid must be start:end:step, got {s:?}"));
    }
    let start: f64 = parts[0].parse().map_err(|_| format!("bad grid start {:?}", parts[0]))?;
    let end: f64 = parts[1].parse().map_err(|_| format!("bad grid end {:?}", parts[1]))?;
    let step: f64 = parts[2].parse().map_err(|_| format!("bad grid step {:?}", parts[2]))?;
    if [start, end, step].iter().any(|v| !v.is_finite()) || start <= end || end <= 0.0 || step <= 0.0 {
        return Err(format!("alpha grid needs start > end > 0 and step > 0, got {s:?}"));
    }
    let mut grid = Vec::new();
    let count = ((start - end) / step).round() as usize;
    for i in 0..=count {
        let a = start - i as f64 * step;
        grid.push((a.max(end) * 1e12).round() / 1e12);
    }
    Ok(grid)
}

/// Shared trace bookkeeping for both decoding domains.
pub(crate) struct Tracer {
    energy: Vec<EnergyTraceRow>,
    decisions: Vec<PauliString>,
    gammas: Vec<Vec<[f64; 3]>>,
    enabled: bool,
}

/// Trace payload: `(energy rows, decisions, LLR states)`.
pub(crate) type TraceData =
    (Option<Vec<EnergyTraceRow>>, Option<Vec<PauliString>>, Option<Vec<Vec<[f64; 3]>>>);

impl Tracer {
    pub(crate) fn new(enabled: bool) -> Self {
        Tracer { energy: Vec::new(), decisions: Vec::new(), gammas: Vec::new(), enabled }
    }

    pub(crate) fn record(
        &mut self,
        iter: usize,
        gamma: &[[f64; 3]],
        estimate: &PauliString,
        code: &Code,
        z: &[bool],
    ) {
        if !self.enabled {
            return;
        }
        self.energy.push(EnergyTraceRow {
            iter,
            j_s_bounded: energy::j_s_bounded(gamma, code, z, energy::DEFAULT_BOUND),
            j_s_mismatch: energy::j_s_mismatch(estimate, code, z),
        });
        self.decisions.push(estimate.clone());
        self.gammas.push(gamma.to_vec());
    }

    pub(crate) fn finish(self) -> TraceData {
        if self.enabled {
            (Some(self.energy), Some(self.decisions), Some(self.gammas))
        } else {
            (None, None, None)
        }
    }
}

/// Compares the per-iteration hard decisions of two traced runs, tolerating
/// disagreements only where the competing decision scores in the reference
/// LLR trace differ by less than `tol` (an exact tie broken differently by
/// floating-point noise). Returns the iteration index of the first tolerated
/// fork, if any.
pub fn compare_decision_traces(
    reference: &DecodeResult,
    other: &DecodeResult,
    tol: f64,
) -> Result<Option<usize>, String> {
    let ref_dec = reference.decision_trace.as_ref().ok_or("reference has no trace")?;
    let oth_dec = other.decision_trace.as_ref().ok_or("other run has no trace")?;
    let gammas = reference.gamma_trace.as_ref().ok_or("reference has no LLR trace")?;
    let score = |g: [f64; 3], p: Pauli1| if p == Pauli1::I { 0.0 } else { g[pauli_axis(p)] };
    for (t, (da, db)) in ref_dec.iter().zip(oth_dec).enumerate() {
        if da == db {
            continue;
        }
        for (q, &g) in gammas[t].iter().enumerate() {
            let (a, b) = (da.get(q), db.get(q));
            if a == b {
                continue;
            }
            let margin = (score(g, a) - score(g, b)).abs();
            if margin >= tol {
                return Err(format!(
                    "iteration {} qubit {}: {} vs {} with margin {margin:e}",
                    t + 1,
                    q + 1,
                    a,
                    b
                ));
            }
        }
        // a tolerated tie forks the trajectories; later iterations are
        // legitimately incomparable
        return Ok(Some(t + 1));
    }
    if ref_dec.len() != oth_dec.len() {
        return Err(format!(
            "trace lengths differ without a tie fork: {} vs {}",
            ref_dec.len(),
            oth_dec.len()
        ));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn lambda_w_spec_values() {
        // zero triple: ln(2/2) = 0
        assert_relative_eq!(lambda_w([0.0, 0.0, 0.0], Pauli1::X, 30.0), 0.0, epsilon = 1e-14);
        // (1,2,3) against X: (1+e^-1)/(e^-2+e^-3) = e^2 by factoring
        assert_relative_eq!(
            lambda_w([1.0, 2.0, 3.0], Pauli1::X, 30.0),
            2.0,
            epsilon = 1e-12
        );
        // symmetric triple: ln((1+e^-g)/(2 e^-g)); g = ln 27 gives ln 14
        let g = 27.0_f64.ln();
        for w in Pauli1::NON_IDENTITY {
            assert_relative_eq!(
                lambda_w([g, g, g], w, 30.0),
                14.0_f64.ln(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn lambda_w_is_clipped() {
        // all components positive: strong "commutes" belief, positive clip
        assert_eq!(lambda_w([60.0, 60.0, 60.0], Pauli1::Y, 30.0), 30.0);
        // dominant anticommuting component: negative clip
        assert_eq!(lambda_w([60.0, -60.0, 60.0], Pauli1::X, 30.0), -30.0);
    }

    #[test]
    fn boxplus_spec_values() {
        assert_relative_eq!(boxplus([2.0]), 2.0, epsilon = 1e-9);
        let expected = 2.0 * (1.0_f64.tanh().powi(2)).atanh();
        assert_relative_eq!(boxplus([2.0, 2.0]), expected, epsilon = 1e-12);
        assert_relative_eq!(expected, 1.32500, epsilon = 5e-5);
        assert_eq!(boxplus([7.5, 0.0]), 0.0);
    }

    #[test]
    fn hard_decision_rules() {
        assert_eq!(hard_decision([1.0, 2.0, 3.0]), Pauli1::I);
        assert_eq!(hard_decision([-1.0, 2.0, 3.0]), Pauli1::X);
        assert_eq!(hard_decision([2.0, -1.0, -3.0]), Pauli1::Z);
        // zero ties prefer identity; equal negative minima prefer X < Y < Z
        assert_eq!(hard_decision([0.0, 5.0, 7.0]), Pauli1::I);
        assert_eq!(hard_decision([-2.0, -2.0, 1.0]), Pauli1::X);
    }

    #[test]
    fn parse_alpha_grid_examples() {
        let grid = parse_alpha_grid("1.0:0.5:0.01").unwrap();
        assert_eq!(grid.len(), 51);
        assert_relative_eq!(grid[0], 1.0);
        assert_relative_eq!(grid[1], 0.99);
        assert_relative_eq!(grid[50], 0.5);
        assert!(parse_alpha_grid("0.5:1.0:0.01").is_err());
        assert!(parse_alpha_grid("1.0:0.5").is_err());
    }

    proptest! {
        #[test]
        fn boxplus_contract(values in prop::collection::vec(-20.0..20.0f64, 1..8)) {
            let out = boxplus(values.iter().copied());
            prop_assert!(out.is_finite());
            let min_mag = values.iter().map(|a| a.abs()).fold(f64::INFINITY, f64::min);
            // tanh/atanh round-trips near saturation cost a few e-8 absolute
            prop_assert!(out.abs() <= min_mag + 1e-6);
            let sign_prod: f64 = values.iter().map(|a| a.signum()).product();
            if values.iter().all(|a| a.abs() > 1e-9) {
                prop_assert_eq!(out.signum(), sign_prod);
            }
        }

        #[test]
        fn lambda_w_finite_on_wide_range(gx in -40.0..40.0f64, gy in -40.0..40.0f64, gz in -40.0..40.0f64) {
            for w in Pauli1::NON_IDENTITY {
                let v = lambda_w([gx, gy, gz], w, 30.0);
                prop_assert!(v.is_finite());
                prop_assert!(v.abs() <= 30.0);
            }
        }
    }
}
