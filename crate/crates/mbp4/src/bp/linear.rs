//! Linear-domain engine: the same decoder carried out on probability
//! quadruples. Check messages are plain products of belief differences
//! `d = q(0) - q(1)`, variable messages renormalize the extrinsic quadruple
//! with the step-size exponents `((1 +- delta)/2)^(1/alpha)`. Belief products
//! are accumulated in log space so large-degree codes cannot underflow; the
//! clamps mirror the log-domain clip bit for bit.

use super::{pauli_axis, DecodeResult, DecodeStatus, DecoderConfig, Tracer, ATANH_CLAMP};
use crate::channel::ChannelPrior;
use crate::codes::{CheckMatrix, Code};
use crate::pauli::{Pauli1, PauliString};

struct Engine<'a> {
    code: &'a Code,
    checks: &'a CheckMatrix,
    z: &'a [bool],
    prior: &'a ChannelPrior,
    cfg: &'a DecoderConfig,
    inv_alpha: f64,
    /// Mirror of the horizontal-step clamp: `min(1 - 1e-12, tanh(clip/2))`.
    delta_cap: f64,
    /// Mirror of the message clip: `tanh(clip/2)`.
    d_cap: f64,
    /// Variable-to-check belief difference per edge.
    d: Vec<f64>,
    /// Check-to-variable belief difference per edge.
    delta: Vec<f64>,
    /// Normalized log beliefs per qubit, order (I, X, Y, Z).
    ln_belief: Vec<[f64; 4]>,
    /// Clamped LLR view of the beliefs, for tracing.
    gamma: Vec<[f64; 3]>,
}

pub(super) fn run(
    code: &Code,
    z: &[bool],
    prior: &ChannelPrior,
    cfg: &DecoderConfig,
) -> DecodeResult {
    let checks = code.checks();
    let n = code.n();
    let d_cap = (cfg.clip / 2.0).tanh();
    let delta_cap = ATANH_CLAMP.min(d_cap);
    let mut d = vec![0.0; checks.num_edges()];
    for q in 0..n {
        let p = prior.probs(q);
        for e in checks.qubit_neighbors(q) {
            let commute = p[0] + p[pauli_axis(e.pauli) + 1];
            d[e.edge] = (2.0 * commute - 1.0).clamp(-d_cap, d_cap);
        }
    }
    let mut engine = Engine {
        code,
        checks,
        z,
        prior,
        cfg,
        inv_alpha: 1.0 / cfg.alpha,
        delta_cap,
        d_cap,
        d,
        delta: vec![0.0; checks.num_edges()],
        ln_belief: vec![[0.0; 4]; n],
        gamma: vec![[0.0; 3]; n],
    };
    match cfg.sweep_groups(n) {
        None => engine.run_parallel(),
        Some(groups) => engine.run_sweeps(&groups),
    }
}

#[inline]
fn logsumexp2(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

impl<'a> Engine<'a> {
    fn run_parallel(&mut self) -> DecodeResult {
        let mut tracer = Tracer::new(self.cfg.trace);
        let mut scratch = Vec::new();
        for t in 1..=self.cfg.t_max {
            self.horizontal_all(&mut scratch);
            for q in 0..self.code.n() {
                self.vertical(q);
            }
            let estimate = self.decide();
            tracer.record(t, &self.gamma, &estimate, self.code, self.z);
            if self.code.syndrome(&estimate) == self.z {
                return self.finish(DecodeStatus::Converge, estimate, t, tracer);
            }
            if t == self.cfg.t_max {
                return self.finish(DecodeStatus::Fail, estimate, t, tracer);
            }
            for q in 0..self.code.n() {
                self.update_messages_into_self(q);
            }
        }
        unreachable!("loop returns at t_max")
    }

    fn run_sweeps(&mut self, groups: &[Vec<usize>]) -> DecodeResult {
        let mut tracer = Tracer::new(self.cfg.trace);
        let grouped = groups.len() > 1;
        let mut d_next = if grouped { self.d.clone() } else { Vec::new() };
        let mut stamp = vec![0u64; self.code.n()];
        let mut mark = 0u64;
        for t in 1..=self.cfg.t_max {
            if grouped {
                d_next.copy_from_slice(&self.d);
            }
            for group in groups {
                mark += 1;
                for &q in group {
                    for e in self.checks.qubit_neighbors(q) {
                        self.delta[e.edge] = if grouped {
                            self.fresh_delta_grouped(e.node, q, &d_next, &stamp, mark)
                        } else {
                            self.fresh_delta_serial(e.node, q)
                        };
                    }
                    self.vertical(q);
                    if grouped {
                        self.update_messages(q, |edge, v| d_next[edge] = v);
                        stamp[q] = mark;
                    } else {
                        self.update_messages_into_self(q);
                    }
                }
            }
            if grouped {
                std::mem::swap(&mut self.d, &mut d_next);
            }
            let estimate = self.decide();
            tracer.record(t, &self.gamma, &estimate, self.code, self.z);
            if self.code.syndrome(&estimate) == self.z {
                return self.finish(DecodeStatus::Converge, estimate, t, tracer);
            }
            if t == self.cfg.t_max {
                return self.finish(DecodeStatus::Fail, estimate, t, tracer);
            }
        }
        unreachable!("loop returns at t_max")
    }

    fn horizontal_all(&mut self, scratch: &mut Vec<f64>) {
        for m in 0..self.checks.num_checks() {
            let adj = self.checks.check_neighbors(m);
            scratch.clear();
            scratch.extend(adj.iter().map(|e| self.d[e.edge]));
            let sign = if self.z[m] { -1.0 } else { 1.0 };
            let mut pre = 1.0;
            for (i, e) in adj.iter().enumerate() {
                self.delta[e.edge] = pre;
                pre *= scratch[i];
            }
            let mut suf = 1.0;
            for (i, e) in adj.iter().enumerate().rev() {
                let prod = self.delta[e.edge] * suf;
                self.delta[e.edge] = (sign * prod).clamp(-self.delta_cap, self.delta_cap);
                suf *= scratch[i];
            }
        }
    }

    fn fresh_delta_serial(&self, m: usize, exclude: usize) -> f64 {
        let mut prod = 1.0;
        for e in self.checks.check_neighbors(m) {
            if e.node != exclude {
                prod *= self.d[e.edge];
            }
        }
        let sign = if self.z[m] { -1.0 } else { 1.0 };
        (sign * prod).clamp(-self.delta_cap, self.delta_cap)
    }

    fn fresh_delta_grouped(
        &self,
        m: usize,
        exclude: usize,
        d_next: &[f64],
        stamp: &[u64],
        mark: u64,
    ) -> f64 {
        let mut prod = 1.0;
        for e in self.checks.check_neighbors(m) {
            if e.node != exclude {
                prod *= if stamp[e.node] == mark { d_next[e.edge] } else { self.d[e.edge] };
            }
        }
        let sign = if self.z[m] { -1.0 } else { 1.0 };
        (sign * prod).clamp(-self.delta_cap, self.delta_cap)
    }

    /// Belief update for one qubit: prior times the incoming step-size
    /// factors `r^(0/1)`, normalized, with the LLR view clamped to the clip
    /// bound exactly as the log-domain engine clamps Gamma.
    fn vertical(&mut self, q: usize) {
        let p = self.prior.probs(q);
        let mut lq = [p[0].ln(), p[1].ln(), p[2].ln(), p[3].ln()];
        for e in self.checks.qubit_neighbors(q) {
            let dlt = self.delta[e.edge];
            let lr0 = self.inv_alpha * ((1.0 + dlt) / 2.0).ln();
            let lr1 = self.inv_alpha * ((1.0 - dlt) / 2.0).ln();
            let axis = pauli_axis(e.pauli);
            for (wq, v) in lq.iter_mut().enumerate() {
                let commutes = wq == 0 || wq - 1 == axis;
                *v += if commutes { lr0 } else { lr1 };
            }
        }
        let mut l = [0.0; 3];
        for w in 0..3 {
            l[w] = (lq[0] - lq[w + 1]).clamp(-self.cfg.clip, self.cfg.clip);
            debug_assert!(l[w].is_finite());
        }
        let norm = 1.0 + l.iter().map(|&x| (-x).exp()).sum::<f64>();
        let li = -norm.ln();
        self.ln_belief[q] = [li, li - l[0], li - l[1], li - l[2]];
        self.gamma[q] = l;
    }

    fn update_messages_into_self(&mut self, q: usize) {
        let mut d = std::mem::take(&mut self.d);
        self.update_messages(q, |edge, v| d[edge] = v);
        self.d = d;
    }

    /// Outgoing belief differences of qubit `q`: extrinsic quadruple divided
    /// by the inbound factor, renormalized with the `1 - 1/alpha` exponents.
    fn update_messages(&self, q: usize, mut write: impl FnMut(usize, f64)) {
        let lnb = self.ln_belief[q];
        for e in self.checks.qubit_neighbors(q) {
            let dlt = self.delta[e.edge];
            let lplus = ((1.0 + dlt) / 2.0).ln();
            let lminus = ((1.0 - dlt) / 2.0).ln();
            let axis = pauli_axis(e.pauli);
            let ex = |wq: usize| {
                let commutes = wq == 0 || wq - 1 == axis;
                lnb[wq] - self.inv_alpha * if commutes { lplus } else { lminus }
            };
            let (o1, o2) = match axis {
                0 => (2, 3),
                1 => (1, 3),
                _ => (1, 2),
            };
            let s0 = logsumexp2(ex(0), ex(axis + 1));
            let s1 = logsumexp2(ex(o1), ex(o2));
            let ratio = (s0 - (1.0 - self.inv_alpha) * lplus) - (s1 - (1.0 - self.inv_alpha) * lminus);
            let v = (ratio / 2.0).tanh().clamp(-self.d_cap, self.d_cap);
            debug_assert!(v.is_finite());
            write(e.edge, v);
        }
    }

    /// Hard decision: first-maximum belief in (I, X, Y, Z) order.
    fn decide(&self) -> PauliString {
        let paulis: Vec<Pauli1> = self
            .ln_belief
            .iter()
            .map(|lnb| {
                let mut best = 0;
                for i in 1..4 {
                    if lnb[i] > lnb[best] {
                        best = i;
                    }
                }
                Pauli1::ALL[best]
            })
            .collect();
        PauliString::from_paulis(&paulis)
    }

    fn finish(
        &self,
        status: DecodeStatus,
        estimate: PauliString,
        iterations: usize,
        tracer: Tracer,
    ) -> DecodeResult {
        let (energy_trace, decision_trace, gamma_trace) = tracer.finish();
        DecodeResult {
            status,
            estimate,
            iterations,
            alpha_used: self.cfg.alpha,
            energy_trace,
            decision_trace,
            gamma_trace,
        }
    }
}
