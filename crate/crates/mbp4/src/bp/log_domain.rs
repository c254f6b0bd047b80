//! Log-domain message-passing engine (LLR triples and scalarized messages).

use super::{
    hard_decision, lambda_w_raw, pauli_axis, DecodeResult, DecodeStatus, DecoderConfig, Mode,
    Tracer, ATANH_CLAMP,
};
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
    /// Inhibition strength on the returned message: 1 for MBP, 1/alpha for
    /// normalized BP.
    inhibition: f64,
    /// Scalarized variable-to-check message per edge.
    lambda: Vec<f64>,
    /// Check-to-variable message per edge.
    delta: Vec<f64>,
    /// Posterior LLR triple per qubit.
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
    let mut lambda = vec![0.0; checks.num_edges()];
    for q in 0..n {
        let lam = prior.llr(q);
        for e in checks.qubit_neighbors(q) {
            lambda[e.edge] = lambda_w_raw(lam, e.pauli).clamp(-cfg.clip, cfg.clip);
        }
    }
    let mut engine = Engine {
        code,
        checks,
        z,
        prior,
        cfg,
        inv_alpha: 1.0 / cfg.alpha,
        inhibition: match cfg.mode {
            Mode::Mbp => 1.0,
            Mode::NormalizedBp => 1.0 / cfg.alpha,
        },
        lambda,
        delta: vec![0.0; checks.num_edges()],
        gamma: (0..n).map(|q| prior.llr(q)).collect(),
    };
    match cfg.sweep_groups(n) {
        None => engine.run_parallel(),
        Some(groups) => engine.run_sweeps(&groups),
    }
}

impl<'a> Engine<'a> {
    fn run_parallel(&mut self) -> DecodeResult {
        let mut tracer = Tracer::new(self.cfg.trace);
        let mut scratch = Vec::new();
        for t in 1..=self.cfg.t_max {
            self.horizontal_all(&mut scratch);
            for q in 0..self.code.n() {
                self.gamma[q] = self.vertical(q);
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
        let mut lambda_next = if grouped { self.lambda.clone() } else { Vec::new() };
        let mut stamp = vec![0u64; self.code.n()];
        let mut mark = 0u64;
        for t in 1..=self.cfg.t_max {
            if grouped {
                lambda_next.copy_from_slice(&self.lambda);
            }
            for group in groups {
                mark += 1;
                for &q in group {
                    for e in self.checks.qubit_neighbors(q) {
                        self.delta[e.edge] = if grouped {
                            self.fresh_delta_grouped(e.node, q, &lambda_next, &stamp, mark)
                        } else {
                            self.fresh_delta_serial(e.node, q)
                        };
                    }
                    self.gamma[q] = self.vertical(q);
                    if grouped {
                        self.update_messages(q, |edge, v| lambda_next[edge] = v);
                        stamp[q] = mark;
                    } else {
                        self.update_messages_into_self(q);
                    }
                }
            }
            if grouped {
                std::mem::swap(&mut self.lambda, &mut lambda_next);
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

    /// Parallel horizontal step: extrinsic boxplus for every edge of every
    /// check via prefix/suffix products.
    fn horizontal_all(&mut self, scratch: &mut Vec<f64>) {
        for m in 0..self.checks.num_checks() {
            let adj = self.checks.check_neighbors(m);
            scratch.clear();
            scratch.extend(adj.iter().map(|e| (self.lambda[e.edge] / 2.0).tanh()));
            let sign = if self.z[m] { -1.0 } else { 1.0 };
            // prefix pass stored in delta, then suffix pass multiplies in
            let mut pre = 1.0;
            for (i, e) in adj.iter().enumerate() {
                self.delta[e.edge] = pre;
                pre *= scratch[i];
            }
            let mut suf = 1.0;
            for (i, e) in adj.iter().enumerate().rev() {
                let prod = self.delta[e.edge] * suf;
                self.delta[e.edge] = self.finish_delta(sign, prod);
                suf *= scratch[i];
            }
        }
    }

    /// Fresh extrinsic message for one edge from the live lambda state.
    fn fresh_delta_serial(&self, m: usize, exclude: usize) -> f64 {
        let mut prod = 1.0;
        for e in self.checks.check_neighbors(m) {
            if e.node != exclude {
                prod *= (self.lambda[e.edge] / 2.0).tanh();
            }
        }
        let sign = if self.z[m] { -1.0 } else { 1.0 };
        self.finish_delta(sign, prod)
    }

    /// Same as [`fresh_delta_serial`] but with grouped-visibility reads:
    /// qubits already processed in the current group read their fresh
    /// messages, everyone else the start-of-iteration ones.
    fn fresh_delta_grouped(
        &self,
        m: usize,
        exclude: usize,
        lambda_next: &[f64],
        stamp: &[u64],
        mark: u64,
    ) -> f64 {
        let mut prod = 1.0;
        for e in self.checks.check_neighbors(m) {
            if e.node != exclude {
                let v = if stamp[e.node] == mark {
                    lambda_next[e.edge]
                } else {
                    self.lambda[e.edge]
                };
                prod *= (v / 2.0).tanh();
            }
        }
        let sign = if self.z[m] { -1.0 } else { 1.0 };
        self.finish_delta(sign, prod)
    }

    #[inline]
    fn finish_delta(&self, sign: f64, prod: f64) -> f64 {
        let clamped = prod.clamp(-ATANH_CLAMP, ATANH_CLAMP);
        let v = (sign * 2.0 * clamped.atanh()).clamp(-self.cfg.clip, self.cfg.clip);
        debug_assert!(v.is_finite());
        v
    }

    /// Vertical step for one qubit from the current check messages.
    fn vertical(&self, q: usize) -> [f64; 3] {
        let lam = self.prior.llr(q);
        let mut per_axis = [0.0f64; 3];
        for e in self.checks.qubit_neighbors(q) {
            per_axis[pauli_axis(e.pauli)] += self.delta[e.edge];
        }
        let total: f64 = per_axis.iter().sum();
        let beta = match self.cfg.mode {
            Mode::Mbp => self.cfg.beta,
            Mode::NormalizedBp => 0.0,
        };
        let mut out = [0.0; 3];
        for w in 0..3 {
            let anti = total - per_axis[w];
            out[w] = (lam[w] + self.inv_alpha * anti - beta * per_axis[w])
                .clamp(-self.cfg.clip, self.cfg.clip);
            debug_assert!(out[w].is_finite());
        }
        out
    }

    fn update_messages_into_self(&mut self, q: usize) {
        // split borrow: lambda is written, the rest is read
        let mut lambda = std::mem::take(&mut self.lambda);
        self.update_messages(q, |edge, v| lambda[edge] = v);
        self.lambda = lambda;
    }

    /// Outgoing messages of qubit `q` after its vertical step.
    ///
    /// MBP with beta = 0 uses the scalarized shortcut
    /// `lambda_W(Gamma_n) - Delta_{m->n}`; the general path forms the
    /// inhibited triple explicitly. Both agree for beta = 0.
    fn update_messages(&self, q: usize, mut write: impl FnMut(usize, f64)) {
        let clip = self.cfg.clip;
        if self.cfg.mode == Mode::Mbp && self.cfg.beta == 0.0 {
            let lam3 = [
                lambda_w_raw(self.gamma[q], Pauli1::X),
                lambda_w_raw(self.gamma[q], Pauli1::Y),
                lambda_w_raw(self.gamma[q], Pauli1::Z),
            ];
            for e in self.checks.qubit_neighbors(q) {
                let v = (lam3[pauli_axis(e.pauli)] - self.delta[e.edge]).clamp(-clip, clip);
                write(e.edge, v);
            }
        } else {
            for e in self.checks.qubit_neighbors(q) {
                let triple = inhibited_triple(
                    self.gamma[q],
                    e.pauli,
                    self.delta[e.edge] * self.inhibition,
                );
                write(e.edge, lambda_w_raw(triple, e.pauli).clamp(-clip, clip));
            }
        }
    }

    fn decide(&self) -> PauliString {
        let paulis: Vec<Pauli1> = self.gamma.iter().map(|&g| hard_decision(g)).collect();
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

/// The fixed-inhibition message triple: subtract `delta` from the two
/// components that anticommute with the edge type.
#[inline]
pub(crate) fn inhibited_triple(gamma: [f64; 3], edge_pauli: Pauli1, delta: f64) -> [f64; 3] {
    let keep = pauli_axis(edge_pauli);
    let mut out = gamma;
    for (w, v) in out.iter_mut().enumerate() {
        if w != keep {
            *v -= delta;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{decode, DecoderConfig, Mode, Schedule};
    use super::*;
    use crate::codes::{gen_five_qubit, CheckMatrix};
    use crate::pauli::PauliString;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn shortcut_equals_direct_inhibition_on_random_five_qubit_states() {
        // lambda_W(Gamma - <W,S> Delta) == lambda_W(Gamma) - Delta for the
        // edge type itself, over random states.
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        let mut max_diff: f64 = 0.0;
        for _ in 0..1000 {
            let gamma = [
                rng.gen_range(-12.0..12.0),
                rng.gen_range(-12.0..12.0),
                rng.gen_range(-12.0..12.0),
            ];
            let delta = rng.gen_range(-8.0..8.0);
            for w in Pauli1::NON_IDENTITY {
                let direct = lambda_w_raw(inhibited_triple(gamma, w, delta), w);
                let shortcut = lambda_w_raw(gamma, w) - delta;
                max_diff = max_diff.max((direct - shortcut).abs());
            }
        }
        assert!(max_diff <= 1e-9, "max shortcut deviation {max_diff}");
    }

    #[test]
    fn all_zero_syndrome_converges_immediately_to_identity() {
        let code = gen_five_qubit();
        let prior = crate::channel::ChannelPrior::depolarizing(5, 0.01).unwrap();
        let cfg = DecoderConfig::default();
        let r = decode(&code, &[false; 4], &prior, &cfg);
        assert!(r.converged());
        assert_eq!(r.iterations, 1);
        assert!(r.estimate.is_identity());
    }

    #[test]
    fn five_qubit_y4_alpha1_fails_and_alpha15_converges() {
        let code = gen_five_qubit();
        let prior = crate::channel::ChannelPrior::depolarizing(5, 0.003).unwrap();
        let z = code.syndrome(&ps("IIIYI"));

        let mut cfg = DecoderConfig { t_max: 30, trace: true, ..DecoderConfig::default() };
        cfg.alpha = 1.0;
        let r1 = decode(&code, &z, &prior, &cfg);
        assert!(!r1.converged(), "conventional BP4 must fail on IIIYI");
        let decisions = r1.decision_trace.unwrap();
        let distinct: std::collections::BTreeSet<String> =
            decisions.iter().map(|d| d.to_string()).collect();
        assert!(distinct.contains("YYYYY") && distinct.contains("IIIII"));
        assert_eq!(distinct.len(), 2, "oscillation must only visit I^5 and Y^5: {distinct:?}");

        cfg.alpha = 1.5;
        let r2 = decode(&code, &z, &prior, &cfg);
        assert!(r2.converged(), "MBP4 with alpha=1.5 must converge");
        assert_eq!(code.syndrome(&r2.estimate), z);
    }

    #[test]
    fn normalized_bp_alpha1_matches_mbp_alpha1() {
        let code = gen_five_qubit();
        let prior = crate::channel::ChannelPrior::depolarizing(5, 0.05).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..50 {
            let e = prior.sample_error(&mut rng);
            let z = code.syndrome(&e);
            for schedule in [Schedule::Parallel, Schedule::Serial] {
                let mk = |mode| DecoderConfig {
                    alpha: 1.0,
                    mode,
                    schedule: schedule.clone(),
                    t_max: 12,
                    trace: true,
                    ..DecoderConfig::default()
                };
                let a = decode(&code, &z, &prior, &mk(Mode::Mbp));
                let b = decode(&code, &z, &prior, &mk(Mode::NormalizedBp));
                assert_eq!(a.status, b.status);
                assert_eq!(a.iterations, b.iterations);
                assert_eq!(a.estimate, b.estimate);
                let (da, db) = (a.decision_trace.unwrap(), b.decision_trace.unwrap());
                assert_eq!(da, db);
            }
        }
    }

    #[test]
    fn serial_breaks_the_two_qubit_symmetry() {
        // S = [XY; ZZ], z = (1,0): degenerate pair ZI / IZ
        let checks = CheckMatrix::from_rows(vec![ps("XY"), ps("ZZ")]).unwrap();
        let code = crate::codes::Code::from_checks("fig2", checks, None).unwrap();
        let prior = crate::channel::ChannelPrior::depolarizing(2, 0.1).unwrap();
        let z = vec![true, false];

        let serial = DecoderConfig {
            alpha: 0.75,
            schedule: Schedule::Serial,
            t_max: 50,
            ..DecoderConfig::default()
        };
        let r = decode(&code, &z, &prior, &serial);
        assert!(r.converged(), "serial MBP4 with alpha < 1 must converge");
        assert_eq!(r.estimate.weight(), 1);

        let parallel = DecoderConfig { alpha: 1.0, t_max: 50, ..DecoderConfig::default() };
        let r = decode(&code, &z, &prior, &parallel);
        assert!(!r.converged(), "parallel conventional BP4 must not converge");
    }

    #[test]
    fn messages_stay_clipped_and_finite_under_extreme_rates() {
        let code = gen_five_qubit();
        for eps in [1e-6, 0.74] {
            let prior = crate::channel::ChannelPrior::depolarizing(5, eps).unwrap();
            let mut rng = ChaCha12Rng::seed_from_u64(17);
            for _ in 0..40 {
                let e = prior.sample_error(&mut rng);
                let z = code.syndrome(&e);
                for schedule in [Schedule::Parallel, Schedule::Serial] {
                    for alpha in [0.5, 1.0, 2.0] {
                        let cfg = DecoderConfig {
                            alpha,
                            beta: 0.25,
                            schedule: schedule.clone(),
                            t_max: 20,
                            ..DecoderConfig::default()
                        };
                        // debug asserts inside the engine enforce that every
                        // message stays finite and within the clip bound
                        let r = decode(&code, &z, &prior, &cfg);
                        assert!(r.iterations >= 1);
                        assert_eq!(r.estimate.len(), 5);
                    }
                }
            }
        }
    }

    #[test]
    fn grouped_serial_partition_is_validated() {
        let cfg = DecoderConfig {
            schedule: Schedule::GroupedSerial(vec![vec![0, 1], vec![2, 3]]),
            ..DecoderConfig::default()
        };
        assert!(cfg.validate(5).is_err());
        let cfg = DecoderConfig {
            schedule: Schedule::GroupedSerial(vec![vec![0, 1], vec![2, 3, 4]]),
            ..DecoderConfig::default()
        };
        assert!(cfg.validate(5).is_ok());
    }

    #[test]
    fn grouped_serial_single_group_equals_serial() {
        let code = gen_five_qubit();
        let prior = crate::channel::ChannelPrior::depolarizing(5, 0.08).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        for _ in 0..30 {
            let e = prior.sample_error(&mut rng);
            let z = code.syndrome(&e);
            let serial = DecoderConfig {
                alpha: 0.8,
                schedule: Schedule::Serial,
                t_max: 15,
                trace: true,
                ..DecoderConfig::default()
            };
            let grouped = DecoderConfig {
                schedule: Schedule::GroupedSerial(vec![(0..5).collect()]),
                ..serial.clone()
            };
            let a = decode(&code, &z, &prior, &serial);
            let b = decode(&code, &z, &prior, &grouped);
            assert_eq!(a.status, b.status);
            assert_eq!(a.estimate, b.estimate);
            assert_eq!(a.decision_trace.unwrap(), b.decision_trace.unwrap());
        }
    }

    #[test]
    fn grouped_serial_singletons_equal_parallel() {
        // one qubit per group reads only start-of-iteration messages, which
        // is the parallel schedule computed edge by edge
        let code = gen_five_qubit();
        let prior = crate::channel::ChannelPrior::depolarizing(5, 0.08).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        for _ in 0..30 {
            let e = prior.sample_error(&mut rng);
            let z = code.syndrome(&e);
            let parallel = DecoderConfig { alpha: 1.3, t_max: 12, trace: true, ..DecoderConfig::default() };
            let grouped = DecoderConfig {
                schedule: Schedule::GroupedSerial((0..5).map(|q| vec![q]).collect()),
                ..parallel.clone()
            };
            let a = decode(&code, &z, &prior, &parallel);
            let b = decode(&code, &z, &prior, &grouped);
            assert_eq!(a.status, b.status);
            assert_eq!(a.estimate, b.estimate);
            assert_eq!(a.decision_trace.unwrap(), b.decision_trace.unwrap());
        }
    }
}
