//! Monte-Carlo harness: deterministic trial loops with event-based stopping,
//! outcome counters, reference curves, and result serialization.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{Beta, ContinuousCDF};

use crate::bp::{decode, decode_adaptive, decode_linear, DecoderConfig, Domain, Schedule};
use crate::channel::{ChannelError, ChannelPrior};
use crate::codes::Code;
use crate::verify::{classify, Outcome};

/// Stop when at least `min_events` logical error events have been collected,
/// or after `max_trials` trials.
#[derive(Debug, Clone, Copy)]
pub struct StopRule {
    pub min_events: u64,
    pub max_trials: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule { min_events: 100, max_trials: 10_000_000 }
    }
}

impl StopRule {
    pub fn validate(&self) -> Result<(), String> {
        if self.min_events == 0 || self.max_trials == 0 {
            return Err("stop rule counts must be positive".into());
        }
        Ok(())
    }
}

/// Outcome counters and iteration totals of one simulated point.
#[derive(Debug, Clone, Default)]
pub struct TrialStats {
    pub n_tot: u64,
    /// Non-exact estimates.
    pub n0: u64,
    /// Logical error events (estimate outside the error's stabilizer coset).
    pub n_e: u64,
    /// Undetected logical errors (syndrome-matched but harmful).
    pub n_u: u64,
    pub n_converged: u64,
    pub iter_sum_converged: u64,
    pub iter_sum_all: u64,
    /// Adaptive mode: convergence counts per grid position.
    pub alpha_grid: Vec<f64>,
    pub alpha_counts: Vec<u64>,
    /// Wall time (metadata only; excluded from the determinism contract).
    pub elapsed: Duration,
}

impl TrialStats {
    fn record(&mut self, outcome: Outcome, iterations: u64, converged: bool, alpha_idx: Option<usize>) {
        self.n_tot += 1;
        if outcome != Outcome::Exact {
            self.n0 += 1;
        }
        if outcome.is_error_event() {
            self.n_e += 1;
        }
        if outcome == Outcome::UndetectedLogical {
            self.n_u += 1;
        }
        self.iter_sum_all += iterations;
        if converged {
            self.n_converged += 1;
            self.iter_sum_converged += iterations;
            if let Some(i) = alpha_idx {
                self.alpha_counts[i] += 1;
            }
        }
        debug_assert!(self.n_u <= self.n_e && self.n_e <= self.n0 && self.n0 <= self.n_tot);
    }

    pub fn classical_rate(&self) -> f64 {
        self.n0 as f64 / self.n_tot as f64
    }

    pub fn logical_rate(&self) -> f64 {
        self.n_e as f64 / self.n_tot as f64
    }

    pub fn undetected_rate(&self) -> f64 {
        self.n_u as f64 / self.n_tot as f64
    }

    /// Average iterations over converging trials (0 when none converged).
    pub fn tau_converged(&self) -> f64 {
        if self.n_converged == 0 {
            0.0
        } else {
            self.iter_sum_converged as f64 / self.n_converged as f64
        }
    }

    /// Average iterations over all trials.
    pub fn tau_all(&self) -> f64 {
        if self.n_tot == 0 {
            0.0
        } else {
            self.iter_sum_all as f64 / self.n_tot as f64
        }
    }
}

/// Classical rate and error-suppression ratio `(n0/n_tot, n_e/n0)`. The
/// ratio is undefined when no classical errors were seen.
pub fn degeneracy_split(stats: &TrialStats) -> (f64, Option<f64>) {
    if stats.n0 == 0 {
        (0.0, None)
    } else {
        (
            stats.n0 as f64 / stats.n_tot as f64,
            Some(stats.n_e as f64 / stats.n0 as f64),
        )
    }
}

/// Per-trial RNG stream: one master key, one counter stream per trial, so
/// results are independent of worker count and execution order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn run_trial(
    code: &Code,
    cfg: &DecoderConfig,
    sample_prior: &ChannelPrior,
    decode_prior: &ChannelPrior,
    seed: u64,
    trial: u64,
) -> (Outcome, u64, bool, Option<usize>) {
    let mut rng = trial_rng(seed, trial);
    let error = sample_prior.sample_error(&mut rng);
    let z = code.syndrome(&error);
    let result = if cfg.alpha_grid.is_some() {
        decode_adaptive(code, &z, decode_prior, cfg)
    } else {
        match cfg.domain {
            Domain::Log => decode(code, &z, decode_prior, cfg),
            Domain::Linear => decode_linear(code, &z, decode_prior, cfg),
        }
    };
    let outcome = classify(&error, &result, &z, code);
    let alpha_idx = cfg
        .alpha_grid
        .as_ref()
        .and_then(|g| g.iter().position(|&a| a == result.alpha_used));
    (outcome, result.iterations as u64, result.converged(), alpha_idx)
}

/// Runs trials at depolarizing rate `eps` until the stop rule is met.
///
/// The decoding prior is built from `cfg.fixed_eps0` when set, otherwise from
/// the channel rate. Trials are processed in fixed-size batches so the exact
/// trial count is deterministic for a given seed regardless of parallelism.
pub fn run_point(
    code: &Code,
    cfg: &DecoderConfig,
    eps: f64,
    stop: &StopRule,
    seed: u64,
) -> Result<TrialStats, ChannelError> {
    let start = Instant::now();
    let sample_prior = ChannelPrior::depolarizing(code.n(), eps)?;
    let decode_prior = match cfg.fixed_eps0 {
        Some(e0) => ChannelPrior::depolarizing(code.n(), e0)?,
        None => sample_prior.clone(),
    };
    let mut stats = TrialStats::default();
    if let Some(grid) = &cfg.alpha_grid {
        stats.alpha_grid = grid.clone();
        stats.alpha_counts = vec![0; grid.len()];
    }

    const BATCH: u64 = 256;
    let mut next_trial = 0u64;
    while stats.n_e < stop.min_events && next_trial < stop.max_trials {
        let count = BATCH.min(stop.max_trials - next_trial);
        let results: Vec<_> = (next_trial..next_trial + count)
            .into_par_iter()
            .map(|trial| run_trial(code, cfg, &sample_prior, &decode_prior, seed, trial))
            .collect();
        for (outcome, iters, converged, alpha_idx) in results {
            stats.record(outcome, iters, converged, alpha_idx);
        }
        next_trial += count;
    }
    stats.elapsed = start.elapsed();
    Ok(stats)
}

/// Tail of the binomial weight distribution: the probability that an i.i.d.
/// depolarizing error has weight strictly above the correction radius `t`.
pub fn bdd_tail(n: usize, t: usize, eps: f64) -> f64 {
    assert!(t <= n, "radius {t} exceeds block length {n}");
    assert!((0.0..=1.0).contains(&eps), "eps must lie in [0, 1]");
    if t == n {
        return 0.0;
    }
    if eps == 0.0 {
        return 0.0;
    }
    if eps == 1.0 {
        return 1.0;
    }
    // log-space terms for w = t+1 ..= n, summed from a shifted maximum
    let ln_eps = eps.ln();
    let ln_q = (1.0 - eps).ln();
    let mut ln_choose = 0.0;
    for w in 0..=t {
        ln_choose += ((n - w) as f64 / (w + 1) as f64).ln();
    }
    let mut terms = Vec::with_capacity(n - t);
    let mut lc = ln_choose;
    for w in t + 1..=n {
        terms.push(lc + w as f64 * ln_eps + (n - w) as f64 * ln_q);
        if w < n {
            lc += ((n - w) as f64 / (w + 1) as f64).ln();
        }
    }
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|&t| (t - max).exp()).sum();
    (max + sum.ln()).exp().min(1.0)
}

/// Correction radius of r x BDD for a distance-d code.
pub fn bdd_radius(r: f64, d: usize) -> usize {
    let raw = (r * d as f64 - 1.0) / 2.0;
    if raw < 0.0 {
        0
    } else {
        raw.floor() as usize
    }
}

/// Beta quantile by bisection on the regularized incomplete beta; the
/// library's generic inverse is too coarse for rates near zero.
fn beta_quantile(a: f64, b: f64, q: f64) -> f64 {
    let dist = Beta::new(a, b).unwrap();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if dist.cdf(mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Two-sided 95% Clopper-Pearson interval for an event rate.
pub fn confidence_interval(events: u64, trials: u64) -> (f64, f64) {
    assert!(trials >= 1 && events <= trials);
    let alpha = 0.05;
    let lo = if events == 0 {
        0.0
    } else {
        beta_quantile(events as f64, (trials - events + 1) as f64, alpha / 2.0)
    };
    let hi = if events == trials {
        1.0
    } else {
        beta_quantile((events + 1) as f64, (trials - events) as f64, 1.0 - alpha / 2.0)
    };
    (lo, hi)
}

/// One output row of a simulation sweep.
#[derive(Debug, Clone, Serialize)]
pub struct PointRecord {
    pub code: String,
    pub size: String,
    pub eps: f64,
    pub alpha: String,
    pub beta: f64,
    pub schedule: String,
    pub n_tot: u64,
    pub n0: u64,
    pub n_e: u64,
    pub n_u: u64,
    /// Logical error rate `n_e / n_tot`.
    pub rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub tau_conv: f64,
    pub tau_all: f64,
}

pub fn schedule_name(schedule: &Schedule) -> &'static str {
    match schedule {
        Schedule::Parallel => "parallel",
        Schedule::Serial => "serial",
        Schedule::GroupedSerial(_) => "grouped-serial",
    }
}

impl PointRecord {
    pub fn new(code: &Code, cfg: &DecoderConfig, eps: f64, stats: &TrialStats) -> Self {
        let (ci_lo, ci_hi) = confidence_interval(stats.n_e, stats.n_tot.max(1));
        let alpha = match &cfg.alpha_grid {
            Some(grid) => format!(
                "adaptive({}..{}x{})",
                grid.first().unwrap(),
                grid.last().unwrap(),
                grid.len()
            ),
            None => format!("{}", cfg.alpha),
        };
        PointRecord {
            code: code.label().to_string(),
            size: code.size_label().to_string(),
            eps,
            alpha,
            beta: cfg.beta,
            schedule: schedule_name(&cfg.schedule).to_string(),
            n_tot: stats.n_tot,
            n0: stats.n0,
            n_e: stats.n_e,
            n_u: stats.n_u,
            rate: stats.logical_rate(),
            ci_lo,
            ci_hi,
            tau_conv: stats.tau_converged(),
            tau_all: stats.tau_all(),
        }
    }

    pub const CSV_HEADER: &'static str =
        "code,size,eps,alpha,beta,schedule,n_tot,n0,n_e,n_u,rate,ci_lo,ci_hi,tau_conv,tau_all";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{:e},{:e},{:e},{},{}",
            self.code,
            self.size,
            self.eps,
            self.alpha,
            self.beta,
            self.schedule,
            self.n_tot,
            self.n0,
            self.n_e,
            self.n_u,
            self.rate,
            self.ci_lo,
            self.ci_hi,
            self.tau_conv,
            self.tau_all
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::gen_five_qubit;
    use approx::assert_relative_eq;

    #[test]
    fn bdd_tail_examples() {
        // 1 - 0.99^5 - 5 * 0.01 * 0.99^4, evaluated independently
        let direct = 1.0 - 0.99f64.powi(5) - 5.0 * 0.01 * 0.99f64.powi(4);
        assert_relative_eq!(bdd_tail(5, 1, 0.01), direct, max_relative = 1e-12);
        assert_relative_eq!(bdd_tail(5, 1, 0.01), 9.80e-4, epsilon = 1e-6);
        assert_eq!(bdd_tail(7, 7, 0.3), 0.0);
        let n = 9;
        let eps = 0.2;
        assert_relative_eq!(
            bdd_tail(n, 0, eps),
            1.0 - (1.0 - eps).powi(n as i32),
            max_relative = 1e-12
        );
    }

    #[test]
    fn bdd_tail_matches_monte_carlo_weights() {
        use rand::Rng;
        let (n, t, eps) = (25, 2, 0.05);
        let p = bdd_tail(n, t, eps);
        let trials = 200_000;
        let mut rng = trial_rng(99, 0);
        let mut hits = 0u64;
        for _ in 0..trials {
            let weight = (0..n).filter(|_| rng.gen::<f64>() < eps).count();
            if weight > t {
                hits += 1;
            }
        }
        let phat = hits as f64 / trials as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!(
            (phat - p).abs() < 3.0 * sigma,
            "MC {phat} vs analytic {p} (3 sigma = {})",
            3.0 * sigma
        );
    }

    #[test]
    fn bdd_radius_examples() {
        assert_eq!(bdd_radius(1.0, 3), 1);
        assert_eq!(bdd_radius(1.0, 7), 3);
        assert_eq!(bdd_radius(2.0, 7), 6);
        assert_eq!(bdd_radius(0.2, 3), 0);
    }

    #[test]
    fn clopper_pearson_against_binomial_bisection() {
        // independent oracle: invert the binomial tail by bisection
        let cases = [(0u64, 1000u64), (3, 50), (100, 79172), (50, 50)];
        for (events, trials) in cases {
            let (lo, hi) = confidence_interval(events, trials);
            assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi) && lo <= hi);
            if events == 0 {
                assert_eq!(lo, 0.0);
            } else {
                let oracle_lo = bisect(|p| binom_sf(events - 1, trials, p) - 0.025);
                assert_relative_eq!(lo, oracle_lo, epsilon = 1e-6);
            }
            if events == trials {
                assert_eq!(hi, 1.0);
            } else {
                // cdf is decreasing in p; negate to hand bisect an increasing f
                let oracle_hi = bisect(|p| 0.025 - binom_cdf(events, trials, p));
                assert_relative_eq!(hi, oracle_hi, epsilon = 1e-6);
            }
        }
        // Table-II shaped case: interval contains the point estimate, width small
        let (lo, hi) = confidence_interval(100, 79172);
        let phat = 100.0 / 79172.0;
        assert!(lo < phat && phat < hi);
        assert!(hi - lo < 6e-4);
    }

    fn binom_cdf(k: u64, n: u64, p: f64) -> f64 {
        // P(X <= k)
        let mut sum = 0.0;
        let mut ln_c = 0.0;
        for w in 0..=k {
            sum += (ln_c + w as f64 * p.ln() + (n - w) as f64 * (1.0 - p).ln()).exp();
            ln_c += ((n - w) as f64 / (w + 1) as f64).ln();
        }
        sum
    }

    fn binom_sf(k: u64, n: u64, p: f64) -> f64 {
        1.0 - binom_cdf(k, n, p)
    }

    fn bisect(f: impl Fn(f64) -> f64) -> f64 {
        let (mut lo, mut hi) = (1e-12, 1.0 - 1e-12);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn degeneracy_split_examples() {
        let stats = TrialStats { n_tot: 79172, n0: 102, n_e: 100, ..TrialStats::default() };
        let (classical, ratio) = degeneracy_split(&stats);
        assert_relative_eq!(classical, 1.288e-3, epsilon = 1e-6);
        assert_relative_eq!(ratio.unwrap(), 0.980, epsilon = 5e-4);
        let none = TrialStats { n_tot: 10, ..TrialStats::default() };
        assert_eq!(degeneracy_split(&none), (0.0, None));
        let all = TrialStats { n_tot: 10, n0: 4, n_e: 4, ..TrialStats::default() };
        assert_eq!(degeneracy_split(&all).1, Some(1.0));
    }

    #[test]
    fn run_point_is_deterministic_and_thread_independent() {
        let code = gen_five_qubit();
        let cfg = DecoderConfig { alpha: 1.5, ..DecoderConfig::default() };
        let stop = StopRule { min_events: 10, max_trials: 20_000 };
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let multi = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = single.install(|| run_point(&code, &cfg, 0.05, &stop, 7).unwrap());
        let b = multi.install(|| run_point(&code, &cfg, 0.05, &stop, 7).unwrap());
        let c = multi.install(|| run_point(&code, &cfg, 0.05, &stop, 8).unwrap());
        assert_eq!(
            (a.n_tot, a.n0, a.n_e, a.n_u, a.iter_sum_all, a.iter_sum_converged),
            (b.n_tot, b.n0, b.n_e, b.n_u, b.iter_sum_all, b.iter_sum_converged)
        );
        assert_ne!((a.n_tot, a.n0, a.n_e), (c.n_tot, c.n0, c.n_e));
        // Bayes-rule decomposition holds exactly on the record
        let (classical, ratio) = degeneracy_split(&a);
        assert_relative_eq!(classical * ratio.unwrap(), a.logical_rate(), epsilon = 1e-15);
    }
}
