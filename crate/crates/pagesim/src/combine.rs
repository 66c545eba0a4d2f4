//! Multi-predictor combiners.
//!
//! Two ways to follow `M` predictors at once:
//!
//! * [`scs_run`] works under bandit access. Rounds are partitioned into
//!   epochs of length `tau`; a bandit learner picks one predictor per epoch,
//!   the simulated policy follows it with a freshly initialized remedy table
//!   (the cache carries across epochs), and at the epoch's end the learner is
//!   fed a normalized proxy cost. The proxy counts the epoch's first round,
//!   every eviction round, and every hit on a page not yet requested within
//!   the epoch, then divides by `tau`. Counted that way the cost is
//!   *oblivious*: it does not depend on the cache the epoch started from, so
//!   earlier predictor choices cannot leak into later feedback. It also
//!   sandwiches the real eviction count to within `k`.
//!
//! * [`multiplexer_run`] works under full information. All `M` simulated
//!   instances advance in lockstep; an exponential-weights distribution over
//!   instances is maintained from their per-round misses, and the run follows
//!   one instance at a time, re-sampling with a coupling that switches only
//!   as much as the weights move. Switching to another instance adopts its
//!   cache eagerly and the fetched difference (at most `k` pages) is charged
//!   on top of the serving misses.

use rand::Rng;

use crate::bandit::Learner;
use crate::cache::{CacheState, ReportBuilder, RunReport};
use crate::error::{Error, Result};
use crate::predict::{AccessMode, PredictorPool};
use crate::remedy::PromotionRule;
use crate::rng::{derive_seed, stream_rng, Stream};
use crate::sim::{SimEngine, StepOutcome};
use crate::trace::RequestTrace;

/// Partition of `[1, T]` into `ceil(T / tau)` epochs of length `tau` (the
/// last one may be shorter).
#[derive(Debug, Clone, Copy)]
pub struct EpochSchedule {
    tau: usize,
    horizon: usize,
}

impl EpochSchedule {
    pub fn new(tau: usize, horizon: usize) -> Result<Self> {
        if tau == 0 {
            return Err(Error::Validation("epoch length tau must be positive".into()));
        }
        Ok(EpochSchedule { tau, horizon })
    }

    /// Default epoch length `floor(T^(1/3))`, at least 1.
    pub fn default_tau(horizon: usize) -> usize {
        let mut c = (horizon as f64).cbrt().floor() as usize;
        while (c + 1).saturating_pow(3) <= horizon {
            c += 1;
        }
        while c > 1 && c.saturating_pow(3) > horizon {
            c -= 1;
        }
        c.max(1)
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    /// Number of epochs `ceil(T / tau)`.
    pub fn epoch_count(&self) -> usize {
        self.horizon.div_ceil(self.tau)
    }

    /// First and last round of epoch `upsilon` (1-based).
    pub fn epoch_rounds(&self, upsilon: usize) -> (usize, usize) {
        let first = (upsilon - 1) * self.tau + 1;
        let last = (upsilon * self.tau).min(self.horizon);
        (first, last)
    }
}

/// Cost accounting for one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochCostRecord {
    /// Epoch index, 1-based.
    pub epoch: usize,
    /// Predictor followed during the epoch, 1-based.
    pub predictor: usize,
    /// Raw guard count.
    pub f: usize,
    /// Normalized cost `f / tau`, in `[0, 1]` (the final short epoch still
    /// divides by `tau`).
    pub cost: f64,
    /// Eviction rounds within the epoch.
    pub evictions: usize,
}

/// Computes the epoch record from per-round outcomes.
///
/// `outcomes[0]` must be the epoch's first round. A round is counted when it
/// is the first round, an eviction round, or a hit on a page whose remedy
/// was still the never-seen sentinel.
pub fn epoch_cost(
    epoch: usize,
    predictor: usize,
    tau: usize,
    outcomes: &[StepOutcome],
) -> EpochCostRecord {
    let mut f = 0;
    let mut evictions = 0;
    for (idx, out) in outcomes.iter().enumerate() {
        evictions += usize::from(out.evicted.is_some());
        let counted = idx == 0
            || out.evicted.is_some()
            || (out.evicted.is_none() && out.requested_was_unseen);
        f += usize::from(counted);
    }
    EpochCostRecord {
        epoch,
        predictor,
        f,
        cost: f as f64 / tau as f64,
        evictions,
    }
}

/// Outcome of an epoch-based bandit-access run.
#[derive(Debug, Clone)]
pub struct ScsOutcome {
    pub report: RunReport,
    pub epochs: Vec<EpochCostRecord>,
}

/// Runs the epoch-based combiner under bandit access.
///
/// Per epoch: the learner picks a predictor; every round of the epoch
/// queries exactly that predictor; the remedy table restarts at the epoch's
/// first round while the cache carries over; the learner is then fed the
/// normalized proxy cost.
pub fn scs_run(
    trace: &RequestTrace,
    pool: &mut PredictorPool,
    k: usize,
    initial: &CacheState,
    tau: Option<usize>,
    seed: u64,
) -> Result<ScsOutcome> {
    if pool.mode() != AccessMode::Bandit {
        return Err(Error::Validation(
            "the epoch-based combiner requires a bandit-mode pool".into(),
        ));
    }
    if pool.horizon() != trace.horizon() {
        return Err(Error::Validation(format!(
            "pool horizon {} does not match trace horizon {}",
            pool.horizon(),
            trace.horizon()
        )));
    }
    let schedule = EpochSchedule::new(
        tau.unwrap_or_else(|| EpochSchedule::default_tau(trace.horizon())),
        trace.horizon(),
    )?;
    let mut learner = Learner::inf(
        pool.predictor_count(),
        schedule.epoch_count(),
        derive_seed(seed, Stream::Learner),
    )?;
    let mut engine = SimEngine::new(trace, k, initial, PromotionRule::ExpiredBy)?;
    let mut report = ReportBuilder::with_capacity(trace.horizon());
    let mut epochs = Vec::with_capacity(schedule.epoch_count());

    for upsilon in 1..=schedule.epoch_count() {
        let (first, last) = schedule.epoch_rounds(upsilon);
        let predictor = learner.choose()?;
        engine.start_epoch();
        let mut outcomes = Vec::with_capacity(last - first + 1);
        for t in first..=last {
            let prediction = pool.query(predictor, t)?;
            let outcome = engine.step(t, trace.request(t), prediction)?;
            report.record(outcome.miss, outcome.evicted);
            outcomes.push(outcome);
        }
        let record = epoch_cost(upsilon, predictor, schedule.tau(), &outcomes);
        learner.update(predictor, record.cost)?;
        epochs.push(record);
    }

    Ok(ScsOutcome {
        report: report.finish(engine.cache().clone()),
        epochs,
    })
}

/// Default experts parameter `min(0.2, sqrt(k * ln(M) / T))`.
pub fn default_epsilon(k: usize, m: usize, horizon: usize) -> f64 {
    if horizon == 0 {
        return 0.2;
    }
    let raw = ((k as f64) * (m.max(1) as f64).ln() / horizon as f64).sqrt();
    raw.min(0.2)
}

/// Outcome of the full-information multiplexer.
#[derive(Debug, Clone)]
pub struct MultiplexerOutcome {
    /// Serving outcomes of the followed instances, round by round.
    pub report: RunReport,
    /// Pages fetched while adopting caches on switches.
    pub sync_misses: usize,
    /// Number of instance switches after the initial pick.
    pub switches: usize,
}

impl MultiplexerOutcome {
    /// Serving misses plus cache-adoption fetches.
    pub fn total_cost(&self) -> usize {
        self.report.cost + self.sync_misses
    }
}

/// Weights and the followed-instance coupling of the multiplexer.
///
/// Weights are kept in log space (`misses * ln(1 - epsilon)`), so they never
/// underflow; the normalized distribution is recomputed per update. After an
/// update the state stays with the current instance with probability
/// `min(1, q_new(cur) / q_old(cur))` and otherwise resamples from the
/// normalized positive part of `q_new - q_old`: the followed instance stays
/// distributed as `q` while switches happen no more often than the
/// distribution moves.
#[derive(Debug)]
pub struct MultiplexerState {
    epsilon: f64,
    log_weights: Vec<f64>,
    q: Vec<f64>,
    current: usize,
}

impl MultiplexerState {
    fn new(instances: usize, epsilon: f64, rng: &mut impl Rng) -> Self {
        let q = vec![1.0 / instances as f64; instances];
        let current = sample(rng, &q);
        MultiplexerState {
            epsilon,
            log_weights: vec![0.0; instances],
            q,
            current,
        }
    }

    /// Followed instance, 0-based.
    pub fn current(&self) -> usize {
        self.current
    }

    /// Current distribution over instances.
    pub fn distribution(&self) -> &[f64] {
        &self.q
    }

    /// Scales weights by the per-round misses and runs the switch coupling.
    /// Returns the instance switched to, if any.
    fn observe(&mut self, misses: &[bool], rng: &mut impl Rng) -> Option<usize> {
        let decay = (1.0 - self.epsilon).ln();
        for (w, &miss) in self.log_weights.iter_mut().zip(misses) {
            if miss {
                *w += decay;
            }
        }
        let max = self
            .log_weights
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let mut q_new: Vec<f64> = self.log_weights.iter().map(|&x| (x - max).exp()).collect();
        let sum: f64 = q_new.iter().sum();
        for v in &mut q_new {
            *v /= sum;
        }

        let stay = if self.q[self.current] > 0.0 {
            (q_new[self.current] / self.q[self.current]).min(1.0)
        } else {
            0.0
        };
        let mut switched = None;
        if rng.random::<f64>() >= stay {
            let gains: Vec<f64> = q_new
                .iter()
                .zip(&self.q)
                .map(|(&n, &o)| (n - o).max(0.0))
                .collect();
            let total: f64 = gains.iter().sum();
            if total > 0.0 {
                let next = sample_weighted(rng, &gains, total);
                if next != self.current {
                    self.current = next;
                    switched = Some(next);
                }
            }
        }
        self.q = q_new;
        switched
    }
}

/// Runs the full-information multiplexer over `M` lockstep instances.
///
/// Instance weights scale by `(1 - epsilon)` per miss. After each round's
/// update the run stays with the current instance with probability
/// `min(1, q_new(cur) / q_old(cur))` and otherwise resamples from the
/// normalized positive part of `q_new - q_old`, which keeps the followed
/// instance distributed as `q` while switching no more often than the
/// weights move. Requires `0 < epsilon < 1/4`.
pub fn multiplexer_run(
    trace: &RequestTrace,
    pool: &mut PredictorPool,
    k: usize,
    initial: &CacheState,
    epsilon: Option<f64>,
    seed: u64,
) -> Result<MultiplexerOutcome> {
    if pool.mode() != AccessMode::FullInformation {
        return Err(Error::Validation(
            "the multiplexer requires a full-information pool".into(),
        ));
    }
    if pool.horizon() != trace.horizon() {
        return Err(Error::Validation(format!(
            "pool horizon {} does not match trace horizon {}",
            pool.horizon(),
            trace.horizon()
        )));
    }
    let epsilon = epsilon.unwrap_or_else(|| {
        default_epsilon(k, pool.predictor_count(), trace.horizon())
    });
    if !(epsilon > 0.0 && epsilon < 0.25) {
        return Err(Error::Validation(format!(
            "epsilon {epsilon} outside (0, 1/4)"
        )));
    }
    let m = pool.predictor_count();
    let mut rng = stream_rng(seed, Stream::Multiplexer);

    let mut engines = Vec::with_capacity(m);
    for _ in 0..m {
        engines.push(SimEngine::new(trace, k, initial, PromotionRule::ExpiredBy)?);
    }

    // All instances share the initial cache, so adopting the first pick is
    // free and the run's cache mirrors the followed instance from round one.
    let mut state = MultiplexerState::new(m, epsilon, &mut rng);
    let mut sync_misses = 0usize;
    let mut switches = 0usize;
    let mut report = ReportBuilder::with_capacity(trace.horizon());

    for t in 1..=trace.horizon() {
        let request = trace.request(t);
        let mut misses = vec![false; m];
        let mut followed_outcome: Option<StepOutcome> = None;
        for j in 0..m {
            let prediction = pool.query(j + 1, t)?;
            let outcome = engines[j].step(t, request, prediction)?;
            misses[j] = outcome.miss;
            if j == state.current() {
                followed_outcome = Some(outcome);
            }
        }
        let followed = followed_outcome.expect("current instance always steps");
        report.record(followed.miss, followed.evicted);

        let previous = state.current();
        if let Some(next) = state.observe(&misses, &mut rng) {
            sync_misses += cache_difference(engines[previous].cache(), engines[next].cache());
            switches += 1;
        }
    }

    Ok(MultiplexerOutcome {
        report: report.finish(engines[state.current()].cache().clone()),
        sync_misses,
        switches,
    })
}

/// Pages in `to` missing from `from` (fetch count for an eager adoption).
fn cache_difference(from: &CacheState, to: &CacheState) -> usize {
    to.pages().iter().filter(|&&p| !from.contains(p)).count()
}

fn sample(rng: &mut impl Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut cdf = 0.0;
    for (idx, &p) in probs.iter().enumerate() {
        cdf += p;
        if u < cdf {
            return idx;
        }
    }
    probs.len() - 1
}

fn sample_weighted(rng: &mut impl Rng, weights: &[f64], total: f64) -> usize {
    let u: f64 = rng.random::<f64>() * total;
    let mut cdf = 0.0;
    for (idx, &w) in weights.iter().enumerate() {
        cdf += w;
        if u < cdf {
            return idx;
        }
    }
    weights.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predict::{
        inject_errors, perfect_nat, ErrorInjection, InjectionModel, NatPredictionStream,
    };
    use crate::sim::sim_run;
    use crate::trace::{augment_sequence, build_nat_table, Page, RequestTrace};
    use rand::SeedableRng;

    fn uniform_trace(n: Page, t_len: usize, seed: u64) -> RequestTrace {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let raw: Vec<Page> = (0..t_len).map(|_| rng.random_range(1..=n)).collect();
        augment_sequence(&raw, n).unwrap()
    }

    fn noisy_pool(
        trace: &RequestTrace,
        m: usize,
        good: usize,
        rate: f64,
        mode: AccessMode,
        seed: u64,
    ) -> PredictorPool {
        let nat = build_nat_table(trace);
        let clean = perfect_nat(trace, &nat);
        let streams: Vec<NatPredictionStream> = (1..=m)
            .map(|j| {
                if j == good {
                    clean.clone()
                } else {
                    let cfg = ErrorInjection::new(
                        InjectionModel::UniformResample,
                        rate,
                        derive_seed(seed, Stream::Injection(j as u32)),
                    )
                    .unwrap();
                    inject_errors(&clean, &cfg, trace).unwrap()
                }
            })
            .collect();
        PredictorPool::new(streams, mode).unwrap()
    }

    #[test]
    fn default_tau_is_cube_root() {
        assert_eq!(EpochSchedule::default_tau(0), 1);
        assert_eq!(EpochSchedule::default_tau(1), 1);
        assert_eq!(EpochSchedule::default_tau(7), 1);
        assert_eq!(EpochSchedule::default_tau(8), 2);
        assert_eq!(EpochSchedule::default_tau(26), 2);
        assert_eq!(EpochSchedule::default_tau(27), 3);
        assert_eq!(EpochSchedule::default_tau(1 << 18), 64);
    }

    #[test]
    fn epoch_cost_examples() {
        let hit_seen = StepOutcome {
            miss: false,
            evicted: None,
            requested_was_unseen: false,
        };
        let hit_unseen = StepOutcome {
            miss: false,
            evicted: None,
            requested_was_unseen: true,
        };
        let miss = StepOutcome {
            miss: true,
            evicted: Some(1),
            requested_was_unseen: true,
        };

        // tau identical requests to a cached page: only the first round counts.
        let tau = 6;
        let mut outcomes = vec![hit_unseen];
        outcomes.extend(vec![hit_seen; tau - 1]);
        let rec = epoch_cost(1, 1, tau, &outcomes);
        assert_eq!(rec.f, 1);
        assert!((rec.cost - 1.0 / tau as f64).abs() < 1e-12);

        // tau distinct uncached pages: every round counts.
        let rec = epoch_cost(2, 1, tau, &vec![miss; tau]);
        assert_eq!(rec.f, tau);
        assert!((rec.cost - 1.0).abs() < 1e-12);
        assert_eq!(rec.evictions, tau);

        // tau = 1: the first-round clause always fires.
        let rec = epoch_cost(3, 1, 1, &[hit_seen]);
        assert_eq!(rec.f, 1);
        assert!((rec.cost - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_horizon_runs_cost_nothing() {
        let tr = augment_sequence(&[], 4).unwrap();
        let nat = build_nat_table(&tr);
        let stream = perfect_nat(&tr, &nat);
        let initial = CacheState::first_k(2).unwrap();

        let mut pool =
            PredictorPool::new(vec![stream.clone(), stream.clone()], AccessMode::Bandit).unwrap();
        let scs = scs_run(&tr, &mut pool, 2, &initial, None, 1).unwrap();
        assert_eq!(scs.report.cost, 0);
        assert!(scs.epochs.is_empty());

        let mut pool = PredictorPool::new(
            vec![stream.clone(), stream],
            AccessMode::FullInformation,
        )
        .unwrap();
        let mux = multiplexer_run(&tr, &mut pool, 2, &initial, Some(0.1), 1).unwrap();
        assert_eq!(mux.total_cost(), 0);
        assert_eq!(mux.switches, 0);
    }

    #[test]
    fn scs_rejects_full_information_pool() {
        let tr = uniform_trace(5, 20, 0);
        let mut pool = noisy_pool(&tr, 2, 1, 1.0, AccessMode::FullInformation, 0);
        let initial = CacheState::first_k(2).unwrap();
        assert!(scs_run(&tr, &mut pool, 2, &initial, None, 0).is_err());
    }

    #[test]
    fn scs_single_predictor_restarts_remedy_per_epoch() {
        let tr = uniform_trace(6, 60, 3);
        let initial = CacheState::first_k(3).unwrap();
        let tau = 10;
        let mut pool = noisy_pool(&tr, 1, 1, 0.0, AccessMode::Bandit, 1);
        let outcome = scs_run(&tr, &mut pool, 3, &initial, Some(tau), 9).unwrap();

        // Reference: step the engine manually with per-epoch remedy resets,
        // reading the same stream directly.
        let nat = build_nat_table(&tr);
        let stream = perfect_nat(&tr, &nat);
        let mut engine = SimEngine::new(&tr, 3, &initial, PromotionRule::ExpiredBy).unwrap();
        let mut cost = 0;
        for t in 1..=tr.horizon() {
            if (t - 1) % tau == 0 {
                engine.start_epoch();
            }
            cost += usize::from(engine.step(t, tr.request(t), stream.get(t)).unwrap().miss);
        }
        assert_eq!(outcome.report.cost, cost);
        assert_eq!(outcome.epochs.len(), tr.horizon().div_ceil(tau));
    }

    #[test]
    fn scs_tau_equal_horizon_is_one_epoch_of_sim() {
        let tr = uniform_trace(6, 40, 5);
        let initial = CacheState::first_k(3).unwrap();
        let mut pool = noisy_pool(&tr, 1, 1, 0.0, AccessMode::Bandit, 1);
        let outcome = scs_run(&tr, &mut pool, 3, &initial, Some(tr.horizon()), 2).unwrap();
        assert_eq!(outcome.epochs.len(), 1);

        let nat = build_nat_table(&tr);
        let stream = perfect_nat(&tr, &nat);
        let sim = sim_run(&tr, &mut (&stream), 3, &initial, PromotionRule::ExpiredBy).unwrap();
        assert_eq!(outcome.report.cost, sim.cost);
    }

    #[test]
    fn scs_queries_one_predictor_per_round_constant_in_epoch() {
        let tr = uniform_trace(8, 97, 11);
        let initial = CacheState::first_k(3).unwrap();
        let tau = 7;
        let mut pool = noisy_pool(&tr, 4, 2, 1.0, AccessMode::Bandit, 4);
        let outcome = scs_run(&tr, &mut pool, 3, &initial, Some(tau), 13).unwrap();

        let log = pool.query_log();
        assert_eq!(log.len(), tr.horizon());
        for (idx, &(j, t)) in log.iter().enumerate() {
            assert_eq!(t, idx + 1);
            let epoch = (t - 1) / tau;
            assert_eq!(j, outcome.epochs[epoch].predictor);
        }
    }

    #[test]
    fn scs_is_seed_deterministic() {
        let tr = uniform_trace(10, 200, 21);
        let initial = CacheState::first_k(4).unwrap();
        let run = |seed| {
            let mut pool = noisy_pool(&tr, 3, 1, 1.0, AccessMode::Bandit, 8);
            scs_run(&tr, &mut pool, 4, &initial, Some(9), seed)
                .unwrap()
                .report
                .cost
        };
        assert_eq!(run(5), run(5));
    }

    #[test]
    fn lemma_sandwich_and_obliviousness_smoke() {
        // Full-scale fuzzing lives in the acceptance suite; one mid-size
        // instance here guards the plumbing.
        let tr = uniform_trace(7, 80, 2);
        let initial = CacheState::first_k(3).unwrap();
        let tau = 8;
        let mut pool = noisy_pool(&tr, 3, 1, 0.5, AccessMode::Bandit, 6);
        let outcome = scs_run(&tr, &mut pool, 3, &initial, Some(tau), 3).unwrap();
        for rec in &outcome.epochs {
            assert!(rec.evictions <= rec.f && rec.f <= rec.evictions + 3);
        }
    }

    #[test]
    fn default_epsilon_formula() {
        // sqrt(10 * ln 8 / 10^4) with a 0.2 cap.
        let eps = default_epsilon(10, 8, 10_000);
        assert!((eps - 0.0456).abs() < 1e-3, "eps = {eps}");
        assert!((eps * eps - 10.0 * (8.0f64).ln() / 10_000.0).abs() < 1e-12);
        assert_eq!(default_epsilon(100, 8, 10), 0.2);
    }

    #[test]
    fn multiplexer_rejects_bad_epsilon_and_mode() {
        let tr = uniform_trace(5, 30, 1);
        let initial = CacheState::first_k(2).unwrap();
        let mut pool = noisy_pool(&tr, 2, 1, 1.0, AccessMode::FullInformation, 0);
        assert!(multiplexer_run(&tr, &mut pool, 2, &initial, Some(0.25), 0).is_err());
        assert!(multiplexer_run(&tr, &mut pool, 2, &initial, Some(0.0), 0).is_err());
        let mut bandit = noisy_pool(&tr, 2, 1, 1.0, AccessMode::Bandit, 0);
        assert!(multiplexer_run(&tr, &mut bandit, 2, &initial, Some(0.1), 0).is_err());
    }

    #[test]
    fn multiplexer_single_instance_matches_sim_plus_k() {
        let tr = uniform_trace(8, 300, 17);
        let initial = CacheState::first_k(3).unwrap();
        let mut pool = noisy_pool(&tr, 1, 1, 0.0, AccessMode::FullInformation, 0);
        let outcome = multiplexer_run(&tr, &mut pool, 3, &initial, Some(0.1), 40).unwrap();

        let nat = build_nat_table(&tr);
        let stream = perfect_nat(&tr, &nat);
        let sim = sim_run(&tr, &mut (&stream), 3, &initial, PromotionRule::ExpiredBy).unwrap();
        assert!(outcome.total_cost() <= sim.cost + 3);
        assert_eq!(outcome.report.cost, sim.cost);
        assert_eq!(outcome.switches, 0);
    }

    #[test]
    fn multiplexer_equal_instances_never_switch() {
        let tr = uniform_trace(9, 400, 23);
        let nat = build_nat_table(&tr);
        let clean = perfect_nat(&tr, &nat);
        let mut pool = PredictorPool::new(
            vec![clean.clone(), clean.clone(), clean],
            AccessMode::FullInformation,
        )
        .unwrap();
        let initial = CacheState::first_k(4).unwrap();
        let outcome = multiplexer_run(&tr, &mut pool, 4, &initial, Some(0.1), 77).unwrap();
        assert_eq!(outcome.switches, 0);
        assert_eq!(outcome.sync_misses, 0);
    }

    #[test]
    fn multiplexer_is_seed_deterministic() {
        let tr = uniform_trace(10, 500, 29);
        let initial = CacheState::first_k(4).unwrap();
        let run = |seed| {
            let mut pool = noisy_pool(&tr, 2, 1, 1.0, AccessMode::FullInformation, 3);
            let out = multiplexer_run(&tr, &mut pool, 4, &initial, Some(0.05), seed).unwrap();
            (out.total_cost(), out.switches)
        };
        assert_eq!(run(123), run(123));
    }
}
