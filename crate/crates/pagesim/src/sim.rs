//! Furthest-in-the-future simulated on remedy predictions.
//!
//! The policy mirrors the offline rule but ranks cached pages by their
//! remedy values instead of true next arrivals: on a miss it evicts the
//! cached page with the largest remedy, ties broken by smallest page id.
//! The round's prediction only ever touches the requested page's remedy, and
//! the requested page is never an eviction candidate in its own round, so
//! the eviction decision is effectively made before the prediction arrives.

use crate::cache::{CacheState, ReportBuilder, RunReport};
use crate::error::{Error, Result};
use crate::predict::{NatPredictionStream, PredictorPool};
use crate::remedy::{PromotionRule, RemedyTable};
use crate::trace::{Page, RequestTrace};

/// Per-round prediction feed for a single run.
pub trait PredictionSource {
    /// The round-`t` prediction for the page requested at `t`.
    fn predict(&mut self, t: usize) -> Result<usize>;
}

impl PredictionSource for &NatPredictionStream {
    fn predict(&mut self, t: usize) -> Result<usize> {
        Ok(self.get(t))
    }
}

/// Routes predictions of one pooled predictor through the pool's access
/// accounting.
pub struct PoolSource<'a> {
    pool: &'a mut PredictorPool,
    predictor: usize,
}

impl<'a> PoolSource<'a> {
    pub fn new(pool: &'a mut PredictorPool, predictor: usize) -> Self {
        PoolSource { pool, predictor }
    }
}

impl PredictionSource for PoolSource<'_> {
    fn predict(&mut self, t: usize) -> Result<usize> {
        self.pool.query(self.predictor, t)
    }
}

/// What one simulated round did.
#[derive(Debug, Clone, Copy)]
pub struct StepOutcome {
    pub miss: bool,
    pub evicted: Option<Page>,
    /// Whether the requested page's remedy was still the never-seen sentinel
    /// when the round began. Epoch cost accounting needs this.
    pub requested_was_unseen: bool,
}

/// Incremental stepper shared by the single-predictor run, the epoch-based
/// combiner, and the multiplexer's lockstep instances.
#[derive(Debug, Clone)]
pub struct SimEngine {
    remedy: RemedyTable,
    cache: CacheState,
}

impl SimEngine {
    pub fn new(
        trace: &RequestTrace,
        k: usize,
        initial: &CacheState,
        rule: PromotionRule,
    ) -> Result<Self> {
        if k == 0 || k >= trace.universe() as usize {
            return Err(Error::Validation(format!(
                "cache size k={k} must satisfy 1 <= k < n={}",
                trace.universe()
            )));
        }
        if initial.capacity() != k {
            return Err(Error::Validation(format!(
                "initial cache has {} pages, expected k={k}",
                initial.capacity()
            )));
        }
        if let Some(&p) = initial.pages().iter().find(|&&p| p > trace.universe()) {
            return Err(Error::Validation(format!(
                "initial cache page {p} outside universe [1, {}]",
                trace.universe()
            )));
        }
        Ok(SimEngine {
            remedy: RemedyTable::new(trace.universe(), trace.horizon(), rule),
            cache: initial.clone(),
        })
    }

    pub fn cache(&self) -> &CacheState {
        &self.cache
    }

    pub fn remedy(&self) -> &RemedyTable {
        &self.remedy
    }

    /// Resets the remedy table (not the cache) so the next step counts as an
    /// initial round.
    pub fn start_epoch(&mut self) {
        self.remedy.reinitialize();
    }

    /// Serves round `t`: applies the remedy update, then on a miss evicts
    /// the cached page with the largest remedy value.
    pub fn step(&mut self, t: usize, request: Page, prediction: usize) -> Result<StepOutcome> {
        let requested_was_unseen = self.remedy.value(request) == self.remedy.never_seen();
        self.remedy.step(t, request, prediction)?;
        let evicted = if self.cache.contains(request) {
            None
        } else {
            let victim = self
                .cache
                .pages()
                .iter()
                .copied()
                .max_by_key(|&p| (self.remedy.value(p), std::cmp::Reverse(p)))
                .expect("cache is never empty");
            Some(victim)
        };
        let miss = self.cache.serve(request, evicted)?;
        Ok(StepOutcome {
            miss,
            evicted,
            requested_was_unseen,
        })
    }
}

/// One dumped round for the flag-gated per-round CSV.
#[derive(Debug, Clone, Copy)]
pub struct RoundRecord {
    pub t: usize,
    pub request: Page,
    pub miss: bool,
    pub evicted: Option<Page>,
    /// Remedy value of the evicted page at eviction time.
    pub argmax_remedy: Option<usize>,
}

/// Runs the simulated policy over the whole trace with one prediction per
/// round from `source`.
pub fn sim_run(
    trace: &RequestTrace,
    source: &mut impl PredictionSource,
    k: usize,
    initial: &CacheState,
    rule: PromotionRule,
) -> Result<RunReport> {
    Ok(sim_run_recorded(trace, source, k, initial, rule, false)?.0)
}

/// As [`sim_run`], optionally capturing per-round records.
pub fn sim_run_recorded(
    trace: &RequestTrace,
    source: &mut impl PredictionSource,
    k: usize,
    initial: &CacheState,
    rule: PromotionRule,
    record_rounds: bool,
) -> Result<(RunReport, Vec<RoundRecord>)> {
    let mut engine = SimEngine::new(trace, k, initial, rule)?;
    let mut report = ReportBuilder::with_capacity(trace.horizon());
    let mut rounds = Vec::with_capacity(if record_rounds { trace.horizon() } else { 0 });
    for t in 1..=trace.horizon() {
        let request = trace.request(t);
        let prediction = source.predict(t)?;
        let outcome = engine.step(t, request, prediction)?;
        report.record(outcome.miss, outcome.evicted);
        if record_rounds {
            rounds.push(RoundRecord {
                t,
                request,
                miss: outcome.miss,
                evicted: outcome.evicted,
                // The remedy entry of an evicted page is untouched by the
                // serve, so this reads the value the argmax saw.
                argmax_remedy: outcome.evicted.map(|p| engine.remedy().value(p)),
            });
        }
    }
    Ok((report.finish(engine.cache), rounds))
}
