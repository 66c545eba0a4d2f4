//! Synthetic trace generators, the predictor-free baseline, and the
//! coupon-collector phase experiment.

use rand::Rng;

use crate::cache::{CacheState, ReportBuilder, RunReport};
use crate::error::{Error, Result};
use crate::offline::fitf_run;
use crate::rng::{stream_rng, Stream};
use crate::trace::{augment_sequence, build_nat_table, Page, RequestTrace};

/// What kind of synthetic trace to generate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraceKind {
    /// Independent uniform draws from `[1, n]`.
    Uniform,
    /// `sigma_t = ((t - 1) mod cycle) + 1`.
    Cyclic { cycle: u32 },
    /// Rank-based power law: `P(i)` proportional to `i^(-exponent)`.
    /// Exponent 0 degenerates to uniform.
    Zipf { exponent: f64 },
    /// Working-set phases: each phase of `phase_len` rounds cycles through a
    /// seeded random subset of `ceil(n / 2)` pages, thrashing caches smaller
    /// than the set.
    PhasedAdversarial { phase_len: usize },
}

/// Full description of a synthetic trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSpec {
    pub kind: TraceKind,
    pub universe: Page,
    pub horizon: usize,
    pub seed: u64,
}

/// Generates the trace described by `spec`, deterministically in the seed.
pub fn gen_trace(spec: &TraceSpec) -> Result<RequestTrace> {
    let n = spec.universe;
    if n < 2 {
        return Err(Error::Validation(format!(
            "page universe must have n >= 2, got {n}"
        )));
    }
    let mut rng = stream_rng(spec.seed, Stream::TraceGen);
    let raw: Vec<Page> = match spec.kind {
        TraceKind::Uniform => (0..spec.horizon).map(|_| rng.random_range(1..=n)).collect(),
        TraceKind::Cyclic { cycle } => {
            if cycle == 0 || cycle > n {
                return Err(Error::Validation(format!(
                    "cycle length {cycle} outside [1, n={n}]"
                )));
            }
            (0..spec.horizon)
                .map(|t| (t as u32 % cycle) + 1)
                .collect()
        }
        TraceKind::Zipf { exponent } => {
            if !exponent.is_finite() || exponent < 0.0 {
                return Err(Error::Validation(format!(
                    "zipf exponent {exponent} must be finite and >= 0"
                )));
            }
            // Inverse-CDF table; exact and stable across versions.
            let mut cumulative = Vec::with_capacity(n as usize);
            let mut acc = 0.0f64;
            for i in 1..=n {
                acc += (f64::from(i)).powf(-exponent);
                cumulative.push(acc);
            }
            let total = acc;
            (0..spec.horizon)
                .map(|_| {
                    let u: f64 = rng.random::<f64>() * total;
                    let idx = cumulative.partition_point(|&c| c <= u);
                    idx.min(n as usize - 1) as Page + 1
                })
                .collect()
        }
        TraceKind::PhasedAdversarial { phase_len } => {
            if phase_len == 0 {
                return Err(Error::Validation("phase length must be positive".into()));
            }
            let set_size = n.div_ceil(2).max(1);
            let mut raw = Vec::with_capacity(spec.horizon);
            let mut working: Vec<Page> = Vec::new();
            for t in 0..spec.horizon {
                if t % phase_len == 0 {
                    working = sample_subset(&mut rng, n, set_size as usize);
                }
                raw.push(working[(t % phase_len) % working.len()]);
            }
            raw
        }
    };
    augment_sequence(&raw, n)
}

/// Draws a uniform `size`-subset of `[1, n]` by partial Fisher-Yates.
pub fn sample_subset(rng: &mut impl Rng, n: Page, size: usize) -> Vec<Page> {
    let mut pool: Vec<Page> = (1..=n).collect();
    for i in 0..size {
        let j = rng.random_range(i..pool.len());
        pool.swap(i, j);
    }
    pool.truncate(size);
    pool
}

/// Least-recently-used eviction: the predictor-free online baseline.
pub fn lru_run(trace: &RequestTrace, k: usize, initial: &CacheState) -> Result<RunReport> {
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
    let mut cache = initial.clone();
    // Last-use round per page; initial residents tie at 0 and break by
    // smallest page id.
    let mut last_used = vec![0usize; trace.universe() as usize + 1];
    let mut report = ReportBuilder::with_capacity(trace.horizon());
    for t in 1..=trace.horizon() {
        let page = trace.request(t);
        let evicted = if cache.contains(page) {
            None
        } else {
            cache
                .pages()
                .iter()
                .copied()
                .min_by_key(|&p| (last_used[p as usize], p))
        };
        let miss = cache.serve(page, evicted)?;
        last_used[page as usize] = t;
        report.record(miss, evicted);
    }
    Ok(report.finish(cache))
}

/// Complete coupon-collector phases of a trace: minimal consecutive
/// intervals in which every page of `[1, n]` is requested at least once.
/// A trailing interval that never covers all pages is not returned.
pub fn partition_phases(trace: &RequestTrace) -> Vec<(usize, usize)> {
    let n = trace.universe() as usize;
    let mut phases = Vec::new();
    let mut seen = vec![false; n];
    let mut distinct = 0;
    let mut start = 1;
    for t in 1..=trace.horizon() {
        let idx = trace.request(t) as usize - 1;
        if !seen[idx] {
            seen[idx] = true;
            distinct += 1;
        }
        if distinct == n {
            phases.push((start, t));
            start = t + 1;
            seen.fill(false);
            distinct = 0;
        }
    }
    phases
}

/// Per-seed row of the lower-bound experiment.
#[derive(Debug, Clone)]
pub struct LowerBoundRow {
    pub seed: u64,
    pub complete_phases: usize,
    pub mean_phase_length: f64,
    pub max_fitf_misses_per_phase: usize,
    pub fitf_cost: usize,
    pub lru_cost: usize,
}

/// Aggregated outcome of the lower-bound experiment.
#[derive(Debug, Clone)]
pub struct LowerBoundSummary {
    pub k: usize,
    pub universe: Page,
    pub horizon: usize,
    pub rows: Vec<LowerBoundRow>,
    pub mean_phase_length: f64,
    /// Coupon-collector expectation `n * H_n`.
    pub expected_phase_length: f64,
    pub max_fitf_misses_per_phase: usize,
    pub total_fitf_cost: usize,
    pub total_lru_cost: usize,
}

/// Uniform traces with `n = k + 1`: phases are coupon-collector windows, the
/// offline optimum misses at most twice per complete phase, and the
/// predictor-free baseline pays a factor of roughly `H_n` more.
pub fn lower_bound_experiment(k: usize, horizon: usize, seeds: &[u64]) -> Result<LowerBoundSummary> {
    if k == 0 {
        return Err(Error::Validation("k must be positive".into()));
    }
    if seeds.is_empty() {
        return Err(Error::Validation("at least one seed is required".into()));
    }
    let n = (k + 1) as Page;
    let initial = CacheState::first_k(k)?;
    let mut rows = Vec::with_capacity(seeds.len());
    let mut phase_lengths = 0usize;
    let mut phase_count = 0usize;
    let mut max_misses = 0usize;
    let mut total_fitf = 0usize;
    let mut total_lru = 0usize;

    for &seed in seeds {
        let trace = gen_trace(&TraceSpec {
            kind: TraceKind::Uniform,
            universe: n,
            horizon,
            seed,
        })?;
        let nat = build_nat_table(&trace);
        let fitf = fitf_run(&trace, &nat, k, &initial)?;
        let lru = lru_run(&trace, k, &initial)?;
        let phases = partition_phases(&trace);

        let mut seed_max = 0usize;
        let mut seed_len_sum = 0usize;
        for &(start, end) in &phases {
            let misses = fitf.per_round_miss[start - 1..end].iter().filter(|&&m| m).count();
            seed_max = seed_max.max(misses);
            seed_len_sum += end - start + 1;
        }
        let row = LowerBoundRow {
            seed,
            complete_phases: phases.len(),
            mean_phase_length: if phases.is_empty() {
                0.0
            } else {
                seed_len_sum as f64 / phases.len() as f64
            },
            max_fitf_misses_per_phase: seed_max,
            fitf_cost: fitf.cost,
            lru_cost: lru.cost,
        };
        phase_lengths += seed_len_sum;
        phase_count += phases.len();
        max_misses = max_misses.max(seed_max);
        total_fitf += fitf.cost;
        total_lru += lru.cost;
        rows.push(row);
    }

    let harmonic: f64 = (1..=n as u64).map(|i| 1.0 / i as f64).sum();
    Ok(LowerBoundSummary {
        k,
        universe: n,
        horizon,
        rows,
        mean_phase_length: if phase_count == 0 {
            0.0
        } else {
            phase_lengths as f64 / phase_count as f64
        },
        expected_phase_length: f64::from(n) * harmonic,
        max_fitf_misses_per_phase: max_misses,
        total_fitf_cost: total_fitf,
        total_lru_cost: total_lru,
    })
}
