//! C ABI for the paging simulator.
//!
//! The interface works with two opaque handles: a trace (bundled with its
//! next-arrival table) and a predictor stream. Every fallible call returns a
//! [`PsStatus`] and writes results through out-pointers; nothing unwinds
//! across the boundary. Handles are created and released by this library
//! only (`ps_trace_free`, `ps_predictor_free`).

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use pagesim::cache::CacheState;
use pagesim::combine::{multiplexer_run, scs_run};
use pagesim::error::Error;
use pagesim::files::read_trace;
use pagesim::harness::{gen_trace, lru_run, TraceKind, TraceSpec};
use pagesim::metrics::compute_metrics;
use pagesim::offline::{dp_opt, fitf_run};
use pagesim::predict::{
    inject_errors, perfect_nat, AccessMode, ErrorInjection, InjectionModel, NatPredictionStream,
    PredictorPool,
};
use pagesim::remedy::PromotionRule;
use pagesim::sim::sim_run;
use pagesim::trace::{build_nat_table, NatTable, RequestTrace};

/// Result codes. `PS_STATUS_OK` is zero; everything else is an error.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsStatus {
    Ok = 0,
    /// Unexpected internal failure (a bug; never expected from valid use).
    Internal = 1,
    /// Malformed or out-of-range input.
    Validation = 2,
    /// A call sequence broke an operation's contract.
    Contract = 3,
    /// A predictor query violated the access model.
    Access = 4,
    /// An exact-oracle instance exceeded its size guard.
    TooLarge = 5,
    /// File system failure.
    Io = 6,
    /// A required pointer argument was null.
    NullArgument = 7,
    /// A string argument was not valid UTF-8.
    InvalidString = 8,
}

/// Synthetic trace families for [`ps_trace_generate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsTraceKind {
    /// Independent uniform draws; `param` ignored.
    Uniform = 0,
    /// Fixed cycle; `param` is the cycle length.
    Cyclic = 1,
    /// Rank power law; `param` is the exponent.
    Zipf = 2,
    /// Working-set phases; `param` is the phase length.
    PhasedAdversarial = 3,
}

/// Corruption models for [`ps_predictor_corrupt`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsNoiseModel {
    /// Add `offset`, clamped into the legal range.
    Offset = 0,
    /// Replace with a uniform draw from the legal range.
    UniformResample = 1,
    /// Replace with the extreme true arrival farthest from the truth.
    AdversarialSwap = 2,
}

/// Cost summary of one run. `opt` is the exact offline optimum for the same
/// trace and the default initial cache; `regret = cost - opt`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PsRunStats {
    pub cost: u64,
    pub opt: u64,
    pub regret: i64,
}

/// Exact accuracy measures of one predictor stream.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PsMetrics {
    pub error_rounds: u64,
    pub inverted_pairs: u64,
    pub inverted_rounds: u64,
    pub eta_refined: u64,
    pub l1: u64,
}

/// Opaque trace handle (request sequence plus next-arrival table).
pub struct PsTrace {
    trace: RequestTrace,
    nat: NatTable,
}

/// Opaque predictor handle (one next-arrival prediction stream).
pub struct PsPredictor {
    stream: NatPredictionStream,
}

fn status_of(err: &Error) -> PsStatus {
    match err {
        Error::Validation(_) => PsStatus::Validation,
        Error::Contract(_) => PsStatus::Contract,
        Error::AccessViolation(_) => PsStatus::Access,
        Error::InstanceTooLarge(_) => PsStatus::TooLarge,
        Error::Io { .. } => PsStatus::Io,
    }
}

fn guarded(body: impl FnOnce() -> PsStatus) -> PsStatus {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or(PsStatus::Internal)
}

/// Returns a static description of a status code.
#[no_mangle]
pub extern "C" fn ps_status_message(status: PsStatus) -> *const c_char {
    let message: &'static [u8] = match status {
        PsStatus::Ok => b"ok\0",
        PsStatus::Internal => b"internal error\0",
        PsStatus::Validation => b"validation error\0",
        PsStatus::Contract => b"contract violation\0",
        PsStatus::Access => b"access violation\0",
        PsStatus::TooLarge => b"instance too large\0",
        PsStatus::Io => b"i/o error\0",
        PsStatus::NullArgument => b"null argument\0",
        PsStatus::InvalidString => b"invalid utf-8\0",
    };
    message.as_ptr().cast()
}

/// Generates a synthetic trace. `param` carries the kind-specific value (see
/// [`PsTraceKind`]). On success stores a new handle in `*out`.
///
/// # Safety
/// `out` must be a valid pointer to a `PsTrace *`.
#[no_mangle]
pub unsafe extern "C" fn ps_trace_generate(
    kind: PsTraceKind,
    n: u32,
    horizon: u64,
    seed: u64,
    param: f64,
    out: *mut *mut PsTrace,
) -> PsStatus {
    if out.is_null() {
        return PsStatus::NullArgument;
    }
    guarded(|| {
        let kind = match kind {
            PsTraceKind::Uniform => TraceKind::Uniform,
            PsTraceKind::Cyclic => TraceKind::Cyclic {
                cycle: param as u32,
            },
            PsTraceKind::Zipf => TraceKind::Zipf { exponent: param },
            PsTraceKind::PhasedAdversarial => TraceKind::PhasedAdversarial {
                phase_len: param as usize,
            },
        };
        let spec = TraceSpec {
            kind,
            universe: n,
            horizon: horizon as usize,
            seed,
        };
        match gen_trace(&spec) {
            Ok(trace) => {
                let nat = build_nat_table(&trace);
                unsafe { *out = Box::into_raw(Box::new(PsTrace { trace, nat })) };
                PsStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Loads a trace file (`t,page` rows). `n_override` of zero means "take `n`
/// from the file's `# n=<int>` header".
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_trace_load(
    path: *const c_char,
    n_override: u32,
    out: *mut *mut PsTrace,
) -> PsStatus {
    if path.is_null() || out.is_null() {
        return PsStatus::NullArgument;
    }
    let path = match unsafe { CStr::from_ptr(path) }.to_str() {
        Ok(s) => s,
        Err(_) => return PsStatus::InvalidString,
    };
    guarded(|| {
        let n = if n_override == 0 {
            None
        } else {
            Some(n_override)
        };
        match read_trace(Path::new(path), n) {
            Ok(trace) => {
                let nat = build_nat_table(&trace);
                unsafe { *out = Box::into_raw(Box::new(PsTrace { trace, nat })) };
                PsStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Releases a trace handle. Null is ignored.
///
/// # Safety
/// `trace` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ps_trace_free(trace: *mut PsTrace) {
    if !trace.is_null() {
        drop(unsafe { Box::from_raw(trace) });
    }
}

/// Number of real rounds `T`.
///
/// # Safety
/// `trace` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ps_trace_horizon(trace: *const PsTrace) -> u64 {
    unsafe { &*trace }.trace.horizon() as u64
}

/// Page-universe size `n`.
///
/// # Safety
/// `trace` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ps_trace_universe(trace: *const PsTrace) -> u32 {
    unsafe { &*trace }.trace.universe()
}

/// Creates the error-free predictor for `trace`.
///
/// # Safety
/// `trace` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_predictor_perfect(
    trace: *const PsTrace,
    out: *mut *mut PsPredictor,
) -> PsStatus {
    if trace.is_null() || out.is_null() {
        return PsStatus::NullArgument;
    }
    let handle = unsafe { &*trace };
    guarded(|| {
        let stream = perfect_nat(&handle.trace, &handle.nat);
        unsafe { *out = Box::into_raw(Box::new(PsPredictor { stream })) };
        PsStatus::Ok
    })
}

/// Creates a corrupted predictor: the error-free stream with rounds
/// corrupted independently at `rate` under `model` (`offset` applies to the
/// offset model only).
///
/// # Safety
/// `trace` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_predictor_corrupt(
    trace: *const PsTrace,
    model: PsNoiseModel,
    rate: f64,
    offset: i64,
    seed: u64,
    out: *mut *mut PsPredictor,
) -> PsStatus {
    if trace.is_null() || out.is_null() {
        return PsStatus::NullArgument;
    }
    let handle = unsafe { &*trace };
    guarded(|| {
        let model = match model {
            PsNoiseModel::Offset => InjectionModel::Offset(offset),
            PsNoiseModel::UniformResample => InjectionModel::UniformResample,
            PsNoiseModel::AdversarialSwap => InjectionModel::AdversarialSwap,
        };
        let clean = perfect_nat(&handle.trace, &handle.nat);
        let result = ErrorInjection::new(model, rate, seed)
            .and_then(|cfg| inject_errors(&clean, &cfg, &handle.trace));
        match result {
            Ok(stream) => {
                unsafe { *out = Box::into_raw(Box::new(PsPredictor { stream })) };
                PsStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Releases a predictor handle. Null is ignored.
///
/// # Safety
/// `predictor` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ps_predictor_free(predictor: *mut PsPredictor) {
    if !predictor.is_null() {
        drop(unsafe { Box::from_raw(predictor) });
    }
}

/// Computes the accuracy measures of `predictor` against `trace`.
///
/// # Safety
/// All pointers must be valid; handles must belong to this library.
#[no_mangle]
pub unsafe extern "C" fn ps_metrics(
    trace: *const PsTrace,
    predictor: *const PsPredictor,
    out: *mut PsMetrics,
) -> PsStatus {
    if trace.is_null() || predictor.is_null() || out.is_null() {
        return PsStatus::NullArgument;
    }
    let tr = unsafe { &*trace };
    let pred = unsafe { &*predictor };
    guarded(|| match compute_metrics(&tr.trace, &tr.nat, &pred.stream) {
        Ok(m) => {
            unsafe {
                *out = PsMetrics {
                    error_rounds: m.error_rounds,
                    inverted_pairs: m.inverted_pairs,
                    inverted_rounds: m.inverted_rounds,
                    eta_refined: m.eta_refined,
                    l1: m.l1,
                };
            }
            PsStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

fn finish_run(
    tr: &PsTrace,
    k: u64,
    cost: Result<usize, Error>,
    out: *mut PsRunStats,
) -> PsStatus {
    let initial = match CacheState::first_k(k as usize) {
        Ok(c) => c,
        Err(e) => return status_of(&e),
    };
    let cost = match cost {
        Ok(c) => c,
        Err(e) => return status_of(&e),
    };
    match fitf_run(&tr.trace, &tr.nat, k as usize, &initial) {
        Ok(report) => {
            let opt = report.cost;
            unsafe {
                *out = PsRunStats {
                    cost: cost as u64,
                    opt: opt as u64,
                    regret: cost as i64 - opt as i64,
                };
            }
            PsStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Runs furthest-in-the-future eviction from the default initial cache
/// `{1..k}` and fills `*out` with cost, offline optimum, and regret (zero by
/// definition here).
///
/// # Safety
/// `trace` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_run_fitf(
    trace: *const PsTrace,
    k: u64,
    out: *mut PsRunStats,
) -> PsStatus {
    if trace.is_null() || out.is_null() {
        return PsStatus::NullArgument;
    }
    let tr = unsafe { &*trace };
    guarded(|| {
        let cost = CacheState::first_k(k as usize)
            .and_then(|initial| fitf_run(&tr.trace, &tr.nat, k as usize, &initial))
            .map(|r| r.cost);
        finish_run(tr, k, cost, out)
    })
}

/// Runs the least-recently-used baseline from the default initial cache.
///
/// # Safety
/// `trace` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_run_lru(
    trace: *const PsTrace,
    k: u64,
    out: *mut PsRunStats,
) -> PsStatus {
    if trace.is_null() || out.is_null() {
        return PsStatus::NullArgument;
    }
    let tr = unsafe { &*trace };
    guarded(|| {
        let cost = CacheState::first_k(k as usize)
            .and_then(|initial| lru_run(&tr.trace, k as usize, &initial))
            .map(|r| r.cost);
        finish_run(tr, k, cost, out)
    })
}

/// Runs the exhaustive offline oracle; fails with `PS_STATUS_TOO_LARGE` when
/// the instance exceeds the `C(n, k) * T <= 10^7` guard.
///
/// # Safety
/// `trace` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_run_dp_opt(
    trace: *const PsTrace,
    k: u64,
    out: *mut PsRunStats,
) -> PsStatus {
    if trace.is_null() || out.is_null() {
        return PsStatus::NullArgument;
    }
    let tr = unsafe { &*trace };
    guarded(|| {
        let cost = CacheState::first_k(k as usize)
            .and_then(|initial| dp_opt(&tr.trace, k as usize, &initial))
            .map(|r| r.cost);
        finish_run(tr, k, cost, out)
    })
}

/// Runs the simulated policy following one predictor.
///
/// # Safety
/// `trace` and `predictor` must be live handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_run_sim(
    trace: *const PsTrace,
    predictor: *const PsPredictor,
    k: u64,
    out: *mut PsRunStats,
) -> PsStatus {
    if trace.is_null() || predictor.is_null() || out.is_null() {
        return PsStatus::NullArgument;
    }
    let tr = unsafe { &*trace };
    let pred = unsafe { &*predictor };
    guarded(|| {
        let cost = CacheState::first_k(k as usize).and_then(|initial| {
            sim_run(
                &tr.trace,
                &mut (&pred.stream),
                k as usize,
                &initial,
                PromotionRule::ExpiredBy,
            )
            .map(|r| r.cost)
        });
        finish_run(tr, k, cost, out)
    })
}

unsafe fn collect_streams(
    predictors: *const *const PsPredictor,
    m: u64,
) -> Option<Vec<NatPredictionStream>> {
    if predictors.is_null() {
        return None;
    }
    let mut streams = Vec::with_capacity(m as usize);
    for i in 0..m as usize {
        let p = unsafe { *predictors.add(i) };
        if p.is_null() {
            return None;
        }
        streams.push(unsafe { &*p }.stream.clone());
    }
    Some(streams)
}

/// Runs the epoch-based bandit-access combiner over `m` predictors.
/// `tau` of zero selects the default `floor(T^(1/3))`.
///
/// # Safety
/// `predictors` must point to `m` live predictor handles; `trace` must be a
/// live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_run_scs(
    trace: *const PsTrace,
    predictors: *const *const PsPredictor,
    m: u64,
    k: u64,
    tau: u64,
    seed: u64,
    out: *mut PsRunStats,
) -> PsStatus {
    if trace.is_null() || out.is_null() {
        return PsStatus::NullArgument;
    }
    let tr = unsafe { &*trace };
    let Some(streams) = (unsafe { collect_streams(predictors, m) }) else {
        return PsStatus::NullArgument;
    };
    guarded(|| {
        let cost = CacheState::first_k(k as usize).and_then(|initial| {
            let mut pool = PredictorPool::new(streams, AccessMode::Bandit)?;
            let tau = if tau == 0 { None } else { Some(tau as usize) };
            scs_run(&tr.trace, &mut pool, k as usize, &initial, tau, seed)
                .map(|o| o.report.cost)
        });
        finish_run(tr, k, cost, out)
    })
}

/// Runs the full-information multiplexer over `m` predictors; the reported
/// cost includes cache-adoption fetches. `epsilon` of zero selects the
/// default `min(0.2, sqrt(k ln m / T))`.
///
/// # Safety
/// `predictors` must point to `m` live predictor handles; `trace` must be a
/// live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ps_run_multiplexer(
    trace: *const PsTrace,
    predictors: *const *const PsPredictor,
    m: u64,
    k: u64,
    epsilon: f64,
    seed: u64,
    out: *mut PsRunStats,
) -> PsStatus {
    if trace.is_null() || out.is_null() {
        return PsStatus::NullArgument;
    }
    let tr = unsafe { &*trace };
    let Some(streams) = (unsafe { collect_streams(predictors, m) }) else {
        return PsStatus::NullArgument;
    };
    guarded(|| {
        let cost = CacheState::first_k(k as usize).and_then(|initial| {
            let mut pool = PredictorPool::new(streams, AccessMode::FullInformation)?;
            let epsilon = if epsilon == 0.0 { None } else { Some(epsilon) };
            multiplexer_run(&tr.trace, &mut pool, k as usize, &initial, epsilon, seed)
                .map(|o| o.total_cost())
        });
        finish_run(tr, k, cost, out)
    })
}
