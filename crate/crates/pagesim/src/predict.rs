//! Prediction streams, consistent derivation, synthetic error injection, and
//! access-model enforcement.
//!
//! Two predictor flavours exist. An *explicit* predictor guesses the request
//! sequence itself; a *NAT* predictor emits, in each round, a guess for the
//! next arrival time of the page that was just requested. Every NAT value is
//! constrained to `(t, T + n]`, matching the range of true next arrivals.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};
use crate::trace::{build_nat_table, NatTable, Page, RequestTrace};

/// Per-round next-arrival-time predictions `p_t`, `t` in `[1, T]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NatPredictionStream {
    values: Vec<usize>,
}

impl NatPredictionStream {
    /// Wraps raw values, checking `t < p_t <= T + n` against `trace`.
    pub fn from_values(values: Vec<usize>, trace: &RequestTrace) -> Result<Self> {
        if values.len() != trace.horizon() {
            return Err(Error::Validation(format!(
                "prediction stream has {} rounds, trace has {}",
                values.len(),
                trace.horizon()
            )));
        }
        let total = trace.total_len();
        for (idx, &p) in values.iter().enumerate() {
            let t = idx + 1;
            if p <= t || p > total {
                return Err(Error::Validation(format!(
                    "prediction {p} at round {t} outside ({t}, {total}]"
                )));
            }
        }
        Ok(NatPredictionStream { values })
    }

    pub fn horizon(&self) -> usize {
        self.values.len()
    }

    /// Prediction for round `t`, 1-based.
    pub fn get(&self, t: usize) -> usize {
        self.values[t - 1]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }
}

/// Per-round page predictions `pi_t`, with the same forced suffix as traces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitPredictionStream {
    universe: Page,
    /// Length `T + n`, suffix appended.
    pages: Vec<Page>,
}

impl ExplicitPredictionStream {
    /// Builds an explicit stream from raw page guesses, appending the suffix.
    pub fn new(raw: &[Page], n: Page) -> Result<Self> {
        let augmented = crate::trace::augment_sequence(raw, n)?;
        Ok(ExplicitPredictionStream {
            universe: n,
            pages: augmented.requests().to_vec(),
        })
    }

    pub fn universe(&self) -> Page {
        self.universe
    }

    pub fn horizon(&self) -> usize {
        self.pages.len() - self.universe as usize
    }

    /// Predicted page at round `t`, valid for `t` in `[1, T + n]`.
    pub fn page(&self, t: usize) -> Page {
        self.pages[t - 1]
    }

    /// The real predictions, suffix excluded.
    pub fn real_pages(&self) -> &[Page] {
        &self.pages[..self.horizon()]
    }
}

/// The error-free NAT stream: `p_t = A(t, sigma_t)` for every round.
pub fn perfect_nat(trace: &RequestTrace, nat: &NatTable) -> NatPredictionStream {
    let values = (1..=trace.horizon()).map(|t| nat.next_of_requested(t)).collect();
    NatPredictionStream { values }
}

/// Derives the NAT stream consistent with an explicit stream:
/// `p_t = min{t' > t : pi_{t'} = sigma_t}` over the augmented predictions.
/// The suffix of `pi` guarantees existence.
pub fn derive_consistent_nat(
    explicit: &ExplicitPredictionStream,
    trace: &RequestTrace,
) -> Result<NatPredictionStream> {
    if explicit.horizon() != trace.horizon() || explicit.universe() != trace.universe() {
        return Err(Error::Validation(format!(
            "explicit stream (T={}, n={}) does not match trace (T={}, n={})",
            explicit.horizon(),
            explicit.universe(),
            trace.horizon(),
            trace.universe()
        )));
    }
    // Occurrence lists of the augmented pi, searched per round.
    let mut occ: Vec<Vec<usize>> = vec![Vec::new(); trace.universe() as usize];
    for t in 1..=trace.horizon() + trace.universe() as usize {
        occ[explicit.page(t) as usize - 1].push(t);
    }
    let values = (1..=trace.horizon())
        .map(|t| {
            let list = &occ[trace.request(t) as usize - 1];
            list[list.partition_point(|&r| r <= t)]
        })
        .collect();
    Ok(NatPredictionStream { values })
}

/// How corrupted rounds are re-generated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InjectionModel {
    /// Add a fixed signed shift, clamped into `(t, T + n]`.
    Offset(i64),
    /// Replace with a uniform draw from `(t, T + n]`.
    UniformResample,
    /// Replace with whichever of the round's extreme true next arrivals
    /// (over all pages) is farther from the truth.
    AdversarialSwap,
}

/// Seeded corruption of a prediction stream.
///
/// Rounds are corrupted independently with probability `rate`; corrupted
/// values are clamped into the legal range so the stream invariant holds
/// unconditionally.
#[derive(Debug, Clone, Copy)]
pub struct ErrorInjection {
    pub model: InjectionModel,
    pub rate: f64,
    pub seed: u64,
}

impl ErrorInjection {
    pub fn new(model: InjectionModel, rate: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rate) {
            return Err(Error::Validation(format!(
                "injection rate {rate} outside [0, 1]"
            )));
        }
        Ok(ErrorInjection { model, rate, seed })
    }
}

/// Applies `cfg` to a clean stream. Identical seeds give identical output.
pub fn inject_errors(
    clean: &NatPredictionStream,
    cfg: &ErrorInjection,
    trace: &RequestTrace,
) -> Result<NatPredictionStream> {
    if clean.horizon() != trace.horizon() {
        return Err(Error::Validation(format!(
            "stream has {} rounds, trace has {}",
            clean.horizon(),
            trace.horizon()
        )));
    }
    let total = trace.total_len();
    let mut rng = stream_rng(cfg.seed, Stream::Injection(0));
    // True arrivals are only needed for the swap model.
    let nat = match cfg.model {
        InjectionModel::AdversarialSwap => Some(build_nat_table(trace)),
        _ => None,
    };

    let mut values = Vec::with_capacity(clean.horizon());
    for t in 1..=clean.horizon() {
        let p = clean.get(t);
        let corrupt = rng.random::<f64>() < cfg.rate;
        if !corrupt {
            values.push(p);
            continue;
        }
        let lo = t + 1;
        let corrupted = match cfg.model {
            InjectionModel::Offset(shift) => {
                let shifted = p as i64 + shift;
                shifted.clamp(lo as i64, total as i64) as usize
            }
            InjectionModel::UniformResample => rng.random_range(lo..=total),
            InjectionModel::AdversarialSwap => {
                let nat = nat.as_ref().expect("built for swap model");
                let truth = nat.next_of_requested(t);
                let mut min_a = usize::MAX;
                let mut max_a = 0;
                for page in 1..=trace.universe() {
                    let a = nat.lookup(t, page);
                    min_a = min_a.min(a);
                    max_a = max_a.max(a);
                }
                if truth - min_a <= max_a - truth {
                    max_a
                } else {
                    min_a
                }
            }
        };
        debug_assert!(corrupted > t && corrupted <= total);
        values.push(corrupted);
    }
    Ok(NatPredictionStream { values })
}

/// Predictor access models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccessMode {
    /// Every predictor's round-`t` prediction may be read in round `t`.
    FullInformation,
    /// Exactly one predictor may be queried per round.
    Bandit,
}

impl AccessMode {
    pub fn as_str(self) -> &'static str {
        match self {
            AccessMode::FullInformation => "full",
            AccessMode::Bandit => "bandit",
        }
    }
}

impl std::str::FromStr for AccessMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" | "full-information" => Ok(AccessMode::FullInformation),
            "bandit" => Ok(AccessMode::Bandit),
            other => Err(Error::Validation(format!("unknown access mode `{other}`"))),
        }
    }
}

/// Mediates all access to a set of prediction streams.
///
/// Algorithms never touch streams directly: queries go through the pool,
/// which enforces the access model structurally. Round-`t` queries return
/// `p_t` only; earlier rounds become unreadable once the pool has advanced,
/// and in bandit mode a second query in the same round is an error.
#[derive(Debug)]
pub struct PredictorPool {
    streams: Vec<NatPredictionStream>,
    mode: AccessMode,
    current_round: usize,
    queries_this_round: usize,
    query_log: Vec<(usize, usize)>,
}

impl PredictorPool {
    pub fn new(streams: Vec<NatPredictionStream>, mode: AccessMode) -> Result<Self> {
        if streams.is_empty() {
            return Err(Error::Validation("predictor pool requires M >= 1".into()));
        }
        let horizon = streams[0].horizon();
        if streams.iter().any(|s| s.horizon() != horizon) {
            return Err(Error::Validation(
                "all pooled streams must share the same horizon".into(),
            ));
        }
        Ok(PredictorPool {
            streams,
            mode,
            current_round: 0,
            queries_this_round: 0,
            query_log: Vec::new(),
        })
    }

    pub fn predictor_count(&self) -> usize {
        self.streams.len()
    }

    pub fn horizon(&self) -> usize {
        self.streams.first().map_or(0, |s| s.horizon())
    }

    pub fn mode(&self) -> AccessMode {
        self.mode
    }

    /// `(predictor, round)` pairs in query order.
    pub fn query_log(&self) -> &[(usize, usize)] {
        &self.query_log
    }

    /// Queries predictor `j` (1-based) at round `t`, returning `p_t^j`.
    pub fn query(&mut self, j: usize, t: usize) -> Result<usize> {
        if j == 0 || j > self.streams.len() {
            return Err(Error::Validation(format!(
                "predictor {j} outside [1, {}]",
                self.streams.len()
            )));
        }
        if t == 0 || t > self.horizon() {
            return Err(Error::Validation(format!(
                "round {t} outside [1, {}]",
                self.horizon()
            )));
        }
        if t < self.current_round {
            return Err(Error::AccessViolation(format!(
                "round {t} already passed; predictions are revealed online"
            )));
        }
        if t > self.current_round {
            self.current_round = t;
            self.queries_this_round = 0;
        }
        if self.mode == AccessMode::Bandit && self.queries_this_round >= 1 {
            return Err(Error::AccessViolation(format!(
                "second query at round {t} under bandit access"
            )));
        }
        self.queries_this_round += 1;
        self.query_log.push((j, t));
        Ok(self.streams[j - 1].get(t))
    }
}
