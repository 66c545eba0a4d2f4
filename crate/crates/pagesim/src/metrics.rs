//! Prediction-accuracy measures, computed exactly.
//!
//! For a pair of rounds `{t, t'}` with `A(t, sigma_t) < A(t', sigma_t')`, the
//! pair is *inverted* when `p_t >= p_t'` (ties on the predicted side count).
//! True arrivals are occurrence indices of a single augmented sequence, so
//! they are distinct across rounds and the role assignment is unambiguous.
//!
//! The production path runs in `O(T log T)`; the quadratic pair enumerator
//! [`compute_metrics_naive`] is retained as the independent reference and is
//! what the test suites compare against.

use crate::error::{Error, Result};
use crate::predict::{ExplicitPredictionStream, NatPredictionStream};
use crate::trace::{NatTable, RequestTrace};

/// All five accuracy measures for one NAT stream. Suffix rounds never
/// contribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricsReport {
    /// Rounds with `p_t != A(t, sigma_t)`.
    pub error_rounds: u64,
    /// Inverted pairs, counted as unordered pairs.
    pub inverted_pairs: u64,
    /// Rounds participating in at least one inverted pair.
    pub inverted_rounds: u64,
    /// Rounds with an error that also participate in an inverted pair; the
    /// refined error measure used by the cost bounds.
    pub eta_refined: u64,
    /// `sum_t |p_t - A(t, sigma_t)|`.
    pub l1: u64,
}

fn check_lengths(trace: &RequestTrace, stream: &NatPredictionStream) -> Result<()> {
    if stream.horizon() != trace.horizon() {
        return Err(Error::Validation(format!(
            "stream has {} rounds, trace has {}",
            stream.horizon(),
            trace.horizon()
        )));
    }
    Ok(())
}

/// Computes all measures in `O(T log T)`.
pub fn compute_metrics(
    trace: &RequestTrace,
    nat: &NatTable,
    stream: &NatPredictionStream,
) -> Result<MetricsReport> {
    check_lengths(trace, stream)?;
    let t_len = trace.horizon();
    let truths: Vec<usize> = (1..=t_len).map(|t| nat.next_of_requested(t)).collect();
    let preds = stream.values();

    let mut error = vec![false; t_len];
    let mut error_rounds = 0u64;
    let mut l1 = 0u64;
    for t in 0..t_len {
        if preds[t] != truths[t] {
            error[t] = true;
            error_rounds += 1;
        }
        l1 += truths[t].abs_diff(preds[t]) as u64;
    }

    // Order rounds by true arrival (distinct by construction). A round is in
    // an inverted pair iff some later-arrival round predicts no later than it,
    // or some earlier-arrival round predicts no earlier: prefix maxima and
    // suffix minima of the predictions in arrival order decide both at once.
    let mut order: Vec<usize> = (0..t_len).collect();
    order.sort_unstable_by_key(|&i| truths[i]);

    let mut suffix_min = vec![usize::MAX; t_len + 1];
    for idx in (0..t_len).rev() {
        suffix_min[idx] = suffix_min[idx + 1].min(preds[order[idx]]);
    }
    let mut inverted_rounds = 0u64;
    let mut eta_refined = 0u64;
    let mut prefix_max = 0usize;
    for idx in 0..t_len {
        let round = order[idx];
        let p = preds[round];
        let in_inversion = (idx > 0 && prefix_max >= p) || suffix_min[idx + 1] <= p;
        if in_inversion {
            inverted_rounds += 1;
            if error[round] {
                eta_refined += 1;
            }
        }
        prefix_max = prefix_max.max(p);
    }

    // Pair count: in arrival order, pairs (i, j) with i < j and p_i >= p_j.
    let mut ranked: Vec<usize> = preds.to_vec();
    ranked.sort_unstable();
    ranked.dedup();
    let mut bit = BitTree::new(ranked.len());
    let mut inverted_pairs = 0u64;
    for (idx, &round) in order.iter().enumerate() {
        let rank = ranked.partition_point(|&v| v < preds[round]);
        // Previous entries with a strictly smaller prediction are the only
        // non-inverted partners.
        inverted_pairs += idx as u64 - bit.prefix_count(rank);
        bit.add(rank);
    }

    Ok(MetricsReport {
        error_rounds,
        inverted_pairs,
        inverted_rounds,
        eta_refined,
        l1,
    })
}

/// Quadratic reference implementation enumerating every pair.
pub fn compute_metrics_naive(
    trace: &RequestTrace,
    nat: &NatTable,
    stream: &NatPredictionStream,
) -> Result<MetricsReport> {
    check_lengths(trace, stream)?;
    let t_len = trace.horizon();
    let truths: Vec<usize> = (1..=t_len).map(|t| nat.next_of_requested(t)).collect();
    let preds = stream.values();

    let mut error_rounds = 0u64;
    let mut l1 = 0u64;
    for t in 0..t_len {
        error_rounds += u64::from(preds[t] != truths[t]);
        l1 += truths[t].abs_diff(preds[t]) as u64;
    }

    let mut in_inversion = vec![false; t_len];
    let mut inverted_pairs = 0u64;
    for a in 0..t_len {
        for b in a + 1..t_len {
            // The round with the strictly smaller true arrival plays `t`.
            let (t, u) = if truths[a] < truths[b] { (a, b) } else { (b, a) };
            if preds[t] >= preds[u] {
                inverted_pairs += 1;
                in_inversion[a] = true;
                in_inversion[b] = true;
            }
        }
    }
    let inverted_rounds = in_inversion.iter().filter(|&&x| x).count() as u64;
    let eta_refined = (0..t_len)
        .filter(|&t| in_inversion[t] && preds[t] != truths[t])
        .count() as u64;

    Ok(MetricsReport {
        error_rounds,
        inverted_pairs,
        inverted_rounds,
        eta_refined,
        l1,
    })
}

/// Cumulative explicit error `|{t : pi_t != sigma_t}|`, suffix excluded.
pub fn compute_explicit_error(
    explicit: &ExplicitPredictionStream,
    trace: &RequestTrace,
) -> Result<u64> {
    if explicit.horizon() != trace.horizon() {
        return Err(Error::Validation(format!(
            "explicit stream has {} rounds, trace has {}",
            explicit.horizon(),
            trace.horizon()
        )));
    }
    Ok((1..=trace.horizon())
        .filter(|&t| explicit.page(t) != trace.request(t))
        .count() as u64)
}

/// Fenwick tree counting inserted ranks.
struct BitTree {
    tree: Vec<u64>,
}

impl BitTree {
    fn new(len: usize) -> Self {
        BitTree {
            tree: vec![0; len + 1],
        }
    }

    fn add(&mut self, rank: usize) {
        let mut i = rank + 1;
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Count of inserted ranks strictly below `rank`.
    fn prefix_count(&self, rank: usize) -> u64 {
        let mut acc = 0;
        let mut i = rank;
        while i > 0 {
            acc += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        acc
    }
}
