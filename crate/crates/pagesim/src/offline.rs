//! The offline optimum two ways: furthest-in-the-future eviction (Belady's
//! rule) and an exhaustive dynamic program over cache configurations used as
//! an independent correctness oracle.

use std::collections::HashMap;

use crate::cache::{CacheState, ReportBuilder, RunReport};
use crate::error::{Error, Result};
use crate::trace::{NatTable, Page, RequestTrace};

/// Exact offline cost, with an eviction-schedule witness when produced by the
/// furthest-in-the-future run.
#[derive(Debug, Clone)]
pub struct OptReport {
    pub cost: usize,
    pub witness: Option<Vec<Option<Page>>>,
}

fn validate_run_inputs(trace: &RequestTrace, k: usize, initial: &CacheState) -> Result<()> {
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
    Ok(())
}

/// Runs furthest-in-the-future eviction: on each miss, evict the cached page
/// whose next arrival is latest, ties broken by smallest page id.
///
/// Distinct pages never share a next-arrival round, so the tie rule is
/// vacuous in practice and the run is fully deterministic.
pub fn fitf_run(
    trace: &RequestTrace,
    nat: &NatTable,
    k: usize,
    initial: &CacheState,
) -> Result<RunReport> {
    validate_run_inputs(trace, k, initial)?;
    let mut cache = initial.clone();
    // Next arrival of each cached page, kept current as requests are served.
    let mut arrival: Vec<usize> = vec![0; trace.universe() as usize + 1];
    for &p in cache.pages() {
        arrival[p as usize] = nat.lookup(0, p);
    }

    let mut report = ReportBuilder::with_capacity(trace.horizon());
    for t in 1..=trace.horizon() {
        let page = trace.request(t);
        let evicted = if cache.contains(page) {
            None
        } else {
            let victim = cache
                .pages()
                .iter()
                .copied()
                .max_by_key(|&p| (arrival[p as usize], std::cmp::Reverse(p)))
                .expect("cache is never empty");
            Some(victim)
        };
        let miss = cache.serve(page, evicted)?;
        arrival[page as usize] = nat.next_of_requested(t);
        report.record(miss, evicted);
    }
    Ok(report.finish(cache))
}

/// Furthest-in-the-future cost with its eviction schedule as a witness.
pub fn fitf_opt_report(
    trace: &RequestTrace,
    nat: &NatTable,
    k: usize,
    initial: &CacheState,
) -> Result<OptReport> {
    let report = fitf_run(trace, nat, k, initial)?;
    Ok(OptReport {
        cost: report.cost,
        witness: Some(report.evictions),
    })
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Guard for the exhaustive oracle: `C(n, k) * T <= 10^7`.
const DP_GUARD: u128 = 10_000_000;

/// Exact minimum miss count over all lazy eviction schedules, by forward
/// dynamic programming over reachable cache configurations.
///
/// This is the independent oracle backing Belady's theorem; it intentionally
/// shares no code with [`fitf_run`]. Guarded by `C(n, k) * T <= 10^7`.
pub fn dp_opt(trace: &RequestTrace, k: usize, initial: &CacheState) -> Result<OptReport> {
    validate_run_inputs(trace, k, initial)?;
    let n = trace.universe() as usize;
    let states = binomial(n, k);
    if states.saturating_mul(trace.horizon() as u128) > DP_GUARD {
        return Err(Error::InstanceTooLarge(format!(
            "C({n}, {k}) * T = {} exceeds {DP_GUARD}",
            states.saturating_mul(trace.horizon() as u128)
        )));
    }

    let mut frontier: HashMap<Vec<Page>, usize> = HashMap::new();
    frontier.insert(initial.pages().to_vec(), 0);

    for t in 1..=trace.horizon() {
        let page = trace.request(t);
        let mut next: HashMap<Vec<Page>, usize> = HashMap::with_capacity(frontier.len());
        for (config, cost) in frontier {
            if config.binary_search(&page).is_ok() {
                merge_min(&mut next, config, cost);
            } else {
                for victim_at in 0..config.len() {
                    let mut cfg = config.clone();
                    cfg.remove(victim_at);
                    let at = cfg.partition_point(|&p| p < page);
                    cfg.insert(at, page);
                    merge_min(&mut next, cfg, cost + 1);
                }
            }
        }
        frontier = next;
    }

    let cost = frontier.into_values().min().unwrap_or(0);
    Ok(OptReport {
        cost,
        witness: None,
    })
}

fn merge_min(map: &mut HashMap<Vec<Page>, usize>, key: Vec<Page>, cost: usize) {
    map.entry(key)
        .and_modify(|c| *c = (*c).min(cost))
        .or_insert(cost);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{augment_sequence, build_nat_table};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn fitf(raw: &[Page], n: Page, k: usize, initial: &[Page]) -> RunReport {
        let tr = augment_sequence(raw, n).unwrap();
        let nat = build_nat_table(&tr);
        fitf_run(&tr, &nat, k, &CacheState::new(initial.to_vec()).unwrap()).unwrap()
    }

    fn dp(raw: &[Page], n: Page, k: usize, initial: &[Page]) -> usize {
        let tr = augment_sequence(raw, n).unwrap();
        dp_opt(&tr, k, &CacheState::new(initial.to_vec()).unwrap())
            .unwrap()
            .cost
    }

    #[test]
    fn fitf_examples() {
        assert_eq!(fitf(&[1, 1], 3, 2, &[1, 2]).cost, 0);

        let report = fitf(&[1, 2, 3, 1], 3, 2, &[1, 2]);
        assert_eq!(report.cost, 1);
        assert_eq!(report.evictions[2], Some(2)); // A(3,2)=6 > A(3,1)=4
        assert_eq!(dp(&[1, 2, 3, 1], 3, 2, &[1, 2]), 1);

        assert_eq!(fitf(&[1, 2, 3, 2, 1], 3, 2, &[1, 2]).cost, 2);
        assert_eq!(dp(&[1, 2, 3, 2, 1], 3, 2, &[1, 2]), 2);
    }

    #[test]
    fn dp_examples() {
        assert_eq!(dp(&[1, 2, 3, 1], 3, 2, &[1, 2]), 1);
        // Any trace whose distinct pages are contained in the initial cache.
        assert_eq!(dp(&[1, 2, 2, 1, 1], 3, 2, &[1, 2]), 0);
        assert_eq!(fitf(&[1, 2, 2, 1, 1], 3, 2, &[1, 2]).cost, 0);
    }

    #[test]
    fn dp_guard_rejects_large_instances() {
        let raw: Vec<Page> = (0..4000).map(|i| (i % 24) + 1).collect();
        let tr = augment_sequence(&raw, 24).unwrap();
        let err = dp_opt(&tr, 12, &CacheState::first_k(12).unwrap()).unwrap_err();
        assert!(matches!(err, Error::InstanceTooLarge(_)));
    }

    #[test]
    fn empty_horizon_costs_zero() {
        let report = fitf(&[], 3, 2, &[1, 2]);
        assert_eq!(report.cost, 0);
        assert_eq!(report.horizon(), 0);
        assert_eq!(dp(&[], 3, 2, &[1, 2]), 0);
    }

    #[test]
    fn fitf_witness_replays_to_its_cost() {
        let raw = [1, 2, 3, 1, 4, 2, 3, 4, 1];
        let tr = augment_sequence(&raw, 4).unwrap();
        let nat = build_nat_table(&tr);
        let initial = CacheState::first_k(2).unwrap();
        let opt = fitf_opt_report(&tr, &nat, 2, &initial).unwrap();
        let witness = opt.witness.unwrap();

        let mut cache = initial;
        let mut cost = 0;
        for t in 1..=tr.horizon() {
            cost += usize::from(cache.serve(tr.request(t), witness[t - 1]).unwrap());
        }
        assert_eq!(cost, opt.cost);
    }

    /// DP over configurations, but allowing voluntary prefetches on any round
    /// (cost one per fetched page). Used to check that restricting to lazy
    /// schedules is lossless.
    fn dp_opt_with_prefetch(trace: &RequestTrace, k: usize, initial: &CacheState) -> usize {
        // Enumerate all k-subsets of [1, n].
        let n = trace.universe();
        let mut configs: Vec<Vec<Page>> = Vec::new();
        let mut pick: Vec<Page> = Vec::new();
        fn rec(start: Page, n: Page, k: usize, pick: &mut Vec<Page>, out: &mut Vec<Vec<Page>>) {
            if pick.len() == k {
                out.push(pick.clone());
                return;
            }
            for p in start..=n {
                pick.push(p);
                rec(p + 1, n, k, pick, out);
                pick.pop();
            }
        }
        rec(1, n, k, &mut pick, &mut configs);

        let fetched = |from: &[Page], to: &[Page]| -> usize {
            to.iter().filter(|p| !from.contains(p)).count()
        };

        let mut best: HashMap<Vec<Page>, usize> = HashMap::new();
        best.insert(initial.pages().to_vec(), 0);
        for t in 1..=trace.horizon() {
            let page = trace.request(t);
            let mut next: HashMap<Vec<Page>, usize> = HashMap::new();
            for (config, cost) in &best {
                for target in &configs {
                    if target.binary_search(&page).is_err() {
                        continue;
                    }
                    merge_min(&mut next, target.clone(), cost + fetched(config, target));
                }
            }
            best = next;
        }
        best.into_values().min().unwrap_or(0)
    }

    #[test]
    fn lazy_schedules_are_lossless() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for _ in 0..150 {
            let n: Page = rng.random_range(3..=5);
            let k = rng.random_range(1..=2.min(n as usize - 1));
            let t_len = rng.random_range(0..=8);
            let raw: Vec<Page> = (0..t_len).map(|_| rng.random_range(1..=n)).collect();
            let tr = augment_sequence(&raw, n).unwrap();
            let initial = CacheState::first_k(k).unwrap();
            let lazy = dp_opt(&tr, k, &initial).unwrap().cost;
            let general = dp_opt_with_prefetch(&tr, k, &initial);
            assert_eq!(lazy, general, "raw={raw:?} n={n} k={k}");
        }
    }

    proptest! {
        /// Belady optimality on random small instances (the full-size suite
        /// lives in the acceptance tests).
        #[test]
        fn fitf_matches_dp(
            n in 3u32..7,
            t_len in 0usize..12,
            seed in any::<u64>(),
        ) {
            let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
            let k = rng.random_range(1..=3.min(n as usize - 1));
            let raw: Vec<Page> = (0..t_len).map(|_| rng.random_range(1..=n)).collect();
            let tr = augment_sequence(&raw, n).unwrap();
            let nat = build_nat_table(&tr);
            let initial = CacheState::first_k(k).unwrap();
            let fitf_cost = fitf_run(&tr, &nat, k, &initial).unwrap().cost;
            let dp_cost = dp_opt(&tr, k, &initial).unwrap().cost;
            prop_assert_eq!(fitf_cost, dp_cost);
        }
    }
}
