//! Request traces and next-arrival-time lookup.
//!
//! A trace over a page universe `[1, n]` holds `T` real requests followed by
//! a deterministic virtual suffix of `n` requests with `requests[T + i] = i`.
//! The suffix guarantees that every page has a next arrival after every real
//! round, which keeps next-arrival times total.
//!
//! Pages are 1-based integers in `[1, n]`; rounds are 1-based in `[1, T]`
//! (suffix rounds occupy `(T, T + n]`).

use crate::error::{Error, Result};

/// Page identifier, 1-based in `[1, n]`.
pub type Page = u32;

/// A request sequence with its virtual suffix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequestTrace {
    universe: Page,
    horizon: usize,
    /// Length `horizon + universe`; the last `universe` entries are the suffix.
    requests: Vec<Page>,
}

impl RequestTrace {
    /// Page-universe size `n`.
    pub fn universe(&self) -> Page {
        self.universe
    }

    /// Number of real rounds `T`.
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Total length `T + n` including the suffix.
    pub fn total_len(&self) -> usize {
        self.requests.len()
    }

    /// Request at round `t`, 1-based, valid for `t` in `[1, T + n]`.
    pub fn request(&self, t: usize) -> Page {
        self.requests[t - 1]
    }

    /// The real requests, without the suffix.
    pub fn real_requests(&self) -> &[Page] {
        &self.requests[..self.horizon]
    }

    /// All requests including the suffix.
    pub fn requests(&self) -> &[Page] {
        &self.requests
    }
}

/// Builds a trace from raw requests, appending the forced suffix.
///
/// Requires `n >= 2` and every raw entry in `[1, n]`. `T = raw.len()` may be
/// zero; the result then consists of the suffix alone.
pub fn augment_sequence(raw: &[Page], n: Page) -> Result<RequestTrace> {
    if n < 2 {
        return Err(Error::Validation(format!(
            "page universe must have n >= 2, got {n}"
        )));
    }
    if let Some((t, &p)) = raw.iter().enumerate().find(|&(_, &p)| p < 1 || p > n) {
        return Err(Error::Validation(format!(
            "request at round {} is {p}, outside [1, {n}]",
            t + 1
        )));
    }
    let mut requests = Vec::with_capacity(raw.len() + n as usize);
    requests.extend_from_slice(raw);
    requests.extend(1..=n);
    Ok(RequestTrace {
        universe: n,
        horizon: raw.len(),
        requests,
    })
}

/// Next-arrival-time lookup for one trace.
///
/// `A(t, i)` is the first round after `t` at which page `i` is requested;
/// the suffix guarantees `t < A(t, i) <= T + n` for every `t` in `[1, T]`.
/// The per-round values `A(t, sigma_t)` for the just-requested page are
/// materialized in one backward pass; arbitrary `(t, i)` queries binary-search
/// per-page occurrence lists. Both structures cost `O(T + n)` space.
#[derive(Debug, Clone)]
pub struct NatTable {
    horizon: usize,
    universe: Page,
    /// `next_of_request[t - 1] = A(t, sigma_t)` for `t` in `[1, T]`.
    next_of_request: Vec<usize>,
    /// Ascending occurrence rounds per page, suffix included.
    occurrences: Vec<Vec<usize>>,
}

impl NatTable {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn universe(&self) -> Page {
        self.universe
    }

    /// `A(t, sigma_t)` for `t` in `[1, T]`.
    pub fn next_of_requested(&self, t: usize) -> usize {
        self.next_of_request[t - 1]
    }

    /// `A(t, page)`: first round after `t` requesting `page`.
    ///
    /// Valid for `t` in `[0, T]` (with `t = 0` giving the first occurrence)
    /// and any page in `[1, n]`.
    pub fn lookup(&self, t: usize, page: Page) -> usize {
        let occ = &self.occurrences[page as usize - 1];
        let idx = occ.partition_point(|&r| r <= t);
        occ[idx]
    }
}

/// Builds the NAT table for `trace`.
pub fn build_nat_table(trace: &RequestTrace) -> NatTable {
    let n = trace.universe() as usize;
    let total = trace.total_len();
    let horizon = trace.horizon();

    let mut next_seen = vec![usize::MAX; n];
    let mut next_of_request = vec![0usize; horizon];
    for t in (1..=total).rev() {
        let page = trace.request(t) as usize - 1;
        if t <= horizon {
            next_of_request[t - 1] = next_seen[page];
        }
        next_seen[page] = t;
    }

    let mut occurrences = vec![Vec::new(); n];
    for t in 1..=total {
        occurrences[trace.request(t) as usize - 1].push(t);
    }

    NatTable {
        horizon,
        universe: trace.universe(),
        next_of_request,
        occurrences,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Quadratic scan oracle for `A(t, i)`.
    fn next_occurrence_scan(trace: &RequestTrace, t: usize, page: Page) -> usize {
        (t + 1..=trace.total_len())
            .find(|&r| trace.request(r) == page)
            .expect("suffix guarantees an occurrence")
    }

    #[test]
    fn augment_appends_forced_suffix() {
        let tr = augment_sequence(&[2, 1], 3).unwrap();
        assert_eq!(tr.requests(), &[2, 1, 1, 2, 3]);
        assert_eq!(tr.horizon(), 2);

        let tr = augment_sequence(&[], 2).unwrap();
        assert_eq!(tr.requests(), &[1, 2]);
        assert_eq!(tr.horizon(), 0);

        let tr = augment_sequence(&[3, 3, 3], 3).unwrap();
        assert_eq!(tr.requests(), &[3, 3, 3, 1, 2, 3]);
    }

    #[test]
    fn augment_rejects_bad_input() {
        assert!(augment_sequence(&[1, 4], 3).unwrap_err().is_validation());
        assert!(augment_sequence(&[0], 3).unwrap_err().is_validation());
        assert!(augment_sequence(&[1], 1).unwrap_err().is_validation());
    }

    #[test]
    fn nat_examples() {
        // requests = [1, 2, 1, 1, 2]
        let tr = augment_sequence(&[1, 2, 1], 2).unwrap();
        let nat = build_nat_table(&tr);
        assert_eq!(next_occurrence_scan(&tr, 1, 1), 3);
        assert_eq!(nat.lookup(1, 1), 3);
        assert_eq!(nat.lookup(3, 1), 4);
        assert_eq!(next_occurrence_scan(&tr, 2, 2), 5);
        assert_eq!(nat.lookup(2, 2), 5);
        assert_eq!(nat.next_of_requested(1), 3);
        assert_eq!(nat.next_of_requested(2), 5);
        assert_eq!(nat.next_of_requested(3), 4);
    }

    proptest! {
        #[test]
        fn suffix_law_holds(n in 2u32..9, raw in proptest::collection::vec(1u32..9, 0..64)) {
            let raw: Vec<Page> = raw.into_iter().map(|p| (p - 1) % n + 1).collect();
            let tr = augment_sequence(&raw, n).unwrap();
            let t_max = tr.horizon();
            for i in 1..=n {
                prop_assert_eq!(tr.request(t_max + i as usize), i);
            }
            for t in 1..=tr.total_len() {
                let p = tr.request(t);
                prop_assert!((1..=n).contains(&p));
            }
        }

        #[test]
        fn nat_matches_quadratic_oracle(n in 2u32..7, raw in proptest::collection::vec(1u32..7, 0..200)) {
            let raw: Vec<Page> = raw.into_iter().map(|p| (p - 1) % n + 1).collect();
            let tr = augment_sequence(&raw, n).unwrap();
            let nat = build_nat_table(&tr);
            for t in 1..=tr.horizon() {
                for i in 1..=n {
                    let a = nat.lookup(t, i);
                    prop_assert_eq!(a, next_occurrence_scan(&tr, t, i));
                    prop_assert!(a > t && a <= tr.total_len());
                    prop_assert_eq!(tr.request(a), i);
                    for mid in t + 1..a {
                        prop_assert_ne!(tr.request(mid), i);
                    }
                }
                prop_assert_eq!(nat.next_of_requested(t), nat.lookup(t, tr.request(t)));
            }
        }
    }
}
