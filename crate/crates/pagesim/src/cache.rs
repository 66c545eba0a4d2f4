//! Cache state with a lazy serve-and-evict step, and per-run reports.

use crate::error::{Error, Result};
use crate::trace::Page;

/// A set of exactly `k` distinct pages.
///
/// The page set is kept sorted so that scans over candidates are
/// deterministic and smallest-id tie-breaking falls out of iteration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheState {
    pages: Vec<Page>,
}

impl CacheState {
    /// Builds a cache from a set of distinct pages (order irrelevant).
    pub fn new(mut pages: Vec<Page>) -> Result<Self> {
        if pages.is_empty() {
            return Err(Error::Validation("cache capacity must be positive".into()));
        }
        if pages.contains(&0) {
            return Err(Error::Validation("page ids are 1-based; got 0".into()));
        }
        pages.sort_unstable();
        if pages.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation("cache pages must be distinct".into()));
        }
        Ok(CacheState { pages })
    }

    /// The default initial cache `{1, ..., k}`.
    pub fn first_k(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Validation("cache capacity must be positive".into()));
        }
        Ok(CacheState {
            pages: (1..=k as Page).collect(),
        })
    }

    pub fn capacity(&self) -> usize {
        self.pages.len()
    }

    pub fn contains(&self, page: Page) -> bool {
        self.pages.binary_search(&page).is_ok()
    }

    /// Cached pages in ascending order.
    pub fn pages(&self) -> &[Page] {
        &self.pages
    }

    /// Serves one request lazily.
    ///
    /// On a hit, `evict` must be `None` and the cache is unchanged. On a miss,
    /// `evict` must name a cached page, which is replaced by `page`. Returns
    /// whether the request missed. Cardinality is preserved and the requested
    /// page is present afterwards.
    pub fn serve(&mut self, page: Page, evict: Option<Page>) -> Result<bool> {
        match self.pages.binary_search(&page) {
            Ok(_) => {
                if let Some(e) = evict {
                    return Err(Error::Contract(format!(
                        "eviction choice {e} supplied on a hit for page {page}"
                    )));
                }
                Ok(false)
            }
            Err(insert_at) => {
                let victim = evict.ok_or_else(|| {
                    Error::Contract(format!("miss on page {page} requires an eviction choice"))
                })?;
                let victim_at = self.pages.binary_search(&victim).map_err(|_| {
                    Error::Contract(format!("eviction choice {victim} is not in the cache"))
                })?;
                self.pages.remove(victim_at);
                let insert_at = if victim_at < insert_at {
                    insert_at - 1
                } else {
                    insert_at
                };
                self.pages.insert(insert_at, page);
                Ok(true)
            }
        }
    }
}

/// Outcome of running one algorithm over one trace.
#[derive(Debug, Clone)]
pub struct RunReport {
    /// Total miss count over the real rounds.
    pub cost: usize,
    /// Per-round evicted page, `None` on hits; length `T`.
    pub evictions: Vec<Option<Page>>,
    /// Per-round miss indicator; length `T`.
    pub per_round_miss: Vec<bool>,
    /// Cache contents after round `T`.
    pub final_cache: CacheState,
}

impl RunReport {
    pub fn horizon(&self) -> usize {
        self.per_round_miss.len()
    }

    /// Internal consistency: cost equals the number of misses and evictions
    /// appear only on misses.
    pub fn is_consistent(&self) -> bool {
        self.cost == self.per_round_miss.iter().filter(|&&m| m).count()
            && self.evictions.len() == self.per_round_miss.len()
            && self
                .evictions
                .iter()
                .zip(&self.per_round_miss)
                .all(|(e, &m)| e.is_none() || m)
    }
}

/// Accumulates a [`RunReport`] round by round.
#[derive(Debug)]
pub(crate) struct ReportBuilder {
    cost: usize,
    evictions: Vec<Option<Page>>,
    per_round_miss: Vec<bool>,
}

impl ReportBuilder {
    pub(crate) fn with_capacity(horizon: usize) -> Self {
        ReportBuilder {
            cost: 0,
            evictions: Vec::with_capacity(horizon),
            per_round_miss: Vec::with_capacity(horizon),
        }
    }

    pub(crate) fn record(&mut self, miss: bool, evicted: Option<Page>) {
        debug_assert!(evicted.is_none() || miss);
        self.cost += usize::from(miss);
        self.per_round_miss.push(miss);
        self.evictions.push(evicted);
    }

    pub(crate) fn finish(self, final_cache: CacheState) -> RunReport {
        RunReport {
            cost: self.cost,
            evictions: self.evictions,
            per_round_miss: self.per_round_miss,
            final_cache,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn serve_examples() {
        let mut c = CacheState::new(vec![1, 2]).unwrap();
        assert!(!c.serve(1, None).unwrap());
        assert_eq!(c.pages(), &[1, 2]);

        assert!(c.serve(3, Some(2)).unwrap());
        assert_eq!(c.pages(), &[1, 3]);

        let mut c = CacheState::new(vec![1, 2]).unwrap();
        let err = c.serve(3, Some(3)).unwrap_err();
        assert!(matches!(err, Error::Contract(_)));
    }

    #[test]
    fn serve_contract_violations() {
        let mut c = CacheState::new(vec![1, 2]).unwrap();
        assert!(matches!(c.serve(1, Some(2)), Err(Error::Contract(_))));
        assert!(matches!(c.serve(3, None), Err(Error::Contract(_))));
        // State unchanged after failed calls.
        assert_eq!(c.pages(), &[1, 2]);
    }

    #[test]
    fn rejects_degenerate_caches() {
        assert!(CacheState::new(vec![]).is_err());
        assert!(CacheState::new(vec![1, 1]).is_err());
        assert!(CacheState::new(vec![0, 1]).is_err());
        assert!(CacheState::first_k(0).is_err());
        assert_eq!(CacheState::first_k(3).unwrap().pages(), &[1, 2, 3]);
    }

    proptest! {
        /// Laziness and cardinality across arbitrary valid call sequences.
        #[test]
        fn serve_preserves_cardinality(
            k in 1usize..6,
            requests in proptest::collection::vec((1u32..12, 0usize..6), 0..64),
        ) {
            let mut cache = CacheState::first_k(k).unwrap();
            for (page, evict_idx) in requests {
                let before = cache.clone();
                let evict = if cache.contains(page) {
                    None
                } else {
                    Some(cache.pages()[evict_idx % k])
                };
                let miss = cache.serve(page, evict).unwrap();
                prop_assert_eq!(cache.capacity(), k);
                prop_assert!(cache.contains(page));
                prop_assert_eq!(miss, !before.contains(page));
                if !miss {
                    prop_assert_eq!(&before, &cache);
                }
            }
        }
    }
}
