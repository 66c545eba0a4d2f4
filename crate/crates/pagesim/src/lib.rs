//! Trace-driven simulation of online paging with inaccurate next-arrival-time
//! predictors.
//!
//! The crate provides:
//!
//! * request traces over a page universe `[1, n]` with a deterministic
//!   virtual suffix, and exact next-arrival-time lookup ([`trace`]);
//! * the offline optimum, both as furthest-in-the-future eviction and as an
//!   exhaustive dynamic program used to validate it ([`offline`]);
//! * prediction streams (explicit pages or next arrival times), consistent
//!   derivation between the two, seeded error injection, and a pool that
//!   structurally enforces full-information or bandit access ([`predict`]);
//! * exact prediction-accuracy measures, including inversion counts and the
//!   refined error measure the cost bounds are stated in ([`metrics`]);
//! * the simulated eviction policy driven by per-page remedy predictions
//!   ([`remedy`], [`sim`]);
//! * an adversarial bandit learner ([`bandit`]) and the two multi-predictor
//!   combiners built on it: epoch-based bandit selection and a
//!   full-information weighted multiplexer ([`combine`]);
//! * synthetic workload generators, a predictor-free baseline, the
//!   coupon-collector phase experiment, and a reproducible experiment
//!   harness ([`harness`], [`experiment`], [`files`]).
//!
//! The `pagesim` binary exposes all of it on the command line.

pub mod bandit;
pub mod cache;
pub mod combine;
pub mod error;
pub mod experiment;
pub mod files;
pub mod harness;
pub mod metrics;
pub mod offline;
pub mod predict;
pub mod remedy;
pub mod rng;
pub mod sim;
pub mod trace;

pub use cache::{CacheState, RunReport};
pub use error::{Error, Result};
pub use trace::{augment_sequence, build_nat_table, NatTable, Page, RequestTrace};
