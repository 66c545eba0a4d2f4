//! Deterministic split-stream random number generation.
//!
//! All randomness flows through ChaCha12, a counter-based stream-cipher
//! generator. A 64-bit run seed plus a component tag selects an independent
//! stream, so trace generation, error injection, learner sampling and the
//! multiplexer's coin flips never share a stream and results do not depend on
//! evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Component tags mapped to disjoint ChaCha streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Synthetic trace generation.
    TraceGen,
    /// Bandit learner arm sampling.
    Learner,
    /// Multiplexer initial draw and switching coins.
    Multiplexer,
    /// Error injection for predictor `j` (1-based).
    Injection(u32),
    /// Auxiliary draws (random initial caches in fuzz suites, ...).
    Aux(u32),
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::TraceGen => 1,
            Stream::Learner => 2,
            Stream::Multiplexer => 3,
            Stream::Injection(j) => (1 << 32) | u64::from(j),
            Stream::Aux(i) => (2 << 32) | u64::from(i),
        }
    }
}

/// Generator for `(seed, stream)`, independent of all other streams.
pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream.id());
    rng
}

/// Derives a child seed from `(seed, stream)`, for components that carry
/// their own seed field.
pub fn derive_seed(seed: u64, stream: Stream) -> u64 {
    use rand::Rng;
    stream_rng(seed, stream).random()
}
