//! Deterministic random streams.
//!
//! Every random decision in the toolkit is drawn from ChaCha8, a
//! counter-based generator. A `(seed, stream)` pair selects an independent
//! keystream, so instance classes, solver copies, shuffles and experiments
//! never share randomness and results do not depend on scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream ids reserved for instance generation.
pub mod streams {
    /// Shared by RAN1 and AC3 so that their signs agree edge by edge.
    pub const BIMODAL: u64 = 0x5241_4e31;
    pub const DCL: u64 = 0x4443_4c00;
}

/// Generator for stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Child seed for stream `stream` under `seed`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    stream_rng(seed, stream).next_u64()
}

/// Child seed along a path of stream ids.
pub fn derive_path(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(seed, |s, &p| derive_seed(s, p))
}
