//! Seeded random streams.
//!
//! Every random draw comes from ChaCha8 keyed by the experiment seed, with
//! the 64-bit stream id selecting what the draw is for. The stream id packs
//! `kind (2 bits) | N (14 bits) | instance (24 bits) | aux (24 bits)`, so an
//! instance depends only on `(seed, N, instance)` and never on the order in
//! which the sweep visits cells.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const MAX_COUNT: usize = 1 << 14;
pub const MAX_INSTANCES: usize = 1 << 24;
const AUX_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamKind {
    /// Ball geometry; `aux` is the regeneration attempt.
    Geometry = 0,
    /// Starting block; `aux` is β in units of 1e-7.
    Start = 1,
}

pub fn stream(seed: u64, kind: StreamKind, count: usize, instance: usize, aux: u64) -> ChaCha8Rng {
    assert!(count < MAX_COUNT && instance < MAX_INSTANCES && aux < AUX_LIMIT);
    let id = (kind as u64) << 62 | (count as u64) << 48 | (instance as u64) << 24 | aux;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Stream tag for the starting point at a given β.
pub fn beta_tag(beta: f64) -> u64 {
    (beta * 1e7).round() as u64
}
