//! Seed splitting. One root seed feeds independent ChaCha streams so that,
//! for example, enabling shadowing never perturbs the generated flows.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Scenario = 0,
    Shadowing = 1,
    TieBreak = 2,
}

pub fn stream(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}
