//! Seeding conventions and the few samplers shared across modules.
//!
//! Every random stage draws from a `ChaCha8Rng` whose seed is derived from a
//! master seed and a stage label:
//!
//! ```text
//! sub_seed(master, label) = splitmix64(master XOR fnv1a64(label))
//! ```
//!
//! Large Monte-Carlo loops are split into fixed-size chunks; chunk `c` uses
//! the stage seed with ChaCha stream `c`. Results are therefore independent
//! of the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Number of draws per independent stream in chunked Monte-Carlo loops.
pub const CHUNK_SIZE: usize = 4096;

fn fnv1a64(label: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in label.bytes() {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the seed of a named stage from a master seed.
pub fn sub_seed(master: u64, label: &str) -> u64 {
    splitmix64(master ^ fnv1a64(label))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// RNG for chunk `chunk` of a chunked loop seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Fills `out` with independent standard normal variates.
pub fn fill_standard_normal<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    for v in out.iter_mut() {
        *v = rng.sample(StandardNormal);
    }
}

/// Draws a point uniformly distributed in the `n`-ball of radius `radius`.
pub fn uniform_in_ball<R: Rng + ?Sized>(rng: &mut R, n: usize, radius: f64) -> Vec<f64> {
    let mut u = vec![0.0; n];
    loop {
        fill_standard_normal(rng, &mut u);
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            let r = radius * rng.random::<f64>().powf(1.0 / n as f64);
            for v in u.iter_mut() {
                *v *= r / norm;
            }
            return u;
        }
    }
}

/// Splits `total` draws into `(chunk index, chunk length)` pairs.
pub fn chunks(total: usize) -> impl Iterator<Item = (usize, usize)> {
    let n_chunks = total.div_ceil(CHUNK_SIZE);
    (0..n_chunks).map(move |c| (c, CHUNK_SIZE.min(total - c * CHUNK_SIZE)))
}
