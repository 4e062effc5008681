//! Seeded randomness helpers.
//!
//! Every stochastic operation in the crate takes an explicit `u64` seed and
//! drives a ChaCha12 stream from it, so identical seeds give bit-identical
//! results on every platform. Batch operations derive one independent
//! sub-seed per item with [`derive_seed`] so items can be evaluated in any
//! order (or in parallel) without changing the outcome.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::matrix::ComplexMatrix;

/// The crate-wide generator: ChaCha12, seeded explicitly.
pub(crate) fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Deterministic per-item sub-seed: splitmix64 over the (seed, index) pair.
pub(crate) fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Complex Ginibre matrix: i.i.d. entries (x + iy)/√2 with x, y ~ N(0, 1).
pub(crate) fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha12Rng) -> ComplexMatrix {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * inv_sqrt2, im * inv_sqrt2)
    })
}
