//! Factor matrices and their random initialization.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The two dense nonnegative factor matrices, both `n×K`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    pub x: Array2<f64>,
    pub y: Array2<f64>,
}

impl FactorPair {
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn k(&self) -> usize {
        self.x.ncols()
    }
}

/// Draw both factors entrywise from the open interval `(0, init_scale)`.
///
/// Uses ChaCha8 seeded from `seed`, a fixed algorithm with a portable
/// stream, so a seed maps to the same matrices on every platform. X is
/// filled row-major first, then Y from the same stream.
pub fn init_factors(n: usize, k: usize, seed: u64, init_scale: f64) -> FactorPair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |_| {
        loop {
            let u: f64 = rng.random(); // [0, 1); reject the single zero value
            if u > 0.0 {
                return u * init_scale;
            }
        }
    };
    let x = Array2::from_shape_fn((n, k), &mut draw);
    let y = Array2::from_shape_fn((n, k), &mut draw);
    FactorPair { x, y }
}
