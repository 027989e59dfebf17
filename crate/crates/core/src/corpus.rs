//! Seeded random band-limited fields used by the verification suite and tests.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::Field;
use crate::grid::Grid1D;

/// Highest box mode in the default corpora.
pub const DEFAULT_MAX_MODE: usize = 6;

/// Generator of trigonometric polynomials `Σ_{k≤K} (a_k cos + b_k sin)(2πkx/P) / (1+k²)`
/// with coefficients uniform in `[-1, 1]`.
pub struct BandLimitedCorpus {
    rng: ChaCha8Rng,
    max_mode: usize,
}

impl BandLimitedCorpus {
    pub fn new(seed: u64) -> Self {
        Self::with_max_mode(seed, DEFAULT_MAX_MODE)
    }

    pub fn with_max_mode(seed: u64, max_mode: usize) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            max_mode,
        }
    }

    pub fn sample(&mut self, grid: &Grid1D) -> Field {
        let coeffs: Vec<(f64, f64)> = (0..=self.max_mode)
            .map(|k| {
                let damp = 1.0 / (1.0 + (k * k) as f64);
                let a = self.rng.random_range(-1.0..=1.0) * damp;
                let b = if k == 0 {
                    0.0
                } else {
                    self.rng.random_range(-1.0..=1.0) * damp
                };
                (a, b)
            })
            .collect();
        let w = 2.0 * PI / grid.extent();
        Field::from_fn(grid, |x| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, (a, b))| {
                    let t = w * k as f64 * x;
                    a * t.cos() + b * t.sin()
                })
                .sum()
        })
    }

    /// A band-limited field shifted so its node minimum is zero.
    pub fn sample_nonnegative(&mut self, grid: &Grid1D) -> Field {
        let f = self.sample(grid);
        let lo = f.min();
        f.map(|v| v - lo)
    }

    pub fn batch(&mut self, grid: &Grid1D, count: usize) -> Vec<Field> {
        (0..count).map(|_| self.sample(grid)).collect()
    }
}
