//! Seeded random and low-discrepancy sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::VecN;

const PRIMES: [u64; 32] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131,
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point on the unit sphere of `R^dim`.
pub fn unit_sphere_point(rng: &mut impl Rng, dim: usize) -> VecN {
    loop {
        let v = VecN::from_iterator(dim, (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

pub fn gaussian_vector(rng: &mut impl Rng, dim: usize) -> VecN {
    VecN::from_iterator(dim, (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let mut inv_base = 1.0 / base as f64;
    let mut result = 0.0;
    while index > 0 {
        result += (index % base) as f64 * inv_base;
        index /= base;
        inv_base /= base as f64;
    }
    result
}

/// Halton sequence in `[0,1)^dim` with a seeded Cranley-Patterson shift.
#[derive(Debug, Clone)]
pub struct Halton {
    shift: Vec<f64>,
    next: u64,
}

impl Halton {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim <= PRIMES.len(), "Halton sequence supports at most {} dimensions", PRIMES.len());
        let mut r = rng(seed);
        let shift = (0..dim).map(|_| r.random::<f64>()).collect();
        // index 0 is the all-zero point; start at 1
        Self { shift, next: 1 }
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }
}

impl Iterator for Halton {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        let i = self.next;
        self.next += 1;
        Some(
            self.shift
                .iter()
                .zip(PRIMES)
                .map(|(s, b)| (radical_inverse(i, b) + s).fract())
                .collect(),
        )
    }
}
