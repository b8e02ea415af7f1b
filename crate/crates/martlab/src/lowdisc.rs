//! Randomly shifted Halton points for reproducible grid scans.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u32) -> f64 {
    let bf = b as f64;
    let mut inv = 1.0 / bf;
    let mut r = 0.0;
    while i > 0 {
        r += (i % b as u64) as f64 * inv;
        i /= b as u64;
        inv /= bf;
    }
    r
}

/// Halton sequence in up to 12 dimensions, rotated modulo 1 by a
/// seed-dependent shift (Cranley–Patterson).
#[derive(Debug, Clone)]
pub struct Halton {
    shift: Vec<f64>,
}

impl Halton {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim >= 1 && dim <= PRIMES.len(), "Halton dimension 1..=12");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift = (0..dim).map(|_| rng.random::<f64>()).collect();
        Self { shift }
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    /// The `i`-th point in `[0, 1)^dim`.
    pub fn point(&self, i: u64) -> Vec<f64> {
        self.shift
            .iter()
            .zip(PRIMES)
            .map(|(s, b)| (radical_inverse(i + 1, b) + s).fract())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
    }

    #[test]
    fn points_fill_the_unit_square_evenly() {
        let h = Halton::new(2, 7);
        let n = 4096;
        let mut counts = [0usize; 16];
        for i in 0..n {
            let p = h.point(i);
            let cell = (p[0] * 4.0) as usize * 4 + (p[1] * 4.0) as usize;
            counts[cell] += 1;
        }
        for c in counts {
            assert!((c as f64 - 256.0).abs() < 8.0, "{counts:?}");
        }
    }

    #[test]
    fn same_seed_same_points() {
        let a = Halton::new(3, 11);
        let b = Halton::new(3, 11);
        assert_eq!(a.point(17), b.point(17));
    }
}
