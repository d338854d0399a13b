//! Point sources for the randomized checkers.
//!
//! Every trial gets its own RNG seeded from `(master seed, trial index)`, so
//! results do not depend on how trials are spread over worker threads.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{BoxDomain, Point};
use crate::scalar::Scalar;

/// SplitMix64 finalizer over the pair, used as the per-trial seed.
pub fn sub_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_rng(master: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sub_seed(master, index))
}

/// Produces the points a checker needs for one trial.
pub trait Sampler<T: Scalar>: Sync {
    /// Draws `arity` points for trial `index`. Implementations may ignore
    /// `rng` (fixed witness lists) but must be deterministic given it.
    fn draw(&self, domain: &BoxDomain<T>, arity: usize, index: u64, rng: &mut ChaCha8Rng) -> Vec<Point<T>>;
}

/// Independent uniform draws over the box.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformSampler;

impl<T: Scalar> Sampler<T> for UniformSampler {
    fn draw(&self, domain: &BoxDomain<T>, arity: usize, _index: u64, rng: &mut ChaCha8Rng) -> Vec<Point<T>> {
        (0..arity).map(|_| domain.sample(rng)).collect()
    }
}

/// Uniform draws restricted to the diagonal `b·e`.
#[derive(Debug, Clone, Copy, Default)]
pub struct DiagonalSampler;

impl<T: Scalar> Sampler<T> for DiagonalSampler {
    fn draw(&self, domain: &BoxDomain<T>, arity: usize, _index: u64, rng: &mut ChaCha8Rng) -> Vec<Point<T>> {
        let Some((lo, hi)) = domain.diagonal_range() else {
            return Vec::new();
        };
        (0..arity)
            .map(|_| {
                let u: f64 = rng.sample(Open01);
                Point::diagonal(domain.dim(), lo + T::lit(u) * (hi - lo))
            })
            .collect()
    }
}

/// Replays a fixed list of tuples, cycling by trial index.
#[derive(Debug, Clone)]
pub struct FixedSampler<T> {
    tuples: Vec<Vec<Point<T>>>,
}

impl<T: Scalar> FixedSampler<T> {
    pub fn new(tuples: Vec<Vec<Point<T>>>) -> Self {
        assert!(!tuples.is_empty(), "fixed sampler needs at least one tuple");
        Self { tuples }
    }

    /// Convenience for scalar (1-D) witnesses.
    pub fn scalars(tuples: &[&[f64]]) -> Self {
        Self::new(tuples.iter().map(|t| t.iter().map(|&v| Point::diagonal(1, T::lit(v))).collect()).collect())
    }
}

impl<T: Scalar> Sampler<T> for FixedSampler<T> {
    fn draw(&self, _domain: &BoxDomain<T>, arity: usize, index: u64, _rng: &mut ChaCha8Rng) -> Vec<Point<T>> {
        let tuple = &self.tuples[(index as usize) % self.tuples.len()];
        tuple.iter().take(arity).cloned().collect()
    }
}
