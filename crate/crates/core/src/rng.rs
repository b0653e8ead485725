//! Reproducible random streams.
//!
//! Every Monte-Carlo routine draws from `ChaCha8Rng` seeded with a 64-bit
//! seed and split into fixed-size chunks, each on its own stream. Chunks are
//! evaluated in parallel but reduced in chunk order, so results do not depend
//! on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Name recorded in reports.
pub const GENERATOR: &str = "chacha8";

/// Samples per stream.
pub const CHUNK: usize = 1024;

pub fn stream(seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| StandardNormal.sample(rng)).collect()
}

/// `samples` values of `f`, sample `i` drawn from stream `i / CHUNK` of
/// `seed`. The output order is fixed.
pub fn sample_values<F>(seed: u64, samples: usize, f: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed, c as u64);
            let n = CHUNK.min(samples - c * CHUNK);
            (0..n).map(|_| f(&mut rng)).collect()
        })
        .collect();
    parts.concat()
}

/// Mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub n: usize,
}

impl Estimate {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self { mean: f64::NAN, se: f64::NAN, n };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            mean,
            se: (var / n as f64).sqrt(),
            n,
        }
    }

    /// `|mean − target| ≤ k · se`, with a floor for zero-variance samples.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.se + 1e-12 * (1.0 + target.abs())
    }
}

pub fn mc_mean<F>(seed: u64, samples: usize, f: F) -> Estimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    Estimate::from_values(&sample_values(seed, samples, f))
}
