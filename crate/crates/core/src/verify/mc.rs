//! Monte Carlo estimate of `E ∏ fᵢ(Xᵢ)`.
//!
//! Samples are drawn as `x = L z` with `L` the Cholesky factor of `C` and
//! `z` standard normal. The sample budget is split into fixed chunks of
//! [`CHUNK_SAMPLES`]; chunk `k` draws from ChaCha8 seeded with `seed` on
//! stream `k`. Chunk statistics are merged in chunk order, so the result is
//! a pure function of `(C, fs, samples, seed)` whether or not the chunks are
//! evaluated concurrently.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::TestFunction;
use crate::decouple::GaussianVector;
use crate::error::{Error, Result};

pub const CHUNK_SAMPLES: usize = 1 << 16;
pub const MIN_SAMPLES: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Count, mean and centered sum of squares.
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.count += 1.0;
        let delta = v - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (v - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0.0 {
            return other;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + delta * other.count / count,
            m2: self.m2 + other.m2 + delta * delta * self.count * other.count / count,
        }
    }
}

fn run_chunk(x: &GaussianVector, fs: &[TestFunction], seed: u64, chunk: u64, len: usize) -> Moments {
    let n = x.n();
    let l = x.cholesky();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut z = vec![0.0; n];
    let mut xs = vec![0.0; n];
    let mut acc = Moments::default();
    for _ in 0..len {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(&mut rng);
        }
        l.mul_lower(&z, &mut xs);
        let mut prod = 1.0;
        for (f, &xi) in fs.iter().zip(&xs) {
            prod *= f.eval(xi);
            if prod == 0.0 {
                break;
            }
        }
        acc.push(prod);
    }
    acc
}

pub fn mc_expectation(x: &GaussianVector, fs: &[TestFunction], samples: usize, seed: u64) -> Result<McEstimate> {
    if fs.len() != x.n() {
        return Err(Error::DimensionMismatch(fs.len(), x.n()));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    for f in fs {
        f.validate()?;
    }

    let chunks = samples.div_ceil(CHUNK_SAMPLES);
    let total = (0..chunks)
        .map(|k| {
            let len = CHUNK_SAMPLES.min(samples - k * CHUNK_SAMPLES);
            run_chunk(x, fs, seed, k as u64, len)
        })
        .fold(Moments::default(), Moments::merge);

    let var = total.m2 / (total.count - 1.0);
    Ok(McEstimate { mean: total.mean, stderr: (var / total.count).sqrt(), samples })
}
