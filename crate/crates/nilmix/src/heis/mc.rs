//! Seeded Monte-Carlo correlation on the Heisenberg nilmanifold.
//!
//! Sampling uses fixed-size batches with one counter-derived ChaCha stream
//! per batch, merged in batch order, so the estimate is bit-reproducible for
//! a given seed regardless of the worker count.

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{HeisAuto, HeisPoint, HeisTestFn};
use crate::error::{Error, Result};

const BATCH: u64 = 8192;

#[derive(Debug, Clone)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl McEstimate {
    /// Whether a reference value lies within `k` standard errors.
    pub fn within_sigma(&self, reference: f64, k: f64) -> bool {
        (self.estimate - reference).abs() <= k * self.stderr
    }
}

/// Monte-Carlo average of `prod_i f_i(reduce(word_i(x)))` over uniform
/// samples of the fundamental domain (Lebesgue = Haar in polarized
/// coordinates).
pub fn mc_correlation(
    f_list: &[HeisTestFn],
    words: &[HeisAuto],
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if f_list.is_empty() || f_list.len() != words.len() {
        return Err(Error::validation("need one automorphism word per function"));
    }
    if samples < 1_000 {
        return Err(Error::validation("at least 1000 samples required"));
    }
    let batches = samples.div_ceil(BATCH);
    let partials: Vec<(f64, f64, u64)> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b + 1);
            let uni = Uniform::new(0.0f64, 1.0);
            let count = BATCH.min(samples - b * BATCH);
            let mut sum = 0.0f64;
            let mut sumsq = 0.0f64;
            for _ in 0..count {
                let x = HeisPoint::new(
                    uni.sample(&mut rng),
                    uni.sample(&mut rng),
                    uni.sample(&mut rng),
                );
                let mut prod = 1.0f64;
                for (f, w) in f_list.iter().zip(words) {
                    let (r, _) = w.apply(&x).reduce();
                    prod *= f.eval(&r);
                    if prod == 0.0 {
                        break;
                    }
                }
                sum += prod;
                sumsq += prod * prod;
            }
            (sum, sumsq, count)
        })
        .collect();
    // fold in batch order for a schedule-independent result
    let mut sum = 0.0f64;
    let mut sumsq = 0.0f64;
    let mut n = 0u64;
    for (s, s2, c) in partials {
        sum += s;
        sumsq += s2;
        n += c;
    }
    let mean = sum / n as f64;
    let var = ((sumsq - sum * sum / n as f64) / (n as f64 - 1.0)).max(0.0);
    Ok(McEstimate { estimate: mean, stderr: (var / n as f64).sqrt(), samples: n, seed })
}
