//! Monte-Carlo estimate of the integral representation
//!
//! ```text
//! S_n(z) = ((2r+1)n+1)! / n!^(2r+1) * z^((r+1)n+2)
//!          * int_[0,1]^(a+1) (prod x_i^r (1-x_i) / (z - prod x_i)^(2r+1))^n dx / (z - prod x_i)^2
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{factorial, ExactRational};
use crate::partial_fractions::FormParams;

pub const MIN_SAMPLES: u64 = 10_000;

/// Samples per counter-based stream. Fixed so that results do not depend
/// on how chunks are scheduled.
const CHUNK: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

#[derive(Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    // Chan et al. pairwise combination
    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2
            + other.m2
            + delta * delta * self.count as f64 * other.count as f64 / count as f64;
        Moments { count, mean, m2 }
    }
}

/// Log of the constant `((2r+1)n+1)! / n!^(2r+1) * z^((r+1)n+2)`.
fn log_prefactor(p: &FormParams, z: f64) -> f64 {
    let (r, n) = (p.r as u64, p.n as u64);
    let num = ExactRational::from_integer(factorial((2 * r + 1) * n + 1));
    let den = ExactRational::from_integer(num_traits::pow(factorial(n), (2 * r + 1) as usize));
    (num / den).log2_abs() * std::f64::consts::LN_2 + ((r + 1) * n + 2) as f64 * z.ln()
}

fn integrand(p: &FormParams, z: f64, x: &[f64]) -> f64 {
    let r = p.r as i32;
    let mut prod = 1.0;
    let mut weight = 1.0;
    for &xi in x {
        prod *= xi;
        weight *= xi.powi(r) * (1.0 - xi);
    }
    let gap = z - prod;
    (weight / gap.powi(2 * r + 1)).powi(p.n as i32) / (gap * gap)
}

fn chunk_moments(p: &FormParams, z: f64, seed: u64, stream: u64, count: u64) -> Moments {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut point = vec![0.0; p.a as usize + 1];
    let mut m = Moments::default();
    for _ in 0..count {
        for xi in point.iter_mut() {
            *xi = rng.random::<f64>();
        }
        m.push(integrand(p, z, &point));
    }
    m
}

/// Plain Monte-Carlo over `[0,1]^(a+1)`; deterministic for a fixed seed,
/// independent of the thread count.
pub fn mc_integral(
    params: &FormParams,
    z: &ExactRational,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::Domain(format!(
            "need at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    if *z < 1 {
        return Err(Error::Domain(format!(
            "integral representation needs z >= 1, got {z}"
        )));
    }
    let zf = z.to_f64();
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK.min(samples - c * CHUNK);
            chunk_moments(params, zf, seed, c, count)
        })
        .collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    let scale = log_prefactor(params, zf).exp();
    let variance = total.m2 / (total.count - 1) as f64;
    Ok(McEstimate {
        estimate: scale * total.mean,
        std_error: scale * (variance / total.count as f64).sqrt(),
        samples,
    })
}
