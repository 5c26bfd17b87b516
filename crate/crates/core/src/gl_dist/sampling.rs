//! Reproducible Gauss-Laplace variates.
//!
//! The stream is fully specified so fixtures can be regenerated elsewhere:
//!
//! * generator: xoshiro256** seeded from a `u64` through SplitMix64;
//! * uniform: `(next_u64 >> 11) · 2⁻⁵³`, in `[0, 1)`;
//! * normal: Box-Muller cosine branch, `√(−2 ln(1 − u₁)) · cos(2π u₂)`;
//! * gamma(k ≥ 1): Marsaglia-Tsang squeeze/rejection;
//! * gamma(k < 1): gamma(k + 1) · u^(1/k);
//! * variate: draw the sign (`u < 0.5` → negative), then
//!   `x = μ + σ · sign · a · G^(1/p)` with `G ~ gamma(1/p)`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use super::{GLParams, Shape};
use crate::error::{Error, Result};
use crate::exec::{map_slice, Execution};

const TWO_POW_NEG_53: f64 = 1.0 / (1u64 << 53) as f64;

/// Seedable random source behind [`sample`].
#[derive(Debug, Clone)]
pub struct GlRng {
    inner: Xoshiro256StarStar,
}

impl GlRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256StarStar::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_POW_NEG_53
    }

    pub fn standard_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Gamma variate with unit scale.
    pub fn gamma(&mut self, shape: f64) -> f64 {
        if shape < 1.0 {
            let boosted = self.gamma(shape + 1.0);
            let u = 1.0 - self.uniform();
            return boosted * u.powf(1.0 / shape);
        }
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let x = self.standard_normal();
            let v = 1.0 + c * x;
            if v <= 0.0 {
                continue;
            }
            let v = v * v * v;
            let u = self.uniform();
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 {
                return d * v;
            }
            if u > 0.0 && u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
                return d * v;
            }
        }
    }
}

/// `count` i.i.d. draws from `params`, deterministic in `seed`.
pub fn sample(params: &GLParams, count: usize, seed: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Size("sample count must be at least 1".into()));
    }
    let shape = Shape::new(params.p())?;
    let mut rng = GlRng::new(seed);
    let inv_p = 1.0 / params.p();
    let spread = params.sigma() * shape.scale();
    Ok((0..count)
        .map(|_| {
            let sign = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
            let g = rng.gamma(inv_p);
            params.mu() + sign * spread * g.powf(inv_p)
        })
        .collect())
}

/// One independent sample per seed, generated as a batch.
pub fn sample_many(
    params: &GLParams,
    count: usize,
    seeds: &[u64],
    exec: Execution,
) -> Result<Vec<Vec<f64>>> {
    map_slice(exec, seeds, |&seed| sample(params, count, seed))
        .into_iter()
        .collect()
}
