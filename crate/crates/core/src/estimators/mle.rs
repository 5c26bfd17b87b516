use std::f64::consts::LN_2;

use super::{default_nm, FitResult, Method};
use crate::data_series::{stats, Sample};
use crate::error::Result;
use crate::gl_dist::{GLDist, GLParams, Shape};
use crate::optimizer::{nelder_mead, Objective, Transform};

/// Maximizes Σ log₂ f(xᵢ; μ, σ, p) over (μ, σ) at fixed `p`.
///
/// The objective of the result is the achieved log₂-likelihood (larger is
/// better). Starts from `init`, or from the sample mean and sd.
pub fn fit_mle(sample: &Sample, p: f64, init: Option<GLParams>) -> Result<FitResult> {
    let shape = Shape::new(p)?;
    let start = match init {
        Some(params) => params.with_p(p)?,
        None => {
            let s = stats(sample)?;
            GLParams::new(s.mean, s.sd, p)?
        }
    };
    let xs = sample.values();
    let n = xs.len() as f64;
    let objective = Objective::new(2, |v: &[f64]| {
        let (mu, sigma) = (v[0], v[1]);
        let ll: f64 = xs.iter().map(|&x| shape.ln_pdf((x - mu) / sigma)).sum();
        -(ll - n * sigma.ln()) / LN_2
    })?
    .with_transforms(&[Transform::Linear, Transform::Log])?;
    let r = nelder_mead(&objective, &[start.mu(), start.sigma()], &default_nm())?;
    let params = GLParams::new(r.argmin[0], r.argmin[1], p)?;
    Ok(FitResult {
        params,
        objective: GLDist::new(params).log2_likelihood(xs),
        method: Method::Mle,
        q: None,
        converged: r.converged,
        iterations: r.iterations,
        warnings: Vec::new(),
    })
}
