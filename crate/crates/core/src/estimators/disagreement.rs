use super::{default_nm, FitResult, Method, QTag};
use crate::data_series::FreqSeries;
use crate::error::{Error, Result};
use crate::gl_dist::{GLDist, GLParams, Shape};
use crate::optimizer::{nelder_mead, Objective, Transform};

/// Σ |yᵢ − fᵢ|^p / fᵢ^q with fᵢ = mass · pdf(xᵢ). May be +∞.
pub(crate) fn disagreement_sum(
    x: &[f64],
    y: &[f64],
    mass: f64,
    dist: &GLDist,
    p: f64,
    q: f64,
) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let f = mass * dist.pdf(xi);
            let num = (yi - f).abs().powf(p);
            if q == 0.0 {
                num
            } else {
                num / f.powf(q)
            }
        })
        .sum()
}

/// Disagreement S(p, q) between observed and expected frequencies.
pub fn disagreement(fs: &FreqSeries, params: &GLParams, p: f64, q: QTag) -> Result<f64> {
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::Domain {
            func: "disagreement",
            msg: format!("exponent p must be finite and > 0, got {p}"),
        });
    }
    let dist = GLDist::new(*params);
    let s = disagreement_sum(
        fs.x(),
        fs.y(),
        fs.n_total() * fs.cell_width(),
        &dist,
        p,
        q.resolve(p),
    );
    if s.is_finite() {
        Ok(s)
    } else {
        Err(Error::Overflow(format!(
            "S(p={p}, q={q}) is not representable at mu={}, sigma={}",
            params.mu(),
            params.sigma()
        )))
    }
}

/// Minimizes S(p, q) over (μ, σ) at fixed shape `p`.
///
/// Starts from `init`, or from the originating sample's mean and sd.
pub fn fit_min_disagreement(
    fs: &FreqSeries,
    p: f64,
    q: QTag,
    init: Option<GLParams>,
) -> Result<FitResult> {
    Shape::new(p)?;
    let start = match init {
        Some(params) => params.with_p(p)?,
        None => {
            let (mean, sd) = fs.origin_stats()?;
            GLParams::new(mean, sd, p)?
        }
    };
    let q_val = q.resolve(p);
    let mass = fs.n_total() * fs.cell_width();
    let objective = Objective::new(2, |v: &[f64]| match GLParams::new(v[0], v[1], p) {
        Ok(params) => disagreement_sum(fs.x(), fs.y(), mass, &GLDist::new(params), p, q_val),
        Err(_) => f64::INFINITY,
    })?
    .with_transforms(&[Transform::Linear, Transform::Log])?;
    let r = nelder_mead(&objective, &[start.mu(), start.sigma()], &default_nm())?;
    let params = GLParams::new(r.argmin[0], r.argmin[1], p)?;
    let value = disagreement(fs, &params, p, q)?;
    Ok(FitResult {
        params,
        objective: value,
        method: Method::MinDisagreement,
        q: Some(q),
        converged: r.converged,
        iterations: r.iterations,
        warnings: Vec::new(),
    })
}
