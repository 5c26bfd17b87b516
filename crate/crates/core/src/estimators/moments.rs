use super::{default_nm, FitResult, Method};
use crate::data_series::{stats, FreqSeries, Sample};
use crate::error::{Error, Result};
use crate::gl_dist::{kurtosis_to_p, GLDist, GLParams, P_MAX, P_MIN};
use crate::optimizer::{nelder_mead, Objective, Transform};

/// Raw-moment orders used for (μ, σ) fits at fixed shape.
pub const DEFAULT_MOMENT_ORDERS: [u32; 3] = [0, 1, 2];
/// Central-moment orders used for (μ, σ) fits; the first raw moment is always added.
pub const DEFAULT_CENTRAL_ORDERS: [u32; 1] = [2];

#[derive(Clone, Copy)]
enum Equations {
    Raw,
    Central,
}

/// Relative residual (L − R) / max(|L|, 1).
fn relative(observed: f64, expected: f64) -> f64 {
    (observed - expected) / observed.abs().max(1.0)
}

fn raw_residuals(fs: &FreqSeries, dist: &GLDist, orders: &[u32]) -> Vec<f64> {
    let mass = fs.n_total() * fs.cell_width();
    let f: Vec<f64> = fs.x().iter().map(|&x| mass * dist.pdf(x)).collect();
    orders
        .iter()
        .map(|&k| {
            let k = k as i32;
            let (mut lhs, mut rhs) = (0.0, 0.0);
            for ((&x, &y), &fi) in fs.x().iter().zip(fs.y()).zip(&f) {
                let xk = x.powi(k);
                lhs += xk * y;
                rhs += xk * fi;
            }
            relative(lhs, rhs)
        })
        .collect()
}

fn central_residuals(fs: &FreqSeries, dist: &GLDist, orders: &[u32]) -> Vec<f64> {
    let mass = fs.n_total() * fs.cell_width();
    let f: Vec<f64> = fs.x().iter().map(|&x| mass * dist.pdf(x)).collect();
    let center = fs.x().iter().zip(fs.y()).map(|(x, y)| x * y).sum::<f64>() / fs.n_total();
    let mut out = Vec::with_capacity(orders.len() + 1);
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for ((&x, &y), &fi) in fs.x().iter().zip(fs.y()).zip(&f) {
        lhs += x * y;
        rhs += x * fi;
    }
    out.push(relative(lhs, rhs));
    for &k in orders {
        let k = k as i32;
        let (mut lhs, mut rhs) = (0.0, 0.0);
        for ((&x, &y), &fi) in fs.x().iter().zip(fs.y()).zip(&f) {
            let dk = (x - center).powi(k);
            lhs += dk * y;
            rhs += dk * fi;
        }
        out.push(relative(lhs, rhs));
    }
    out
}

/// Relative residuals of the raw-moment equations Σ Xᵢᵏ Yᵢ ≈ Σ Xᵢᵏ f(Xᵢ).
pub fn moment_residuals(fs: &FreqSeries, params: &GLParams, orders: &[u32]) -> Vec<f64> {
    raw_residuals(fs, &GLDist::new(*params), orders)
}

/// Relative residuals of the first-moment equation followed by the central
/// equations Σ (Xᵢ − X̄)ᵏ Yᵢ ≈ Σ (Xᵢ − X̄)ᵏ f(Xᵢ), X̄ the weighted data mean.
pub fn central_moment_residuals(fs: &FreqSeries, params: &GLParams, orders: &[u32]) -> Vec<f64> {
    central_residuals(fs, &GLDist::new(*params), orders)
}

fn norm(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn normalize_orders(orders: &[u32]) -> Vec<u32> {
    let mut v = orders.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

fn fit_equations(
    fs: &FreqSeries,
    params0: &GLParams,
    orders: &[u32],
    equations: Equations,
    free_shape: bool,
) -> Result<FitResult> {
    let orders = normalize_orders(orders);
    let method = match equations {
        Equations::Raw => Method::Moments,
        Equations::Central => Method::CentralMoments,
    };
    let n_equations = match equations {
        Equations::Raw => orders.len(),
        Equations::Central => orders.len() + 1,
    };
    if let Equations::Central = equations {
        if let Some(k) = orders.iter().find(|&&k| k < 2) {
            return Err(Error::Domain {
                func: "fit_central_moments",
                msg: format!("central orders must be ≥ 2, got {k}"),
            });
        }
    }
    if n_equations == 0 {
        return Err(Error::Size("no moment equations selected".into()));
    }
    let free = if free_shape { 3 } else { 2 };
    let mut warnings = Vec::new();
    if n_equations < free {
        warnings.push(format!(
            "{n_equations} moment equation(s) for {free} free parameters; the fit is underdetermined"
        ));
    }

    let residuals = |dist: &GLDist| match equations {
        Equations::Raw => raw_residuals(fs, dist, &orders),
        Equations::Central => central_residuals(fs, dist, &orders),
    };
    let fixed_p = params0.p();
    let objective = Objective::new(free, |v: &[f64]| {
        let p = if free_shape { v[2] } else { fixed_p };
        match GLParams::new(v[0], v[1], p) {
            Ok(params) => residuals(&GLDist::new(params)).iter().map(|r| r * r).sum(),
            Err(_) => f64::INFINITY,
        }
    })?;
    let (objective, init) = if free_shape {
        (
            objective
                .with_transforms(&[Transform::Linear, Transform::Log, Transform::Log])?
                .with_bounds(
                    &[f64::NEG_INFINITY, 0.0, P_MIN],
                    &[f64::INFINITY, f64::INFINITY, P_MAX],
                )?,
            vec![params0.mu(), params0.sigma(), params0.p()],
        )
    } else {
        (
            objective.with_transforms(&[Transform::Linear, Transform::Log])?,
            vec![params0.mu(), params0.sigma()],
        )
    };
    let r = nelder_mead(&objective, &init, &default_nm())?;
    let p = if free_shape { r.argmin[2] } else { fixed_p };
    let params = GLParams::new(r.argmin[0], r.argmin[1], p)?;
    let value = norm(&residuals(&GLDist::new(params)));
    Ok(FitResult {
        params,
        objective: value,
        method,
        q: None,
        converged: r.converged,
        iterations: r.iterations,
        warnings,
    })
}

/// Fits (μ, σ) at the shape of `params0` by matching raw moments of the
/// selected `orders`, starting from `params0`.
pub fn fit_moments(fs: &FreqSeries, params0: &GLParams, orders: &[u32]) -> Result<FitResult> {
    fit_equations(fs, params0, orders, Equations::Raw, false)
}

/// Like [`fit_moments`] with the shape p also free.
pub fn fit_moments_free_shape(fs: &FreqSeries, params0: &GLParams, orders: &[u32]) -> Result<FitResult> {
    fit_equations(fs, params0, orders, Equations::Raw, true)
}

/// Fits (μ, σ) by matching the first moment and the central moments of `orders` (each ≥ 2).
pub fn fit_central_moments(fs: &FreqSeries, params0: &GLParams, orders: &[u32]) -> Result<FitResult> {
    fit_equations(fs, params0, orders, Equations::Central, false)
}

pub fn fit_central_moments_free_shape(
    fs: &FreqSeries,
    params0: &GLParams,
    orders: &[u32],
) -> Result<FitResult> {
    fit_equations(fs, params0, orders, Equations::Central, true)
}

/// Closed-form estimates: sample mean and sd (n − 1), and p either 2 or
/// matched to the sample kurtosis.
pub fn fit_population_stats(sample: &Sample, fit_p: bool) -> Result<FitResult> {
    let s = stats(sample)?;
    let p = if fit_p { kurtosis_to_p(s.kurtosis)? } else { 2.0 };
    Ok(FitResult {
        params: GLParams::new(s.mean, s.sd, p)?,
        objective: 0.0,
        method: Method::PopulationStats,
        q: None,
        converged: true,
        iterations: 0,
        warnings: Vec::new(),
    })
}

/// Weighted closed form on a frequency series: μ = ΣXY/ΣY,
/// σ² = ΣY(X − μ)²/(ΣY − 1), p = 2.
pub fn fit_population_stats_weighted(fs: &FreqSeries) -> Result<FitResult> {
    let (mean, sd) = fs.weighted_stats()?;
    Ok(FitResult {
        params: GLParams::new(mean, sd, 2.0)?,
        objective: 0.0,
        method: Method::PopulationStats,
        q: None,
        converged: true,
        iterations: 0,
        warnings: Vec::new(),
    })
}
