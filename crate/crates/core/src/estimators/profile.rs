use nalgebra::{DMatrix, DVector};

use super::fit_mle;
use crate::data_series::Sample;
use crate::error::{Error, Result};
use crate::exec::{map_slice, Execution};
use crate::gl_dist::{GLParams, P_MAX, P_MIN};
use crate::optimizer::golden_section;

/// Shapes 1.0, 1.25, …, 4.0.
pub const DEFAULT_P_GRID: [f64; 13] = [
    1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0, 3.25, 3.5, 3.75, 4.0,
];

/// Minimum grid length: five quartic coefficients plus one residual degree of freedom.
pub const MIN_PROFILE_POINTS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileOptions {
    /// Seed each grid fit from its left neighbour. Forces sequential evaluation.
    pub warm_start: bool,
    /// Scheduling of grid fits when `warm_start` is off.
    pub exec: Execution,
    /// Bracket width at which the golden-section refinement stops.
    pub refine_tol: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            warm_start: true,
            exec: Execution::default(),
            refine_tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub p: f64,
    pub mu: f64,
    pub sigma: f64,
    pub mle: f64,
    pub converged: bool,
}

/// Profile log-likelihood over the shape exponent and its quartic summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    pub points: Vec<ProfilePoint>,
    /// Grid shapes whose fit failed, with the reason.
    pub failures: Vec<(f64, String)>,
    /// c₄, c₃, c₂, c₁, c₀ of MLE ≈ Σ cₖ (log₂ p)ᵏ.
    pub quartic: [f64; 5],
    pub r_squared: f64,
    /// Maximizer of the fitted quartic on the grid range.
    pub poly_p_max: f64,
    pub poly_mle_max: f64,
    /// Maximizer of the profile itself, refined between grid points.
    pub p_max: f64,
    pub mle_max: f64,
    /// (μ̂, σ̂, p) at `p_max`.
    pub params_at_max: GLParams,
}

/// Evaluates Σ cₖ (log₂ p)ᵏ with coefficients ordered c₄ … c₀.
pub fn eval_log2_quartic(coeffs: &[f64; 5], p: f64) -> f64 {
    let t = p.log2();
    coeffs.iter().fold(0.0, |acc, c| acc * t + c)
}

/// Least-squares quartic in log₂ p and its coefficient of determination.
pub fn fit_log2_quartic(ps: &[f64], values: &[f64]) -> Result<([f64; 5], f64)> {
    if ps.len() != values.len() {
        return Err(Error::Size("p and value lengths differ".into()));
    }
    if ps.len() < 5 {
        return Err(Error::TooFew {
            required: 5,
            got: ps.len(),
        });
    }
    let m = ps.len();
    let design = DMatrix::from_fn(m, 5, |i, j| ps[i].log2().powi(4 - j as i32));
    let rhs = DVector::from_column_slice(values);
    let solution = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::Degenerate(format!("quartic least squares failed: {e}")))?;
    let coeffs = [solution[0], solution[1], solution[2], solution[3], solution[4]];
    let mean = values.iter().sum::<f64>() / m as f64;
    let ss_tot: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = ps
        .iter()
        .zip(values)
        .map(|(&p, v)| (v - eval_log2_quartic(&coeffs, p)).powi(2))
        .sum();
    let r2 = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok((coeffs, r2))
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < MIN_PROFILE_POINTS {
        return Err(Error::Size(format!(
            "grid too short: need at least {MIN_PROFILE_POINTS} shapes, got {}",
            grid.len()
        )));
    }
    if grid.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
        return Err(Error::Domain {
            func: "mle_profile",
            msg: "shape grid must be strictly increasing".into(),
        });
    }
    if grid[0] < P_MIN || grid[grid.len() - 1] > P_MAX {
        return Err(Error::Domain {
            func: "mle_profile",
            msg: format!("shape grid must lie within [{P_MIN}, {P_MAX}]"),
        });
    }
    Ok(())
}

/// Fits the MLE at every shape of `p_grid`, summarizes the curve by a
/// quartic in log₂ p, and locates the profile maximum.
pub fn mle_profile(sample: &Sample, p_grid: &[f64], opts: &ProfileOptions) -> Result<ProfileCurve> {
    validate_grid(p_grid)?;

    let fits: Vec<Result<crate::estimators::FitResult>> = if opts.warm_start {
        let mut prev: Option<GLParams> = None;
        p_grid
            .iter()
            .map(|&p| {
                let r = fit_mle(sample, p, prev);
                if let Ok(fit) = &r {
                    prev = Some(fit.params);
                }
                r
            })
            .collect()
    } else {
        map_slice(opts.exec, p_grid, |&p| fit_mle(sample, p, None))
    };

    let mut points = Vec::with_capacity(p_grid.len());
    let mut failures = Vec::new();
    for (&p, fit) in p_grid.iter().zip(fits) {
        match fit {
            Ok(f) => points.push(ProfilePoint {
                p,
                mu: f.params.mu(),
                sigma: f.params.sigma(),
                mle: f.objective,
                converged: f.converged,
            }),
            Err(e) => failures.push((p, e.to_string())),
        }
    }
    if points.len() < MIN_PROFILE_POINTS {
        return Err(Error::TooFew {
            required: MIN_PROFILE_POINTS,
            got: points.len(),
        });
    }

    let ps: Vec<f64> = points.iter().map(|pt| pt.p).collect();
    let mles: Vec<f64> = points.iter().map(|pt| pt.mle).collect();
    let (quartic, r_squared) = fit_log2_quartic(&ps, &mles)?;
    let (lo, hi) = (ps[0], ps[ps.len() - 1]);

    // quartic maximizer: coarse scan, then golden section inside the best cell
    let scan = 2000;
    let step = (hi - lo) / scan as f64;
    let best_k = (0..=scan)
        .max_by(|&a, &b| {
            let fa = eval_log2_quartic(&quartic, lo + a as f64 * step);
            let fb = eval_log2_quartic(&quartic, lo + b as f64 * step);
            fa.total_cmp(&fb)
        })
        .unwrap_or(0);
    let centre = lo + best_k as f64 * step;
    let poly = golden_section(
        |p| -eval_log2_quartic(&quartic, p),
        (centre - step).max(lo),
        (centre + step).min(hi),
        1e-9,
    )?;
    let poly_p_max = poly.argmin[0];
    let poly_mle_max = eval_log2_quartic(&quartic, poly_p_max);

    // true profile maximizer: golden section between the neighbours of the best grid point
    let best = (0..points.len())
        .max_by(|&a, &b| points[a].mle.total_cmp(&points[b].mle))
        .unwrap_or(0);
    let seed = GLParams::new(points[best].mu, points[best].sigma, points[best].p)?;
    let left = points[best.saturating_sub(1)].p;
    let right = points[(best + 1).min(points.len() - 1)].p;
    let refined = golden_section(
        |p| match fit_mle(sample, p, Some(seed)) {
            Ok(f) => -f.objective,
            Err(_) => f64::INFINITY,
        },
        left,
        right,
        opts.refine_tol,
    )?;
    let (p_max, mle_max, params_at_max) = {
        let fit = fit_mle(sample, refined.argmin[0], Some(seed))?;
        if fit.objective >= points[best].mle {
            (refined.argmin[0], fit.objective, fit.params)
        } else {
            (points[best].p, points[best].mle, seed)
        }
    };

    Ok(ProfileCurve {
        points,
        failures,
        quartic,
        r_squared,
        poly_p_max,
        poly_mle_max,
        p_max,
        mle_max,
        params_at_max,
    })
}
