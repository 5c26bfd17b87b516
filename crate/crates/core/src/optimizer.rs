//! Derivative-free minimization: Nelder-Mead simplex, golden-section search,
//! and an exhaustive grid used as a test oracle.

use crate::error::{Error, Result};
use crate::exec::{argmin_range, Execution};

/// Coordinate parametrization used inside the simplex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    Linear,
    /// Optimized as `ln x`; the objective only ever sees positive values.
    Log,
}

impl Transform {
    fn to_internal(self, x: f64) -> f64 {
        match self {
            Transform::Linear => x,
            Transform::Log => x.ln(),
        }
    }

    fn to_external(self, u: f64) -> f64 {
        match self {
            Transform::Linear => u,
            Transform::Log => u.exp().max(f64::MIN_POSITIVE),
        }
    }
}

/// An objective over 1 to 3 coordinates, with per-coordinate transforms and
/// optional box bounds.
pub struct Objective<F> {
    f: F,
    transforms: Vec<Transform>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

pub const MAX_ARITY: usize = 3;

impl<F> Objective<F>
where
    F: Fn(&[f64]) -> f64,
{
    pub fn new(arity: usize, f: F) -> Result<Self> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::Size(format!(
                "objective arity must be 1..={MAX_ARITY}, got {arity}"
            )));
        }
        Ok(Self {
            f,
            transforms: vec![Transform::Linear; arity],
            lower: vec![f64::NEG_INFINITY; arity],
            upper: vec![f64::INFINITY; arity],
        })
    }

    pub fn with_transforms(mut self, transforms: &[Transform]) -> Result<Self> {
        if transforms.len() != self.arity() {
            return Err(Error::Size(format!(
                "expected {} transforms, got {}",
                self.arity(),
                transforms.len()
            )));
        }
        self.transforms = transforms.to_vec();
        Ok(self)
    }

    pub fn with_bounds(mut self, lower: &[f64], upper: &[f64]) -> Result<Self> {
        if lower.len() != self.arity() || upper.len() != self.arity() {
            return Err(Error::Size("bounds must match the objective arity".into()));
        }
        if lower.iter().zip(upper).any(|(lo, hi)| lo.is_nan() || hi.is_nan() || lo > hi) {
            return Err(Error::Domain {
                func: "Objective::with_bounds",
                msg: "each lower bound must not exceed its upper bound".into(),
            });
        }
        self.lower = lower.to_vec();
        self.upper = upper.to_vec();
        Ok(self)
    }

    pub fn arity(&self) -> usize {
        self.transforms.len()
    }

    pub fn transforms(&self) -> &[Transform] {
        &self.transforms
    }

    /// Objective value; non-finite results are reported as +∞.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let v = (self.f)(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    }

    fn internal_bounds(&self, i: usize) -> (f64, f64) {
        match self.transforms[i] {
            Transform::Linear => (self.lower[i], self.upper[i]),
            Transform::Log => {
                let lo = if self.lower[i] > 0.0 {
                    self.lower[i].ln()
                } else {
                    f64::NEG_INFINITY
                };
                (lo, self.upper[i].ln())
            }
        }
    }

    fn project(&self, u: &mut [f64]) {
        for (i, ui) in u.iter_mut().enumerate() {
            let (lo, hi) = self.internal_bounds(i);
            *ui = ui.clamp(lo, hi);
        }
    }

    fn external(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(&self.transforms)
            .enumerate()
            .map(|(i, (&ui, t))| t.to_external(ui).clamp(self.lower[i], self.upper[i]))
            .collect()
    }

    fn eval_internal(&self, u: &[f64]) -> f64 {
        self.evaluate(&self.external(u))
    }
}

/// Outcome of a minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct MinResult {
    pub argmin: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub restarts_used: usize,
}

/// Nelder-Mead settings. Coefficients are fixed at reflection 1,
/// expansion 2, contraction 0.5, shrink 0.5.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Convergence threshold on the spread of simplex values, relative to
    /// max(|best value|, 1).
    pub ftol: f64,
    /// Convergence threshold on the spread of simplex coordinates (internal space).
    pub xtol: f64,
    /// Iteration cap per run.
    pub max_iter: usize,
    /// Fresh simplexes built around the best point after the first run.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            ftol: 1e-10,
            xtol: 1e-9,
            max_iter: 2000,
            restarts: 1,
        }
    }
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `obj` starting from `init` (external coordinates).
///
/// Log-tagged coordinates are searched in log space and every trial point is
/// projected onto the box bounds. Hitting `max_iter` is not an error: the
/// best point found is returned with `converged = false`.
pub fn nelder_mead<F>(obj: &Objective<F>, init: &[f64], opts: &NelderMeadOptions) -> Result<MinResult>
where
    F: Fn(&[f64]) -> f64,
{
    let n = obj.arity();
    if init.len() != n {
        return Err(Error::Size(format!(
            "initial point has {} coordinates, objective has {n}",
            init.len()
        )));
    }
    if !(opts.ftol > 0.0 && opts.xtol > 0.0) {
        return Err(Error::Domain {
            func: "nelder_mead",
            msg: "ftol and xtol must be positive".into(),
        });
    }
    for (i, &x) in init.iter().enumerate() {
        if !x.is_finite() || x < obj.lower[i] || x > obj.upper[i] {
            return Err(Error::Domain {
                func: "nelder_mead",
                msg: format!("initial coordinate {i} = {x} lies outside its bounds"),
            });
        }
        if obj.transforms[i] == Transform::Log && x <= 0.0 {
            return Err(Error::Domain {
                func: "nelder_mead",
                msg: format!("log-scaled coordinate {i} must start positive, got {x}"),
            });
        }
    }

    let mut start = init.to_vec();
    let mut total = MinResult {
        argmin: start.clone(),
        value: f64::INFINITY,
        iterations: 0,
        evaluations: 0,
        converged: false,
        restarts_used: 0,
    };
    for run in 0..=opts.restarts {
        let r = simplex_run(obj, &start, opts);
        total.iterations += r.iterations;
        total.evaluations += r.evaluations;
        total.converged = r.converged;
        total.restarts_used = run;
        if r.value <= total.value {
            total.value = r.value;
            total.argmin = r.argmin;
        }
        start = total.argmin.clone();
    }
    Ok(total)
}

fn initial_simplex<F>(obj: &Objective<F>, start: &[f64]) -> Vec<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    let n = start.len();
    let base: Vec<f64> = start
        .iter()
        .zip(&obj.transforms)
        .map(|(&x, t)| t.to_internal(x))
        .collect();
    let mut simplex = vec![base.clone()];
    for i in 0..n {
        let x = start[i];
        let step = (0.05 * x.abs()).max(0.05);
        let mut moved = if x + step <= obj.upper[i] { x + step } else { x - step };
        if moved < obj.lower[i] {
            moved = 0.5 * (obj.lower[i] + obj.upper[i]);
        }
        let mut vertex = base.clone();
        vertex[i] = obj.transforms[i].to_internal(moved);
        obj.project(&mut vertex);
        simplex.push(vertex);
    }
    simplex
}

fn simplex_run<F>(obj: &Objective<F>, start: &[f64], opts: &NelderMeadOptions) -> MinResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = start.len();
    let mut pts = initial_simplex(obj, start);
    let mut vals: Vec<f64> = pts.iter().map(|u| obj.eval_internal(u)).collect();
    let mut evaluations = n + 1;
    let mut iterations = 0;
    let mut converged = false;

    let trial = |centroid: &[f64], toward: &[f64], coef: f64| -> Vec<f64> {
        let mut u: Vec<f64> = centroid
            .iter()
            .zip(toward)
            .map(|(c, t)| c + coef * (t - c))
            .collect();
        obj.project(&mut u);
        u
    };

    loop {
        // sort ascending by value; ties keep insertion order
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let f_spread = vals[n] - vals[0];
        let x_spread = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        // ftol is relative once |f| exceeds 1, so large sums do not stall on rounding noise
        let f_scale = vals[0].abs().max(1.0);
        // a simplex collapsed to rounding resolution cannot improve further, which is
        // where cusped objectives (|r|^p with p < 1) end up before their f spread shrinks
        let x_scale = pts[0].iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let collapsed = x_spread <= 16.0 * f64::EPSILON * x_scale;
        if f_spread.is_finite() && x_spread < opts.xtol && (f_spread < opts.ftol * f_scale || collapsed) {
            converged = true;
            break;
        }
        if x_spread == 0.0 {
            // fully collapsed simplex with non-finite values: nothing left to do
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for p in &pts[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }

        let reflected = trial(&centroid, &pts[n], -REFLECT);
        let f_r = obj.eval_internal(&reflected);
        evaluations += 1;

        if f_r < vals[0] {
            let expanded = trial(&centroid, &pts[n], -EXPAND);
            let f_e = obj.eval_internal(&expanded);
            evaluations += 1;
            if f_e < f_r {
                pts[n] = expanded;
                vals[n] = f_e;
            } else {
                pts[n] = reflected;
                vals[n] = f_r;
            }
            continue;
        }
        if f_r < vals[n - 1] {
            pts[n] = reflected;
            vals[n] = f_r;
            continue;
        }

        let (contracted, f_c, accept) = if f_r < vals[n] {
            let c = trial(&centroid, &reflected, CONTRACT);
            let f = obj.eval_internal(&c);
            (c, f, f <= f_r)
        } else {
            let c = trial(&centroid, &pts[n], CONTRACT);
            let f = obj.eval_internal(&c);
            (c, f, f < vals[n])
        };
        evaluations += 1;
        if accept {
            pts[n] = contracted;
            vals[n] = f_c;
            continue;
        }

        let best = pts[0].clone();
        for i in 1..=n {
            let mut u: Vec<f64> = best
                .iter()
                .zip(&pts[i])
                .map(|(b, p)| b + SHRINK * (p - b))
                .collect();
            obj.project(&mut u);
            vals[i] = obj.eval_internal(&u);
            pts[i] = u;
        }
        evaluations += n;
    }

    let best = (0..=n)
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .unwrap_or(0);
    MinResult {
        argmin: obj.external(&pts[best]),
        value: vals[best],
        iterations,
        evaluations,
        converged,
        restarts_used: 0,
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
/// Stops once the bracket is narrower than `tol` and returns its midpoint.
pub fn golden_section<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<MinResult>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Bracket { lo, hi });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain {
            func: "golden_section",
            msg: format!("tolerance must be positive, got {tol}"),
        });
    }
    let eval = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    let mut iterations = 0;
    let mut evaluations = 2;
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d);
        }
        iterations += 1;
        evaluations += 1;
    }
    let x = 0.5 * (a + b);
    Ok(MinResult {
        argmin: vec![x],
        value: eval(x),
        iterations,
        evaluations: evaluations + 1,
        converged: true,
        restarts_used: 0,
    })
}

/// One axis of a brute-force grid: `steps` evenly spaced points on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl GridAxis {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Self {
        Self { lo, hi, steps }
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.steps - 1) as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        if k + 1 == self.steps {
            self.hi
        } else {
            self.lo + k as f64 * self.step()
        }
    }
}

/// Cap on the number of grid points evaluated by [`grid_oracle`].
pub const GRID_CAP: u128 = 10_000_000;

/// Exhaustive grid minimum (external coordinates; transforms and bounds are
/// ignored). Ties resolve to the lexicographically smallest point.
pub fn grid_oracle<F>(obj: &Objective<F>, axes: &[GridAxis], exec: Execution) -> Result<MinResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if axes.len() != obj.arity() {
        return Err(Error::Size(format!(
            "grid has {} axes, objective has {}",
            axes.len(),
            obj.arity()
        )));
    }
    for axis in axes {
        if axis.steps < 2 {
            return Err(Error::Size(format!("each grid axis needs ≥ 2 steps, got {}", axis.steps)));
        }
        if !(axis.lo.is_finite() && axis.hi.is_finite() && axis.lo < axis.hi) {
            return Err(Error::Bracket {
                lo: axis.lo,
                hi: axis.hi,
            });
        }
    }
    let points: u128 = axes.iter().map(|a| a.steps as u128).product();
    if points > GRID_CAP {
        return Err(Error::GridTooLarge {
            points,
            cap: GRID_CAP,
        });
    }
    let decode = |mut idx: usize| -> Vec<f64> {
        let mut x = vec![0.0; axes.len()];
        for (d, axis) in axes.iter().enumerate().rev() {
            x[d] = axis.point(idx % axis.steps);
            idx /= axis.steps;
        }
        x
    };
    let (best, value) = argmin_range(exec, points as usize, |i| obj.evaluate(&decode(i)));
    Ok(MinResult {
        argmin: decode(best),
        value,
        iterations: points as usize,
        evaluations: points as usize,
        converged: true,
        restarts_used: 0,
    })
}
