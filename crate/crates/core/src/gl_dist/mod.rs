//! The Gauss-Laplace (generalized normal) family.
//!
//! Parametrized by location `mu`, scale `sigma` and shape `p` such that
//! `sigma` is the standard deviation for every `p`:
//!
//! ```text
//! f(x) = p / (2 a σ Γ(1/p)) · exp(−|(x − μ) / (a σ)|^p),   a = √(Γ(1/p) / Γ(3/p))
//! ```
//!
//! `p = 2` is the normal density and `p = 1` the Laplace density.

mod sampling;

use std::f64::consts::LN_2;

pub use sampling::{sample, sample_many, GlRng};

use crate::error::{domain, Error, Result};
use crate::special_fn::ln_gamma_unchecked;

/// Smallest supported shape exponent.
pub const P_MIN: f64 = 0.25;
/// Largest supported shape exponent.
pub const P_MAX: f64 = 64.0;

/// Shape-dependent constants, computed once per `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shape {
    p: f64,
    /// `a = √(Γ(1/p)/Γ(3/p))`, maps unit variance to the natural scale.
    scale: f64,
    /// `ln(p / (2 a Γ(1/p)))`, the log density at the mode for unit σ.
    log_norm: f64,
}

impl Shape {
    pub fn new(p: f64) -> Result<Self> {
        check_shape("Shape::new", p)?;
        let lg1 = ln_gamma_unchecked(1.0 / p);
        let lg3 = ln_gamma_unchecked(3.0 / p);
        let scale = (0.5 * (lg1 - lg3)).exp();
        let log_norm = (0.5 * p).ln() - 0.5 * (lg1 - lg3) - lg1;
        Ok(Self { p, scale, log_norm })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Natural-log density of the standardized variable.
    #[inline]
    pub fn ln_pdf(&self, z: f64) -> f64 {
        let u = z.abs() / self.scale;
        let core = if self.p == 2.0 {
            u * u
        } else if self.p == 1.0 {
            u
        } else {
            u.powf(self.p)
        };
        self.log_norm - core
    }

    #[inline]
    pub fn pdf(&self, z: f64) -> f64 {
        self.ln_pdf(z).exp()
    }
}

fn check_shape(func: &'static str, p: f64) -> Result<()> {
    if p.is_finite() && (P_MIN..=P_MAX).contains(&p) {
        Ok(())
    } else {
        Err(domain(
            func,
            format!("shape p must lie in [{P_MIN}, {P_MAX}], got {p}"),
        ))
    }
}

/// Location, scale and shape of a Gauss-Laplace distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GLParams {
    mu: f64,
    sigma: f64,
    p: f64,
}

impl GLParams {
    pub fn new(mu: f64, sigma: f64, p: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(domain("GLParams::new", format!("mu must be finite, got {mu}")));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(domain(
                "GLParams::new",
                format!("sigma must be finite and > 0, got {sigma}"),
            ));
        }
        check_shape("GLParams::new", p)?;
        Ok(Self { mu, sigma, p })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn with_p(&self, p: f64) -> Result<Self> {
        Self::new(self.mu, self.sigma, p)
    }
}

/// A distribution with its shape constants cached, for repeated evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GLDist {
    params: GLParams,
    shape: Shape,
    ln_sigma: f64,
}

impl GLDist {
    pub fn new(params: GLParams) -> Self {
        let shape = Shape::new(params.p).expect("GLParams guarantees a supported shape");
        Self {
            params,
            shape,
            ln_sigma: params.sigma.ln(),
        }
    }

    pub fn params(&self) -> &GLParams {
        &self.params
    }

    #[inline]
    pub fn ln_pdf(&self, x: f64) -> f64 {
        self.shape.ln_pdf((x - self.params.mu) / self.params.sigma) - self.ln_sigma
    }

    #[inline]
    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    #[inline]
    pub fn log2_pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x) / LN_2
    }

    /// Σ log₂ f(xᵢ).
    pub fn log2_likelihood(&self, xs: &[f64]) -> f64 {
        xs.iter().map(|&x| self.ln_pdf(x)).sum::<f64>() / LN_2
    }
}

impl From<GLParams> for GLDist {
    fn from(params: GLParams) -> Self {
        Self::new(params)
    }
}

/// Density of the zero-mean, unit-variance member with shape `p`.
pub fn standard_pdf(z: f64, p: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(domain("standard_pdf", format!("z must be finite, got {z}")));
    }
    Ok(Shape::new(p)?.pdf(z))
}

/// Density at `x`.
pub fn pdf(x: f64, params: &GLParams) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain("pdf", format!("x must be finite, got {x}")));
    }
    Ok(GLDist::new(*params).pdf(x))
}

/// Base-2 log density at `x`, evaluated in log space.
pub fn log2_pdf(x: f64, params: &GLParams) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain("log2_pdf", format!("x must be finite, got {x}")));
    }
    Ok(GLDist::new(*params).log2_pdf(x))
}

/// Population kurtosis Γ(5/p)Γ(1/p)/Γ²(3/p) (not excess; 3 for the normal).
pub fn kurtosis(p: f64) -> Result<f64> {
    check_shape("kurtosis", p)?;
    Ok(kurtosis_unchecked(p))
}

fn kurtosis_unchecked(p: f64) -> f64 {
    (ln_gamma_unchecked(5.0 / p) + ln_gamma_unchecked(1.0 / p) - 2.0 * ln_gamma_unchecked(3.0 / p))
        .exp()
}

/// Shape `p` whose kurtosis equals `kappa`, by bisection on [P_MIN, P_MAX].
pub fn kurtosis_to_p(kappa: f64) -> Result<f64> {
    let k_hi = kurtosis_unchecked(P_MIN);
    let k_lo = kurtosis_unchecked(P_MAX);
    if !kappa.is_finite() || kappa <= 1.8 {
        return Err(domain(
            "kurtosis_to_p",
            format!("kurtosis must exceed 1.8, got {kappa}"),
        ));
    }
    if kappa < k_lo || kappa > k_hi {
        return Err(Error::Domain {
            func: "kurtosis_to_p",
            msg: format!(
                "kurtosis {kappa} outside the supported range [{k_lo}, {k_hi}] for p in [{P_MIN}, {P_MAX}]"
            ),
        });
    }
    // kurtosis is strictly decreasing in p
    let (mut lo, mut hi) = (P_MIN, P_MAX);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if kurtosis_unchecked(mid) > kappa {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (klo, khi) = (kurtosis_unchecked(lo), kurtosis_unchecked(hi));
    Ok(if (klo - kappa).abs() <= (khi - kappa).abs() {
        lo
    } else {
        hi
    })
}
