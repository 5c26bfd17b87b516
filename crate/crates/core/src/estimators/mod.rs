//! Estimation of (μ, σ[, p]) for the Gauss-Laplace family.
//!
//! Five strategies are available:
//!
//! * [`fit_min_disagreement`]: minimize Σ|Yᵢ − f(Xᵢ)|^p / f(Xᵢ)^q over a frequency series;
//! * [`fit_moments`]: match raw moments Σ Xᵢᵏ Yᵢ ≈ Σ Xᵢᵏ f(Xᵢ);
//! * [`fit_central_moments`]: match the first moment and central moments about the data mean;
//! * [`fit_population_stats`]: closed-form mean / sd (and kurtosis-matched p);
//! * [`fit_mle`]: maximize the base-2 log-likelihood Σ log₂ f(xᵢ).
//!
//! [`mle_profile`] sweeps `fit_mle` over a grid of shapes and fits a quartic
//! in log₂ p to the resulting curve.

mod disagreement;
mod mle;
mod moments;
mod profile;

use std::fmt;
use std::str::FromStr;

pub use disagreement::{disagreement, fit_min_disagreement};
pub use mle::fit_mle;
pub use moments::{
    central_moment_residuals, fit_central_moments, fit_central_moments_free_shape, fit_moments,
    fit_moments_free_shape, fit_population_stats, fit_population_stats_weighted, moment_residuals,
    DEFAULT_CENTRAL_ORDERS, DEFAULT_MOMENT_ORDERS,
};
pub use profile::{
    eval_log2_quartic, fit_log2_quartic, mle_profile, ProfileCurve, ProfileOptions, ProfilePoint,
    DEFAULT_P_GRID, MIN_PROFILE_POINTS,
};

use crate::data_series::{build_freq, stats, sturges_bins, FreqMode, Sample};
use crate::error::{Error, Result};
use crate::exec::{map_slice, Execution};
use crate::gl_dist::GLParams;
use crate::optimizer::NelderMeadOptions;

/// Exponent q in the disagreement denominator f(Xᵢ)^q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QTag {
    Zero,
    One,
    HalfP,
    P,
}

impl QTag {
    pub const ALL: [QTag; 4] = [QTag::Zero, QTag::One, QTag::HalfP, QTag::P];

    pub fn resolve(self, p: f64) -> f64 {
        match self {
            QTag::Zero => 0.0,
            QTag::One => 1.0,
            QTag::HalfP => 0.5 * p,
            QTag::P => p,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            QTag::Zero => "0",
            QTag::One => "1",
            QTag::HalfP => "p/2",
            QTag::P => "p",
        }
    }
}

impl fmt::Display for QTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "0" => Ok(QTag::Zero),
            "1" => Ok(QTag::One),
            "p/2" => Ok(QTag::HalfP),
            "p" => Ok(QTag::P),
            other => Err(Error::Domain {
                func: "QTag::from_str",
                msg: format!("unknown q {other:?} (expected 0, 1, p/2 or p)"),
            }),
        }
    }
}

/// Estimation strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    MinDisagreement,
    Moments,
    CentralMoments,
    PopulationStats,
    Mle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::MinDisagreement => "min_disagreement",
            Method::Moments => "moments",
            Method::CentralMoments => "central_moments",
            Method::PopulationStats => "population_stats",
            Method::Mle => "mle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "min_disagreement" => Ok(Method::MinDisagreement),
            "moments" => Ok(Method::Moments),
            "central_moments" => Ok(Method::CentralMoments),
            "population_stats" => Ok(Method::PopulationStats),
            "mle" => Ok(Method::Mle),
            other => Err(Error::Domain {
                func: "Method::from_str",
                msg: format!(
                    "unknown method {other:?} (expected min_disagreement, moments, central_moments, population_stats or mle)"
                ),
            }),
        }
    }
}

/// Everything needed to run one fit on a raw sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub method: Method,
    /// Shape exponent, held fixed unless `fit_shape` is set.
    pub p: f64,
    pub q: QTag,
    pub freq_mode: FreqMode,
    /// Histogram cell count; Sturges' rule when `None`.
    pub bins: Option<usize>,
    /// Estimate p as well (population_stats via kurtosis, moment fits via
    /// an extra fourth-order equation).
    pub fit_shape: bool,
}

impl FitConfig {
    pub fn new(method: Method, p: f64) -> Self {
        Self {
            method,
            p,
            q: QTag::Zero,
            freq_mode: FreqMode::Distinct,
            bins: None,
            fit_shape: false,
        }
    }

    pub fn with_q(mut self, q: QTag) -> Self {
        self.q = q;
        self
    }

    pub fn with_freq_mode(mut self, mode: FreqMode, bins: Option<usize>) -> Self {
        self.freq_mode = mode;
        self.bins = bins;
        self
    }
}

/// Outcome of a single fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: GLParams,
    /// S(p, q) for min_disagreement, log₂-likelihood for mle, residual norm
    /// for the moment fits (zero for the closed-form population statistics).
    pub objective: f64,
    pub method: Method,
    /// The q tag, for min_disagreement fits only.
    pub q: Option<QTag>,
    pub converged: bool,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

pub(crate) fn default_nm() -> NelderMeadOptions {
    NelderMeadOptions::default()
}

/// Runs the fit described by `config` on `sample`.
pub fn fit(sample: &Sample, config: &FitConfig) -> Result<FitResult> {
    let freq = || {
        let bins = match config.freq_mode {
            FreqMode::Distinct => None,
            FreqMode::Histogram => Some(config.bins.unwrap_or_else(|| sturges_bins(sample.len()))),
        };
        build_freq(sample, config.freq_mode, bins)
    };
    match config.method {
        Method::MinDisagreement => fit_min_disagreement(&freq()?, config.p, config.q, None),
        Method::Moments | Method::CentralMoments => {
            let s = stats(sample)?;
            let params0 = GLParams::new(s.mean, s.sd, config.p)?;
            let fs = freq()?;
            match (config.method, config.fit_shape) {
                (Method::Moments, false) => fit_moments(&fs, &params0, &DEFAULT_MOMENT_ORDERS),
                (Method::Moments, true) => fit_moments_free_shape(&fs, &params0, &[0, 1, 2, 4]),
                (_, false) => fit_central_moments(&fs, &params0, &DEFAULT_CENTRAL_ORDERS),
                (_, true) => fit_central_moments_free_shape(&fs, &params0, &[2, 4]),
            }
        }
        Method::PopulationStats => fit_population_stats(sample, config.fit_shape),
        Method::Mle => fit_mle(sample, config.p, None),
    }
}

/// Runs a batch of independent fits; results come back in `configs` order.
pub fn sweep(sample: &Sample, configs: &[FitConfig], exec: Execution) -> Vec<Result<FitResult>> {
    map_slice(exec, configs, |c| fit(sample, c))
}

/// Shapes used for the disagreement block of the comparison table.
pub const TABLE2_DISAGREEMENT_P: [f64; 9] = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 6.0];
/// Shapes used for the maximum-likelihood block.
pub const TABLE2_MLE_P: [f64; 4] = [1.0, 2.0, 3.0, 4.0];

/// The comparison table layout: four q blocks over
/// [`TABLE2_DISAGREEMENT_P`], then the MLE rows over [`TABLE2_MLE_P`].
pub fn table2_configs(freq_mode: FreqMode, bins: Option<usize>) -> Vec<FitConfig> {
    let mut out = Vec::new();
    for q in QTag::ALL {
        for p in TABLE2_DISAGREEMENT_P {
            out.push(
                FitConfig::new(Method::MinDisagreement, p)
                    .with_q(q)
                    .with_freq_mode(freq_mode, bins),
            );
        }
    }
    out.extend(TABLE2_MLE_P.iter().map(|&p| FitConfig::new(Method::Mle, p)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_series::bundled_sample;

    #[test]
    fn tags_round_trip_through_strings() {
        for q in QTag::ALL {
            assert_eq!(q.as_str().parse::<QTag>().unwrap(), q);
        }
        assert_eq!(QTag::HalfP.resolve(3.0), 1.5);
        assert!("2".parse::<QTag>().is_err());
        for m in [
            Method::MinDisagreement,
            Method::Moments,
            Method::CentralMoments,
            Method::PopulationStats,
            Method::Mle,
        ] {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("ols".parse::<Method>().is_err());
    }

    #[test]
    fn table_layout() {
        let configs = table2_configs(FreqMode::Distinct, None);
        assert_eq!(configs.len(), 4 * 9 + 4);
        assert_eq!(configs[9].q, QTag::One);
        assert_eq!(configs[36].method, Method::Mle);
    }

    #[test]
    fn sweep_is_order_stable() {
        let sample = bundled_sample();
        let configs = [
            FitConfig::new(Method::Mle, 2.0),
            FitConfig::new(Method::PopulationStats, 2.0),
            FitConfig::new(Method::Moments, 2.0),
        ];
        let seq = sweep(&sample, &configs, Execution::Sequential);
        let par = sweep(&sample, &configs, Execution::Parallel);
        assert_eq!(seq, par);
        assert_eq!(seq[1].as_ref().unwrap().method, Method::PopulationStats);
    }
}
