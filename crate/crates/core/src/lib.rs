//! Fitting the Gauss-Laplace (generalized normal) family to observed data.
//!
//! The crate covers the density and its moments ([`gl_dist`]), sample
//! ingestion and frequency series ([`data_series`]), derivative-free
//! minimization ([`optimizer`]), five estimation strategies plus the
//! likelihood profile over the shape exponent ([`estimators`]), and Grubbs
//! outlier screening ([`outliers`]).
//!
//! Batch work (grid searches, profile sweeps, Monte Carlo replicates) runs on
//! rayon when the default `parallel` feature is on; see [`Execution`].

pub mod data_series;
pub mod error;
pub mod estimators;
pub mod exec;
pub mod gl_dist;
pub mod optimizer;
pub mod outliers;
pub mod special_fn;

pub use data_series::{
    build_freq, bundled_sample, load_sample, model_freq, stats, FreqMode, FreqSeries, Sample,
    SampleStats,
};
pub use error::{Error, Result};
pub use estimators::{fit, FitConfig, FitResult, Method, ProfileCurve, QTag};
pub use exec::Execution;
pub use gl_dist::{GLDist, GLParams};
pub use outliers::{grubbs_filter, grubbs_test, GrubbsReport};

