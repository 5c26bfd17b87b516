//! Two-sided Grubbs test for a single outlier, and iterated screening.

use crate::data_series::{stats, Sample};
use crate::error::{Error, Result};
use crate::special_fn::student_t_quantile;

/// Smallest sample the test is applied to by default.
pub const GRUBBS_MIN_N: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrubbsReport {
    /// G = max |xᵢ − x̄| / s.
    pub g_statistic: f64,
    pub critical: f64,
    pub suspect_value: f64,
    /// Position of the suspect in the sorted sample.
    pub suspect_index: usize,
    pub alpha: f64,
    pub rejected: bool,
    pub n: usize,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            func: "grubbs",
            msg: format!("alpha must lie in (0, 1), got {alpha}"),
        })
    }
}

/// Two-sided critical value of G for `n` observations at level `alpha`.
pub fn grubbs_critical(n: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if n < 3 {
        return Err(Error::TooFew { required: 3, got: n });
    }
    let nf = n as f64;
    let t = student_t_quantile(1.0 - alpha / (2.0 * nf), nf - 2.0)?;
    let t2 = t * t;
    Ok((nf - 1.0) / nf.sqrt() * (t2 / (nf - 2.0 + t2)).sqrt())
}

/// Tests the most extreme observation, requiring at least [`GRUBBS_MIN_N`] values.
pub fn grubbs_test(sample: &Sample, alpha: f64) -> Result<GrubbsReport> {
    grubbs_test_with_floor(sample, alpha, GRUBBS_MIN_N)
}

/// As [`grubbs_test`] with a caller-chosen minimum sample size (at least 3).
pub fn grubbs_test_with_floor(sample: &Sample, alpha: f64, min_n: usize) -> Result<GrubbsReport> {
    check_alpha(alpha)?;
    let n = sample.len();
    let floor = min_n.max(3);
    if n < floor {
        return Err(Error::TooFew { required: floor, got: n });
    }
    let s = stats(sample)?;
    let xs = sample.values();
    // sorted input: the suspect is one of the two ends; ties go to the upper end
    let (lo_dev, hi_dev) = (s.mean - xs[0], xs[n - 1] - s.mean);
    let suspect_index = if hi_dev >= lo_dev { n - 1 } else { 0 };
    let g_statistic = lo_dev.max(hi_dev) / s.sd;
    let critical = grubbs_critical(n, alpha)?;
    Ok(GrubbsReport {
        g_statistic,
        critical,
        suspect_value: xs[suspect_index],
        suspect_index,
        alpha,
        rejected: g_statistic > critical,
        n,
    })
}

/// Repeatedly removes the Grubbs suspect while it is rejected, at most
/// `max_removals` times. Returns the cleaned sample and one report per test
/// performed (the last one is the non-rejection, unless a limit was hit).
pub fn grubbs_filter(
    sample: &Sample,
    alpha: f64,
    max_removals: usize,
) -> Result<(Sample, Vec<GrubbsReport>)> {
    grubbs_filter_with_floor(sample, alpha, max_removals, GRUBBS_MIN_N)
}

pub fn grubbs_filter_with_floor(
    sample: &Sample,
    alpha: f64,
    max_removals: usize,
    min_n: usize,
) -> Result<(Sample, Vec<GrubbsReport>)> {
    check_alpha(alpha)?;
    if max_removals == 0 {
        return Err(Error::Size("max_removals must be at least 1".into()));
    }
    let mut current = sample.clone();
    let mut reports = Vec::new();
    let mut removed = 0;
    while removed < max_removals && current.len() >= min_n.max(3) {
        let report = match grubbs_test_with_floor(&current, alpha, min_n) {
            Ok(r) => r,
            // nothing left to screen once the remainder is constant
            Err(Error::Degenerate(_)) => break,
            Err(e) => return Err(e),
        };
        reports.push(report);
        if !report.rejected {
            break;
        }
        current = current.without(report.suspect_index)?;
        removed += 1;
    }
    Ok((current, reports))
}
