//! Sample ingestion, descriptive statistics and frequency series.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gl_dist::{GLDist, GLParams};

/// The bundled log(K_ow) dataset, as shipped in `data/pcb_logkow.txt`.
pub const BUNDLED_DATASET: &str = include_str!("../../../data/pcb_logkow.txt");

/// Minimum number of observations for any fit.
pub const MIN_SAMPLE: usize = 3;

/// Raw observations, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    /// Builds a sample from unsorted finite values.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.len() < MIN_SAMPLE {
            return Err(Error::TooFew {
                required: MIN_SAMPLE,
                got: values.len(),
            });
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain {
                func: "Sample::new",
                msg: format!("non-finite observation {bad}"),
            });
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Sample without the observation at `index` (position in sorted order).
    pub fn without(&self, index: usize) -> Result<Self> {
        let mut values = self.values.clone();
        values.remove(index);
        Self::new(values)
    }

    /// Applies `f` to every value and re-sorts.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.values.iter().map(|&v| f(v)).collect())
    }

    /// Writes one value per line, using the shortest round-tripping representation.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 8);
        for v in &self.values {
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }
}

impl FromStr for Sample {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        load_sample(s)
    }
}

/// Parses numbers separated by newlines, commas, semicolons or whitespace.
/// Lines whose first non-blank character is `#` are ignored.
pub fn load_sample(text: &str) -> Result<Sample> {
    let mut values = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        let mut start: Option<usize> = None;
        let bytes = line.as_bytes();
        for i in 0..=bytes.len() {
            let sep = i == bytes.len() || matches!(bytes[i], b',' | b';') || bytes[i].is_ascii_whitespace();
            match (sep, start) {
                (false, None) => start = Some(i),
                (true, Some(s)) => {
                    let token = &line[s..i];
                    let value: f64 = token.parse().map_err(|_| Error::Parse {
                        line: line_no + 1,
                        column: line[..s].chars().count() + 1,
                        token: token.to_string(),
                    })?;
                    if !value.is_finite() {
                        return Err(Error::Parse {
                            line: line_no + 1,
                            column: line[..s].chars().count() + 1,
                            token: token.to_string(),
                        });
                    }
                    values.push(value);
                    start = None;
                }
                _ => {}
            }
        }
    }
    Sample::new(values)
}

/// The bundled 206-point dataset.
pub fn bundled_sample() -> Sample {
    load_sample(BUNDLED_DATASET).expect("bundled dataset parses")
}

/// Descriptive statistics of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    pub n: usize,
    pub mean: f64,
    /// Standard deviation with the n − 1 denominator.
    pub sd: f64,
    /// Standard deviation with the n denominator (the normal MLE).
    pub sd_mle: f64,
    pub median: f64,
    pub skewness: f64,
    /// Standardized fourth central moment (3 for normal data).
    pub kurtosis: f64,
}

pub fn stats(sample: &Sample) -> Result<SampleStats> {
    let xs = sample.values();
    let n = xs.len();
    let nf = n as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    if m2 == 0.0 {
        return Err(Error::Degenerate("all observations are identical".into()));
    }
    let ss = m2;
    m2 /= nf;
    m3 /= nf;
    m4 /= nf;
    let median = if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    };
    Ok(SampleStats {
        n,
        mean,
        sd: (ss / (nf - 1.0)).sqrt(),
        sd_mle: m2.sqrt(),
        median,
        skewness: m3 / m2.powf(1.5),
        kurtosis: m4 / (m2 * m2),
    })
}

/// How a sample is turned into (X, Y) pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreqMode {
    /// Distinct values with their multiplicities.
    Distinct,
    /// Equal-width cells; empty cells are dropped.
    Histogram,
}

impl FreqMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FreqMode::Distinct => "distinct",
            FreqMode::Histogram => "histogram",
        }
    }
}

impl fmt::Display for FreqMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FreqMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distinct" => Ok(FreqMode::Distinct),
            "histogram" => Ok(FreqMode::Histogram),
            other => Err(Error::Domain {
                func: "FreqMode::from_str",
                msg: format!("unknown frequency mode {other:?} (expected distinct or histogram)"),
            }),
        }
    }
}

/// Sturges' rule, ⌈1 + log₂ n⌉.
pub fn sturges_bins(n: usize) -> usize {
    (1.0 + (n as f64).log2()).ceil() as usize
}

/// Support points with positive frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqSeries {
    x: Vec<f64>,
    y: Vec<f64>,
    n_total: f64,
    cell_width: f64,
    origin: Option<(f64, f64)>,
}

impl FreqSeries {
    /// Builds a series directly. `x` must be strictly increasing and `y` positive.
    pub fn new(x: Vec<f64>, y: Vec<f64>, cell_width: f64) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Size(format!(
                "x and y lengths differ ({} vs {})",
                x.len(),
                y.len()
            )));
        }
        if x.is_empty() {
            return Err(Error::TooFew { required: 1, got: 0 });
        }
        if x.iter().any(|v| !v.is_finite()) || x.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain {
                func: "FreqSeries::new",
                msg: "support points must be finite and strictly increasing".into(),
            });
        }
        if y.iter().any(|&v| !(v.is_finite() && v > 0.0)) {
            return Err(Error::Domain {
                func: "FreqSeries::new",
                msg: "frequencies must be finite and > 0".into(),
            });
        }
        if !(cell_width.is_finite() && cell_width > 0.0) {
            return Err(Error::Domain {
                func: "FreqSeries::new",
                msg: format!("cell width must be finite and > 0, got {cell_width}"),
            });
        }
        let n_total = y.iter().sum();
        Ok(Self {
            x,
            y,
            n_total,
            cell_width,
            origin: None,
        })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn n_total(&self) -> f64 {
        self.n_total
    }

    pub fn cell_width(&self) -> f64 {
        self.cell_width
    }

    /// Same support and cell width with every frequency multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let mut out = Self::new(
            self.x.clone(),
            self.y.iter().map(|v| v * factor).collect(),
            self.cell_width,
        )?;
        out.origin = self.origin;
        Ok(out)
    }

    /// Weighted mean Σ XᵢYᵢ / ΣYᵢ and standard deviation
    /// √(Σ Yᵢ(Xᵢ − μ)² / (ΣYᵢ − 1)).
    pub fn weighted_stats(&self) -> Result<(f64, f64)> {
        let mean = self.x.iter().zip(&self.y).map(|(x, y)| x * y).sum::<f64>() / self.n_total;
        let ss = self
            .x
            .iter()
            .zip(&self.y)
            .map(|(x, y)| y * (x - mean).powi(2))
            .sum::<f64>();
        if self.n_total <= 1.0 {
            return Err(Error::Degenerate(format!(
                "total frequency {} leaves no degrees of freedom",
                self.n_total
            )));
        }
        if ss == 0.0 {
            return Err(Error::Degenerate("all mass on one support point".into()));
        }
        Ok((mean, (ss / (self.n_total - 1.0)).sqrt()))
    }

    /// Mean and sd of the sample this series was built from, falling back
    /// to the weighted statistics for hand-built series.
    pub fn origin_stats(&self) -> Result<(f64, f64)> {
        match self.origin {
            Some(stats) => Ok(stats),
            None => self.weighted_stats(),
        }
    }
}

/// Frequency series from a sample. `bins` is required in histogram mode.
pub fn build_freq(sample: &Sample, mode: FreqMode, bins: Option<usize>) -> Result<FreqSeries> {
    let xs = sample.values();
    let (lo, hi) = (sample.min(), sample.max());
    if hi == lo {
        return Err(Error::Degenerate("sample range is zero".into()));
    }
    let (x, y, cell_width) = match mode {
        FreqMode::Distinct => {
            let mut x: Vec<f64> = Vec::new();
            let mut y: Vec<f64> = Vec::new();
            for &v in xs {
                match x.last() {
                    Some(&last) if last == v => *y.last_mut().unwrap() += 1.0,
                    _ => {
                        x.push(v);
                        y.push(1.0);
                    }
                }
            }
            let width = (hi - lo) / (x.len() - 1) as f64;
            (x, y, width)
        }
        FreqMode::Histogram => {
            let bins = bins.ok_or_else(|| Error::Size("histogram mode requires a bin count".into()))?;
            if bins < 2 {
                return Err(Error::Size(format!("need at least 2 bins, got {bins}")));
            }
            let width = (hi - lo) / bins as f64;
            let mut counts = vec![0.0; bins];
            for &v in xs {
                let cell = (((v - lo) / width).floor() as usize).min(bins - 1);
                counts[cell] += 1.0;
            }
            let (x, y) = counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0.0)
                .map(|(i, &c)| (lo + (i as f64 + 0.5) * width, c))
                .unzip();
            (x, y, width)
        }
    };
    let mut fs = FreqSeries::new(x, y, cell_width)?;
    let s = stats(sample)?;
    fs.origin = Some((s.mean, s.sd));
    Ok(fs)
}

/// Expected frequency at each support point, n_total · cell_width · pdf(Xᵢ).
pub fn model_freq(fs: &FreqSeries, params: &GLParams) -> Vec<f64> {
    let dist = GLDist::new(*params);
    let mass = fs.n_total * fs.cell_width;
    fs.x.iter().map(|&x| mass * dist.pdf(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bundled_dataset_matches_checksum() {
        use sha2::{Digest, Sha256};
        let recorded = include_str!("../../../data/pcb_logkow.txt.sha256");
        let expected = recorded.split_whitespace().next().unwrap();
        let digest = Sha256::digest(BUNDLED_DATASET.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(hex, expected);
    }

    #[test]
    fn parses_and_sorts() {
        let s = load_sample("3\n1\n2").unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
        let s = load_sample("4.151; 4.401; 4.421").unwrap();
        assert_eq!(s.values(), &[4.151, 4.401, 4.421]);
        let s = load_sample("# header\n 5,4 ;3\n\n# trailing\n").unwrap();
        assert_eq!(s.values(), &[3.0, 4.0, 5.0]);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = load_sample("1\n2\n3; x4.5").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 3,
                column: 4,
                token: "x4.5".into()
            }
        );
        assert!(matches!(load_sample("1\nnan\n3"), Err(Error::Parse { line: 2, .. })));
        assert_eq!(
            load_sample("1, 2").unwrap_err(),
            Error::TooFew { required: 3, got: 2 }
        );
    }

    #[test]
    fn bundled_dataset_shape() {
        let s = bundled_sample();
        assert_eq!(s.len(), 206);
        assert_eq!(s.min(), 4.151);
        assert_eq!(s.max(), 9.603);
        assert_eq!(s.values().iter().filter(|&&v| v == 6.137).count(), 5);
    }

    #[test]
    fn stats_small_sample() {
        let s = stats(&Sample::new(vec![1.0, 2.0, 3.0]).unwrap()).unwrap();
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.median, 2.0);
        assert!((s.sd - 1.0).abs() < 1e-15);
        assert!((s.sd_mle - 0.8165).abs() < 1e-4);
        assert_eq!(s.skewness, 0.0);
        let even = stats(&Sample::new(vec![4.0, 1.0, 2.0, 3.0]).unwrap()).unwrap();
        assert_eq!(even.median, 2.5);
        assert!(matches!(
            stats(&Sample::new(vec![2.0; 4]).unwrap()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn sd_identity() {
        let s = stats(&bundled_sample()).unwrap();
        let n = s.n as f64;
        assert!((s.sd - s.sd_mle * (n / (n - 1.0)).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn distinct_counts() {
        let s = Sample::new(vec![1.0, 1.0, 2.0, 3.0, 3.0, 3.0]).unwrap();
        let fs = build_freq(&s, FreqMode::Distinct, None).unwrap();
        assert_eq!(fs.x(), &[1.0, 2.0, 3.0]);
        assert_eq!(fs.y(), &[2.0, 1.0, 3.0]);
        assert_eq!(fs.cell_width(), 1.0);
        assert_eq!(fs.n_total(), 6.0);
    }

    #[test]
    fn histogram_cells() {
        let s = Sample::new(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let fs = build_freq(&s, FreqMode::Histogram, Some(2)).unwrap();
        assert_eq!(fs.x(), &[0.75, 2.25]);
        assert_eq!(fs.y(), &[2.0, 2.0]);
        assert_eq!(fs.cell_width(), 1.5);
        assert!(build_freq(&s, FreqMode::Histogram, None).is_err());
        assert!(build_freq(&s, FreqMode::Histogram, Some(1)).is_err());
        // middle cell empty → dropped
        let gap = Sample::new(vec![0.0, 0.1, 2.9, 3.0]).unwrap();
        let fs = build_freq(&gap, FreqMode::Histogram, Some(3)).unwrap();
        assert_eq!(fs.y(), &[2.0, 2.0]);
    }

    #[test]
    fn degenerate_range() {
        let s = Sample::new(vec![1.0; 3]).unwrap();
        assert!(matches!(
            build_freq(&s, FreqMode::Distinct, None),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn bundled_distinct_series() {
        let fs = build_freq(&bundled_sample(), FreqMode::Distinct, None).unwrap();
        assert_eq!(fs.n_total(), 206.0);
        let i = fs.x().iter().position(|&v| v == 6.137).unwrap();
        assert_eq!(fs.y()[i], 5.0);
        // the weighted form reproduces the sample statistics exactly in distinct mode
        let (m, sd) = fs.weighted_stats().unwrap();
        let s = stats(&bundled_sample()).unwrap();
        assert!((m - s.mean).abs() < 1e-12);
        assert!((sd - s.sd).abs() < 1e-12);
    }

    #[test]
    fn model_frequencies() {
        let fs = FreqSeries::new(vec![0.5], vec![1.0], 1.0).unwrap();
        let params = GLParams::new(0.5, 1.0, 2.0).unwrap();
        assert!((model_freq(&fs, &params)[0] - 0.398_942_280_4).abs() < 1e-9);

        let fs = build_freq(&bundled_sample(), FreqMode::Distinct, None).unwrap();
        let params = GLParams::new(6.464, 0.802, 2.0).unwrap();
        let f = model_freq(&fs, &params);
        let doubled = model_freq(&fs.scaled(2.0).unwrap(), &params);
        for (i, (&x, &fi)) in fs.x().iter().zip(&f).enumerate() {
            let z = (x - 6.464) / 0.802;
            let oracle = 206.0 * fs.cell_width() * (-0.5 * z * z).exp()
                / (0.802 * (2.0 * std::f64::consts::PI).sqrt());
            assert!((fi - oracle).abs() < 1e-12 * oracle.max(1.0));
            assert!((doubled[i] - 2.0 * fi).abs() < 1e-12);
        }
    }

    #[test]
    fn histogram_mass_approaches_total() {
        // Riemann sum over all cells, including empty ones, at the true parameters.
        let truth = GLParams::new(0.0, 1.0, 2.0).unwrap();
        let sample = Sample::new(crate::gl_dist::sample(&truth, 20_000, 5).unwrap()).unwrap();
        let bins = 256;
        let width = (sample.max() - sample.min()) / bins as f64;
        let dist = GLDist::new(truth);
        let mass: f64 = (0..bins)
            .map(|i| 20_000.0 * width * dist.pdf(sample.min() + (i as f64 + 0.5) * width))
            .sum();
        assert!((mass / 20_000.0 - 1.0).abs() < 1e-2);
        let fs = build_freq(&sample, FreqMode::Histogram, Some(bins)).unwrap();
        let kept: f64 = model_freq(&fs, &truth).iter().sum();
        assert!(kept <= mass + 1e-9);
    }

    #[test]
    fn sturges() {
        assert_eq!(sturges_bins(206), 9);
        assert_eq!(sturges_bins(205), 9);
        assert_eq!(sturges_bins(1024), 11);
    }

    proptest! {
        #[test]
        fn distinct_mode_conserves_count(mut values in proptest::collection::vec(-50i32..50, 3..60)) {
            values.push(100);
            let s = Sample::new(values.iter().map(|&v| v as f64 / 4.0).collect()).unwrap();
            let fs = build_freq(&s, FreqMode::Distinct, None).unwrap();
            prop_assert_eq!(fs.n_total(), s.len() as f64);
        }

        #[test]
        fn permutation_invariant(values in proptest::collection::vec(-10.0..10.0f64, 3..40), seed in 0u64..1000) {
            let a = Sample::new(values.clone()).unwrap();
            let mut shuffled = values;
            let k = (seed as usize) % shuffled.len();
            shuffled.rotate_left(k);
            shuffled.reverse();
            let b = Sample::new(shuffled).unwrap();
            prop_assume!(a.max() > a.min());
            prop_assert_eq!(
                build_freq(&a, FreqMode::Histogram, Some(5)).unwrap(),
                build_freq(&b, FreqMode::Histogram, Some(5)).unwrap()
            );
        }
    }
}
