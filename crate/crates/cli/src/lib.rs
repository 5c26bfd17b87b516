//! The `glfit` command line: fitting, likelihood profiles, Grubbs screening
//! and the comparison table, with tsv/csv/json output and plot files.

pub mod plot;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use glfit_core::data_series::{
    build_freq, bundled_sample, load_sample, sturges_bins, FreqMode, Sample,
};
use glfit_core::estimators::{
    fit, mle_profile, sweep, table2_configs, FitConfig, FitResult, Method, ProfileOptions, QTag,
};
use glfit_core::outliers::grubbs_filter;
use glfit_core::{Execution, GLDist};

use plot::PlotFormat;
use report::{Cell, Format, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "glfit",
    version,
    about = "Fit the Gauss-Laplace (generalized normal) family to one-dimensional data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate (mu, sigma) at a fixed shape p, or (mu, sigma, p).
    Fit(FitArgs),
    /// Maximum log2-likelihood over a grid of shapes, with its quartic fit.
    Profile(ProfileArgs),
    /// Iterated two-sided Grubbs test.
    Grubbs(GrubbsArgs),
    /// Disagreement fits for every (q, p) pair plus the MLE rows.
    Table2(Table2Args),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Data file: numbers separated by whitespace, commas or semicolons; `#` starts a comment line.
    /// Defaults to the bundled log(Kow) dataset.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Remove Grubbs outliers before fitting.
    #[arg(long)]
    pub grubbs: bool,
    /// Significance level for --grubbs.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Significant digits for printed numbers.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=17))]
    pub precision: u8,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Emit plot data alongside the report.
    #[arg(long, value_enum, requires = "plot_out")]
    pub plot: Option<PlotFormat>,
    /// Destination of the plot.
    #[arg(long, value_name = "PATH", requires = "plot")]
    pub plot_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "mle", value_parser = parse_method)]
    pub method: Method,
    /// Shape exponent (starting value with --fit-p).
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Denominator exponent for min_disagreement: 0, 1, p/2 or p.
    #[arg(long, default_value = "0", value_parser = parse_q)]
    pub q: QTag,
    #[arg(long, default_value = "distinct", value_parser = parse_freq_mode)]
    pub freq_mode: FreqMode,
    /// Histogram cells (Sturges' rule by default).
    #[arg(long)]
    pub bins: Option<usize>,
    /// Estimate p as well (population_stats, moments, central_moments).
    #[arg(long)]
    pub fit_p: bool,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub plot: PlotArgs,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Shape grid as lo:hi:step.
    #[arg(long, default_value = "1:4:0.25")]
    pub p_grid: String,
    /// Fit every grid point from the sample moments instead of the previous point.
    #[arg(long)]
    pub cold_start: bool,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub plot: PlotArgs,
}

#[derive(Debug, Args)]
pub struct GrubbsArgs {
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Stop after this many removals.
    #[arg(long, default_value_t = 10)]
    pub max_removals: usize,
    /// Write the cleaned sample here, one value per line.
    #[arg(long, value_name = "PATH")]
    pub emit_clean: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct Table2Args {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "distinct", value_parser = parse_freq_mode)]
    pub freq_mode: FreqMode,
    #[arg(long)]
    pub bins: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: glfit_core::Error| e.to_string())
}

fn parse_q(s: &str) -> Result<QTag, String> {
    s.parse().map_err(|e: glfit_core::Error| e.to_string())
}

fn parse_freq_mode(s: &str) -> Result<FreqMode, String> {
    s.parse().map_err(|e: glfit_core::Error| e.to_string())
}

/// Expands `lo:hi:step` into lo, lo + step, … ≤ hi.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || format!("invalid --p-grid {spec:?}: expected lo:hi:step");
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let (lo, hi, step) = (nums[0], nums[1], nums[2]);
    if !(lo.is_finite() && hi.is_finite() && step.is_finite() && step > 0.0 && hi >= lo) {
        return Err(format!("invalid --p-grid {spec:?}: need lo <= hi and step > 0"));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(format!("invalid --p-grid {spec:?}: more than 100000 points"));
    }
    Ok((0..count).map(|k| lo + k as f64 * step).collect())
}

struct Failure(i32, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(EXIT_INPUT, e.to_string())
    }
}

type Run = Result<i32, Failure>;

fn read_sample(path: Option<&Path>) -> Result<Sample, Failure> {
    match path {
        None => Ok(bundled_sample()),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure(EXIT_INPUT, format!("cannot read {}: {e}", path.display())))?;
            load_sample(&text).map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display())))
        }
    }
}

fn input_label(path: Option<&Path>) -> String {
    path.map_or_else(|| "bundled".to_string(), |p| p.display().to_string())
}

/// Loads the sample and applies the optional Grubbs screening, recording both in `report`.
fn prepare(args: &InputArgs, report: &mut Report) -> Result<Sample, Failure> {
    let raw = read_sample(args.input.as_deref())?;
    report.config("input", input_label(args.input.as_deref()));
    report.config("grubbs", args.grubbs);
    if !args.grubbs {
        return Ok(raw);
    }
    report.config("alpha", args.alpha);
    let (clean, reports) = grubbs_filter(&raw, args.alpha, raw.len())?;
    let removed: Vec<String> = reports
        .iter()
        .filter(|r| r.rejected)
        .map(|r| r.suspect_value.to_string())
        .collect();
    report.summary("grubbs_removed", removed.len());
    if !removed.is_empty() {
        report.summary("grubbs_removed_values", removed.join(" "));
    }
    Ok(clean)
}

fn emit(report: &Report, out: &OutputArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let text = report.render(out.format, out.precision as usize);
    match &out.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure(EXIT_INPUT, format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure(EXIT_INPUT, format!("cannot write to stdout: {e}"))),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents)
        .map_err(|e| Failure(EXIT_INPUT, format!("cannot write {}: {e}", path.display())))
}

fn status(all_converged: bool) -> i32 {
    if all_converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    }
}

const FIT_COLUMNS: [&str; 8] = ["method", "p", "q", "mu", "sigma", "objective", "converged", "iterations"];

fn fit_row(r: &FitResult) -> Vec<Cell> {
    vec![
        r.method.as_str().into(),
        r.params.p().into(),
        r.q.map_or("-", QTag::as_str).into(),
        r.params.mu().into(),
        r.params.sigma().into(),
        r.objective.into(),
        r.converged.into(),
        r.iterations.into(),
    ]
}

const CONSTRUCTION_NOTE: &str =
    "min_disagreement objectives depend on the frequency construction (freq_mode, bins); compare trends, not absolute values";

fn cmd_fit(args: &FitArgs, stdout: &mut dyn Write) -> Run {
    let mut report = Report::new(&FIT_COLUMNS);
    report.config("command", "fit");
    let sample = prepare(&args.input, &mut report)?;
    let bins = match args.freq_mode {
        FreqMode::Distinct => None,
        FreqMode::Histogram => Some(args.bins.unwrap_or_else(|| sturges_bins(sample.len()))),
    };
    report.config("method", args.method.as_str());
    report.config("p", args.p);
    report.config("q", args.q.as_str());
    report.config("freq_mode", args.freq_mode.as_str());
    if let Some(b) = bins {
        report.config("bins", b);
    }
    report.config("fit_p", args.fit_p);

    let config = FitConfig {
        method: args.method,
        p: args.p,
        q: args.q,
        freq_mode: args.freq_mode,
        bins,
        fit_shape: args.fit_p,
    };
    let result = fit(&sample, &config)?;
    report.row(fit_row(&result));
    report.summary("n", sample.len());
    for w in &result.warnings {
        report.note(format!("warning: {w}"));
    }
    if args.method == Method::MinDisagreement {
        report.note(CONSTRUCTION_NOTE);
    }
    emit(&report, &args.output, stdout)?;

    if let (Some(format), Some(path)) = (args.plot.plot, &args.plot.plot_out) {
        let frequency_based = matches!(
            args.method,
            Method::MinDisagreement | Method::Moments | Method::CentralMoments
        );
        let fs = if frequency_based {
            build_freq(&sample, args.freq_mode, bins)?
        } else {
            build_freq(&sample, FreqMode::Histogram, Some(sturges_bins(sample.len())))?
        };
        write_file(path, &plot::density_plot(&fs, &GLDist::new(result.params), format))?;
    }
    Ok(status(result.converged))
}

fn cmd_profile(args: &ProfileArgs, stdout: &mut dyn Write) -> Run {
    let mut report = Report::new(&["p", "mu", "sigma", "mle", "converged"]);
    report.config("command", "profile");
    let sample = prepare(&args.input, &mut report)?;
    let grid = parse_grid(&args.p_grid)?;
    report.config("p_grid", args.p_grid.as_str());
    report.config("warm_start", !args.cold_start);
    let opts = ProfileOptions {
        warm_start: !args.cold_start,
        ..ProfileOptions::default()
    };
    let curve = mle_profile(&sample, &grid, &opts)?;
    for pt in &curve.points {
        report.row(vec![pt.p.into(), pt.mu.into(), pt.sigma.into(), pt.mle.into(), pt.converged.into()]);
    }
    report.summary("n", sample.len());
    report.summary("p_max", curve.p_max);
    report.summary("mle_max", curve.mle_max);
    report.summary("mu_at_max", curve.params_at_max.mu());
    report.summary("sigma_at_max", curve.params_at_max.sigma());
    for (name, c) in ["c4", "c3", "c2", "c1", "c0"].iter().zip(curve.quartic) {
        report.summary(name, c);
    }
    report.summary("r_squared", curve.r_squared);
    report.summary("quartic_p_max", curve.poly_p_max);
    report.summary("quartic_mle_max", curve.poly_mle_max);
    for (p, why) in &curve.failures {
        report.note(format!("fit failed at p={p}: {why}"));
    }
    emit(&report, &args.output, stdout)?;
    if let (Some(format), Some(path)) = (args.plot.plot, &args.plot.plot_out) {
        write_file(path, &plot::profile_plot(&curve, format))?;
    }
    let ok = curve.failures.is_empty() && curve.points.iter().all(|p| p.converged);
    Ok(status(ok))
}

fn cmd_grubbs(args: &GrubbsArgs, stdout: &mut dyn Write) -> Run {
    let mut report = Report::new(&["round", "n", "suspect", "g", "critical", "rejected"]);
    report.config("command", "grubbs");
    report.config("input", input_label(args.input.as_deref()));
    report.config("alpha", args.alpha);
    report.config("max_removals", args.max_removals);
    let sample = read_sample(args.input.as_deref())?;
    let (clean, rounds) = grubbs_filter(&sample, args.alpha, args.max_removals)?;
    for (i, r) in rounds.iter().enumerate() {
        report.row(vec![
            (i + 1).into(),
            r.n.into(),
            r.suspect_value.into(),
            r.g_statistic.into(),
            r.critical.into(),
            r.rejected.into(),
        ]);
    }
    report.summary("n_initial", sample.len());
    report.summary("removed", sample.len() - clean.len());
    report.summary("n_final", clean.len());
    if rounds.is_empty() {
        report.note("sample too small for the test; nothing removed");
    }
    emit(&report, &args.output, stdout)?;
    if let Some(path) = &args.emit_clean {
        write_file(path, &clean.to_text())?;
    }
    Ok(EXIT_OK)
}

fn cmd_table2(args: &Table2Args, stdout: &mut dyn Write) -> Run {
    let mut report = Report::new(&FIT_COLUMNS);
    report.config("command", "table2");
    let sample = prepare(&args.input, &mut report)?;
    let bins = match args.freq_mode {
        FreqMode::Distinct => None,
        FreqMode::Histogram => Some(args.bins.unwrap_or_else(|| sturges_bins(sample.len()))),
    };
    report.config("freq_mode", args.freq_mode.as_str());
    if let Some(b) = bins {
        report.config("bins", b);
    }
    let configs = table2_configs(args.freq_mode, bins);
    let results = sweep(&sample, &configs, Execution::default());
    let mut ok = true;
    for (config, result) in configs.iter().zip(results) {
        match result {
            Ok(r) => {
                ok &= r.converged;
                report.row(fit_row(&r));
            }
            Err(e) => {
                ok = false;
                let q = if config.method == Method::MinDisagreement { config.q.as_str() } else { "-" };
                report.row(vec![
                    config.method.as_str().into(),
                    config.p.into(),
                    q.into(),
                    f64::NAN.into(),
                    f64::NAN.into(),
                    f64::NAN.into(),
                    false.into(),
                    0usize.into(),
                ]);
                report.note(format!("{} p={} q={q}: {e}", config.method, config.p));
            }
        }
    }
    report.summary("n", sample.len());
    report.note(CONSTRUCTION_NOTE);
    emit(&report, &args.output, stdout)?;
    Ok(status(ok))
}

/// Runs the command line `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_INPUT
                }
            };
        }
    };
    let outcome = match &cli.command {
        Command::Fit(a) => cmd_fit(a, stdout),
        Command::Profile(a) => cmd_profile(a, stdout),
        Command::Grubbs(a) => cmd_grubbs(a, stdout),
        Command::Table2(a) => cmd_table2(a, stdout),
    };
    match outcome {
        Ok(code) => {
            if code == EXIT_NOT_CONVERGED {
                let _ = writeln!(stderr, "glfit: warning: at least one fit did not converge");
            }
            code
        }
        Err(Failure(code, msg)) => {
            let _ = writeln!(stderr, "glfit: error: {msg}");
            code
        }
    }
}
