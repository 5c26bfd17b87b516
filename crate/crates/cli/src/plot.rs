use std::fmt::Write as _;

use clap::ValueEnum;
use glfit_core::data_series::FreqSeries;
use glfit_core::estimators::{eval_log2_quartic, ProfileCurve};
use glfit_core::GLDist;

use crate::report::round_sig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotFormat {
    Csv,
    Svg,
}

enum Style {
    Line,
    Markers,
    /// Bars of the given width in data units.
    Bars(f64),
}

struct Series {
    name: &'static str,
    color: &'static str,
    style: Style,
    points: Vec<(f64, f64)>,
}

struct Chart {
    title: String,
    x_label: &'static str,
    y_label: &'static str,
    series: Vec<Series>,
    /// Vertical guide at this x, if any.
    guide: Option<f64>,
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(f64::EPSILON);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * span {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

impl Chart {
    fn render(&self) -> String {
        let all = self.series.iter().flat_map(|s| s.points.iter());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in all {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if self.series.iter().any(|s| matches!(s.style, Style::Bars(_))) {
            y0 = y0.min(0.0);
        }
        let pad = 0.05 * (y1 - y0).max(1e-12);
        let (y0, y1) = (y0 - pad, y1 + pad);
        let (x0, x1) = if x1 > x0 { (x0, x1) } else { (x0 - 1.0, x1 + 1.0) };
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
        let sy = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            W / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            W - LEFT - RIGHT,
            H - TOP - BOTTOM
        );
        for t in ticks(x0, x1) {
            let x = sx(t);
            let _ = writeln!(
                s,
                r#"<line x1="{x:.1}" y1="{b}" x2="{x:.1}" y2="{b2}" stroke="black"/><text x="{x:.1}" y="{ty}" text-anchor="middle">{label}</text>"#,
                label = round_sig(t, 10),
                b = H - BOTTOM,
                b2 = H - BOTTOM + 5.0,
                ty = H - BOTTOM + 18.0
            );
        }
        for t in ticks(y0, y1) {
            let y = sy(t);
            let _ = writeln!(
                s,
                r#"<line x1="{l2}" y1="{y:.1}" x2="{LEFT}" y2="{y:.1}" stroke="black"/><text x="{tx}" y="{ty:.1}" text-anchor="end">{label}</text>"#,
                label = round_sig(t, 10),
                l2 = LEFT - 5.0,
                tx = LEFT - 8.0,
                ty = y + 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            (LEFT + W - RIGHT) / 2.0,
            H - 12.0,
            self.x_label
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{y}" text-anchor="middle" transform="rotate(-90 16 {y})">{}</text>"#,
            self.y_label,
            y = (TOP + H - BOTTOM) / 2.0
        );
        if let Some(g) = self.guide {
            let _ = writeln!(
                s,
                r##"<line x1="{x:.1}" y1="{TOP}" x2="{x:.1}" y2="{b}" stroke="#888" stroke-dasharray="4 3"/>"##,
                x = sx(g),
                b = H - BOTTOM
            );
        }
        for series in &self.series {
            match series.style {
                Style::Bars(width) => {
                    for &(x, y) in &series.points {
                        let (xa, xb) = (sx(x - width / 2.0), sx(x + width / 2.0));
                        let (ya, yb) = (sy(y.max(0.0)), sy(0.0));
                        let _ = writeln!(
                            s,
                            r#"<rect x="{xa:.1}" y="{ya:.1}" width="{:.1}" height="{:.1}" fill="{}" fill-opacity="0.5"/>"#,
                            (xb - xa).max(0.5),
                            (yb - ya).max(0.0),
                            series.color
                        );
                    }
                }
                Style::Line => {
                    let pts: Vec<String> = series
                        .points
                        .iter()
                        .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
                        .collect();
                    let _ = writeln!(
                        s,
                        r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
                        pts.join(" "),
                        series.color
                    );
                }
                Style::Markers => {
                    for &(x, y) in &series.points {
                        let _ = writeln!(
                            s,
                            r#"<circle cx="{:.1}" cy="{:.1}" r="3.5" fill="{}"/>"#,
                            sx(x),
                            sy(y),
                            series.color
                        );
                    }
                }
            }
        }
        for (i, series) in self.series.iter().enumerate() {
            let y = TOP + 16.0 + 16.0 * i as f64;
            let x = W - RIGHT - 150.0;
            let _ = writeln!(
                s,
                r#"<rect x="{x}" y="{}" width="10" height="10" fill="{}"/><text x="{}" y="{y}">{}</text>"#,
                y - 9.0,
                series.color,
                x + 16.0,
                series.name
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn quartic_curve(curve: &ProfileCurve) -> Vec<(f64, f64)> {
    let lo = curve.points[0].p;
    let hi = curve.points[curve.points.len() - 1].p;
    (0..=200)
        .map(|i| {
            let p = lo + (hi - lo) * i as f64 / 200.0;
            (p, eval_log2_quartic(&curve.quartic, p))
        })
        .collect()
}

pub fn profile_plot(curve: &ProfileCurve, format: PlotFormat) -> String {
    match format {
        PlotFormat::Csv => {
            let mut s = String::from("p,mle,quartic\n");
            for pt in &curve.points {
                let _ = writeln!(s, "{},{},{}", pt.p, pt.mle, eval_log2_quartic(&curve.quartic, pt.p));
            }
            s
        }
        PlotFormat::Svg => Chart {
            title: format!("Log2-likelihood profile, maximum at p = {:.3}", curve.p_max),
            x_label: "p",
            y_label: "MLE (log2)",
            series: vec![
                Series {
                    name: "quartic in log2 p",
                    color: "#1f77b4",
                    style: Style::Line,
                    points: quartic_curve(curve),
                },
                Series {
                    name: "profile",
                    color: "#d62728",
                    style: Style::Markers,
                    points: curve.points.iter().map(|pt| (pt.p, pt.mle)).collect(),
                },
            ],
            guide: Some(curve.p_max),
        }
        .render(),
    }
}

/// Observed frequencies against the fitted model frequencies n·w·f(x).
pub fn density_plot(fs: &FreqSeries, dist: &GLDist, format: PlotFormat) -> String {
    let mass = fs.n_total() * fs.cell_width();
    match format {
        PlotFormat::Csv => {
            let mut s = String::from("x,observed,model\n");
            for (&x, &y) in fs.x().iter().zip(fs.y()) {
                let _ = writeln!(s, "{x},{y},{}", mass * dist.pdf(x));
            }
            s
        }
        PlotFormat::Svg => {
            let (lo, hi) = (fs.x()[0], fs.x()[fs.len() - 1]);
            let margin = 0.1 * (hi - lo).max(fs.cell_width());
            let model = (0..=300)
                .map(|i| {
                    let x = lo - margin + (hi - lo + 2.0 * margin) * i as f64 / 300.0;
                    (x, mass * dist.pdf(x))
                })
                .collect();
            let params = dist.params();
            Chart {
                title: format!(
                    "Fit: mu = {:.4}, sigma = {:.4}, p = {}",
                    params.mu(),
                    params.sigma(),
                    params.p()
                ),
                x_label: "x",
                y_label: "frequency",
                series: vec![
                    Series {
                        name: "observed",
                        color: "#7f7f7f",
                        style: Style::Bars(fs.cell_width()),
                        points: fs.x().iter().copied().zip(fs.y().iter().copied()).collect(),
                    },
                    Series {
                        name: "model",
                        color: "#d62728",
                        style: Style::Line,
                        points: model,
                    },
                ],
                guide: None,
            }
            .render()
        }
    }
}
