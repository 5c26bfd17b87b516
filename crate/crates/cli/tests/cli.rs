use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use glfit_core::data_series::Sample;
use glfit_core::gl_dist::{sample, GLParams};
use serde_json::Value;

fn dataset() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/pcb_logkow.txt")
}

fn glfit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glfit"))
        .args(args)
        .output()
        .expect("failed to launch glfit")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Data rows of a tsv report, split into fields.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect()
}

fn footer(text: &str, key: &str) -> f64 {
    let prefix = format!("# {key}: ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no {key} in footer:\n{text}"))
        .parse()
        .unwrap()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn fit_mle_reproduces_published_rows() {
    let data = dataset();
    for (p, mu, sigma, mle, tol, tol_mle) in [
        ("2", 6.464, 0.802, -354.208, 0.002, 0.05),
        ("1", 6.510, 0.914, -371.620, 0.01, 0.2),
    ] {
        let out = glfit(&["fit", "--input", data.to_str().unwrap(), "--grubbs", "--method", "mle", "--p", p]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        let text = stdout(&out);
        assert!(text.starts_with("method\tp\tq\tmu\tsigma\tobjective\tconverged\titerations\n"));
        let row = &rows(&text)[0];
        assert_eq!(row[0], "mle");
        assert!((num(&row[3]) - mu).abs() < tol, "{text}");
        assert!((num(&row[4]) - sigma).abs() < tol, "{text}");
        assert!((num(&row[5]) - mle).abs() < tol_mle, "{text}");
        assert_eq!(row[6], "true");
        assert_eq!(footer(&text, "grubbs_removed"), 1.0);
    }
}

#[test]
fn missing_input_is_an_input_error() {
    let out = glfit(&["fit", "--input", "missing.txt", "--method", "mle"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("missing.txt"));
    assert!(stdout(&out).is_empty());
}

#[test]
fn malformed_input_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "1.0\n2.0\n3.0 x4\n").unwrap();
    let out = glfit(&["fit", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("bad.txt") && err.contains("line 3"), "{err}");
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(glfit(&["fit", "--bogus"]).status.code(), Some(1));
    assert_eq!(glfit(&["fit", "--method", "ols"]).status.code(), Some(1));
    assert_eq!(glfit(&["fit", "--q", "3"]).status.code(), Some(1));
    assert_eq!(glfit(&["fit", "--plot", "svg"]).status.code(), Some(1));
    assert_eq!(glfit(&[]).status.code(), Some(1));
    let help = glfit(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("table2"));
}

#[test]
fn profile_locates_the_maximum() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("profile.svg");
    let out = glfit(&[
        "profile",
        "--input",
        dataset().to_str().unwrap(),
        "--grubbs",
        "--p-grid",
        "1:4:0.25",
        "--plot",
        "svg",
        "--plot-out",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(rows(&text).len(), 13);
    assert!((footer(&text, "p_max") - 2.008).abs() < 0.05);
    assert!((footer(&text, "mle_max") + 354.207).abs() < 0.1);
    assert!(footer(&text, "r_squared") > 0.999);
    for key in ["c4", "c3", "c2", "c1", "c0", "quartic_p_max"] {
        assert!(footer(&text, key).is_finite());
    }
    let plot = fs::read_to_string(&svg).unwrap();
    assert!(plot.starts_with("<svg") && plot.contains("<polyline") && plot.trim_end().ends_with("</svg>"));
}

#[test]
fn profile_rejects_a_short_grid() {
    let out = glfit(&["profile", "--p-grid", "2:2:0.25"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("grid too short"));
    assert_eq!(glfit(&["profile", "--p-grid", "1:4"]).status.code(), Some(1));
}

#[test]
fn profile_recovers_laplace_shape() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("laplace.txt");
    let draws = sample(&GLParams::new(3.0, 0.5, 1.0).unwrap(), 50_000, 31).unwrap();
    fs::write(&path, Sample::new(draws).unwrap().to_text()).unwrap();
    let out = glfit(&["profile", "--input", path.to_str().unwrap(), "--p-grid", "0.5:2:0.25"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let p_max = footer(&stdout(&out), "p_max");
    assert!((0.85..=1.15).contains(&p_max), "{p_max}");
}

#[test]
fn grubbs_removes_one_value() {
    let out = glfit(&["grubbs", "--input", dataset().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let table = rows(&text);
    assert_eq!(table[0][2], "9.603");
    assert_eq!(table[0][5], "true");
    assert_eq!(table[1][5], "false");
    assert_eq!(footer(&text, "removed"), 1.0);
    assert_eq!(footer(&text, "n_final"), 205.0);
}

#[test]
fn grubbs_with_tiny_alpha_removes_nothing() {
    let out = glfit(&["grubbs", "--alpha", "1e-9"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(footer(&text, "removed"), 0.0);
    assert_eq!(footer(&text, "n_final"), 206.0);
}

#[test]
fn cleaned_sample_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("clean1.txt");
    let second = dir.path().join("clean2.txt");
    assert_eq!(glfit(&["grubbs", "--emit-clean", first.to_str().unwrap()]).status.code(), Some(0));
    let again = glfit(&["grubbs", "--input", first.to_str().unwrap(), "--emit-clean", second.to_str().unwrap()]);
    assert_eq!(footer(&stdout(&again), "removed"), 0.0);
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());

    let from_file = glfit(&["fit", "--input", first.to_str().unwrap(), "--p", "3"]);
    let screened = glfit(&["fit", "--grubbs", "--p", "3"]);
    assert_eq!(rows(&stdout(&from_file)), rows(&stdout(&screened)));
    assert_eq!(footer(&stdout(&from_file), "n"), 205.0);
}

#[test]
fn table2_layout_and_trend() {
    let out = glfit(&["table2", "--grubbs"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let table = rows(&text);
    assert_eq!(table.len(), 40);
    assert!(text.contains("frequency construction"));

    let q0: Vec<(f64, f64)> = table
        .iter()
        .filter(|r| r[0] == "min_disagreement" && r[2] == "0")
        .map(|r| (num(&r[1]), num(&r[4])))
        .filter(|&(p, _)| p >= 1.0)
        .collect();
    assert_eq!(q0.len(), 8);
    assert!(q0.windows(2).all(|w| w[1].1 <= w[0].1), "{q0:?}");

    let mle: Vec<&Vec<String>> = table.iter().filter(|r| r[0] == "mle").collect();
    assert_eq!(mle.len(), 4);
    for (row, (mu, sigma, value)) in mle.iter().zip([
        (6.510, 0.914, -371.620),
        (6.464, 0.802, -354.208),
        (6.468, 0.829, -360.790),
        (6.476, 0.886, -373.810),
    ]) {
        assert!((num(&row[3]) - mu).abs() < 0.01);
        assert!((num(&row[4]) - sigma).abs() < 0.01);
        assert!((num(&row[5]) - value).abs() < 0.2);
    }
}

#[test]
fn formats_carry_the_same_numbers() {
    let args = ["table2", "--grubbs", "--precision", "12"];
    let tsv = stdout(&glfit(&args));
    let csv = stdout(&glfit(&[&args[..], &["--format", "csv"]].concat()));
    let json: Value = serde_json::from_str(&stdout(&glfit(&[&args[..], &["--format", "json"]].concat()))).unwrap();

    let tsv_rows = rows(&tsv);
    let csv_rows: Vec<Vec<String>> = csv
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert_eq!(tsv_rows, csv_rows);

    let json_rows = json["rows"].as_array().unwrap();
    assert_eq!(json_rows.len(), tsv_rows.len());
    for (t, j) in tsv_rows.iter().zip(json_rows) {
        assert_eq!(j["method"], t[0].as_str());
        for (col, idx) in [("p", 1), ("mu", 3), ("sigma", 4), ("objective", 5)] {
            assert_eq!(j[col].as_f64().unwrap(), num(&t[idx]), "{col}");
        }
    }
    assert_eq!(json["config"]["command"], "table2");
    assert_eq!(json["summary"]["n"], 205);
    let keys: Vec<&String> = json_rows[0].as_object().unwrap().keys().collect();
    assert_eq!(keys[..3], ["method", "p", "q"]);
}

#[test]
fn report_and_plot_files() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("fit.json");
    let plot = dir.path().join("fit.csv");
    let out = glfit(&[
        "fit",
        "--method",
        "min_disagreement",
        "--p",
        "2",
        "--q",
        "1",
        "--freq-mode",
        "histogram",
        "--format",
        "json",
        "--out",
        report.to_str().unwrap(),
        "--plot",
        "csv",
        "--plot-out",
        plot.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).is_empty());
    let json: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["config"]["bins"], 9);
    assert_eq!(json["rows"][0]["q"], "1");
    let csv = fs::read_to_string(&plot).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,observed,model"));
    assert_eq!(lines.count(), 9);
}

#[test]
fn shape_can_be_estimated() {
    let out = glfit(&["fit", "--method", "population_stats", "--fit-p"]);
    assert_eq!(out.status.code(), Some(0));
    let row = &rows(&stdout(&out))[0];
    assert!(num(&row[1]) > 0.25 && num(&row[1]) < 64.0);
}
