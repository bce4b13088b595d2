//! End-to-end tests of the `emhlab` binary on the bundled fixtures.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_emhlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_success(out: &std::process::Output) {
    assert!(
        out.status.success(),
        "command failed ({:?}):\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read_csv_column(path: &Path, column: &str) -> Vec<f64> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header
        .iter()
        .position(|h| *h == column)
        .unwrap_or_else(|| panic!("no column {column} in {header:?}"));
    lines
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn dir_snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut map = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        map.insert(
            entry.file_name().to_string_lossy().into_owned(),
            std::fs::read(entry.path()).unwrap(),
        );
    }
    map
}

#[test]
fn corr_runs_on_the_bundled_panel() {
    let out_dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "corr",
        "--manifest",
        &fixture("panel.manifest"),
        "--lags",
        "50",
        "--out",
        out_dir.path().to_str().unwrap(),
    ]);
    assert_success(&out);

    for name in [
        "corr_series_a__series_a.csv",
        "corr_series_a__series_b.csv",
        "corr_abs_series_a__series_a.csv",
        "corr_abs_series_a__series_b.csv",
        "corr.svg",
        "corr_abs.svg",
        "manifest_corr.json",
    ] {
        assert!(out_dir.path().join(name).exists(), "{name} missing");
    }
    let auto = read_csv_column(
        &out_dir.path().join("corr_series_a__series_a.csv"),
        "correlation",
    );
    assert_eq!(auto.len(), 51);
    assert!((auto[0] - 1.0).abs() < 1e-12, "C(0) = {}", auto[0]);

    let manifest = read_json(&out_dir.path().join("manifest_corr.json"));
    assert_eq!(manifest["command"], "corr");
    assert_eq!(manifest["seed"], 42);
    assert!(manifest["config"]["lags"].is_number());
}

#[test]
fn corr_ar1_fixture_sits_inside_the_noise_band_of_rho() {
    let out_dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "corr",
        "--manifest",
        &fixture("ar1.manifest"),
        "--lags",
        "3",
        "--out",
        out_dir.path().to_str().unwrap(),
    ]);
    assert_success(&out);
    let path = out_dir.path().join("corr_ar1__ar1.csv");
    let corr = read_csv_column(&path, "correlation");
    let band = read_csv_column(&path, "noise_band")[0];
    assert!(
        (corr[1] - 0.5).abs() < band,
        "lag-1 correlation {} should be within {band} of 0.5",
        corr[1]
    );
}

#[test]
fn date_range_flags_restrict_the_panel() {
    let out_dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "corr",
        "--manifest",
        &fixture("panel.manifest"),
        "--lags",
        "10",
        "--from",
        "2016-06-01",
        "--to",
        "2017-06-01",
        "--out",
        out_dir.path().to_str().unwrap(),
    ]);
    assert_success(&out);
    // roughly one year of weekdays, far fewer than the full fixture
    let band = read_csv_column(
        &out_dir.path().join("corr_series_a__series_a.csv"),
        "noise_band",
    )[0];
    let implied_n = (1.96f64 / band).powi(2).round() as i64;
    assert!(
        (200..320).contains(&implied_n),
        "restricted panel implies {implied_n} returns"
    );

    // an empty range is a data error
    let out = run(&[
        "corr",
        "--manifest",
        &fixture("panel.manifest"),
        "--from",
        "2040-01-01",
        "--out",
        out_dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_manifest_flag_is_a_usage_error() {
    let out = run(&["corr"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nonexistent_manifest_file_is_a_data_error() {
    let out = run(&["corr", "--manifest", "/nonexistent/panel.manifest"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn dcca_shared_trend_pair_scales_persistently() {
    let out_dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "dcca",
        "--manifest",
        &fixture("panel.manifest"),
        "--out",
        out_dir.path().to_str().unwrap(),
    ]);
    assert_success(&out);
    let cross = read_json(&out_dir.path().join("dcca_series_a__series_b.json"));
    let lambda = cross["lambda"]
        .as_f64()
        .expect("cross pair has a power law");
    assert!(lambda > 0.6, "cross lambda {lambda}");
    assert!(out_dir.path().join("dcca.svg").exists());
}

#[test]
fn dcca_on_a_constant_series_is_a_data_error() {
    let out_dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "dcca",
        "--manifest",
        &fixture("const.manifest"),
        "--out",
        out_dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("degenerate"), "stderr: {stderr}");
}

#[test]
fn dcca_white_noise_lambda_is_one_half() {
    let out_dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "dcca",
        "--manifest",
        &fixture("gauss.manifest"),
        "--out",
        out_dir.path().to_str().unwrap(),
    ]);
    assert_success(&out);
    let summary = read_json(&out_dir.path().join("dcca_gauss__gauss.json"));
    let lambda = summary["lambda"].as_f64().unwrap();
    assert!((lambda - 0.5).abs() < 0.05, "lambda {lambda}");
    assert!(summary["r_squared"].as_f64().unwrap() > 0.99);
}

#[test]
fn levy_gaussian_fixture_recovers_alpha_two() {
    let out_dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "levy",
        "--manifest",
        &fixture("gauss.manifest"),
        "--realizations",
        "500",
        "--n-values",
        "1,2,4,8,16,32,64",
        "--out",
        out_dir.path().to_str().unwrap(),
    ]);
    assert_success(&out);
    let summary = read_json(&out_dir.path().join("levy_gauss.json"));
    let alpha = summary["alpha"].as_f64().unwrap();
    assert!((1.85..=2.15).contains(&alpha), "alpha {alpha}");
    assert!(summary["bin_width"].as_f64().unwrap() > 0.0);
    assert_eq!(summary["realizations"], 500);

    let stderrs = read_csv_column(&out_dir.path().join("levy_gauss.csv"), "stderr");
    assert_eq!(stderrs.len(), 7);
    assert!(stderrs.iter().all(|s| *s >= 0.0));
}

#[test]
fn levy_zero_realizations_is_a_usage_error() {
    let out_dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "levy",
        "--manifest",
        &fixture("gauss.manifest"),
        "--realizations",
        "0",
        "--out",
        out_dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pca_emits_features_and_loadings_per_window() {
    let out_dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "pca",
        "--manifest",
        &fixture("market.manifest"),
        "--out",
        out_dir.path().to_str().unwrap(),
    ]);
    assert_success(&out);
    for w in [5usize, 10] {
        let values = read_csv_column(&out_dir.path().join(format!("pca_w{w}.csv")), "pc_value");
        assert!(values.len() > 300, "window {w}: {} rows", values.len());
        let eigen = read_csv_column(
            &out_dir.path().join(format!("pca_w{w}.csv")),
            "largest_eigenvalue",
        );
        assert!(eigen.iter().all(|e| *e > 0.0));

        let loadings = read_json(&out_dir.path().join(format!("pca_w{w}_loadings.json")));
        assert_eq!(loadings["series"].as_array().unwrap().len(), 6);
        assert_eq!(loadings["first_component"].as_array().unwrap().len(), 6);
        assert_eq!(loadings["eigenvalues"].as_array().unwrap().len(), 6);
    }
    assert!(out_dir.path().join("pca_eigen.svg").exists());
}

fn fast_backtest_args<'a>(manifest: &'a str, out: &'a str) -> Vec<&'a str> {
    vec![
        "backtest",
        "--manifest",
        manifest,
        "--epochs",
        "6",
        "--hidden",
        "8",
        "--learning-rate",
        "0.01",
        "--out",
        out,
    ]
}

#[test]
fn backtest_emits_ledger_equity_and_stats() {
    let out_dir = tempfile::tempdir().unwrap();
    let manifest = fixture("market.manifest");
    let out = run(&fast_backtest_args(
        &manifest,
        out_dir.path().to_str().unwrap(),
    ));
    assert_success(&out);

    let capital = read_csv_column(&out_dir.path().join("equity.csv"), "capital");
    let strategy_returns = read_csv_column(&out_dir.path().join("ledger.csv"), "strategy_return");
    assert_eq!(capital.len(), strategy_returns.len());
    assert!(capital.len() > 300);

    // recompound the ledger and compare
    let mut c = 1.0f64;
    for (i, r) in strategy_returns.iter().enumerate() {
        c *= 1.0 + r;
        assert!(
            (c - capital[i]).abs() < 1e-9,
            "day {i}: recompounded {c} vs {}",
            capital[i]
        );
    }

    let stats = read_json(&out_dir.path().join("backtest_stats.json"));
    assert!(stats["stats"]["total_return"].is_number());
    assert_eq!(stats["strategy"]["threshold_points"], 500.0);
    assert!(out_dir.path().join("equity.svg").exists());
}

#[test]
fn reruns_are_byte_identical_even_across_worker_counts() {
    let out_dir = tempfile::tempdir().unwrap();
    let out_str = out_dir.path().to_str().unwrap().to_string();
    let manifest = fixture("gauss.manifest");
    let base = [
        "levy",
        "--manifest",
        manifest.as_str(),
        "--realizations",
        "100",
        "--n-values",
        "1,2,4,8",
        "--out",
        out_str.as_str(),
    ];

    let out = run(&[&base[..], &["--workers", "1"]].concat());
    assert_success(&out);
    let first = dir_snapshot(out_dir.path());

    let out = run(&[&base[..], &["--workers", "2"]].concat());
    assert_success(&out);
    let second = dir_snapshot(out_dir.path());
    assert_eq!(first, second, "levy outputs differ across worker counts");
}

#[test]
fn backtest_reruns_reproduce_identical_bytes() {
    let out_dir = tempfile::tempdir().unwrap();
    let manifest = fixture("market.manifest");
    let args = fast_backtest_args(&manifest, out_dir.path().to_str().unwrap());

    assert_success(&run(&args));
    let first = dir_snapshot(out_dir.path());
    assert_success(&run(&args));
    let second = dir_snapshot(out_dir.path());
    assert_eq!(first, second);
}

#[test]
fn report_emits_the_eight_configuration_grid() {
    let out_dir = tempfile::tempdir().unwrap();
    let manifest = fixture("market.manifest");
    let out = run(&[
        "report",
        "--manifest",
        &manifest,
        "--epochs",
        "6",
        "--hidden",
        "8",
        "--learning-rate",
        "0.01",
        "--out",
        out_dir.path().to_str().unwrap(),
    ]);
    assert_success(&out);

    let text = std::fs::read_to_string(out_dir.path().join("grid_report.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 9, "header plus 8 rows");
    assert!(lines[0].starts_with("n_l,n_g,"));

    let json = read_json(&out_dir.path().join("grid_report.json"));
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    let mut combos: Vec<(u64, u64)> = rows
        .iter()
        .map(|r| (r["n_l"].as_u64().unwrap(), r["n_g"].as_u64().unwrap()))
        .collect();
    combos.sort_unstable();
    assert_eq!(
        combos,
        vec![
            (1, 0),
            (1, 1),
            (1, 2),
            (1, 3),
            (2, 0),
            (2, 1),
            (2, 2),
            (2, 3)
        ]
    );
    for row in rows {
        let stats = &row["stats"];
        for key in [
            "mean_daily_return",
            "volatility",
            "skewness",
            "kurtosis",
            "monthly_return",
            "total_return",
        ] {
            assert!(!stats[key].is_null() || key == "skewness" || key == "kurtosis");
            assert!(stats.get(key).is_some(), "missing {key}");
        }
    }
}
