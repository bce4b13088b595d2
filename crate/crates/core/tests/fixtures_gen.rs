//! Regenerates the bundled fixtures under `fixtures/` from fixed seeds.
//! Run explicitly when the generators change:
//!
//! ```text
//! cargo test -p emhlab --test fixtures_gen -- --ignored
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;

use emhlab::synth;

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn write_series(name: &str, dates: &[chrono::NaiveDate], closes: &[f64]) {
    let mut out = String::from("date,close\n");
    for (d, c) in dates.iter().zip(closes) {
        writeln!(out, "{d},{c:.6}").unwrap();
    }
    std::fs::write(fixtures_dir().join(name), out).unwrap();
}

fn prices_from(returns: &[f64], scale: f64, base: f64) -> Vec<f64> {
    let scaled: Vec<f64> = returns.iter().map(|r| r * scale).collect();
    synth::returns_to_prices(&scaled, base)
}

#[test]
#[ignore = "writes into fixtures/; run on purpose"]
fn regenerate_fixtures() {
    std::fs::create_dir_all(fixtures_dir()).unwrap();

    // shared-trend pair: persistent common component, white idiosyncratic part
    let (ra, rb) = synth::shared_trend_returns(2048, 0.85, 0.75, 301);
    let pa = prices_from(&ra, 0.01, 100.0);
    let pb = prices_from(&rb, 0.01, 120.0);
    let dates = synth::trading_dates(synth::default_start(), pa.len());
    write_series("series_a.csv", &dates, &pa);
    write_series("series_b.csv", &dates, &pb);
    std::fs::write(
        fixtures_dir().join("panel.manifest"),
        "# two synthetic series with a shared persistent component\n\
         target = series_a\n\
         series_a = series_a.csv\n\
         series_b = series_b.csv\n",
    )
    .unwrap();

    // AR(1) log-returns, rho = 0.5
    let ar = synth::ar1(4000, 0.5, 302);
    let prices = prices_from(&ar, 0.01, 100.0);
    let dates = synth::trading_dates(synth::default_start(), prices.len());
    write_series("ar1.csv", &dates, &prices);
    std::fs::write(
        fixtures_dir().join("ar1.manifest"),
        "# AR(1) log-returns with coefficient 0.5\ntarget = ar1\nar1 = ar1.csv\n",
    )
    .unwrap();

    // i.i.d. Gaussian log-returns
    let g = synth::gaussian_noise(8000, 303);
    let prices = prices_from(&g, 0.01, 100.0);
    let dates = synth::trading_dates(synth::default_start(), prices.len());
    write_series("gauss.csv", &dates, &prices);
    std::fs::write(
        fixtures_dir().join("gauss.manifest"),
        "# i.i.d. Gaussian log-returns\ntarget = gauss\ngauss = gauss.csv\n",
    )
    .unwrap();

    // constant closes: zero variance everywhere downstream
    let dates = synth::trading_dates(synth::default_start(), 40);
    write_series("const.csv", &dates, &vec![100.0; 40]);
    std::fs::write(
        fixtures_dir().join("const.manifest"),
        "# constant series, for degenerate-input error paths\n\
         target = const_series\nconst_series = const.csv\n",
    )
    .unwrap();

    // learnable synthetic market: 6 series, factor-driven target
    let market = synth::learnable_market(420, 0.25, 777);
    let mut manifest = format!(
        "# synthetic market: target change driven by a latent factor\ntarget = {}\n",
        market.target
    );
    for (id, closes) in market.panel.columns() {
        let name = format!("market_{id}.csv");
        write_series(&name, market.panel.dates(), closes);
        writeln!(manifest, "{id} = {name}").unwrap();
    }
    std::fs::write(fixtures_dir().join("market.manifest"), manifest).unwrap();
}
