//! Browser demo: three interactive views over the core library.
//!
//! Each exported function returns a JSON string containing an inline SVG plus
//! the headline numbers, so the page needs nothing beyond `innerHTML` and
//! `JSON.parse`. Errors come back as `{"error": "..."}`.

use emhlab::dcca;
use emhlab::ingest::reduce_values;
use emhlab::levy;
use emhlab::plot::LinePlot;
use emhlab::strategy::{
    account, forecast_pass, KurtosisConvention, StrategyConfig, WalkForwardParams,
};
use emhlab::synth;
use wasm_bindgen::prelude::wasm_bindgen;

fn json_out(result: emhlab::Result<serde_json::Value>) -> String {
    match result {
        Ok(value) => format!("{value}"),
        Err(e) => format!("{}", serde_json::json!({ "error": e.to_string() })),
    }
}

/// Detrended fluctuation explorer: synthesize a series, show its F²(n)
/// curve on log-log axes and the fitted scaling exponent.
///
/// `kind` is one of `white`, `persistent`, `shuffled-persistent`.
#[wasm_bindgen]
pub fn scaling_demo(kind: &str, length: usize, hurst: f64, seed: u64) -> String {
    json_out(scaling_demo_inner(kind, length, hurst, seed))
}

fn scaling_demo_inner(
    kind: &str,
    length: usize,
    hurst: f64,
    seed: u64,
) -> emhlab::Result<serde_json::Value> {
    let length = length.clamp(256, 32_768);
    let values = match kind {
        "white" => synth::gaussian_noise(length, seed),
        "persistent" => synth::fractional_noise(length, hurst.clamp(0.55, 0.95), seed),
        "shuffled-persistent" => {
            let v = synth::fractional_noise(length, hurst.clamp(0.55, 0.95), seed);
            synth::shuffled(&v, seed.wrapping_add(1))
        }
        other => {
            return Err(emhlab::Error::Config(format!(
                "unknown series kind '{other}'"
            )))
        }
    };
    let reduced = reduce_values(&values)?;
    let sizes = dcca::default_box_sizes(length);
    let curve = dcca::dcca_f2(&reduced, &reduced, ("series", "series"), &sizes)?;
    let fit = dcca::fit_power_law(&curve, (sizes[0], *sizes.last().expect("nonempty")))?;

    let points: Vec<(f64, f64)> = curve
        .box_sizes
        .iter()
        .zip(&curve.f2)
        .map(|(n, f)| (*n as f64, *f))
        .collect();
    let fit_line: Vec<(f64, f64)> = [sizes[0], *sizes.last().expect("nonempty")]
        .iter()
        .map(|n| {
            let x = *n as f64;
            (x, (fit.intercept + 2.0 * fit.lambda * x.ln()).exp())
        })
        .collect();
    let svg = LinePlot::new(
        &format!("F²(n), fitted λ = {:.3}", fit.lambda),
        "box size n",
        "F²(n)",
    )
    .log_log()
    .with_series("F²", points)
    .with_series("power-law fit", fit_line)
    .to_svg();

    Ok(serde_json::json!({
        "svg": svg,
        "lambda": fit.lambda,
        "r_squared": fit.r_squared,
        "boxes": curve.box_sizes,
    }))
}

/// Tail-index explorer: sample a truncated Lévy distribution, run the
/// shuffle-and-sum estimator and compare the recovered α with the input.
#[wasm_bindgen]
pub fn levy_demo(
    alpha: f64,
    gamma: f64,
    d: f64,
    samples: usize,
    realizations: usize,
    seed: u64,
) -> String {
    json_out(levy_demo_inner(
        alpha,
        gamma,
        d,
        samples,
        realizations,
        seed,
    ))
}

fn levy_demo_inner(
    alpha: f64,
    gamma: f64,
    d: f64,
    samples: usize,
    realizations: usize,
    seed: u64,
) -> emhlab::Result<serde_json::Value> {
    let samples = samples.clamp(5_000, 200_000);
    let realizations = realizations.clamp(10, 2_000);
    let sampler = levy::TruncatedLevySampler::new(alpha, gamma, d)?;
    let draws = sampler.sample(samples, seed);
    let ns = [1usize, 2, 4, 8, 16, 32];
    let bw = levy::default_bin_width(&draws);
    let curve = levy::return_to_origin(&draws, &ns, realizations, bw, seed.wrapping_add(1))?;
    let est = levy::estimate_alpha(&curve, (1, 32))?;

    let points: Vec<(f64, f64)> = curve
        .n_values
        .iter()
        .zip(&curve.p_zero)
        .map(|(n, p)| (*n as f64, *p))
        .collect();
    let svg = LinePlot::new(
        &format!("P(X_n = 0), fitted α = {:.2}", est.alpha),
        "summands n",
        "density at 0",
    )
    .log_log()
    .with_series("estimate", points)
    .to_svg();

    Ok(serde_json::json!({
        "svg": svg,
        "alpha_input": alpha,
        "alpha_hat": est.alpha,
        "slope": est.slope,
        "stderr": est.stderr,
        "bin_width": bw,
    }))
}

/// Walk-forward strategy explorer on a synthetic market: retrains the two
/// networks daily and compares the strategy's equity with buy-and-hold.
#[wasm_bindgen]
pub fn backtest_demo(
    days: usize,
    noise_frac: f64,
    threshold: f64,
    n_l: u32,
    n_g: u32,
    seed: u64,
) -> String {
    json_out(backtest_demo_inner(
        days, noise_frac, threshold, n_l, n_g, seed,
    ))
}

fn backtest_demo_inner(
    days: usize,
    noise_frac: f64,
    threshold: f64,
    n_l: u32,
    n_g: u32,
    seed: u64,
) -> emhlab::Result<serde_json::Value> {
    let days = days.clamp(120, 600);
    let market = synth::learnable_market(days + 40, noise_frac.clamp(0.0, 4.0), seed);
    let target = market.panel.to_price_series(&market.target)?;
    let f5 = emhlab::pca::rolling_feature(&market.panel, &market.target, 5, true)?;
    let f10 = emhlab::pca::rolling_feature(&market.panel, &market.target, 10, true)?;

    let params = WalkForwardParams {
        epochs_per_day: 25,
        hidden: 20,
        seed,
        max_days: Some(days),
        adam: emhlab::ffnn::AdamHyper {
            learning_rate: 0.01,
            ..Default::default()
        },
        ..WalkForwardParams::default()
    };
    let cfg = StrategyConfig {
        threshold_points: threshold.max(0.0),
        n_l,
        n_g,
        ..StrategyConfig::default()
    };
    let ledger = forecast_pass(&target, &f5, &f10, &params)?;
    let result = account(&ledger, &cfg, KurtosisConvention::Raw)?;

    let mut hold = 1.0f64;
    let hold_curve: Vec<(f64, f64)> = result
        .ledger
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            hold *= 1.0 + rec.market_return;
            (i as f64, hold)
        })
        .collect();
    let strat_curve: Vec<(f64, f64)> = result
        .equity
        .capital
        .iter()
        .skip(1)
        .enumerate()
        .map(|(i, c)| (i as f64, *c))
        .collect();
    let svg = LinePlot::new(
        "Total capital per 1 unit invested",
        "trading day",
        "capital",
    )
    .with_series("strategy", strat_curve)
    .with_series("buy-and-hold", hold_curve)
    .to_svg();

    Ok(serde_json::json!({
        "svg": svg,
        "days": result.ledger.len(),
        "total_return": result.stats.total_return,
        "monthly_return": result.stats.monthly_return,
        "buy_hold_return": hold - 1.0,
        "volatility": result.stats.volatility,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_demo_reports_white_noise_exponent() {
        let out = scaling_demo_inner("white", 8192, 0.8, 3).unwrap();
        let lambda = out["lambda"].as_f64().unwrap();
        assert!((lambda - 0.5).abs() < 0.08, "lambda {lambda}");
        assert!(out["svg"].as_str().unwrap().starts_with("<svg"));
    }

    #[test]
    fn scaling_demo_rejects_unknown_kind() {
        let text = scaling_demo("nope", 4096, 0.8, 1);
        assert!(text.contains("error"));
    }

    #[test]
    fn levy_demo_recovers_the_input_alpha_roughly() {
        let out = levy_demo_inner(1.5, 1.0, 20.0, 60_000, 100, 5).unwrap();
        let alpha = out["alpha_hat"].as_f64().unwrap();
        assert!((alpha - 1.5).abs() < 0.25, "alpha {alpha}");
    }

    #[test]
    fn backtest_demo_runs_end_to_end() {
        let out = backtest_demo_inner(140, 0.25, 500.0, 1, 1, 9).unwrap();
        assert!(out["days"].as_u64().unwrap() >= 100);
        assert!(out["svg"].as_str().unwrap().contains("polyline"));
    }
}
