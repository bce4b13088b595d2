//! Cross-module walk-forward checks: the causality contract and the
//! end-to-end backtest entry point.

use emhlab::ffnn::AdamHyper;
use emhlab::ingest::{align, AlignedPanel, FillPolicy, PriceSeries};
use emhlab::pca::rolling_feature;
use emhlab::strategy::{
    account, backtest, forecast_pass, BacktestResult, ForecastLedger, KurtosisConvention,
    StrategyConfig, WalkForwardParams,
};
use emhlab::synth;

fn fast_params(seed: u64) -> WalkForwardParams {
    WalkForwardParams {
        hidden: 6,
        epochs_per_day: 5,
        adam: AdamHyper {
            learning_rate: 0.01,
            ..AdamHyper::default()
        },
        seed,
        ..WalkForwardParams::default()
    }
}

/// Rebuild the panel with every close strictly after `cut` perturbed.
fn mutate_after(panel: &AlignedPanel, cut: usize, seed: u64) -> AlignedPanel {
    let noise = synth::uniform_noise(panel.n_dates(), 0.2, seed);
    let series: Vec<PriceSeries> = panel
        .columns()
        .iter()
        .map(|(id, col)| {
            let closes: Vec<f64> = col
                .iter()
                .enumerate()
                .map(|(i, c)| if i > cut { c * (1.0 + noise[i]) } else { *c })
                .collect();
            PriceSeries::new(id.clone(), panel.dates().to_vec(), closes).unwrap()
        })
        .collect();
    align(&series, FillPolicy::Intersection).unwrap()
}

fn run(panel: &AlignedPanel, target_id: &str, seed: u64) -> (ForecastLedger, BacktestResult) {
    let target = panel.to_price_series(target_id).unwrap();
    let f5 = rolling_feature(panel, target_id, 5, true).unwrap();
    let f10 = rolling_feature(panel, target_id, 10, true).unwrap();
    let params = fast_params(seed);
    let ledger = forecast_pass(&target, &f5, &f10, &params).unwrap();
    let result = account(&ledger, &StrategyConfig::default(), KurtosisConvention::Raw).unwrap();
    (ledger, result)
}

#[test]
fn decisions_ignore_data_after_their_date() {
    let market = synth::learnable_market(140, 0.25, 77);
    let cut = 100usize;
    let cut_date = market.panel.dates()[cut];
    let mutated = mutate_after(&market.panel, cut, 78);

    let (la, ra) = run(&market.panel, &market.target, 77);
    let (lb, rb) = run(&mutated, &market.target, 77);

    let mut compared = 0;
    for (i, date) in la.dates.iter().enumerate() {
        if *date > cut_date {
            break;
        }
        assert_eq!(lb.dates[i], *date, "decision calendars diverged at {date}");
        assert_eq!(
            la.forecast_5[i].to_bits(),
            lb.forecast_5[i].to_bits(),
            "forecast_5 changed at {date}"
        );
        assert_eq!(
            la.forecast_10[i].to_bits(),
            lb.forecast_10[i].to_bits(),
            "forecast_10 changed at {date}"
        );
        assert_eq!(
            ra.ledger[i].position, rb.ledger[i].position,
            "position changed at {date}"
        );
        compared += 1;
    }
    assert!(compared >= 40, "compared only {compared} decision days");
}

#[test]
fn backtest_wraps_forecast_and_accounting() {
    let market = synth::learnable_market(120, 0.25, 91);
    let target = market.panel.to_price_series(&market.target).unwrap();
    let f5 = rolling_feature(&market.panel, &market.target, 5, true).unwrap();
    let f10 = rolling_feature(&market.panel, &market.target, 10, true).unwrap();
    let params = fast_params(91);
    let cfg = StrategyConfig {
        n_l: 1,
        n_g: 2,
        ..StrategyConfig::default()
    };

    let combined = backtest(&target, &f5, &f10, &params, &cfg, KurtosisConvention::Raw).unwrap();
    let ledger = forecast_pass(&target, &f5, &f10, &params).unwrap();
    let staged = account(&ledger, &cfg, KurtosisConvention::Raw).unwrap();

    assert_eq!(combined.ledger.len(), staged.ledger.len());
    for (a, b) in combined.equity.capital.iter().zip(&staged.equity.capital) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
    assert_eq!(combined.stats.total_return, staged.stats.total_return);
}
