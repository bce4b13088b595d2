//! Batch command-line front end.
//!
//! Subcommands mirror the pipeline stages: `corr`, `dcca`, `levy`, `pca`,
//! `backtest`, `report`. Every command reads the instrument panel named by a
//! manifest file, writes plot-ready CSVs, JSON summaries and small SVG
//! figures into the output directory, and drops a run manifest (full config,
//! seed, version) next to them. With a fixed seed, repeated runs are
//! byte-identical regardless of the worker count.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::ingest::{self, AlignedPanel, CsvSchema, FillPolicy};
use crate::plot::LinePlot;
use crate::strategy::{
    account, forecast_pass, grid_report, KurtosisConvention, StrategyConfig, WalkForwardParams,
};
use crate::{correlation, dcca, levy, pca, Error, Result};

#[derive(Parser, Debug)]
#[command(name = "emhlab", version, about = "Market-efficiency analysis toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lagged auto-/cross-correlations of reduced log-returns
    Corr(CorrArgs),
    /// Detrended cross-correlation curves and scaling exponents
    Dcca(DccaArgs),
    /// Heavy-tail index from the shuffle-and-sum return-to-origin estimator
    Levy(LevyArgs),
    /// Rolling principal-component feature series and loadings
    Pca(PcaArgs),
    /// Walk-forward forecast backtest with equity accounting
    Backtest(BacktestArgs),
    /// The (n_l, n_g) loss-regularization grid report
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FillArg {
    Intersection,
    ForwardFill,
}

impl From<FillArg> for FillPolicy {
    fn from(value: FillArg) -> Self {
        match value {
            FillArg::Intersection => FillPolicy::Intersection,
            FillArg::ForwardFill => FillPolicy::ForwardFill,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KurtosisArg {
    Raw,
    Excess,
}

impl From<KurtosisArg> for KurtosisConvention {
    fn from(value: KurtosisArg) -> Self {
        match value {
            KurtosisArg::Raw => KurtosisConvention::Raw,
            KurtosisArg::Excess => KurtosisConvention::Excess,
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct CommonArgs {
    /// Panel manifest: `instrument = path` lines plus `target = instrument`
    #[arg(long)]
    pub manifest: PathBuf,
    /// Inclusive start date (YYYY-MM-DD)
    #[arg(long)]
    pub from: Option<NaiveDate>,
    /// Inclusive end date (YYYY-MM-DD)
    #[arg(long)]
    pub to: Option<NaiveDate>,
    /// Master seed; every random stream derives from it
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output directory (created if missing)
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads, 0 = all available. Never affects results, so it is
    /// left out of the run manifest.
    #[arg(long, default_value_t = 0)]
    #[serde(skip)]
    pub workers: usize,
    /// Calendar alignment policy
    #[arg(long, value_enum, default_value_t = FillArg::Intersection)]
    pub fill: FillArg,
    /// CSV date column name
    #[arg(long, default_value = "date")]
    pub date_column: String,
    /// CSV close column name
    #[arg(long, default_value = "close")]
    pub close_column: String,
    /// chrono date format of the CSV date column
    #[arg(long, default_value = "%Y-%m-%d")]
    pub date_format: String,
}

impl CommonArgs {
    fn schema(&self) -> CsvSchema {
        CsvSchema {
            date_column: self.date_column.clone(),
            close_column: self.close_column.clone(),
            date_format: self.date_format.clone(),
        }
    }

    fn load_panel(&self) -> Result<(AlignedPanel, String)> {
        let manifest = ingest::load_manifest(&self.manifest)?;
        let panel = ingest::load_panel(
            &manifest,
            &self.schema(),
            self.fill.into(),
            self.from,
            self.to,
        )?;
        Ok((panel, manifest.target))
    }

    fn prepare(&self) -> Result<()> {
        std::fs::create_dir_all(&self.out).map_err(|e| Error::io(&self.out, e))?;
        init_workers(self.workers);
        Ok(())
    }
}

#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct CorrArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    /// Largest lag (days)
    #[arg(long, default_value_t = 100)]
    pub lags: usize,
    /// Two-sided confidence level of the noise band
    #[arg(long, default_value_t = 0.95)]
    pub confidence: f64,
}

#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct DccaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    /// Comma-separated box sizes; default is a geometric grid 4..N/4
    #[arg(long)]
    pub boxes: Option<String>,
    /// Smallest box size of the power-law fit (default: smallest box)
    #[arg(long)]
    pub fit_min: Option<usize>,
    /// Largest box size of the power-law fit (default: largest box)
    #[arg(long)]
    pub fit_max: Option<usize>,
}

#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct LevyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    /// Instrument to analyze (default: the manifest target)
    #[arg(long)]
    pub series: Option<String>,
    /// Comma-separated block lengths n
    #[arg(long, default_value = "1,2,4,8,16,32,64,128,256")]
    pub n_values: String,
    /// Shuffle realizations
    #[arg(long, default_value_t = 5000)]
    pub realizations: usize,
    /// Zero-bin width; default 0.1 × the return standard deviation
    #[arg(long)]
    pub bin_width: Option<f64>,
}

#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct PcaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    /// Rolling window lengths (return observations)
    #[arg(long, value_delimiter = ',', default_values_t = [5usize, 10])]
    pub windows: Vec<usize>,
    /// Disable the trailing 3-day moving average
    #[arg(long, default_value_t = false)]
    pub no_smooth: bool,
    /// Date whose loadings are reported (default: last eligible date)
    #[arg(long)]
    pub loadings_date: Option<NaiveDate>,
}

#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct BacktestArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub walkforward: WalkForwardArgs,
    /// Forecast threshold in index points
    #[arg(long, default_value_t = 500.0)]
    pub threshold: f64,
    /// Allow short positions
    #[arg(long, default_value_t = false)]
    pub allow_short: bool,
    /// Losing days before positions are zeroed (0 disables)
    #[arg(long, default_value_t = 0)]
    pub n_l: u32,
    /// Shadow gain days before re-entry
    #[arg(long, default_value_t = 0)]
    pub n_g: u32,
    /// Fractional cost per unit position change
    #[arg(long, default_value_t = 0.0)]
    pub cost: f64,
    /// Kurtosis convention stamped into reports
    #[arg(long, value_enum, default_value_t = KurtosisArg::Raw)]
    pub kurtosis: KurtosisArg,
}

#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct ReportArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub walkforward: WalkForwardArgs,
    /// Forecast threshold in index points
    #[arg(long, default_value_t = 500.0)]
    pub threshold: f64,
    /// Allow short positions
    #[arg(long, default_value_t = false)]
    pub allow_short: bool,
    /// Kurtosis convention stamped into reports
    #[arg(long, value_enum, default_value_t = KurtosisArg::Raw)]
    pub kurtosis: KurtosisArg,
}

/// Walk-forward training flags shared by `backtest` and `report`.
#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct WalkForwardArgs {
    /// PCA window of the first forecaster
    #[arg(long, default_value_t = 5)]
    pub window_5: usize,
    /// PCA window of the second forecaster
    #[arg(long, default_value_t = 10)]
    pub window_10: usize,
    /// Disable the trailing 3-day feature smoothing
    #[arg(long, default_value_t = false)]
    pub no_smooth: bool,
    /// Feature values per network input
    #[arg(long, default_value_t = 5)]
    pub input_days: usize,
    /// Hidden-layer size
    #[arg(long, default_value_t = 30)]
    pub hidden: usize,
    /// Trailing training pairs per day
    #[arg(long, default_value_t = 20)]
    pub batch: usize,
    /// ADAM epochs per day
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    /// ADAM learning rate
    #[arg(long, default_value_t = 1e-3)]
    pub learning_rate: f64,
    /// Re-initialize the network every day instead of warm-starting
    #[arg(long, default_value_t = false)]
    pub cold_start: bool,
    /// Index points per network-output unit
    #[arg(long, default_value_t = 1000.0)]
    pub points_divisor: f64,
    /// Cap on the number of traded days
    #[arg(long)]
    pub max_days: Option<usize>,
}

impl WalkForwardArgs {
    fn params(&self, seed: u64) -> WalkForwardParams {
        WalkForwardParams {
            input_days: self.input_days,
            hidden: self.hidden,
            batch_size: self.batch,
            epochs_per_day: self.epochs,
            warm_start: !self.cold_start,
            points_divisor: self.points_divisor,
            adam: crate::ffnn::AdamHyper {
                learning_rate: self.learning_rate,
                ..Default::default()
            },
            hidden_activation: crate::ffnn::Activation::default_tanh(),
            seed,
            max_days: self.max_days,
        }
    }
}

/// Parse argv and dispatch. Usage errors exit with code 2 via clap.
pub fn run() -> Result<()> {
    dispatch(Cli::parse())
}

pub fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Corr(args) => cmd_corr(&args),
        Command::Dcca(args) => cmd_dcca(&args),
        Command::Levy(args) => cmd_levy(&args),
        Command::Pca(args) => cmd_pca(&args),
        Command::Backtest(args) => cmd_backtest(&args),
        Command::Report(args) => cmd_report(&args),
    }
}

#[cfg(feature = "parallel")]
fn init_workers(workers: usize) {
    if workers > 0 {
        // ignore the error if a pool already exists in this process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn init_workers(_workers: usize) {}

fn write_text(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::io(path, e))
}

fn write_run_manifest(common: &CommonArgs, command: &str, config: serde_json::Value) -> Result<()> {
    let manifest = serde_json::json!({
        "command": command,
        "version": crate::VERSION,
        "seed": common.seed,
        "config": config,
    });
    let path = common.out.join(format!("manifest_{command}.json"));
    write_text(&path, &format!("{:#}\n", manifest))
}

fn reduced_column(panel: &AlignedPanel, id: &str) -> Result<crate::ingest::ReducedSeries> {
    let series = panel.to_price_series(id)?;
    let returns = ingest::log_returns(&series)?;
    ingest::reduce(&returns)
}

/// Correlation CSVs: the target against every panel series, raw and
/// absolute-value variants.
pub fn cmd_corr(args: &CorrArgs) -> Result<()> {
    let common = &args.common;
    common.prepare()?;
    let (panel, target) = common.load_panel()?;
    let target_reduced = reduced_column(&panel, &target)?;
    let n_returns = target_reduced.values.len();
    if args.lags >= n_returns {
        return Err(Error::Config(format!(
            "--lags {} needs more than {} aligned returns",
            args.lags, n_returns
        )));
    }
    let band = correlation::noise_band(n_returns, args.confidence)?;

    for absolute in [false, true] {
        let prefix = if absolute { "corr_abs" } else { "corr" };
        let mut plot = LinePlot::new(
            if absolute {
                "Cross-correlations of |reduced log-returns|"
            } else {
                "Cross-correlations of reduced log-returns"
            },
            "lag (days)",
            "correlation",
        );
        for (id, _) in panel.columns() {
            let other = reduced_column(&panel, id)?;
            let corr = correlation::cross_correlation(
                &target_reduced,
                &other,
                (&target, id),
                args.lags,
                absolute,
            )?;
            let mut csv = String::from("lag,correlation,noise_band\n");
            for (lag, value) in corr.lags.iter().zip(&corr.values) {
                csv.push_str(&format!("{lag},{value},{band}\n"));
            }
            write_text(
                &common.out.join(format!("{prefix}_{target}__{id}.csv")),
                &csv,
            )?;
            plot = plot.with_series(
                &format!("{target}×{id}"),
                corr.lags
                    .iter()
                    .zip(&corr.values)
                    .map(|(l, v)| (*l as f64, *v))
                    .collect(),
            );
        }
        write_text(&common.out.join(format!("{prefix}.svg")), &plot.to_svg())?;
    }

    write_run_manifest(
        common,
        "corr",
        serde_json::to_value(args).expect("serializable"),
    )
}

/// DCCA F² curves plus power-law summaries for the target against every
/// panel series.
pub fn cmd_dcca(args: &DccaArgs) -> Result<()> {
    let common = &args.common;
    common.prepare()?;
    let (panel, target) = common.load_panel()?;
    let target_reduced = reduced_column(&panel, &target)?;
    let n_returns = target_reduced.values.len();

    let boxes: Vec<usize> = match &args.boxes {
        Some(spec) => parse_usize_list(spec)?,
        None => dcca::default_box_sizes(n_returns),
    };
    if boxes.is_empty() {
        return Err(Error::Config(
            "no box sizes: series too short for the default grid".into(),
        ));
    }
    let fit_range = (
        args.fit_min.unwrap_or(boxes[0]),
        args.fit_max.unwrap_or(*boxes.last().expect("nonempty")),
    );

    let mut plot = LinePlot::new("Detrended correlations", "n", "F²(n)").log_log();
    for (id, _) in panel.columns() {
        let other = reduced_column(&panel, id)?;
        let curve = dcca::dcca_f2(&target_reduced, &other, (&target, id), &boxes)?;
        let mut csv = String::from("n,F2\n");
        for (n, f) in curve.box_sizes.iter().zip(&curve.f2) {
            csv.push_str(&format!("{n},{f}\n"));
        }
        write_text(&common.out.join(format!("dcca_{target}__{id}.csv")), &csv)?;

        let summary = match dcca::fit_power_law(&curve, fit_range) {
            Ok(fit) => serde_json::json!({
                "pair": [target, id],
                "lambda": fit.lambda,
                "intercept": fit.intercept,
                "r_squared": fit.r_squared,
                "fit_range": fit.fit_range,
                "excluded_points": fit.excluded_points,
            }),
            Err(Error::Fit(msg)) => serde_json::json!({
                "pair": [target, id],
                "lambda": null,
                "no_power_law": msg,
            }),
            Err(e) => return Err(e),
        };
        write_text(
            &common.out.join(format!("dcca_{target}__{id}.json")),
            &format!("{:#}\n", summary),
        )?;
        plot = plot.with_series(
            &format!("{target}×{id}"),
            curve
                .box_sizes
                .iter()
                .zip(&curve.f2)
                .map(|(n, f)| (*n as f64, *f))
                .collect(),
        );
    }
    write_text(&common.out.join("dcca.svg"), &plot.to_svg())?;
    write_run_manifest(
        common,
        "dcca",
        serde_json::to_value(args).expect("serializable"),
    )
}

/// Return-to-origin curve and tail-index fit for one series.
pub fn cmd_levy(args: &LevyArgs) -> Result<()> {
    let common = &args.common;
    common.prepare()?;
    if args.realizations == 0 {
        return Err(Error::Config("--realizations must be at least 1".into()));
    }
    let (panel, target) = common.load_panel()?;
    let series_id = args.series.clone().unwrap_or(target);
    let series = panel.to_price_series(&series_id)?;
    let returns = ingest::log_returns(&series)?;

    let n_values = parse_usize_list(&args.n_values)?;
    let bin_width = args
        .bin_width
        .unwrap_or_else(|| levy::default_bin_width(&returns.values));
    let curve = levy::return_to_origin(
        &returns.values,
        &n_values,
        args.realizations,
        bin_width,
        common.seed,
    )?;

    let mut csv = String::from("n,p_zero,stderr\n");
    for i in 0..curve.n_values.len() {
        csv.push_str(&format!(
            "{},{},{}\n",
            curve.n_values[i], curve.p_zero[i], curve.stderr[i]
        ));
    }
    write_text(&common.out.join(format!("levy_{series_id}.csv")), &csv)?;

    let fit_range = (
        *n_values.iter().min().expect("nonempty"),
        *n_values.iter().max().expect("nonempty"),
    );
    let est = levy::estimate_alpha(&curve, fit_range)?;
    let summary = serde_json::json!({
        "series": series_id,
        "alpha": est.alpha,
        "slope": est.slope,
        "stderr": est.stderr,
        "bin_width": bin_width,
        "realizations": args.realizations,
        "seed": common.seed,
    });
    write_text(
        &common.out.join(format!("levy_{series_id}.json")),
        &format!("{:#}\n", summary),
    )?;

    let plot = LinePlot::new("Probability of return to the origin", "n", "P(X_n = 0)")
        .log_log()
        .with_series(
            &series_id,
            curve
                .n_values
                .iter()
                .zip(&curve.p_zero)
                .map(|(n, p)| (*n as f64, *p))
                .collect(),
        );
    write_text(&common.out.join("levy.svg"), &plot.to_svg())?;
    write_run_manifest(
        common,
        "levy",
        serde_json::to_value(args).expect("serializable"),
    )
}

/// Rolling-PCA feature series plus a loadings report per window length.
pub fn cmd_pca(args: &PcaArgs) -> Result<()> {
    let common = &args.common;
    common.prepare()?;
    let (panel, target) = common.load_panel()?;

    let mut eig_plot = LinePlot::new(
        "Largest eigenvalue of the rolling window",
        "day",
        "eigenvalue",
    );
    for &window in &args.windows {
        let feats = pca::rolling_feature(&panel, &target, window, !args.no_smooth)?;
        for (date, msg) in &feats.skipped {
            eprintln!("pca: skipped {date}: {msg}");
        }
        let mut csv = String::from("date,pc_value,largest_eigenvalue\n");
        for i in 0..feats.dates.len() {
            csv.push_str(&format!(
                "{},{},{}\n",
                feats.dates[i], feats.values[i], feats.largest_eigenvalues[i]
            ));
        }
        write_text(&common.out.join(format!("pca_w{window}.csv")), &csv)?;

        let report_date = match args.loadings_date {
            Some(d) => d,
            None => *feats
                .dates
                .last()
                .ok_or_else(|| Error::InsufficientData("no eligible feature dates".into()))?,
        };
        let end_index = panel
            .dates()
            .binary_search(&report_date)
            .map_err(|_| Error::Config(format!("{report_date} is not a panel date")))?;
        let m = pca::covariance_matrix(&panel, end_index, window, &target)?;
        let eig = pca::principal_components(&m)?;
        let loadings = serde_json::json!({
            "date": report_date,
            "window_length": window,
            "series": m.series_ids(),
            "first_component": eig.eigenvectors[0],
            "eigenvalues": eig.eigenvalues,
        });
        write_text(
            &common.out.join(format!("pca_w{window}_loadings.json")),
            &format!("{:#}\n", loadings),
        )?;

        eig_plot = eig_plot.with_series(
            &format!("window {window}"),
            feats
                .largest_eigenvalues
                .iter()
                .enumerate()
                .map(|(i, e)| (i as f64, *e))
                .collect(),
        );
    }
    write_text(&common.out.join("pca_eigen.svg"), &eig_plot.to_svg())?;
    write_run_manifest(
        common,
        "pca",
        serde_json::to_value(args).expect("serializable"),
    )
}

fn features_for(
    panel: &AlignedPanel,
    target: &str,
    wf: &WalkForwardArgs,
) -> Result<(pca::FeatureSeries, pca::FeatureSeries)> {
    let smooth = !wf.no_smooth;
    let f5 = pca::rolling_feature(panel, target, wf.window_5, smooth)?;
    let f10 = pca::rolling_feature(panel, target, wf.window_10, smooth)?;
    Ok((f5, f10))
}

/// Walk-forward backtest: equity curve, full ledger, summary statistics.
pub fn cmd_backtest(args: &BacktestArgs) -> Result<()> {
    let common = &args.common;
    common.prepare()?;
    let (panel, target) = common.load_panel()?;
    let target_series = panel.to_price_series(&target)?;
    let (f5, f10) = features_for(&panel, &target, &args.walkforward)?;
    let params = args.walkforward.params(common.seed);
    let cfg = StrategyConfig {
        threshold_points: args.threshold,
        long_only: !args.allow_short,
        n_l: args.n_l,
        n_g: args.n_g,
        agreement_required: true,
        cost_per_change: args.cost,
    };

    let ledger = forecast_pass(&target_series, &f5, &f10, &params)?;
    let result = account(&ledger, &cfg, args.kurtosis.into())?;

    let mut equity_csv = String::from("date,capital\n");
    let mut ledger_csv = String::from(
        "date,forecast_5,forecast_10,position,market_return,strategy_return,capital,regularizer_state\n",
    );
    for (i, rec) in result.ledger.iter().enumerate() {
        equity_csv.push_str(&format!("{},{}\n", rec.date, result.equity.capital[i + 1]));
        ledger_csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            rec.date,
            rec.forecast_5,
            rec.forecast_10,
            rec.position.label(),
            rec.market_return,
            rec.strategy_return,
            rec.capital,
            rec.regularizer_state.label()
        ));
    }
    write_text(&common.out.join("equity.csv"), &equity_csv)?;
    write_text(&common.out.join("ledger.csv"), &ledger_csv)?;

    let stats_json = serde_json::json!({
        "target": target,
        "strategy": result.config,
        "walkforward": params,
        "stats": result.stats,
        "days": result.ledger.len(),
    });
    write_text(
        &common.out.join("backtest_stats.json"),
        &format!("{:#}\n", stats_json),
    )?;

    // equity against buy-and-hold over the same dates
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
    let plot = LinePlot::new("Total capital per 1 unit invested", "day", "capital")
        .with_series("strategy", strat_curve)
        .with_series("buy-and-hold", hold_curve);
    write_text(&common.out.join("equity.svg"), &plot.to_svg())?;

    write_run_manifest(
        common,
        "backtest",
        serde_json::to_value(args).expect("serializable"),
    )
}

/// The 8-row (n_l, n_g) grid, all replayed from one forecast pass.
pub fn cmd_report(args: &ReportArgs) -> Result<()> {
    let common = &args.common;
    common.prepare()?;
    let (panel, target) = common.load_panel()?;
    let target_series = panel.to_price_series(&target)?;
    let (f5, f10) = features_for(&panel, &target, &args.walkforward)?;
    let params = args.walkforward.params(common.seed);
    let base = StrategyConfig {
        threshold_points: args.threshold,
        long_only: !args.allow_short,
        agreement_required: true,
        cost_per_change: 0.0,
        ..StrategyConfig::default()
    };

    let ledger = forecast_pass(&target_series, &f5, &f10, &params)?;
    let rows = grid_report(&ledger, &base, args.kurtosis.into())?;

    let mut csv = String::from(
        "n_l,n_g,mean_daily_return,volatility,skewness,kurtosis,monthly_return,total_return\n",
    );
    for row in &rows {
        let s = &row.stats;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.n_l,
            row.n_g,
            s.mean_daily_return,
            s.volatility,
            s.skewness.map_or("undefined".into(), |v| v.to_string()),
            s.kurtosis.map_or("undefined".into(), |v| v.to_string()),
            s.monthly_return,
            s.total_return
        ));
    }
    write_text(&common.out.join("grid_report.csv"), &csv)?;

    let json = serde_json::json!({
        "target": target,
        "strategy_base": base,
        "walkforward": params,
        "kurtosis_convention": KurtosisConvention::from(args.kurtosis).label(),
        "rows": rows,
        "days": ledger.len(),
    });
    write_text(
        &common.out.join("grid_report.json"),
        &format!("{:#}\n", json),
    )?;
    write_run_manifest(
        common,
        "report",
        serde_json::to_value(args).expect("serializable"),
    )
}

fn parse_usize_list(spec: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for tok in spec.split(',') {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        out.push(
            tok.parse::<usize>()
                .map_err(|_| Error::Config(format!("bad integer '{tok}' in list")))?,
        );
    }
    if out.is_empty() {
        return Err(Error::Config("empty integer list".into()));
    }
    Ok(out)
}
