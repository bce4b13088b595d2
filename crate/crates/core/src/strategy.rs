//! Daily decision rule, loss regularization, and equity accounting.
//!
//! Two walk-forward networks (5- and 10-day PCA feature windows) forecast the
//! next-day change of the target in index points. When both clear the
//! threshold in the same direction a position is taken, long-only by default.
//! After `n_l` consecutive losing days all positions are zeroed; trading
//! resumes after `n_g` consecutive days on which the shadowed strategy would
//! have gained. Zero-P&L days break both streaks.
//!
//! The expensive part — daily retraining and forecasting — is independent of
//! the regularizer settings, so it runs once ([`forecast_pass`]) and each
//! (n_l, n_g) configuration replays the cheap accounting ([`account`]).

use chrono::NaiveDate;

use crate::ffnn::{adam_step, gradients, Activation, AdamHyper, AdamState, Network, TrainingBatch};
use crate::ingest::PriceSeries;
use crate::pca::FeatureSeries;
use crate::{stats, Error, Result};

/// Strategy parameters. `n_l = 0` disables the regularizer.
#[derive(Debug, Clone, serde::Serialize)]
pub struct StrategyConfig {
    /// Forecast magnitude (index points) required to act.
    pub threshold_points: f64,
    /// Convert short signals to flat.
    pub long_only: bool,
    /// Consecutive losing days before all positions are zeroed.
    pub n_l: u32,
    /// Consecutive shadow-gain days before trading resumes.
    pub n_g: u32,
    /// Require both forecasts to clear the threshold in the same direction;
    /// when false the decision uses their mean.
    pub agreement_required: bool,
    /// Fractional cost charged per unit of position change; 0 keeps the
    /// accounting frictionless.
    pub cost_per_change: f64,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            threshold_points: 500.0,
            long_only: true,
            n_l: 0,
            n_g: 0,
            agreement_required: true,
            cost_per_change: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Position {
    Long,
    Short,
    Flat,
}

impl Position {
    pub fn sign(self) -> f64 {
        match self {
            Position::Long => 1.0,
            Position::Short => -1.0,
            Position::Flat => 0.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Position::Long => "long",
            Position::Short => "short",
            Position::Flat => "flat",
        }
    }
}

/// The decision rule: long iff both forecasts exceed +threshold, short iff
/// both fall below −threshold (and shorts are allowed), flat otherwise.
pub fn decide(forecast_5: f64, forecast_10: f64, cfg: &StrategyConfig) -> Position {
    let thr = cfg.threshold_points;
    let (up, down) = if cfg.agreement_required {
        (
            forecast_5 > thr && forecast_10 > thr,
            forecast_5 < -thr && forecast_10 < -thr,
        )
    } else {
        let mean = 0.5 * (forecast_5 + forecast_10);
        (mean > thr, mean < -thr)
    };
    if up {
        Position::Long
    } else if down && !cfg.long_only {
        Position::Short
    } else {
        Position::Flat
    }
}

/// Loss-regularizer state; the count inside `Suspended` is the current
/// shadow-gain streak.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularizerState {
    Active,
    Suspended { shadow_gains: u32 },
}

impl RegularizerState {
    pub fn label(self) -> String {
        match self {
            RegularizerState::Active => "active".into(),
            RegularizerState::Suspended { shadow_gains } => format!("suspended({shadow_gains})"),
        }
    }

    pub fn is_active(self) -> bool {
        matches!(self, RegularizerState::Active)
    }
}

/// The (n_l, n_g) state machine.
///
/// Feed it the P&L the *decided* position earned each day: realized P&L while
/// active, shadow P&L while suspended. Zero P&L breaks both streaks.
#[derive(Debug, Clone)]
pub struct Regularizer {
    n_l: u32,
    n_g: u32,
    state: RegularizerState,
    loss_streak: u32,
}

impl Regularizer {
    pub fn new(n_l: u32, n_g: u32) -> Self {
        Regularizer {
            n_l,
            n_g,
            state: RegularizerState::Active,
            loss_streak: 0,
        }
    }

    /// State that applies to the coming day.
    pub fn state(&self) -> RegularizerState {
        self.state
    }

    /// Close out one day with the decided position's P&L.
    pub fn observe(&mut self, decided_pnl: f64) {
        if self.n_l == 0 {
            return; // disabled
        }
        match self.state {
            RegularizerState::Active => {
                if decided_pnl < 0.0 {
                    self.loss_streak += 1;
                } else {
                    self.loss_streak = 0;
                }
                if self.loss_streak >= self.n_l {
                    self.state = RegularizerState::Suspended { shadow_gains: 0 };
                    self.loss_streak = 0;
                }
            }
            RegularizerState::Suspended { shadow_gains } => {
                let shadow_gains = if decided_pnl > 0.0 {
                    shadow_gains + 1
                } else {
                    0
                };
                if shadow_gains >= self.n_g {
                    self.state = RegularizerState::Active;
                } else {
                    self.state = RegularizerState::Suspended { shadow_gains };
                }
            }
        }
    }
}

/// Replay a history of decided daily P&L values and return the state that
/// would govern the following day.
pub fn apply_regularizer(history: &[f64], cfg: &StrategyConfig) -> RegularizerState {
    let mut reg = Regularizer::new(cfg.n_l, cfg.n_g);
    for pnl in history {
        reg.observe(*pnl);
    }
    reg.state()
}

/// Walk-forward training parameters for the two forecasting networks.
#[derive(Debug, Clone, serde::Serialize)]
pub struct WalkForwardParams {
    /// Consecutive feature values per input.
    pub input_days: usize,
    pub hidden: usize,
    /// Trailing input-output pairs per daily retraining.
    pub batch_size: usize,
    pub epochs_per_day: usize,
    /// Start each day from the previous day's weights instead of re-seeding.
    pub warm_start: bool,
    /// Fixed divisor mapping index points to network-output units, so the
    /// 500-point threshold compares directly against de-scaled forecasts.
    pub points_divisor: f64,
    pub adam: AdamHyper,
    #[serde(skip)]
    pub hidden_activation: Activation,
    pub seed: u64,
    /// Cap on the number of decision days (earliest eligible first).
    pub max_days: Option<usize>,
}

impl Default for WalkForwardParams {
    fn default() -> Self {
        WalkForwardParams {
            input_days: 5,
            hidden: 30,
            batch_size: 20,
            epochs_per_day: 200,
            warm_start: true,
            points_divisor: 1000.0,
            adam: AdamHyper::default(),
            hidden_activation: Activation::default_tanh(),
            seed: 42,
            max_days: None,
        }
    }
}

/// Output of the expensive walk-forward pass: per decision date, both
/// forecasts (index points) and the market return subsequently realized.
#[derive(Debug, Clone)]
pub struct ForecastLedger {
    pub target_id: String,
    pub dates: Vec<NaiveDate>,
    pub forecast_5: Vec<f64>,
    pub forecast_10: Vec<f64>,
    /// close(t+1)/close(t) − 1 for each decision date t.
    pub market_returns: Vec<f64>,
}

impl ForecastLedger {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }
}

/// One walk-forward network bound to a feature series.
struct WalkForwardNet<'a> {
    features: &'a FeatureSeries,
    net: Network,
    state: AdamState,
    params: &'a WalkForwardParams,
    seed: u64,
}

impl<'a> WalkForwardNet<'a> {
    fn new(features: &'a FeatureSeries, params: &'a WalkForwardParams, seed: u64) -> Result<Self> {
        let net = Network::new(
            &[params.input_days, params.hidden, 1],
            &[params.hidden_activation, Activation::Linear],
            seed,
        )?;
        let state = AdamState::new(&net, params.adam);
        Ok(WalkForwardNet {
            features,
            net,
            state,
            params,
            seed,
        })
    }

    /// Retrain on the trailing batch ending before feature position `pos`,
    /// then forecast the change following `pos`. Returns points.
    fn forecast(&mut self, pos: usize, change_at: &dyn Fn(usize) -> f64) -> Result<f64> {
        let p = self.params;
        let first = pos - p.batch_size;
        let window = |s: usize| -> &[f64] { &self.features.values[s + 1 - p.input_days..=s] };

        // scale inputs with training-batch statistics only
        let mut pool = Vec::with_capacity(p.batch_size * p.input_days);
        for s in first..pos {
            pool.extend_from_slice(window(s));
        }
        let in_mean = stats::mean(&pool);
        let in_std = stats::population_std(&pool);
        if in_std == 0.0 {
            return Ok(0.0); // nothing to learn from a flat feature window
        }
        let scale_input =
            |w: &[f64]| -> Vec<f64> { w.iter().map(|x| (x - in_mean) / in_std).collect() };

        let inputs: Vec<Vec<f64>> = (first..pos).map(|s| scale_input(window(s))).collect();
        let targets: Vec<f64> = (first..pos)
            .map(|s| change_at(s) / p.points_divisor)
            .collect();
        let batch = TrainingBatch::new(inputs, targets)?;

        if !p.warm_start {
            self.net = Network::new(
                &[p.input_days, p.hidden, 1],
                &[p.hidden_activation, Activation::Linear],
                self.seed,
            )?;
            self.state = AdamState::new(&self.net, p.adam);
        }
        for _ in 0..p.epochs_per_day {
            let grads = gradients(&self.net, &batch)?;
            adam_step(&mut self.net, &mut self.state, &grads)?;
        }

        let out = self.net.forward(&scale_input(window(pos)))?;
        Ok(out * p.points_divisor)
    }
}

/// Run the daily retrain-and-forecast loop for both feature variants.
///
/// Decision dates are those where both feature series provide a full input
/// window, a full trailing batch exists, and the next-day target close is
/// defined. Every forecast uses only data at or before its date; a feature
/// dated after its decision date is a contract violation.
pub fn forecast_pass(
    target: &PriceSeries,
    features_5: &FeatureSeries,
    features_10: &FeatureSeries,
    params: &WalkForwardParams,
) -> Result<ForecastLedger> {
    let date_index = |d: &NaiveDate| -> Result<usize> {
        target
            .dates()
            .binary_search(d)
            .map_err(|_| Error::Shape(format!("feature date {d} is not a target trading date")))
    };

    // target-calendar index of every feature date, shared eligibility
    let idx5: Vec<usize> = features_5
        .dates
        .iter()
        .map(&date_index)
        .collect::<Result<_>>()?;
    let idx10: Vec<usize> = features_10
        .dates
        .iter()
        .map(&date_index)
        .collect::<Result<_>>()?;

    let min_pos = params.input_days - 1 + params.batch_size;
    let closes = target.closes();
    let change_after = |i: usize| closes[i + 1] - closes[i];

    let mut net5 = WalkForwardNet::new(features_5, params, params.seed)?;
    let mut net10 = WalkForwardNet::new(features_10, params, params.seed.wrapping_add(1))?;

    let mut dates = Vec::new();
    let mut forecast_5 = Vec::new();
    let mut forecast_10 = Vec::new();
    let mut market_returns = Vec::new();

    for p5 in min_pos..features_5.dates.len() {
        let date = features_5.dates[p5];
        // same decision date must exist in the 10-day variant
        let p10 = match features_10.dates.binary_search(&date) {
            Ok(p) if p >= min_pos => p,
            _ => continue,
        };
        let t = idx5[p5];
        if idx10[p10] != t {
            return Err(Error::Shape(format!(
                "feature calendars disagree at {date}"
            )));
        }
        if t + 1 >= target.len() {
            break; // no next-day close to realize
        }
        for (pos, idx, feats) in [(p5, &idx5, features_5), (p10, &idx10, features_10)] {
            for s in pos + 1 - params.input_days..=pos {
                if idx[s] > t {
                    return Err(Error::Contract(format!(
                        "feature dated {} feeds a decision on {date}",
                        feats.dates[s]
                    )));
                }
            }
        }

        let f5 = net5.forecast(p5, &|s| change_after(idx5[s]))?;
        let f10 = net10.forecast(p10, &|s| change_after(idx10[s]))?;

        dates.push(date);
        forecast_5.push(f5);
        forecast_10.push(f10);
        market_returns.push(closes[t + 1] / closes[t] - 1.0);

        if params.max_days.is_some_and(|cap| dates.len() >= cap) {
            break;
        }
    }

    if dates.is_empty() {
        return Err(Error::InsufficientData(
            "no decision dates: panel too short for the window, batch and input sizes".into(),
        ));
    }

    Ok(ForecastLedger {
        target_id: target.instrument_id().to_string(),
        dates,
        forecast_5,
        forecast_10,
        market_returns,
    })
}

/// One accounted day.
#[derive(Debug, Clone)]
pub struct DailyRecord {
    pub date: NaiveDate,
    pub forecast_5: f64,
    pub forecast_10: f64,
    /// Position actually held (flat while suspended).
    pub position: Position,
    pub market_return: f64,
    /// Realized fractional return of the strategy for the day.
    pub strategy_return: f64,
    /// Capital after the day's return.
    pub capital: f64,
    /// Regularizer state governing the day.
    pub regularizer_state: RegularizerState,
}

/// Capital path: `capital[0] = 1`, one further entry per accounted day.
#[derive(Debug, Clone)]
pub struct EquityCurve {
    pub dates: Vec<NaiveDate>,
    pub capital: Vec<f64>,
    pub daily_returns: Vec<f64>,
}

/// Backtest output: equity curve, per-day ledger and summary statistics.
#[derive(Debug, Clone)]
pub struct BacktestResult {
    pub config: StrategyConfig,
    pub equity: EquityCurve,
    pub ledger: Vec<DailyRecord>,
    pub stats: PerformanceStats,
}

/// Deterministic accounting pass over a forecast ledger.
pub fn account(
    ledger: &ForecastLedger,
    cfg: &StrategyConfig,
    kurtosis: KurtosisConvention,
) -> Result<BacktestResult> {
    let mut capital = 1.0f64;
    let mut capitals = vec![capital];
    let mut daily_returns = Vec::with_capacity(ledger.len());
    let mut records = Vec::with_capacity(ledger.len());
    let mut reg = Regularizer::new(cfg.n_l, cfg.n_g);
    let mut prev_sign = 0.0f64;

    for i in 0..ledger.len() {
        let decided = decide(ledger.forecast_5[i], ledger.forecast_10[i], cfg);
        let state = reg.state();
        let held = if state.is_active() {
            decided
        } else {
            Position::Flat
        };

        let market = ledger.market_returns[i];
        let mut realized = held.sign() * market;
        if cfg.cost_per_change > 0.0 {
            realized -= cfg.cost_per_change * (held.sign() - prev_sign).abs();
        }
        prev_sign = held.sign();

        capital *= 1.0 + realized;
        capitals.push(capital);
        daily_returns.push(realized);
        records.push(DailyRecord {
            date: ledger.dates[i],
            forecast_5: ledger.forecast_5[i],
            forecast_10: ledger.forecast_10[i],
            position: held,
            market_return: market,
            strategy_return: realized,
            capital,
            regularizer_state: state,
        });

        reg.observe(decided.sign() * market);
    }

    let equity = EquityCurve {
        dates: ledger.dates.clone(),
        capital: capitals,
        daily_returns,
    };
    let stats = performance(&equity, kurtosis)?;
    Ok(BacktestResult {
        config: cfg.clone(),
        equity,
        ledger: records,
        stats,
    })
}

/// Full backtest: forecast pass plus accounting.
pub fn backtest(
    target: &PriceSeries,
    features_5: &FeatureSeries,
    features_10: &FeatureSeries,
    params: &WalkForwardParams,
    cfg: &StrategyConfig,
    kurtosis: KurtosisConvention,
) -> Result<BacktestResult> {
    let ledger = forecast_pass(target, features_5, features_10, params)?;
    account(&ledger, cfg, kurtosis)
}

/// Which fourth-moment convention a report uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KurtosisConvention {
    /// Raw standardized fourth moment (Gaussian = 3).
    Raw,
    /// Raw minus 3.
    Excess,
}

impl KurtosisConvention {
    pub fn label(self) -> &'static str {
        match self {
            KurtosisConvention::Raw => "raw",
            KurtosisConvention::Excess => "excess",
        }
    }
}

/// Summary statistics of the daily strategy returns (population convention).
#[derive(Debug, Clone, serde::Serialize)]
pub struct PerformanceStats {
    pub mean_daily_return: f64,
    pub volatility: f64,
    /// `None` whenever the volatility is zero.
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
    pub kurtosis_convention: KurtosisConvention,
    /// 21-trading-day compounded equivalent of the total return.
    pub monthly_return: f64,
    pub total_return: f64,
}

pub fn performance(curve: &EquityCurve, kurtosis: KurtosisConvention) -> Result<PerformanceStats> {
    let r = &curve.daily_returns;
    if r.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "performance needs at least 2 days, have {}",
            r.len()
        )));
    }
    let total = curve.capital.last().expect("nonempty") / curve.capital[0] - 1.0;
    let monthly = (1.0 + total).powf(21.0 / r.len() as f64) - 1.0;
    let kurt = stats::kurtosis_raw(r).map(|k| match kurtosis {
        KurtosisConvention::Raw => k,
        KurtosisConvention::Excess => k - 3.0,
    });
    Ok(PerformanceStats {
        mean_daily_return: stats::mean(r),
        volatility: stats::population_std(r),
        skewness: stats::skewness(r),
        kurtosis: kurt,
        kurtosis_convention: kurtosis,
        monthly_return: monthly,
        total_return: total,
    })
}

/// One row of the (n_l, n_g) grid report.
#[derive(Debug, Clone, serde::Serialize)]
pub struct GridRow {
    pub n_l: u32,
    pub n_g: u32,
    pub stats: PerformanceStats,
}

/// The 8-configuration regularizer grid: n_l in {1, 2} × n_g in {0..3},
/// all replayed from one forecast pass.
pub fn grid_report(
    ledger: &ForecastLedger,
    base: &StrategyConfig,
    kurtosis: KurtosisConvention,
) -> Result<Vec<GridRow>> {
    let mut rows = Vec::with_capacity(8);
    for n_l in [1u32, 2] {
        for n_g in [0u32, 1, 2, 3] {
            let cfg = StrategyConfig {
                n_l,
                n_g,
                ..base.clone()
            };
            let result = account(ledger, &cfg, kurtosis)?;
            rows.push(GridRow {
                n_l,
                n_g,
                stats: result.stats,
            });
        }
    }
    Ok(rows)
}
