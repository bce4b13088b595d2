//! Market-efficiency analysis toolkit.
//!
//! The library walks a daily closing-price panel through the stages of a
//! market-inefficiency study:
//!
//! - [`ingest`]: CSV loading, calendar alignment, log-returns, standardized
//!   (reduced) series.
//! - [`correlation`]: lagged auto- and cross-correlation functions, with the
//!   absolute-value (volatility clustering) variant and Gaussian noise bands.
//! - [`dcca`]: detrended (cross-)correlation analysis over overlapping boxes
//!   with power-law exponent fits.
//! - [`levy`]: heavy-tail index estimation via the shuffle-and-sum
//!   return-to-origin probability, plus a truncated Lévy sampler used as the
//!   testing oracle.
//! - [`pca`]: rolling-window correlation matrices, eigendecomposition, and the
//!   single principal-component feature series fed to the forecaster.
//! - [`ffnn`]: a single-hidden-layer feed-forward network trained with ADAM,
//!   retrained daily on a trailing batch (walk-forward).
//! - [`strategy`]: the threshold decision rule, loss regularizer, equity
//!   accounting, and performance statistics.
//!
//! The [`cli`] module exposes the batch front end (`emhlab` binary); [`synth`]
//! generates the seeded synthetic fixtures every test suite runs on; [`plot`]
//! is a minimal SVG line plotter for the emitted figures.
//!
//! All randomness is seeded and all parallel reductions are order-fixed, so
//! any run is reproducible bit-for-bit regardless of worker count.

// windowed/matrix code reads better with explicit indices
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod correlation;
pub mod dcca;
pub mod error;
pub mod ffnn;
pub mod ingest;
pub mod levy;
pub mod pca;
pub mod plot;
pub mod rng;
pub mod stats;
pub mod strategy;
pub mod synth;

pub use error::{Error, Result};

// the types most callers start from
pub use correlation::{cross_correlation, noise_band, CorrelationFunction};
pub use dcca::{dcca_f2, fit_power_law, integrate, DccaCurve, ScalingFit};
pub use ffnn::{Activation, AdamHyper, AdamState, Network, TrainingBatch};
pub use ingest::{
    align, load_csv, load_manifest, load_panel, log_returns, reduce, AlignedPanel, CsvSchema,
    FillPolicy, PriceSeries, ReducedSeries, ReturnSeries,
};
pub use levy::{
    estimate_alpha, return_to_origin, sample_truncated_levy, AlphaEstimate, LevyParams,
    ReturnToOriginCurve, TruncatedLevySampler,
};
pub use pca::{
    covariance_matrix, principal_components, rolling_feature, CovarianceMatrix, EigenDecomposition,
    FeatureSeries,
};
pub use strategy::{
    account, apply_regularizer, backtest, decide, forecast_pass, grid_report, performance,
    BacktestResult, EquityCurve, ForecastLedger, KurtosisConvention, PerformanceStats, Position,
    StrategyConfig, WalkForwardParams,
};

/// Library version, stamped into every run manifest.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
