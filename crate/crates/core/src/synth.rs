//! Seeded synthetic fixtures.
//!
//! Everything the test suites and the demo run on is generated here from
//! explicit seeds: white and uniform noise, AR(1) returns, fractional noise
//! with a chosen Hurst exponent, and two small synthetic markets — one whose
//! target is driven by a learnable latent factor and one that is a pure
//! random walk.

use chrono::{Datelike, NaiveDate, Weekday};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::ingest::{align, AlignedPanel, FillPolicy, PriceSeries};
use crate::rng::stream_rng;
use crate::Result;

/// `n` consecutive weekdays starting at `start` (itself shifted to a weekday
/// if needed).
pub fn trading_dates(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut dates = Vec::with_capacity(n);
    let mut d = start;
    while dates.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            dates.push(d);
        }
        d = d.succ_opt().expect("date overflow");
    }
    dates
}

/// Default first date for synthetic calendars.
pub fn default_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2016, 1, 4).expect("valid date")
}

/// Standard normal draws.
pub fn gaussian_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, 0);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Uniform draws on (−half_width, half_width).
pub fn uniform_noise(n: usize, half_width: f64, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, 0);
    (0..n)
        .map(|_| rng.random_range(-half_width..half_width))
        .collect()
}

/// AR(1) series `x(t) = rho·x(t−1) + e(t)` with standard normal innovations.
pub fn ar1(n: usize, rho: f64, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, 0);
    let mut out = Vec::with_capacity(n);
    let mut prev = 0.0;
    for _ in 0..n {
        let e: f64 = StandardNormal.sample(&mut rng);
        prev = rho * prev + e;
        out.push(prev);
    }
    out
}

/// Stationary noise whose integrated profile scales like a fractional
/// Brownian motion with the given Hurst exponent.
///
/// Spectral synthesis: the profile is a sum of N/2 cosine modes with
/// amplitude k^−(H+1/2) and seeded random phases; the returned series is its
/// first difference.
pub fn fractional_noise(n: usize, hurst: f64, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, 0);
    let len = n + 1;
    let mut profile = vec![0.0f64; len];
    let modes = (len / 2).max(1);
    let two_pi = 2.0 * std::f64::consts::PI;
    for k in 1..=modes {
        let amp = (k as f64).powf(-(hurst + 0.5));
        let phase: f64 = rng.random_range(0.0..two_pi);
        let omega = two_pi * k as f64 / len as f64;
        // rotate e^{i(omega t + phase)} instead of calling cos() per sample
        let (sin_w, cos_w) = omega.sin_cos();
        let (mut s, mut c) = phase.sin_cos();
        for slot in profile.iter_mut() {
            *slot += amp * c;
            let c_next = c * cos_w - s * sin_w;
            s = s * cos_w + c * sin_w;
            c = c_next;
        }
    }
    profile.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Seeded uniform shuffle of a value slice.
pub fn shuffled(values: &[f64], seed: u64) -> Vec<f64> {
    use rand::seq::SliceRandom;
    let mut out = values.to_vec();
    let mut rng = stream_rng(seed, 0);
    out.shuffle(&mut rng);
    out
}

/// Prices from log-returns: `prices[0] = base`, then multiplicative.
pub fn returns_to_prices(returns: &[f64], base: f64) -> Vec<f64> {
    let mut prices = Vec::with_capacity(returns.len() + 1);
    let mut level = base;
    prices.push(level);
    for r in returns {
        level *= r.exp();
        prices.push(level);
    }
    prices
}

/// Price series on the synthetic weekday calendar from a log-return stream.
pub fn price_series_from_returns(id: &str, returns: &[f64], base: f64) -> Result<PriceSeries> {
    let closes = returns_to_prices(returns, base);
    let dates = trading_dates(default_start(), closes.len());
    PriceSeries::new(id, dates, closes)
}

/// Two return series sharing a persistent fractional component, for
/// cross-correlation and DCCA demos: `mix` is the weight of the shared part.
pub fn shared_trend_returns(n: usize, hurst: f64, mix: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let shared = fractional_noise(n, hurst, seed);
    let own_a = gaussian_noise(n, seed.wrapping_add(1));
    let own_b = gaussian_noise(n, seed.wrapping_add(2));
    let shared_sigma = crate::stats::population_std(&shared).max(1e-12);
    let scale = |own: &[f64]| -> Vec<f64> {
        shared
            .iter()
            .zip(own)
            .map(|(s, o)| mix * s / shared_sigma + (1.0 - mix) * o)
            .collect()
    };
    (scale(&own_a), scale(&own_b))
}

/// A synthetic market panel plus the id of its forecast target.
#[derive(Debug, Clone)]
pub struct SyntheticMarket {
    pub panel: AlignedPanel,
    pub target: String,
}

/// Panel whose target's next-day change is a fixed linear function of the
/// last five values of a latent AR(1) factor, buried in noise.
///
/// Five exogenous series load on the factor contemporaneously, so the
/// rolling-PCA feature recovers it; `noise_frac` is the noise standard
/// deviation as a fraction of the signal's.
pub fn learnable_market(days: usize, noise_frac: f64, seed: u64) -> SyntheticMarket {
    build_market(days, Some(noise_frac), seed)
}

/// Panel with the same shape but a pure-noise target: nothing to learn.
pub fn random_walk_market(days: usize, seed: u64) -> SyntheticMarket {
    build_market(days, None, seed)
}

fn build_market(days: usize, signal_noise_frac: Option<f64>, seed: u64) -> SyntheticMarket {
    const N_EXOGENOUS: usize = 5;
    const FACTOR_RHO: f64 = 0.4;
    const TARGET_SCALE: f64 = 2000.0; // index points per unit of signal
    const EXO_SCALE: f64 = 200.0;
    const EXO_NOISE: f64 = 0.15; // idiosyncratic share of the exogenous changes

    let mut rng = stream_rng(seed, 0);
    let horizon = days + 8;
    let factor = ar1(horizon, FACTOR_RHO, seed.wrapping_add(100));

    // Signal for the change realized on day t+1, known at day t.
    let lag_weights = [0.45, 0.30, 0.15, 0.05, 0.05];
    let mut signal = vec![0.0f64; horizon];
    for t in 5..horizon {
        signal[t] = (0..5).map(|l| lag_weights[l] * factor[t - 1 - l]).sum();
    }
    let signal_sigma = crate::stats::population_std(&signal[5..]).max(1e-9);

    let target_changes: Vec<f64> = match signal_noise_frac {
        Some(frac) => (0..horizon)
            .map(|t| {
                let noise: f64 = StandardNormal.sample(&mut rng);
                TARGET_SCALE * (signal[t] + frac * signal_sigma * noise)
            })
            .collect(),
        None => (0..horizon)
            .map(|_| {
                let noise: f64 = StandardNormal.sample(&mut rng);
                TARGET_SCALE * signal_sigma * noise
            })
            .collect(),
    };

    let mut series = Vec::with_capacity(N_EXOGENOUS + 1);
    series.push(levels_to_series(
        "index_fut",
        &target_changes[..days],
        150_000.0,
    ));
    for i in 0..N_EXOGENOUS {
        let weight = 0.8 + 0.1 * i as f64;
        let mut exo_rng = stream_rng(seed.wrapping_add(200 + i as u64), 0);
        let changes: Vec<f64> = (0..days)
            .map(|t| {
                let own: f64 = StandardNormal.sample(&mut exo_rng);
                EXO_SCALE * (weight * factor[t] + EXO_NOISE * own)
            })
            .collect();
        series.push(levels_to_series(
            &format!("exo{}", i + 1),
            &changes,
            100_000.0,
        ));
    }

    let panel = align(&series, FillPolicy::Intersection).expect("identical calendars");
    SyntheticMarket {
        panel,
        target: "index_fut".into(),
    }
}

/// Levels from additive daily changes, shifted up if needed so every close
/// stays above a fifth of the base (keeps daily percentage moves sane).
fn levels_to_series(id: &str, changes: &[f64], base: f64) -> PriceSeries {
    let mut levels = Vec::with_capacity(changes.len() + 1);
    let mut level = 0.0f64;
    levels.push(level);
    for c in changes {
        level += c;
        levels.push(level);
    }
    let min = levels.iter().copied().fold(f64::INFINITY, f64::min);
    let floor = 0.2 * base;
    let shift = if base + min < floor {
        floor - min
    } else {
        base
    };
    let closes: Vec<f64> = levels.iter().map(|l| l + shift).collect();
    let dates = trading_dates(default_start(), closes.len());
    PriceSeries::new(id, dates, closes).expect("positive by construction")
}

/// Write a price series as an instrument CSV (`date,close` header).
pub fn write_price_csv(path: &std::path::Path, series: &PriceSeries) -> Result<()> {
    use std::io::Write;
    let mut out = String::from("date,close\n");
    for (d, c) in series.dates().iter().zip(series.closes()) {
        out.push_str(&format!("{d},{c}\n"));
    }
    let mut f = std::fs::File::create(path).map_err(|e| crate::Error::io(path, e))?;
    f.write_all(out.as_bytes())
        .map_err(|e| crate::Error::io(path, e))
}
