//! Lagged auto- and cross-correlation functions of reduced log-returns,
//! including the absolute-value variant that exposes volatility clustering,
//! and the Gaussian noise band used to judge significance.

use crate::ingest::{reduce_values, ReducedSeries};
use crate::{stats, Error, Result};

/// Sampled correlation function C(n) for lags 0..=n_max.
#[derive(Debug, Clone)]
pub struct CorrelationFunction {
    pub lags: Vec<usize>,
    pub values: Vec<f64>,
    pub pair: (String, String),
    /// True when the inputs were |reduced| values re-standardized.
    pub absolute: bool,
}

/// Lagged correlation of two reduced series: `values[n]` averages
/// `a(i)·b(i+n)` over the N−n overlapping terms (a leads b).
///
/// With `absolute` set, both inputs are replaced by their absolute values and
/// re-standardized first, so the result is again a correlation with C(0) = 1.
///
/// The N−n average is unbiased at each lag but is not hard-bounded by 1 for
/// spike-like inputs at lags beyond N/2; keep n_max well below N.
pub fn cross_correlation(
    a: &ReducedSeries,
    b: &ReducedSeries,
    pair: (&str, &str),
    n_max: usize,
    absolute: bool,
) -> Result<CorrelationFunction> {
    if a.values.len() != b.values.len() {
        return Err(Error::Shape(format!(
            "series lengths differ: {} vs {}",
            a.values.len(),
            b.values.len()
        )));
    }
    let n_obs = a.values.len();
    if n_max >= n_obs {
        return Err(Error::Range(format!(
            "n_max {n_max} must be below the series length {n_obs}"
        )));
    }

    let (xa, xb);
    let (va, vb): (&[f64], &[f64]) = if absolute {
        let abs_a: Vec<f64> = a.values.iter().map(|v| v.abs()).collect();
        let abs_b: Vec<f64> = b.values.iter().map(|v| v.abs()).collect();
        xa = reduce_values(&abs_a)?;
        xb = reduce_values(&abs_b)?;
        (&xa.values, &xb.values)
    } else {
        (&a.values, &b.values)
    };

    let mut values = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let terms: Vec<f64> = (0..n_obs - n).map(|i| va[i] * vb[i + n]).collect();
        values.push(stats::pairwise_sum(&terms) / terms.len() as f64);
    }

    Ok(CorrelationFunction {
        lags: (0..=n_max).collect(),
        values,
        pair: (pair.0.to_string(), pair.1.to_string()),
        absolute,
    })
}

/// Half-width of the Gaussian noise band for a correlation estimated from N
/// samples: z·/√N at the requested two-sided confidence level.
pub fn noise_band(n_samples: usize, confidence: f64) -> Result<f64> {
    if n_samples < 2 {
        return Err(Error::Precondition(format!(
            "noise band needs N >= 2 samples, got {n_samples}"
        )));
    }
    if !(0.0 < confidence && confidence < 1.0) {
        return Err(Error::Range(format!(
            "confidence must lie in (0,1), got {confidence}"
        )));
    }
    let z = stats::normal_quantile(0.5 + confidence / 2.0);
    Ok(z / (n_samples as f64).sqrt())
}
