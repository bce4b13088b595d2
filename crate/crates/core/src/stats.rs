//! Small shared numerics: population moments, ordinary least squares on
//! paired data, the standard normal quantile, and order-fixed summation.
//!
//! The population convention (divide by N) is used for every variance in the
//! crate: series reduction, windowed correlation matrices, and the daily
//! return statistics all share it.

/// Arithmetic mean. Returns 0 for an empty slice.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    pairwise_sum(values) / values.len() as f64
}

/// Population variance (divide by N).
pub fn population_variance(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let m = mean(values);
    let sq: Vec<f64> = values.iter().map(|v| (v - m) * (v - m)).collect();
    pairwise_sum(&sq) / values.len() as f64
}

/// Population standard deviation.
pub fn population_std(values: &[f64]) -> f64 {
    population_variance(values).sqrt()
}

/// Third standardized moment, population convention. `None` when the
/// standard deviation vanishes.
pub fn skewness(values: &[f64]) -> Option<f64> {
    standardized_moment(values, 3)
}

/// Raw (non-excess) fourth standardized moment; 3.0 for a Gaussian.
pub fn kurtosis_raw(values: &[f64]) -> Option<f64> {
    standardized_moment(values, 4)
}

fn standardized_moment(values: &[f64], order: i32) -> Option<f64> {
    let sigma = population_std(values);
    if sigma == 0.0 || values.is_empty() {
        return None;
    }
    let m = mean(values);
    let terms: Vec<f64> = values
        .iter()
        .map(|v| ((v - m) / sigma).powi(order))
        .collect();
    Some(pairwise_sum(&terms) / values.len() as f64)
}

/// Center and scale to zero mean and unit population standard deviation.
/// Returns `None` when the variance is zero.
pub fn standardize(values: &[f64]) -> Option<(Vec<f64>, f64, f64)> {
    let m = mean(values);
    let sigma = population_std(values);
    if sigma == 0.0 {
        return None;
    }
    let out = values.iter().map(|v| (v - m) / sigma).collect();
    Some((out, m, sigma))
}

/// Pairwise (cascade) summation: deterministic for a fixed element order and
/// far better conditioned than a running sum on long Monte Carlo vectors.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Result of an ordinary least-squares line fit `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Standard error of the slope (residual-based, n−2 degrees of freedom).
    pub slope_stderr: f64,
}

/// OLS line through `(x, y)` pairs.
///
/// Requires at least two points and non-degenerate x. `r_squared` is 1 for a
/// perfect fit, including the constant-y case.
pub fn linear_fit(x: &[f64], y: &[f64]) -> crate::Result<LineFit> {
    if x.len() != y.len() {
        return Err(crate::Error::Shape(format!(
            "linear fit needs paired data, got {} x and {} y",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(crate::Error::Fit(
            "linear fit needs at least two points".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = mean(x);
    let my = mean(y);
    let sxx: f64 = x.iter().map(|xi| (xi - mx) * (xi - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    if sxx == 0.0 {
        return Err(crate::Error::Fit("x values are all identical".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;

    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| {
            let r = yi - (slope * xi + intercept);
            r * r
        })
        .sum();
    let ss_tot: f64 = y.iter().map(|yi| (yi - my) * (yi - my)).sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    let slope_stderr = if x.len() > 2 {
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
        slope_stderr,
    })
}

/// Standard normal quantile (inverse CDF), Acklam's rational approximation.
/// Relative error below 1.2e-9 over (0, 1).
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile needs p in (0,1), got {p}");

    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -((((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_matches_known_values() {
        assert!((normal_quantile(0.975) - 1.959964).abs() < 1e-5);
        assert!((normal_quantile(0.5)).abs() < 1e-12);
        assert!((normal_quantile(0.025) + 1.959964).abs() < 1e-5);
        assert!((normal_quantile(0.995) - 2.575829).abs() < 1e-5);
    }

    #[test]
    fn fit_recovers_exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [3.0, 5.0, 7.0, 9.0];
        let fit = linear_fit(&x, &y).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit.slope_stderr < 1e-9);
    }

    #[test]
    fn fit_rejects_degenerate_inputs() {
        assert!(linear_fit(&[1.0], &[2.0]).is_err());
        assert!(linear_fit(&[1.0, 1.0], &[2.0, 3.0]).is_err());
        assert!(linear_fit(&[1.0, 2.0], &[2.0]).is_err());
    }

    #[test]
    fn population_moments() {
        let xs = [-1.0, 1.0];
        assert_eq!(mean(&xs), 0.0);
        assert_eq!(population_std(&xs), 1.0);
        assert_eq!(skewness(&xs), Some(0.0));
        // two-point symmetric distribution has raw kurtosis 1
        assert_eq!(kurtosis_raw(&xs), Some(1.0));
        assert_eq!(skewness(&[5.0, 5.0]), None);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_input() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-9);
    }
}
