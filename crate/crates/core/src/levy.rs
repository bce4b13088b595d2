//! Heavy-tail index estimation from the probability of return to the origin.
//!
//! Shuffling a return series kills its correlations; partitioning each
//! shuffled copy into blocks of n and measuring the density of the block sums
//! at zero gives P(X_n = 0), which decays like n^(−1/α) while the sum is in
//! the Lévy regime. A Gaussian series gives the n^(−1/2) slope, i.e. α = 2.
//!
//! A truncated symmetric Lévy sampler — density obtained by quadrature of its
//! Fourier transform — serves as the round-trip oracle for the estimator.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::rng::{indexed_map, stream_rng};
use crate::{stats, Error, Result};

/// Truncated symmetric Lévy density parameters: index `alpha`, scale
/// `gamma`, truncation bound `d`, and the normalization `c` that makes the
/// density integrate to one over [−d, d].
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct LevyParams {
    pub alpha: f64,
    pub gamma: f64,
    pub d: f64,
    pub c: f64,
}

// Grid pinned for reproducibility: k up to where exp(-gamma k^alpha) < 1e-12.
const K_POINTS: usize = 1 << 16;
const X_POINTS: usize = 1 << 13;
const TAIL_CUTOFF: f64 = 1e-12;

/// Tabulated truncated Lévy density with its inverse-CDF sampler.
#[derive(Debug, Clone)]
pub struct TruncatedLevySampler {
    params: LevyParams,
    xs: Vec<f64>,
    density: Vec<f64>,
    cdf: Vec<f64>,
}

impl TruncatedLevySampler {
    /// Build the density table by trapezoid quadrature of the Fourier
    /// integral on a 2^16-point k-grid, evaluated at 2^13 x-points.
    pub fn new(alpha: f64, gamma: f64, d: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::Range(format!(
                "alpha must lie in (0, 2], got {alpha}"
            )));
        }
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::Range(format!("gamma must be positive, got {gamma}")));
        }
        if !d.is_finite() || d <= 0.0 {
            return Err(Error::Range(format!("d must be positive, got {d}")));
        }

        let k_max = (-TAIL_CUTOFF.ln() / gamma).powf(1.0 / alpha);
        let dk = k_max / (K_POINTS - 1) as f64;
        let kernel: Vec<f64> = (0..K_POINTS)
            .map(|j| {
                let k = j as f64 * dk;
                let w = if j == 0 || j == K_POINTS - 1 {
                    0.5
                } else {
                    1.0
                };
                w * (-gamma * k.powf(alpha)).exp()
            })
            .collect();

        let dx = 2.0 * d / (X_POINTS - 1) as f64;
        let half = X_POINTS / 2;
        // symmetric density: evaluate the upper half and mirror it, clamping
        // the slight negative ringing of the truncated integral
        let upper: Vec<f64> = indexed_map(X_POINTS - half, |i| {
            let x = (half + i) as f64 * dx - d;
            fourier_cosine(&kernel, dk, x).max(0.0)
        });
        let mut density = vec![0.0f64; X_POINTS];
        density[half..].copy_from_slice(&upper);
        for i in 0..half {
            density[i] = density[X_POINTS - 1 - i];
        }
        let xs: Vec<f64> = (0..X_POINTS).map(|i| i as f64 * dx - d).collect();

        let mut cdf = vec![0.0f64; X_POINTS];
        for i in 1..X_POINTS {
            cdf[i] = cdf[i - 1] + 0.5 * (density[i - 1] + density[i]) * dx;
        }
        let total = cdf[X_POINTS - 1];
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::Numeric(format!(
                "quadrature failed: raw density integral {total}"
            )));
        }
        for v in cdf.iter_mut() {
            *v /= total;
        }
        let c = 1.0 / total;

        Ok(TruncatedLevySampler {
            params: LevyParams { alpha, gamma, d, c },
            xs,
            density,
            cdf,
        })
    }

    pub fn params(&self) -> LevyParams {
        self.params
    }

    /// Normalized density at `x` (linear interpolation of the table).
    pub fn density(&self, x: f64) -> f64 {
        let d = self.params.d;
        if !(-d..=d).contains(&x) {
            return 0.0;
        }
        let dx = 2.0 * d / (X_POINTS - 1) as f64;
        let pos = (x + d) / dx;
        let i = (pos.floor() as usize).min(X_POINTS - 2);
        let frac = pos - i as f64;
        self.params.c * (self.density[i] * (1.0 - frac) + self.density[i + 1] * frac)
    }

    /// i.i.d. draws by inverse-CDF interpolation.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = stream_rng(seed, 0);
        (0..count)
            .map(|_| {
                let u: f64 = rng.random();
                let i = match self.cdf.partition_point(|c| *c < u) {
                    0 => 1,
                    i => i.min(X_POINTS - 1),
                };
                let (lo, hi) = (self.cdf[i - 1], self.cdf[i]);
                let frac = if hi > lo { (u - lo) / (hi - lo) } else { 0.0 };
                self.xs[i - 1] + frac * (self.xs[i] - self.xs[i - 1])
            })
            .collect()
    }
}

/// Σ w_j·cos(k_j x) by a cosine recurrence (refreshed periodically), scaled
/// by dk/π.
fn fourier_cosine(kernel: &[f64], dk: f64, x: f64) -> f64 {
    let theta = dk * x;
    let (sin_t, cos_t) = theta.sin_cos();
    let mut acc = 0.0f64;
    let mut c = 1.0f64; // cos(0)
    let mut s = 0.0f64;
    for (j, w) in kernel.iter().enumerate() {
        if j % 4096 == 0 {
            let a = theta * j as f64;
            let (sj, cj) = a.sin_cos();
            c = cj;
            s = sj;
        }
        acc += w * c;
        let c_next = c * cos_t - s * sin_t;
        s = s * cos_t + c * sin_t;
        c = c_next;
    }
    acc * dk / std::f64::consts::PI
}

/// Convenience wrapper over [`TruncatedLevySampler`].
pub fn sample_truncated_levy(
    alpha: f64,
    gamma: f64,
    d: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    Ok(TruncatedLevySampler::new(alpha, gamma, d)?.sample(count, seed))
}

/// Monte Carlo estimate of the density of shuffled block sums at the origin.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ReturnToOriginCurve {
    pub n_values: Vec<usize>,
    pub p_zero: Vec<f64>,
    pub stderr: Vec<f64>,
    pub realizations: usize,
    pub bin_width: f64,
}

/// Default zero-bin width: 0.1 × the standard deviation of single returns.
pub fn default_bin_width(returns: &[f64]) -> f64 {
    0.1 * stats::population_std(returns)
}

/// The shuffle-and-sum estimator.
///
/// Per seeded realization: shuffle the return values, split them into
/// consecutive non-overlapping blocks of length n, and count block sums
/// inside the centered zero bin; the count fraction over the bin width
/// estimates the density of X_n at the origin. Realizations are averaged in
/// index order, so the result is identical for any worker count.
pub fn return_to_origin(
    returns: &[f64],
    n_values: &[usize],
    realizations: usize,
    bin_width: f64,
    seed: u64,
) -> Result<ReturnToOriginCurve> {
    if realizations < 1 {
        return Err(Error::Precondition("need at least one realization".into()));
    }
    if !bin_width.is_finite() || bin_width <= 0.0 {
        return Err(Error::Range(format!(
            "bin width must be positive, got {bin_width}"
        )));
    }
    if n_values.is_empty() {
        return Err(Error::Range("no block lengths given".into()));
    }
    if n_values.contains(&0) {
        return Err(Error::Range("block length 0 is not allowed".into()));
    }
    let max_n = *n_values.iter().max().expect("nonempty");
    if max_n > returns.len() {
        return Err(Error::Range(format!(
            "block length {max_n} exceeds the series length {}",
            returns.len()
        )));
    }

    let half_bin = bin_width / 2.0;
    let per_realization: Vec<Vec<f64>> = indexed_map(realizations, |r| {
        let shuffled = shuffled_copy(returns, seed, r as u64);
        n_values
            .iter()
            .map(|&n| {
                let blocks = shuffled.len() / n;
                let mut hits = 0usize;
                for b in 0..blocks {
                    let sum: f64 = shuffled[b * n..(b + 1) * n].iter().sum();
                    if sum.abs() < half_bin {
                        hits += 1;
                    }
                }
                hits as f64 / blocks as f64 / bin_width
            })
            .collect()
    });

    let mut p_zero = Vec::with_capacity(n_values.len());
    let mut stderr = Vec::with_capacity(n_values.len());
    for ni in 0..n_values.len() {
        let estimates: Vec<f64> = per_realization.iter().map(|row| row[ni]).collect();
        p_zero.push(stats::pairwise_sum(&estimates) / realizations as f64);
        stderr.push(stats::population_std(&estimates) / (realizations as f64).sqrt());
    }

    Ok(ReturnToOriginCurve {
        n_values: n_values.to_vec(),
        p_zero,
        stderr,
        realizations,
        bin_width,
    })
}

/// Uniform permutation of the return values for one realization stream.
fn shuffled_copy(returns: &[f64], seed: u64, realization: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, realization);
    let mut shuffled = returns.to_vec();
    shuffled.shuffle(&mut rng);
    shuffled
}

/// Fitted tail index: `alpha = −1/slope` of ln P(X_n = 0) against ln n.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AlphaEstimate {
    pub alpha: f64,
    pub slope: f64,
    pub fit_range: (usize, usize),
    /// Standard error of alpha, propagated from the slope's.
    pub stderr: f64,
}

pub fn estimate_alpha(
    curve: &ReturnToOriginCurve,
    fit_range: (usize, usize),
) -> Result<AlphaEstimate> {
    let (n_min, n_max) = fit_range;
    let usable: Vec<(usize, f64)> = curve
        .n_values
        .iter()
        .zip(&curve.p_zero)
        .filter(|(n, p)| **n >= n_min && **n <= n_max && **p > 0.0)
        .map(|(n, p)| (*n, *p))
        .collect();
    if usable.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 positive points in [{n_min}, {n_max}], have {}",
            usable.len()
        )));
    }
    let log_n: Vec<f64> = usable.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let log_p: Vec<f64> = usable.iter().map(|(_, p)| p.ln()).collect();
    let fit = stats::linear_fit(&log_n, &log_p)?;
    if fit.slope >= 0.0 {
        return Err(Error::Fit(format!(
            "return-to-origin curve does not decay (slope {})",
            fit.slope
        )));
    }
    Ok(AlphaEstimate {
        alpha: -1.0 / fit.slope,
        slope: fit.slope,
        fit_range,
        stderr: fit.slope_stderr / (fit.slope * fit.slope),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn uniform_returns_have_density_half_at_zero() {
        // Uniform(−1,1) has density 0.5 at the origin.
        let returns = synth::uniform_noise(40_000, 1.0, 41);
        let curve = return_to_origin(&returns, &[1], 50, 0.01, 42).unwrap();
        let err = curve.stderr[0].max(1e-6);
        assert!(
            (curve.p_zero[0] - 0.5).abs() < 3.0 * err.max(0.01),
            "p {} stderr {err}",
            curve.p_zero[0]
        );
    }

    #[test]
    fn all_zero_returns_pin_the_density_at_one_over_bin() {
        let returns = vec![0.0; 256];
        let curve = return_to_origin(&returns, &[1, 2, 4, 8], 5, 0.05, 1).unwrap();
        for p in &curve.p_zero {
            assert!((p - 20.0).abs() < 1e-9);
        }
    }

    #[test]
    fn gaussian_returns_give_the_sqrt_n_slope() {
        let returns = synth::gaussian_noise(20_000, 43);
        let ns = [1usize, 2, 4, 8, 16, 32, 64];
        let bw = default_bin_width(&returns);
        let curve = return_to_origin(&returns, &ns, 300, bw, 44).unwrap();
        let est = estimate_alpha(&curve, (1, 64)).unwrap();
        assert!((est.slope + 0.5).abs() < 0.05, "slope {}", est.slope);
        assert!((est.alpha - 2.0).abs() < 0.2, "alpha {}", est.alpha);
    }

    #[test]
    fn exact_power_curves_invert_to_alpha() {
        let ns: Vec<usize> = vec![1, 2, 4, 8, 16, 32];
        let mk = |alpha: f64| ReturnToOriginCurve {
            n_values: ns.clone(),
            p_zero: ns.iter().map(|n| (*n as f64).powf(-1.0 / alpha)).collect(),
            stderr: vec![0.0; ns.len()],
            realizations: 1,
            bin_width: 0.01,
        };
        let est = estimate_alpha(&mk(2.0), (1, 32)).unwrap();
        assert!((est.alpha - 2.0).abs() < 1e-9);
        assert!((est.alpha + 1.0 / est.slope).abs() < 1e-12);

        let est = estimate_alpha(&mk(0.54), (1, 32)).unwrap();
        assert!((est.alpha - 0.54).abs() < 1e-9);
    }

    #[test]
    fn steeper_slopes_mean_smaller_alpha() {
        let ns: Vec<usize> = vec![1, 2, 4, 8];
        let alphas = [0.5, 1.0, 1.5, 2.0];
        let slopes: Vec<f64> = alphas
            .iter()
            .map(|a| {
                let curve = ReturnToOriginCurve {
                    n_values: ns.clone(),
                    p_zero: ns.iter().map(|n| (*n as f64).powf(-1.0 / a)).collect(),
                    stderr: vec![0.0; ns.len()],
                    realizations: 1,
                    bin_width: 0.01,
                };
                estimate_alpha(&curve, (1, 8)).unwrap().slope
            })
            .collect();
        for w in slopes.windows(2) {
            assert!(w[0] < w[1], "slopes should rise with alpha: {slopes:?}");
        }
    }

    #[test]
    fn estimator_rejects_bad_inputs() {
        let returns = vec![0.1, -0.2, 0.3];
        assert!(matches!(
            return_to_origin(&returns, &[4], 10, 0.01, 1),
            Err(Error::Range(_))
        ));
        assert!(matches!(
            return_to_origin(&returns, &[1], 0, 0.01, 1),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            return_to_origin(&returns, &[1], 10, 0.0, 1),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn sampler_alpha_two_is_gaussian_with_variance_two_gamma() {
        let gamma = 1.0;
        let sampler = TruncatedLevySampler::new(2.0, gamma, 20.0).unwrap();
        let samples = sampler.sample(40_000, 7);
        let var = crate::stats::population_variance(&samples);
        assert!(
            (var - 2.0 * gamma).abs() < 0.05,
            "variance {var}, expected {}",
            2.0 * gamma
        );
    }

    #[test]
    fn sampler_density_at_zero_matches_the_closed_form() {
        // L(0) = (1/pi) ∫ exp(-gamma k^alpha) dk = Gamma(1/alpha)/(alpha pi gamma^(1/alpha)).
        // alpha=2, gamma=1: 1/(2 sqrt(pi)); alpha=1.5, gamma=1: Gamma(2/3)/(1.5 pi).
        let s2 = TruncatedLevySampler::new(2.0, 1.0, 20.0).unwrap();
        let expected2 = 0.5 / std::f64::consts::PI.sqrt();
        assert!(
            (s2.density(0.0) - expected2).abs() < 1e-4,
            "{}",
            s2.density(0.0)
        );

        let s15 = TruncatedLevySampler::new(1.5, 1.0, 20.0).unwrap();
        let gamma_two_thirds = 1.3541179394264005f64;
        let expected15 = gamma_two_thirds / (1.5 * std::f64::consts::PI);
        assert!(
            (s15.density(0.0) - expected15).abs() < 2e-3,
            "{} vs {expected15}",
            s15.density(0.0)
        );
    }

    #[test]
    fn samples_are_symmetric_and_truncated() {
        let sampler = TruncatedLevySampler::new(1.5, 1.0, 10.0).unwrap();
        let samples = sampler.sample(20_000, 9);
        assert!(samples.iter().all(|x| x.abs() <= 10.0));
        let mean = crate::stats::mean(&samples);
        let se = crate::stats::population_std(&samples) / (samples.len() as f64).sqrt();
        assert!(mean.abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn levy_round_trip_recovers_alpha() {
        let sampler = TruncatedLevySampler::new(1.5, 1.0, 20.0).unwrap();
        let samples = sampler.sample(100_000, 11);
        let ns = [1usize, 2, 4, 8, 16];
        let bw = default_bin_width(&samples);
        let curve = return_to_origin(&samples, &ns, 200, bw, 12).unwrap();
        let est = estimate_alpha(&curve, (1, 16)).unwrap();
        assert!((est.alpha - 1.5).abs() < 0.15, "alpha {}", est.alpha);
    }

    #[test]
    fn shuffling_preserves_the_multiset() {
        let returns = synth::gaussian_noise(5000, 61);
        let sum: f64 = crate::stats::pairwise_sum(&returns);
        let sum_sq: f64 =
            crate::stats::pairwise_sum(&returns.iter().map(|x| x * x).collect::<Vec<_>>());
        for realization in 0..5u64 {
            let shuffled = shuffled_copy(&returns, 62, realization);
            assert_eq!(shuffled.len(), returns.len());
            let s: f64 = crate::stats::pairwise_sum(&shuffled);
            let s2: f64 =
                crate::stats::pairwise_sum(&shuffled.iter().map(|x| x * x).collect::<Vec<_>>());
            assert!((s - sum).abs() < 1e-9, "sum drifted by {}", s - sum);
            assert!(
                (s2 - sum_sq).abs() < 1e-9,
                "sum of squares drifted by {}",
                s2 - sum_sq
            );
        }
    }

    #[test]
    fn two_seeds_agree_within_monte_carlo_error() {
        let returns = synth::gaussian_noise(10_000, 51);
        let ns = [1usize, 4, 16];
        let a = return_to_origin(&returns, &ns, 150, 0.1, 1).unwrap();
        let b = return_to_origin(&returns, &ns, 150, 0.1, 2).unwrap();
        for i in 0..ns.len() {
            let se = (a.stderr[i].powi(2) + b.stderr[i].powi(2)).sqrt();
            assert!(
                (a.p_zero[i] - b.p_zero[i]).abs() < 3.0 * se,
                "n={} differs: {} vs {}",
                ns[i],
                a.p_zero[i],
                b.p_zero[i]
            );
        }
    }

    #[test]
    fn params_validation() {
        assert!(TruncatedLevySampler::new(0.0, 1.0, 1.0).is_err());
        assert!(TruncatedLevySampler::new(2.5, 1.0, 1.0).is_err());
        assert!(TruncatedLevySampler::new(1.5, 0.0, 1.0).is_err());
        assert!(TruncatedLevySampler::new(1.5, 1.0, 0.0).is_err());
        let p = TruncatedLevySampler::new(1.5, 1.0, 15.0).unwrap().params();
        assert!(p.c > 0.0);

        let draws = sample_truncated_levy(1.5, 1.0, 15.0, 100, 1).unwrap();
        assert_eq!(draws.len(), 100);
        assert!(draws.iter().all(|x| x.abs() <= 15.0));
    }
}
