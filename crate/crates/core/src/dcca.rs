//! Detrended (cross-)correlation analysis.
//!
//! The reduced series are integrated into profiles, every overlapping box of
//! length n+1 is detrended by its own least-squares line, and F²(n) averages
//! the covariance of the residuals over all boxes. Long-range correlated
//! input makes F²(n) follow a power law n^{2λ}.

use crate::ingest::ReducedSeries;
use crate::{rng, stats, Error, Result};

/// Cumulative-sum profile of a reduced series.
#[derive(Debug, Clone)]
pub struct IntegratedSeries {
    pub values: Vec<f64>,
}

/// `values[l] = Σ_{i<=l} a(i)`.
pub fn integrate(a: &ReducedSeries) -> IntegratedSeries {
    let mut running = 0.0;
    let values = a
        .values
        .iter()
        .map(|v| {
            running += v;
            running
        })
        .collect();
    IntegratedSeries { values }
}

/// F²(n) samples for one series pair. In the self (DFA) case every value is
/// nonnegative; cross values may change sign.
#[derive(Debug, Clone)]
pub struct DccaCurve {
    pub box_sizes: Vec<usize>,
    pub f2: Vec<f64>,
    pub pair: (String, String),
}

/// Power-law fit of a [`DccaCurve`] on log-log axes: F²(n) ≈ e^intercept · n^{2λ}.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ScalingFit {
    pub lambda: f64,
    pub intercept: f64,
    pub fit_range: (usize, usize),
    pub r_squared: f64,
    /// Points inside the fit range dropped because F² <= 0 (cross case).
    pub excluded_points: usize,
}

/// Default box-size grid: geometric from 4 to N/4 with ratio ~2^(1/4).
pub fn default_box_sizes(n_obs: usize) -> Vec<usize> {
    let max = n_obs / 4;
    let mut sizes = Vec::new();
    let mut k = 0u32;
    loop {
        let n = (4.0 * 2f64.powf(k as f64 / 4.0)).round() as usize;
        if n > max {
            break;
        }
        if sizes.last() != Some(&n) {
            sizes.push(n);
        }
        k += 1;
    }
    sizes
}

/// Detrended correlation function F²(n) over all N−n overlapping boxes of
/// length n+1, for each requested box size.
///
/// Each box is detrended by its own OLS line and the residual covariance uses
/// the 1/(n−1) factor. The evaluation is arranged so that swapping the two
/// series gives bit-identical output.
pub fn dcca_f2(
    a: &ReducedSeries,
    b: &ReducedSeries,
    pair: (&str, &str),
    box_sizes: &[usize],
) -> Result<DccaCurve> {
    if a.values.len() != b.values.len() {
        return Err(Error::Shape(format!(
            "series lengths differ: {} vs {}",
            a.values.len(),
            b.values.len()
        )));
    }
    let mut sizes = box_sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.is_empty() {
        return Err(Error::Range("no box sizes given".into()));
    }
    if sizes[0] < 2 {
        return Err(Error::Range(format!(
            "box size {} below 2: the residual covariance divides by n-1",
            sizes[0]
        )));
    }
    let n_obs = a.values.len();
    let max_n = *sizes.last().expect("nonempty");
    if max_n + 1 > n_obs {
        return Err(Error::Range(format!(
            "largest box needs {} points but the series has {n_obs}",
            max_n + 1
        )));
    }

    let profile_a = integrate(a);
    let profile_b = integrate(b);
    let f2 = detrended_covariances(&profile_a.values, &profile_b.values, &sizes);

    Ok(DccaCurve {
        box_sizes: sizes,
        f2,
        pair: (pair.0.to_string(), pair.1.to_string()),
    })
}

/// F²(n) per box size from two integrated profiles.
///
/// Window sums come from prefix arrays, so each box size costs O(N). All the
/// two-operand sums below commute bitwise, which is what makes the result
/// symmetric in the profile pair.
fn detrended_covariances(u: &[f64], v: &[f64], sizes: &[usize]) -> Vec<f64> {
    let n_obs = u.len();
    let mut pu = vec![0.0; n_obs + 1];
    let mut pv = vec![0.0; n_obs + 1];
    let mut piu = vec![0.0; n_obs + 1];
    let mut piv = vec![0.0; n_obs + 1];
    let mut puv = vec![0.0; n_obs + 1];
    for t in 0..n_obs {
        let ft = t as f64;
        pu[t + 1] = pu[t] + u[t];
        pv[t + 1] = pv[t] + v[t];
        piu[t + 1] = piu[t] + ft * u[t];
        piv[t + 1] = piv[t] + ft * v[t];
        puv[t + 1] = puv[t] + u[t] * v[t];
    }

    rng::indexed_map(sizes.len(), |si| {
        let n = sizes[si];
        let m = (n + 1) as f64;
        let sl = (n * (n + 1) / 2) as f64;
        let sll = (n * (n + 1) * (2 * n + 1) / 6) as f64;
        let denom = m * sll - sl * sl;
        let n_windows = n_obs - n;

        let mut residual_products = Vec::with_capacity(n_windows);
        for j in 0..n_windows {
            let hi = j + n + 1;
            let fj = j as f64;
            let su = pu[hi] - pu[j];
            let sv = pv[hi] - pv[j];
            let slu = (piu[hi] - piu[j]) - fj * su;
            let slv = (piv[hi] - piv[j]) - fj * sv;
            let suv = puv[hi] - puv[j];

            let bu = (m * slu - sl * su) / denom;
            let au = (su - bu * sl) / m;
            let bv = (m * slv - sl * sv) / denom;
            let av = (sv - bv * sl) / m;

            let sym_aa = m * (au * av);
            let sym_bb = sll * (bu * bv);
            let sym_ab = sl * (au * bv + av * bu);
            let sym_as = av * su + au * sv;
            let sym_bs = bv * slu + bu * slv;
            let cross = suv + sym_aa + sym_bb + sym_ab - sym_as - sym_bs;
            residual_products.push(cross / (n - 1) as f64);
        }
        stats::pairwise_sum(&residual_products) / n_windows as f64
    })
}

/// Least-squares power-law fit of ln F² against ln n inside `fit_range`
/// (inclusive). Non-positive F² points are excluded and counted; fewer than
/// three usable points means no power law.
pub fn fit_power_law(curve: &DccaCurve, fit_range: (usize, usize)) -> Result<ScalingFit> {
    let (n_min, n_max) = fit_range;
    if n_min >= n_max {
        return Err(Error::Range(format!(
            "fit range ({n_min}, {n_max}) must be increasing"
        )));
    }
    let in_range: Vec<(usize, f64)> = curve
        .box_sizes
        .iter()
        .zip(&curve.f2)
        .filter(|(n, _)| **n >= n_min && **n <= n_max)
        .map(|(n, f)| (*n, *f))
        .collect();
    let usable: Vec<(usize, f64)> = in_range.iter().copied().filter(|(_, f)| *f > 0.0).collect();
    let excluded_points = in_range.len() - usable.len();
    if usable.len() < 3 {
        return Err(Error::Fit(format!(
            "no power law: only {} positive F² points in [{n_min}, {n_max}]",
            usable.len()
        )));
    }
    let log_n: Vec<f64> = usable.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let log_f: Vec<f64> = usable.iter().map(|(_, f)| f.ln()).collect();
    let fit = stats::linear_fit(&log_n, &log_f)?;
    Ok(ScalingFit {
        lambda: fit.slope / 2.0,
        intercept: fit.intercept,
        fit_range,
        r_squared: fit.r_squared,
        excluded_points,
    })
}
