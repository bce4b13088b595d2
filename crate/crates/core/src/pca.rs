//! Rolling-window principal components over the return panel.
//!
//! Each window's correlation-form matrix M is built from standardized
//! one-day differences of the panel values (raw differences, not
//! log-returns). Its top eigenvector, oriented deterministically toward the
//! target series, projects the window's last standardized return vector into
//! the single feature value fed to the forecaster.

use chrono::NaiveDate;

use crate::ingest::AlignedPanel;
use crate::{stats, Error, Result};

/// Windowed correlation-form matrix of standardized return deviations.
#[derive(Debug, Clone)]
pub struct CovarianceMatrix {
    entries: Vec<Vec<f64>>,
    series_ids: Vec<String>,
    window: (NaiveDate, NaiveDate),
    /// Index of the forecast target among `series_ids`; anchors the
    /// eigenvector sign convention.
    target_index: usize,
}

impl CovarianceMatrix {
    /// Wrap a raw symmetric matrix (checked within 1e-12).
    pub fn from_entries(
        entries: Vec<Vec<f64>>,
        series_ids: Vec<String>,
        window: (NaiveDate, NaiveDate),
        target_index: usize,
    ) -> Result<Self> {
        let k = entries.len();
        if k == 0 || entries.iter().any(|row| row.len() != k) {
            return Err(Error::Shape("matrix must be square and nonempty".into()));
        }
        if series_ids.len() != k {
            return Err(Error::Shape(format!(
                "{k}x{k} matrix with {} series ids",
                series_ids.len()
            )));
        }
        if target_index >= k {
            return Err(Error::Range(format!(
                "target index {target_index} out of {k}"
            )));
        }
        for i in 0..k {
            for j in 0..i {
                if (entries[i][j] - entries[j][i]).abs() > 1e-12 {
                    return Err(Error::Shape(format!(
                        "matrix not symmetric at ({i},{j}): {} vs {}",
                        entries[i][j], entries[j][i]
                    )));
                }
            }
        }
        Ok(CovarianceMatrix {
            entries,
            series_ids,
            window,
            target_index,
        })
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn series_ids(&self) -> &[String] {
        &self.series_ids
    }

    pub fn window(&self) -> (NaiveDate, NaiveDate) {
        self.window
    }

    pub fn target_index(&self) -> usize {
        self.target_index
    }

    pub fn order(&self) -> usize {
        self.entries.len()
    }

    pub fn trace(&self) -> f64 {
        (0..self.order()).map(|i| self.entries[i][i]).sum()
    }
}

/// Per-window means, deviations and sigmas of the one-day differences.
struct WindowStats {
    matrix: Vec<Vec<f64>>,
    /// Standardized deviation of the last difference in the window, per series.
    last_standardized: Vec<f64>,
}

fn window_stats(
    panel: &AlignedPanel,
    end_index: usize,
    window_length: usize,
) -> Result<WindowStats> {
    let k = panel.n_series();
    let w = window_length;
    // differences at dates end-w+1 ..= end need prices back to end-w
    if end_index + 1 > panel.n_dates() || end_index < w {
        return Err(Error::Range(format!(
            "window of {w} differences ending at index {end_index} does not fit the panel"
        )));
    }
    if w < 2 {
        return Err(Error::Precondition(
            "window needs at least 2 return observations".into(),
        ));
    }

    let mut deviations: Vec<Vec<f64>> = Vec::with_capacity(k);
    for (id, col) in panel.columns() {
        let diffs: Vec<f64> = (end_index - w + 1..=end_index)
            .map(|s| col[s] - col[s - 1])
            .collect();
        let sigma = stats::population_std(&diffs);
        if sigma == 0.0 {
            return Err(Error::Degenerate(format!(
                "series '{id}' is constant over the window ending at {}",
                panel.dates()[end_index]
            )));
        }
        let m = stats::mean(&diffs);
        deviations.push(diffs.iter().map(|d| (d - m) / sigma).collect());
    }

    let mut matrix = vec![vec![0.0f64; k]; k];
    for i in 0..k {
        for j in i..k {
            let dot: f64 = deviations[i]
                .iter()
                .zip(&deviations[j])
                .map(|(a, b)| a * b)
                .sum();
            let value = dot / w as f64;
            matrix[i][j] = value;
            matrix[j][i] = value;
        }
    }
    let last_standardized = deviations.iter().map(|d| d[w - 1]).collect();
    Ok(WindowStats {
        matrix,
        last_standardized,
    })
}

/// Correlation-form matrix over the window of `window_length` one-day
/// differences ending at date index `end_index`.
pub fn covariance_matrix(
    panel: &AlignedPanel,
    end_index: usize,
    window_length: usize,
    target: &str,
) -> Result<CovarianceMatrix> {
    let target_index = panel
        .column_index(target)
        .ok_or_else(|| Error::Config(format!("panel has no series named '{target}'")))?;
    let ws = window_stats(panel, end_index, window_length)?;
    CovarianceMatrix::from_entries(
        ws.matrix,
        panel.columns().iter().map(|(id, _)| id.clone()).collect(),
        (
            panel.dates()[end_index - window_length],
            panel.dates()[end_index],
        ),
        target_index,
    )
}

/// Full spectrum, eigenvalues descending, orthonormal eigenvectors with a
/// deterministic sign convention.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[i]` is the loading vector for `eigenvalues[i]`.
    pub eigenvectors: Vec<Vec<f64>>,
}

/// Eigendecomposition by cyclic Jacobi rotations.
///
/// The sign convention makes each eigenvector's largest-magnitude loading
/// negative (first such entry on exact ties, target entry as a last resort).
/// Anchoring on the dominant entry keeps the orientation stable from window
/// to window even when the target's own loading hovers near zero, which is
/// what the rolling feature needs to stay consistently signed over time.
pub fn principal_components(m: &CovarianceMatrix) -> Result<EigenDecomposition> {
    let k = m.order();
    let mut a: Vec<Vec<f64>> = m.entries.clone();
    let mut v = vec![vec![0.0f64; k]; k];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    let scale: f64 = a
        .iter()
        .flatten()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(1e-300);
    const MAX_SWEEPS: usize = 64;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..k {
            for q in p + 1..k {
                off += a[p][q] * a[p][q];
            }
        }
        if off.sqrt() <= 1e-14 * scale {
            converged = true;
            break;
        }
        for p in 0..k - 1 {
            for q in p + 1..k {
                let apq = a[p][q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for i in 0..k {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for j in 0..k {
                    let apj = a[p][j];
                    let aqj = a[q][j];
                    a[p][j] = c * apj - s * aqj;
                    a[q][j] = s * apj + c * aqj;
                }
                for row in v.iter_mut() {
                    let vip = row[p];
                    let viq = row[q];
                    row[p] = c * vip - s * viq;
                    row[q] = s * vip + c * viq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::Numeric(format!(
            "Jacobi eigen-solver did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).expect("finite eigenvalues"));

    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenvectors = Vec::with_capacity(k);
    for &col in &order {
        eigenvalues.push(a[col][col]);
        let mut vec_i: Vec<f64> = (0..k).map(|row| v[row][col]).collect();
        orient(&mut vec_i, m.target_index);
        eigenvectors.push(vec_i);
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn orient(vector: &mut [f64], target_index: usize) {
    let mut anchor = 0.0f64;
    for &x in vector.iter() {
        if x.abs() > anchor.abs() {
            anchor = x;
        }
    }
    if anchor == 0.0 {
        anchor = vector[target_index];
    }
    if anchor == 0.0 {
        anchor = vector.iter().copied().find(|x| *x != 0.0).unwrap_or(0.0);
    }
    if anchor > 0.0 {
        for x in vector.iter_mut() {
            *x = -*x;
        }
    }
}

/// Principal-component feature series: one value per prediction-eligible
/// date, plus the largest-eigenvalue track and a log of skipped dates.
#[derive(Debug, Clone)]
pub struct FeatureSeries {
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
    pub largest_eigenvalues: Vec<f64>,
    pub window_length: usize,
    pub smoothed: bool,
    /// Dates dropped because some series was constant over the window,
    /// with the offending message.
    pub skipped: Vec<(NaiveDate, String)>,
}

/// Rolling feature extraction.
///
/// For each date t the window of `window_length` differences ending at t
/// yields M; the top loading vector projects the window's last standardized
/// return vector into the feature value at t (causal: nothing after t is
/// touched). `smooth` applies a trailing 3-day moving average, partial at
/// the start.
pub fn rolling_feature(
    panel: &AlignedPanel,
    target: &str,
    window_length: usize,
    smooth: bool,
) -> Result<FeatureSeries> {
    let target_index = panel
        .column_index(target)
        .ok_or_else(|| Error::Config(format!("panel has no series named '{target}'")))?;
    if panel.n_dates() <= window_length {
        return Err(Error::InsufficientData(format!(
            "panel has {} dates; need more than the window length {window_length}",
            panel.n_dates()
        )));
    }

    let ids: Vec<String> = panel.columns().iter().map(|(id, _)| id.clone()).collect();
    let mut dates = Vec::new();
    let mut raw_values = Vec::new();
    let mut largest = Vec::new();
    let mut skipped = Vec::new();

    for t in window_length..panel.n_dates() {
        let date = panel.dates()[t];
        let ws = match window_stats(panel, t, window_length) {
            Ok(ws) => ws,
            Err(Error::Degenerate(msg)) => {
                skipped.push((date, msg));
                continue;
            }
            Err(e) => return Err(e),
        };
        let m = CovarianceMatrix::from_entries(
            ws.matrix,
            ids.clone(),
            (panel.dates()[t - window_length], date),
            target_index,
        )?;
        let eig = principal_components(&m)?;
        let top = &eig.eigenvectors[0];
        let projection: f64 = top
            .iter()
            .zip(&ws.last_standardized)
            .map(|(w, z)| w * z)
            .sum();
        dates.push(date);
        raw_values.push(projection);
        largest.push(eig.eigenvalues[0]);
    }

    let values = if smooth {
        trailing_mean3(&raw_values)
    } else {
        raw_values
    };

    Ok(FeatureSeries {
        dates,
        values,
        largest_eigenvalues: largest,
        window_length,
        smoothed: smooth,
        skipped,
    })
}

/// Trailing 3-point moving average; the first two entries average what is
/// available so far (never looks ahead).
fn trailing_mean3(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let lo = i.saturating_sub(2);
            let window = &values[lo..=i];
            window.iter().sum::<f64>() / window.len() as f64
        })
        .collect()
}
