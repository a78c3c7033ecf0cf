//! Higuchi fractal dimension.
//!
//! For each scale `k` and offset `m` the normalised curve length
//!
//! ```text
//! L_m(k) = (N - 1) / (floor((N - m) / k) * k^2) * sum_i |x(m + ik) - x(m + (i - 1)k)|
//! ```
//!
//! is averaged over `m = 1..k`; the dimension is the least-squares slope of
//! `ln L(k)` against `ln(1/k)` over `k = 1..k_max`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed outside `[1, 2]` before an estimate is rejected.
pub const FD_RANGE_SLACK: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HfdParams {
    pub k_max: usize,
}

impl Default for HfdParams {
    fn default() -> Self {
        Self { k_max: 8 }
    }
}

/// Mean curve length `L(k)` for `k = 1..=k_max`.
pub fn curve_lengths(series: &[f64], k_max: usize) -> Vec<f64> {
    let n = series.len();
    (1..=k_max)
        .map(|k| {
            let total: f64 = (0..k)
                .map(|start| {
                    let steps = (n - 1 - start) / k;
                    let abs_sum: f64 = (1..=steps)
                        .map(|i| (series[start + i * k] - series[start + (i - 1) * k]).abs())
                        .sum();
                    abs_sum * (n - 1) as f64 / (steps * k * k) as f64
                })
                .sum();
            total / k as f64
        })
        .collect()
}

fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    sxy / sxx
}

pub fn higuchi_fd(series: &[f64], params: &HfdParams) -> Result<f64> {
    let k_max = params.k_max;
    if k_max < 2 {
        return Err(Error::Param(format!("k_max must be at least 2, got {k_max}")));
    }
    if series.len() < 4 * k_max {
        return Err(Error::Param(format!(
            "series of length {} is too short for k_max = {k_max} (need {})",
            series.len(),
            4 * k_max
        )));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::Param("series contains non-finite values".into()));
    }
    if series.iter().all(|&v| v == series[0]) {
        return Err(Error::Degenerate("constant series has no fractal dimension".into()));
    }

    let lengths = curve_lengths(series, k_max);
    if let Some(k) = lengths.iter().position(|&l| l <= 0.0) {
        return Err(Error::Degenerate(format!("curve length vanishes at scale k = {}", k + 1)));
    }
    let log_inv_k: Vec<f64> = (1..=k_max).map(|k| -(k as f64).ln()).collect();
    let log_len: Vec<f64> = lengths.iter().map(|l| l.ln()).collect();
    let fd = ols_slope(&log_inv_k, &log_len);

    if !(1.0 - FD_RANGE_SLACK..=2.0 + FD_RANGE_SLACK).contains(&fd) {
        return Err(Error::Degenerate(format!("fractal dimension {fd} lies outside [1, 2]")));
    }
    Ok(fd.clamp(1.0, 2.0))
}
