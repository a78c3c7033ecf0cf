//! Sample entropy with Chebyshev distance and self-matches excluded.
//!
//! Both template lengths use the same `N - m` starting positions, and each
//! unordered pair `i < j` is counted once. The tolerance is
//! `r_factor * SD` with the population SD of the analysed series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::MIN_SAMPLES;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampEnParams {
    pub m: usize,
    pub r_factor: f64,
}

impl Default for SampEnParams {
    fn default() -> Self {
        Self { m: 2, r_factor: 0.15 }
    }
}

/// Template pair match counts at length `m` (B) and `m + 1` (A).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchCounts {
    pub length_m: u64,
    pub length_m1: u64,
}

pub fn population_sd(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// Counts matching template pairs. Candidates are enumerated in order of
/// their first sample, so only pairs whose leading samples are within `r`
/// are ever compared; the counts equal those of the exhaustive double loop.
pub fn match_counts(series: &[f64], m: usize, r: f64) -> MatchCounts {
    let n = series.len();
    if n <= m {
        return MatchCounts { length_m: 0, length_m1: 0 };
    }
    let templates = n - m;
    let mut order: Vec<usize> = (0..templates).collect();
    order.sort_by(|&a, &b| series[a].total_cmp(&series[b]).then(a.cmp(&b)));

    let (mut b, mut a) = (0u64, 0u64);
    for (p, &i) in order.iter().enumerate() {
        let lead = series[i];
        for &j in &order[p + 1..] {
            if series[j] - lead > r {
                break;
            }
            if (1..m).all(|k| (series[i + k] - series[j + k]).abs() <= r) {
                b += 1;
                if (series[i + m] - series[j + m]).abs() <= r {
                    a += 1;
                }
            }
        }
    }
    MatchCounts { length_m: b, length_m1: a }
}

pub fn sample_entropy(series: &[f64], params: &SampEnParams) -> Result<f64> {
    sample_entropy_with_counts(series, params).map(|(e, _)| e)
}

/// Sample entropy together with the match counts it was derived from.
pub fn sample_entropy_with_counts(series: &[f64], params: &SampEnParams) -> Result<(f64, MatchCounts)> {
    if params.m < 1 {
        return Err(Error::Param("embedding dimension m must be at least 1".into()));
    }
    if !(params.r_factor > 0.0 && params.r_factor.is_finite()) {
        return Err(Error::Param(format!("r_factor must be positive, got {}", params.r_factor)));
    }
    if series.len() < MIN_SAMPLES {
        return Err(Error::Param(format!(
            "sample entropy needs at least {MIN_SAMPLES} samples, got {}",
            series.len()
        )));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::Param("series contains non-finite values".into()));
    }
    let sd = population_sd(series);
    if sd == 0.0 {
        return Err(Error::Degenerate("series has zero standard deviation".into()));
    }
    let counts = match_counts(series, params.m, params.r_factor * sd);
    if counts.length_m == 0 || counts.length_m1 == 0 {
        return Err(Error::UndefinedEntropy {
            length_m: counts.length_m,
            length_m1: counts.length_m1,
        });
    }
    let entropy = -(counts.length_m1 as f64 / counts.length_m as f64).ln();
    // -ln(1) is -0.0
    Ok((entropy + 0.0, counts))
}
