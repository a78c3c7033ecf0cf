//! Independent reference implementations used as test oracles.

#![allow(dead_code)]

use eegcx::signal::ClassLabel;

/// Exhaustive Chebyshev template matching over all pairs `i < j` of the
/// first `N - m` templates: returns (B, A) for lengths `m` and `m + 1`.
pub fn naive_match_counts(x: &[f64], m: usize, r: f64) -> (u64, u64) {
    let n = x.len();
    let templates = n - m;
    let (mut b, mut a) = (0, 0);
    for i in 0..templates {
        for j in i + 1..templates {
            let dm = (0..m).map(|k| (x[i + k] - x[j + k]).abs()).fold(0.0, f64::max);
            if dm <= r {
                b += 1;
                if (x[i + m] - x[j + m]).abs() <= r {
                    a += 1;
                }
            }
        }
    }
    (b, a)
}

/// AUC by enumerating every positive/negative pair.
pub fn pair_count_auc(scores: &[f64], truth: &[ClassLabel]) -> f64 {
    let (mut concordant, mut tied, mut pairs) = (0u64, 0u64, 0u64);
    for (i, ti) in truth.iter().enumerate() {
        if !ti.is_patient() {
            continue;
        }
        for (j, tj) in truth.iter().enumerate() {
            if tj.is_patient() {
                continue;
            }
            pairs += 1;
            if scores[i] > scores[j] {
                concordant += 1;
            } else if scores[i] == scores[j] {
                tied += 1;
            }
        }
    }
    (concordant as f64 + 0.5 * tied as f64) / pairs as f64
}

/// Higuchi dimension written directly from the defining sums, with
/// 1-based offsets `m = 1..k` and an explicit normal-equations fit.
pub fn reference_higuchi(x: &[f64], k_max: usize) -> f64 {
    let n = x.len();
    let mut pts = Vec::new();
    for k in 1..=k_max {
        let mut lk = 0.0;
        for m in 1..=k {
            let count = (n - m) / k;
            let mut s = 0.0;
            for i in 1..=count {
                s += (x[m - 1 + i * k] - x[m - 1 + (i - 1) * k]).abs();
            }
            lk += s * (n as f64 - 1.0) / (count as f64 * k as f64) / k as f64;
        }
        lk /= k as f64;
        pts.push(((1.0 / k as f64).ln(), lk.ln()));
    }
    let np = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (np * sxy - sx * sy) / (np * sxx - sx * sx)
}

/// Cumulative sum with a leading zero dropped.
pub fn cumsum(x: &[f64]) -> Vec<f64> {
    x.iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}
