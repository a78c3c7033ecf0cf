use crate::error::{Error, Result};
use crate::signal::ClassLabel;

/// Percentage of `(predicted, truth)` pairs that agree, rounded to two
/// decimals.
pub fn compute_accuracy(outcomes: &[(ClassLabel, ClassLabel)]) -> Result<f64> {
    if outcomes.is_empty() {
        return Err(Error::Param("accuracy of an empty prediction set".into()));
    }
    let correct = outcomes.iter().filter(|(p, t)| p == t).count();
    Ok(percentage(correct, outcomes.len()))
}

pub(crate) fn percentage(correct: usize, total: usize) -> f64 {
    (10_000.0 * correct as f64 / total as f64).round() / 100.0
}

/// Area under the ROC curve with Patient as the positive class:
/// `(concordant + 0.5 * tied) / (n_pos * n_neg)` over all positive/negative
/// pairs, computed in `O(n log n)` with exact integer counts.
pub fn compute_auc(scores: &[f64], truth: &[ClassLabel]) -> Result<f64> {
    if scores.len() != truth.len() {
        return Err(Error::Contract(format!(
            "{} scores but {} labels",
            scores.len(),
            truth.len()
        )));
    }
    if let Some(i) = scores.iter().position(|s| s.is_nan()) {
        return Err(Error::Degenerate(format!("score {i} is NaN")));
    }
    let n_pos = truth.iter().filter(|l| l.is_patient()).count() as u128;
    let n_neg = truth.len() as u128 - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::Param("AUC needs both classes in the truth labels".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Twice the numerator, so ties stay integral.
    let mut doubled: u128 = 0;
    let mut neg_below: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let (mut pos, mut neg) = (0u128, 0u128);
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            if truth[order[j]].is_patient() {
                pos += 1;
            } else {
                neg += 1;
            }
            j += 1;
        }
        doubled += 2 * pos * neg_below + pos * neg;
        neg_below += neg;
        i = j;
    }
    Ok(doubled as f64 / (2 * n_pos * n_neg) as f64)
}
