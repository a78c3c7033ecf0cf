//! PCA by symmetric eigendecomposition of the sample covariance (divisor
//! N - 1) of column-centred data.
//!
//! Components are ordered by descending eigenvalue; equal eigenvalues are
//! ordered by the column index of each component's dominant loading. Every
//! component is signed so that its largest-magnitude loading is positive.

use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub feature_names: Vec<String>,
    pub means: Vec<f64>,
    /// Descending, nonnegative.
    pub eigenvalues: Vec<f64>,
    /// `components[c]` is the unit eigenvector of the `c`-th eigenvalue.
    pub components: Vec<Vec<f64>>,
}

fn dominant_index(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    best
}

pub fn fit_pca(matrix: &FeatureMatrix) -> Result<PcaModel> {
    let n = matrix.n_rows();
    let k = matrix.n_features();
    if n < 2 || k < 1 {
        return Err(Error::Fit(format!(
            "PCA needs at least 2 rows and 1 feature, got {n}x{k}"
        )));
    }
    if matrix.rows().iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Fit("PCA input contains non-finite values".into()));
    }
    let means: Vec<f64> = (0..k)
        .map(|j| matrix.rows().iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let centered = DMatrix::from_fn(n, k, |i, j| matrix.rows()[i][j] - means[j]);
    let mut cov = centered.transpose() * &centered / (n - 1) as f64;
    cov = (&cov + cov.transpose()) * 0.5;
    let trace = cov.trace();

    let eig = SymmetricEigen::new(cov);
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..k)
        .map(|c| {
            let mut v: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
            if v[dominant_index(&v)] < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            (eig.eigenvalues[c].max(0.0), v)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    // Reorder runs of numerically equal eigenvalues by dominant loading.
    let tie_tol = 1e-12 * trace.abs().max(f64::MIN_POSITIVE);
    let mut start = 0;
    while start < k {
        let mut end = start + 1;
        while end < k && pairs[end - 1].0 - pairs[end].0 <= tie_tol {
            end += 1;
        }
        pairs[start..end].sort_by_key(|(_, v)| dominant_index(v));
        start = end;
    }

    let (eigenvalues, components) = pairs.into_iter().unzip();
    Ok(PcaModel {
        feature_names: matrix.feature_names().to_vec(),
        means,
        eigenvalues,
        components,
    })
}

impl PcaModel {
    pub fn n_features(&self) -> usize {
        self.means.len()
    }

    fn check_m(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.n_features() {
            return Err(Error::Param(format!(
                "component count must lie in 1..={}, got {m}",
                self.n_features()
            )));
        }
        Ok(())
    }

    pub fn project_row(&self, row: &[f64], m: usize) -> Vec<f64> {
        self.components[..m]
            .iter()
            .map(|comp| {
                comp.iter()
                    .zip(row.iter().zip(&self.means))
                    .map(|(w, (x, mu))| w * (x - mu))
                    .sum()
            })
            .collect()
    }

    /// Maps scores on the first `scores.len()` components back to the
    /// original feature space.
    pub fn reconstruct_row(&self, scores: &[f64]) -> Vec<f64> {
        let mut out = self.means.clone();
        for (s, comp) in scores.iter().zip(&self.components) {
            for (o, w) in out.iter_mut().zip(comp) {
                *o += s * w;
            }
        }
        out
    }

    /// Loadings table: one row per original feature, one column per
    /// component. `absolute` writes magnitudes.
    pub fn loadings_csv(&self, m: usize, absolute: bool) -> Result<String> {
        self.check_m(m)?;
        let mut out = String::from("feature");
        for c in 1..=m {
            write!(out, ",PC{c}").expect("writing to a String");
        }
        out.push('\n');
        for (j, name) in self.feature_names.iter().enumerate() {
            out.push_str(name);
            for comp in &self.components[..m] {
                let w = if absolute { comp[j].abs() } else { comp[j] };
                write!(out, ",{w:.16e}").expect("writing to a String");
            }
            out.push('\n');
        }
        Ok(out)
    }
}

/// Centres `matrix` with the fitted means and projects onto the first `m`
/// components; columns are named `PC1..PCm`.
pub fn project(pca: &PcaModel, matrix: &FeatureMatrix, m: usize) -> Result<FeatureMatrix> {
    pca.check_m(m)?;
    if matrix.feature_names() != pca.feature_names.as_slice() {
        return Err(Error::Contract("feature names do not match the fitted PCA".into()));
    }
    let rows = matrix.rows().iter().map(|r| pca.project_row(r, m)).collect();
    let names = (1..=m).map(|c| format!("PC{c}")).collect();
    matrix.with_values(names, rows)
}

/// Percentage of total variance captured by the first `m` components.
pub fn explained_variance(pca: &PcaModel, m: usize) -> Result<f64> {
    pca.check_m(m)?;
    let total: f64 = pca.eigenvalues.iter().sum();
    if total <= 0.0 {
        return Err(Error::Degenerate("total variance is zero".into()));
    }
    if m == pca.n_features() {
        return Ok(100.0);
    }
    let head: f64 = pca.eigenvalues[..m].iter().sum();
    Ok((100.0 * head / total).min(100.0))
}
