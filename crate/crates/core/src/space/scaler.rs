use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// Per-feature means and sample standard deviations (divisor N - 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub feature_names: Vec<String>,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
}

pub fn fit_scaler(matrix: &FeatureMatrix) -> Result<Scaler> {
    let n = matrix.n_rows();
    if n < 2 {
        return Err(Error::Fit(format!("scaler needs at least 2 rows, got {n}")));
    }
    let k = matrix.n_features();
    let mut means = vec![0.0; k];
    for row in matrix.rows() {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    means.iter_mut().for_each(|m| *m /= n as f64);
    let mut sds = vec![0.0; k];
    for row in matrix.rows() {
        for ((s, v), m) in sds.iter_mut().zip(row).zip(&means) {
            *s += (v - m) * (v - m);
        }
    }
    for (j, s) in sds.iter_mut().enumerate() {
        *s = (*s / (n - 1) as f64).sqrt();
        if !(*s > 0.0 && s.is_finite()) {
            return Err(Error::Fit(format!(
                "feature {} has zero variance",
                matrix.feature_names()[j]
            )));
        }
    }
    Ok(Scaler {
        feature_names: matrix.feature_names().to_vec(),
        means,
        sds,
    })
}

impl Scaler {
    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.means.iter().zip(&self.sds))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

pub fn apply_scaler(scaler: &Scaler, matrix: &FeatureMatrix) -> Result<FeatureMatrix> {
    if matrix.feature_names() != scaler.feature_names.as_slice() {
        return Err(Error::Contract(
            "feature names do not match the fitted scaler".into(),
        ));
    }
    let rows = matrix.rows().iter().map(|r| scaler.transform_row(r)).collect();
    matrix.with_values(matrix.feature_names().to_vec(), rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::InstanceMeta;
    use crate::signal::ClassLabel;

    fn matrix(names: &[&str], rows: Vec<Vec<f64>>) -> FeatureMatrix {
        let meta = (0..rows.len())
            .map(|i| InstanceMeta { subject_id: format!("s{i}"), label: ClassLabel::Control })
            .collect();
        FeatureMatrix::new(names.iter().map(|s| s.to_string()).collect(), rows, meta).unwrap()
    }

    fn mean_sd(col: &[f64]) -> (f64, f64) {
        let n = col.len() as f64;
        let m = col.iter().sum::<f64>() / n;
        (m, (col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt())
    }

    #[test]
    fn one_two_three() {
        let s = fit_scaler(&matrix(&["a"], vec![vec![1.0], vec![2.0], vec![3.0]])).unwrap();
        assert_eq!(s.means, [2.0]);
        assert_eq!(s.sds, [1.0]);
    }

    #[test]
    fn standardizes_its_own_fit_data() {
        let rows: Vec<Vec<f64>> = (0..25).map(|i| vec![i as f64 * 3.3 + 7.0, ((i * i) % 11) as f64]).collect();
        let m = matrix(&["a", "b"], rows);
        let s = fit_scaler(&m).unwrap();
        let z = apply_scaler(&s, &m).unwrap();
        for j in 0..2 {
            let (mean, sd) = mean_sd(&z.column(j));
            assert!(mean.abs() < 1e-12 && (sd - 1.0).abs() < 1e-12);
        }
        let again = fit_scaler(&z).unwrap();
        assert!(again.means.iter().all(|m| m.abs() < 1e-12));
        assert!(again.sds.iter().all(|s| (s - 1.0).abs() < 1e-12));
        assert_eq!(z.meta(), m.meta());
    }

    #[test]
    fn held_out_rows_keep_their_offset() {
        let train = matrix(&["a"], vec![vec![0.0], vec![2.0]]);
        let test = matrix(&["a"], vec![vec![10.0]]);
        let s = fit_scaler(&train).unwrap();
        let z = apply_scaler(&s, &test).unwrap();
        assert!((z.rows()[0][0] - 9.0 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let err = fit_scaler(&matrix(&["a", "flat"], vec![vec![1.0, 5.0], vec![2.0, 5.0]])).unwrap_err();
        assert!(err.to_string().contains("flat"));
        assert!(fit_scaler(&matrix(&["a"], vec![vec![1.0]])).is_err());
        let s = fit_scaler(&matrix(&["a"], vec![vec![1.0], vec![2.0]])).unwrap();
        assert!(matches!(apply_scaler(&s, &matrix(&["b"], vec![vec![1.0]])), Err(Error::Contract(_))));
    }
}
