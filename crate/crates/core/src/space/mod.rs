//! Z-score scaling and principal component analysis.
//!
//! Fitting and applying are separate operations on immutable models: a model
//! fitted on training rows only ever reads those rows.

mod pca;
mod scaler;

pub use pca::{explained_variance, fit_pca, project, PcaModel};
pub use scaler::{apply_scaler, fit_scaler, Scaler};
