//! Nonlinear EEG complexity features, PCA decorrelation, a benchmark suite of
//! seven classifier configurations, stratified cross-validation and
//! leakage/optimism audits.
//!
//! The crate is organised as a pipeline:
//!
//! - [`signal`]: recordings, CSV/manifest ingestion and synthetic cohorts
//! - [`features`]: Higuchi fractal dimension, sample entropy, feature matrices
//! - [`space`]: z-score scaling and PCA
//! - [`classify`]: classifier families behind a name-keyed registry
//! - [`eval`]: folds, metrics, cross-validated reports and audits
//! - [`pipeline`]: the command implementations behind the `eegcx` binary

pub mod classify;
pub mod error;
pub mod eval;
pub mod features;
pub mod pipeline;
pub mod rng;
pub mod signal;
pub mod space;

pub use error::{Error, Result};
