//! Linear probes: stratified splitting, the logistic and least-squares
//! fitters, and the per-attribute cross-validation runner.

mod linear;
mod logistic;
mod matrix;
mod runner;
mod splits;

pub use linear::{fit_linear, predict_linear};
pub use logistic::{
    fit_logistic, fit_logistic_detailed, negative_log_likelihood, nll_and_gradient,
    predict_logistic, predict_proba, FitError, LinearModel, LogisticConfig, LogisticFit,
};
pub use matrix::Matrix;
pub use runner::{
    run_probe_suite, AlignmentMode, ProbeData, ProbeError, RunOptions, SelectivityBaseline,
};
pub use splits::{kfold_splits, stratified_splits, Split, SplitError, SplitSpec};
