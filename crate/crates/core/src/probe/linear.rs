//! Ordinary least squares with an unpenalised intercept.
//!
//! The intercept is eliminated by centring: the weights are the minimum-norm
//! least-squares solution on the centred design (via SVD), and the intercept
//! is `mean(y) - mean(x) . w`. Singular values at or below
//! `dim * eps * sigma_max` are treated as zero.

use nalgebra::{DMatrix, DVector};

use super::logistic::{FitError, LinearModel};
use super::matrix::Matrix;

pub fn fit_linear(x: &Matrix, y: &[f64]) -> Result<LinearModel, FitError> {
    let (n, d) = (x.rows(), x.cols());
    if n != y.len() {
        return Err(FitError::LengthMismatch {
            rows: n,
            targets: y.len(),
        });
    }
    if n == 0 {
        return Err(FitError::TooFewRows {
            needed: 1,
            found: 0,
        });
    }
    if !x.is_finite() || !y.iter().all(|v| v.is_finite()) {
        return Err(FitError::NonFiniteInput);
    }

    let col_means: Vec<f64> = (0..d)
        .map(|j| (0..n).map(|i| x.row(i)[j]).sum::<f64>() / n as f64)
        .collect();
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let centred = DMatrix::from_fn(n, d, |i, j| x.row(i)[j] - col_means[j]);
    let target = DVector::from_iterator(n, y.iter().map(|v| v - y_mean));

    let weights = if d == 0 {
        Vec::new()
    } else {
        let svd = centred.svd(true, true);
        let sigma_max = svd.singular_values.max();
        let eps = d as f64 * f64::EPSILON * sigma_max;
        let solution = svd
            .solve(&target, eps)
            .map_err(|_| FitError::NonFiniteInput)?;
        solution.iter().copied().collect()
    };
    let intercept = y_mean
        - weights
            .iter()
            .zip(&col_means)
            .map(|(w, m)| w * m)
            .sum::<f64>();
    let model = LinearModel { weights, intercept };
    if !model.is_finite() {
        return Err(FitError::NonFiniteLoss { iteration: 0 });
    }
    Ok(model)
}

pub fn predict_linear(model: &LinearModel, x: &Matrix) -> Result<Vec<f64>, FitError> {
    if x.cols() != model.weights.len() {
        return Err(FitError::DimensionMismatch {
            expected: model.weights.len(),
            found: x.cols(),
        });
    }
    Ok((0..x.rows()).map(|i| model.decision(x.row(i))).collect())
}
