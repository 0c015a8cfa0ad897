//! Unregularised binary logistic regression fitted with L-BFGS.
//!
//! The objective is the mean negative log-likelihood over the training rows,
//! with an unpenalised intercept. Optimisation stops once the infinity norm of
//! the gradient reaches `gradient_tolerance`, or silently after
//! `max_iterations` (the usual outcome on linearly separable data, where the
//! likelihood has no finite maximiser).

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::matrix::{dot, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            max_iterations: 1000,
            gradient_tolerance: 1e-4,
        }
    }
}

/// Weights plus intercept of a linear decision or regression function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn zeros(dim: usize) -> Self {
        LinearModel {
            weights: vec![0.0; dim],
            intercept: 0.0,
        }
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.intercept
    }

    pub fn is_finite(&self) -> bool {
        self.intercept.is_finite() && self.weights.iter().all(|w| w.is_finite())
    }

    /// Parameters packed as `[weights..., intercept]`.
    pub fn to_params(&self) -> Vec<f64> {
        let mut p = self.weights.clone();
        p.push(self.intercept);
        p
    }

    pub fn from_params(params: &[f64]) -> Self {
        let (w, b) = params.split_at(params.len() - 1);
        LinearModel {
            weights: w.to_vec(),
            intercept: b[0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("matrix has {rows} rows but target has {targets} entries")]
    LengthMismatch { rows: usize, targets: usize },
    #[error("model expects {expected} features, input has {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("need at least {needed} training rows, got {found}")]
    TooFewRows { needed: usize, found: usize },
    #[error("both classes must be present in the training labels")]
    SingleClass,
    #[error("non-finite input values")]
    NonFiniteInput,
    #[error("negative log-likelihood became non-finite after {iteration} iterations")]
    NonFiniteLoss { iteration: usize },
}

/// log(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean negative log-likelihood at packed parameters `[w..., b]`.
pub fn negative_log_likelihood(x: &Matrix, y: &[bool], params: &[f64]) -> f64 {
    let (w, b) = params.split_at(x.cols());
    let total: f64 = (0..x.rows())
        .map(|i| {
            let z = dot(w, x.row(i)) + b[0];
            softplus(z) - if y[i] { z } else { 0.0 }
        })
        .sum();
    total / x.rows() as f64
}

/// Mean negative log-likelihood and its gradient with respect to `[w..., b]`.
pub fn nll_and_gradient(x: &Matrix, y: &[bool], params: &[f64]) -> (f64, Vec<f64>) {
    let d = x.cols();
    let (w, b) = params.split_at(d);
    let mut grad = vec![0.0; d + 1];
    let mut total = 0.0;
    debug_assert_eq!(x.rows(), y.len());
    for (i, &label) in y.iter().enumerate() {
        let row = x.row(i);
        let z = dot(w, row) + b[0];
        let target = if label { 1.0 } else { 0.0 };
        total += softplus(z) - target * z;
        let residual = sigmoid(z) - target;
        for (g, v) in grad[..d].iter_mut().zip(row) {
            *g += residual * v;
        }
        grad[d] += residual;
    }
    let n = x.rows() as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    (total / n, grad)
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Outcome of a logistic fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    pub model: LinearModel,
    pub iterations: usize,
    pub converged: bool,
    pub loss: f64,
    pub gradient_norm: f64,
}

const HISTORY: usize = 10;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

/// Fits an unregularised logistic regression with intercept.
pub fn fit_logistic(x: &Matrix, y: &[bool], cfg: &LogisticConfig) -> Result<LinearModel, FitError> {
    fit_logistic_detailed(x, y, cfg).map(|f| f.model)
}

pub fn fit_logistic_detailed(
    x: &Matrix,
    y: &[bool],
    cfg: &LogisticConfig,
) -> Result<LogisticFit, FitError> {
    if x.rows() != y.len() {
        return Err(FitError::LengthMismatch {
            rows: x.rows(),
            targets: y.len(),
        });
    }
    if x.rows() < 2 {
        return Err(FitError::TooFewRows {
            needed: 2,
            found: x.rows(),
        });
    }
    if y.iter().all(|&v| v) || y.iter().all(|&v| !v) {
        return Err(FitError::SingleClass);
    }
    if !x.is_finite() {
        return Err(FitError::NonFiniteInput);
    }

    let dim = x.cols() + 1;
    let mut params = vec![0.0; dim];
    let (mut loss, mut grad) = nll_and_gradient(x, y, &params);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(HISTORY);
    let mut iterations = 0;

    while iterations < cfg.max_iterations {
        if inf_norm(&grad) <= cfg.gradient_tolerance {
            break;
        }
        let mut direction = two_loop_direction(&grad, &history);
        let mut slope = dot(&grad, &direction);
        if slope.is_nan() || slope >= 0.0 {
            history.clear();
            direction = grad.iter().map(|g| -g).collect();
            slope = -dot(&grad, &grad);
        }

        // Backtracking line search on the Armijo condition.
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let candidate: Vec<f64> = params
                .iter()
                .zip(&direction)
                .map(|(p, d)| p + step * d)
                .collect();
            let (c_loss, c_grad) = nll_and_gradient(x, y, &candidate);
            if c_loss.is_finite() && c_loss <= loss + ARMIJO * step * slope {
                accepted = Some((candidate, c_loss, c_grad));
                break;
            }
            step *= 0.5;
        }
        iterations += 1;
        let Some((next, next_loss, next_grad)) = accepted else {
            // No decrease representable in floating point.
            if !history.is_empty() {
                history.clear();
                continue;
            }
            break;
        };

        let s: Vec<f64> = next.iter().zip(&params).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = next_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &yv);
        if sy > 1e-12 * dot(&yv, &yv).sqrt() * dot(&s, &s).sqrt() {
            if history.len() == HISTORY {
                history.pop_front();
            }
            history.push_back((s, yv, 1.0 / sy));
        }
        params = next;
        loss = next_loss;
        grad = next_grad;
        if !loss.is_finite() {
            return Err(FitError::NonFiniteLoss {
                iteration: iterations,
            });
        }
    }

    let model = LinearModel::from_params(&params);
    if !model.is_finite() || !loss.is_finite() {
        return Err(FitError::NonFiniteLoss {
            iteration: iterations,
        });
    }
    let gradient_norm = inf_norm(&grad);
    Ok(LogisticFit {
        model,
        iterations,
        converged: gradient_norm <= cfg.gradient_tolerance,
        loss,
        gradient_norm,
    })
}

/// L-BFGS two-loop recursion: returns -H * grad.
fn two_loop_direction(grad: &[f64], history: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

/// Label 1 iff w.x + b > 0; a decision value of exactly 0 is negative.
pub fn predict_logistic(model: &LinearModel, x: &Matrix) -> Result<Vec<bool>, FitError> {
    if x.cols() != model.weights.len() {
        return Err(FitError::DimensionMismatch {
            expected: model.weights.len(),
            found: x.cols(),
        });
    }
    Ok((0..x.rows())
        .map(|i| model.decision(x.row(i)) > 0.0)
        .collect())
}

/// Predicted probability of the positive class per row.
pub fn predict_proba(model: &LinearModel, x: &Matrix) -> Result<Vec<f64>, FitError> {
    if x.cols() != model.weights.len() {
        return Err(FitError::DimensionMismatch {
            expected: model.weights.len(),
            found: x.cols(),
        });
    }
    Ok((0..x.rows())
        .map(|i| sigmoid(model.decision(x.row(i))))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn col(values: &[f64]) -> Matrix {
        Matrix::new(values.len(), 1, values.to_vec())
    }

    /// Grid minimum of the mean NLL over (w, b) in [-2, 2]^2, refined around
    /// the best cell.
    fn grid_minimum(x: &Matrix, y: &[bool]) -> (f64, f64, f64) {
        let mut best = (f64::INFINITY, 0.0, 0.0);
        let (mut lo_w, mut lo_b, mut width) = (-2.0, -2.0, 4.0);
        for _ in 0..6 {
            let steps = 40;
            for i in 0..=steps {
                for j in 0..=steps {
                    let w = lo_w + width * i as f64 / steps as f64;
                    let b = lo_b + width * j as f64 / steps as f64;
                    let l = negative_log_likelihood(x, y, &[w, b]);
                    if l < best.0 {
                        best = (l, w, b);
                    }
                }
            }
            width /= 10.0;
            lo_w = best.1 - width / 2.0;
            lo_b = best.2 - width / 2.0;
        }
        best
    }

    #[test]
    fn symmetric_data_gives_half_probability() {
        let x = col(&[0.0, 0.0, 1.0, 1.0]);
        let y = [false, true, false, true];
        let fit = fit_logistic_detailed(&x, &y, &LogisticConfig::default()).unwrap();
        let (grid_loss, gw, gb) = grid_minimum(&x, &y);
        assert!(gw.abs() < 1e-3 && gb.abs() < 1e-3);
        assert!(fit.model.weights[0].abs() < 1e-6);
        assert!(fit.model.intercept.abs() < 1e-6);
        assert!((fit.loss - grid_loss).abs() < 1e-9);
        for p in predict_proba(&fit.model, &x).unwrap() {
            assert!((p - 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn noisy_one_dimensional_signal() {
        // x = -1 or 1 (50 each), y = [x == 1] with 10 labels flipped in each
        // group, so P(y | x = 1) = 0.8 and P(y | x = -1) = 0.2. The maximum
        // likelihood fit is then w = ln 4, b = 0.
        let mut stream = rng::substream(7, 0);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..100 {
            let v = if i % 2 == 0 { -1.0 } else { 1.0 };
            xs.push(v);
            ys.push((v > 0.0) ^ (i % 10 == 3 || i % 10 == 4));
        }
        let x = col(&xs);
        let fit = fit_logistic_detailed(&x, &ys, &LogisticConfig::default()).unwrap();
        let best_loss = -(0.8f64 * 0.8f64.ln() + 0.2 * 0.2f64.ln());
        assert!(
            (fit.loss - best_loss).abs() < 1e-7,
            "{} vs {best_loss}",
            fit.loss
        );
        assert!((fit.model.weights[0] - 4f64.ln()).abs() < 1e-3);
        assert!(fit.model.intercept.abs() < 1e-3);
        let (grid_loss, _, _) = grid_minimum(&x, &ys);
        assert!(fit.loss <= grid_loss + 1e-9);

        let test: Vec<f64> = (0..200)
            .map(|_| if stream.random_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        let truth: Vec<bool> = test.iter().map(|&v| v > 0.0).collect();
        let pred = predict_logistic(&fit.model, &col(&test)).unwrap();
        let acc = pred.iter().zip(&truth).filter(|(a, b)| a == b).count() as f64 / 200.0;
        assert!(acc > 0.85);
    }

    #[test]
    fn single_class_is_rejected() {
        let x = col(&[0.0, 1.0, 2.0]);
        assert_eq!(
            fit_logistic(&x, &[true, true, true], &LogisticConfig::default()),
            Err(FitError::SingleClass)
        );
        assert!(matches!(
            fit_logistic(&x, &[true, false], &LogisticConfig::default()),
            Err(FitError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn separable_data_stops_at_iteration_cap() {
        let x = col(&[-2.0, -1.0, 1.0, 2.0]);
        let cfg = LogisticConfig {
            max_iterations: 50,
            ..LogisticConfig::default()
        };
        let fit = fit_logistic_detailed(&x, &[false, false, true, true], &cfg).unwrap();
        assert!(fit.iterations <= 50);
        assert!(fit.model.weights[0] > 0.0);
        assert_eq!(
            predict_logistic(&fit.model, &x).unwrap(),
            vec![false, false, true, true]
        );
    }

    #[test]
    fn prediction_sign_rule() {
        let m = LinearModel {
            weights: vec![1.0],
            intercept: 0.0,
        };
        assert_eq!(predict_logistic(&m, &col(&[2.0])).unwrap(), vec![true]);
        assert_eq!(predict_logistic(&m, &col(&[0.0])).unwrap(), vec![false]);
        let m = LinearModel {
            weights: vec![0.0],
            intercept: -1.0,
        };
        assert_eq!(
            predict_logistic(&m, &col(&[-5.0, 0.0, 7.0])).unwrap(),
            vec![false; 3]
        );
        let wide = Matrix::new(1, 2, vec![1.0, 1.0]);
        assert!(matches!(
            predict_logistic(&m, &wide),
            Err(FitError::DimensionMismatch {
                expected: 1,
                found: 2
            })
        ));
    }

    fn noisy_instance(seed: u64, n: usize, d: usize) -> (Matrix, Vec<bool>) {
        let mut stream = rng::substream(seed, 1);
        let data: Vec<f64> = (0..n * d)
            .map(|_| StandardNormal.sample(&mut stream))
            .collect();
        let x = Matrix::new(n, d, data);
        let y = (0..n)
            .map(|i| {
                let z: f64 = x.row(i).iter().sum::<f64>() * 0.8 + 0.2;
                stream.random_bool(1.0 / (1.0 + (-z).exp()))
            })
            .collect();
        (x, y)
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (x, y) = noisy_instance(3, 40, 3);
        let mut stream = rng::substream(3, 2);
        for _ in 0..20 {
            let p: Vec<f64> = (0..4).map(|_| stream.random_range(-2.0..2.0)).collect();
            let (_, g) = nll_and_gradient(&x, &y, &p);
            for k in 0..4 {
                let h = 1e-5;
                let mut up = p.clone();
                let mut down = p.clone();
                up[k] += h;
                down[k] -= h;
                let fd = (negative_log_likelihood(&x, &y, &up)
                    - negative_log_likelihood(&x, &y, &down))
                    / (2.0 * h);
                assert!((fd - g[k]).abs() <= 1e-5 * g[k].abs().max(1e-3));
            }
        }
    }

    #[test]
    fn converged_fit_has_small_gradient() {
        let (x, y) = noisy_instance(11, 60, 4);
        let cfg = LogisticConfig::default();
        let fit = fit_logistic_detailed(&x, &y, &cfg).unwrap();
        assert!(fit.converged);
        let (_, g) = nll_and_gradient(&x, &y, &fit.model.to_params());
        assert!(inf_norm(&g) <= cfg.gradient_tolerance);
    }

    #[test]
    fn predictions_are_scale_covariant() {
        let (x, y) = noisy_instance(5, 80, 3);
        let cfg = LogisticConfig {
            gradient_tolerance: 1e-8,
            ..LogisticConfig::default()
        };
        let base = fit_logistic(&x, &y, &cfg).unwrap();
        let (test, _) = noisy_instance(6, 50, 3);
        let expected = predict_logistic(&base, &test).unwrap();
        for s in [0.1, 3.0, 25.0] {
            let scaled = fit_logistic(&x.scaled(s), &y, &cfg).unwrap();
            for (a, b) in scaled.weights.iter().zip(&base.weights) {
                assert!((a * s - b).abs() < 1e-4 * b.abs().max(1.0));
            }
            assert_eq!(
                predict_logistic(&scaled, &test.scaled(s)).unwrap(),
                expected
            );
        }
    }
}
