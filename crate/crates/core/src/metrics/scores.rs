use rand::Rng;
use serde::{Deserialize, Serialize};

use super::MetricsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionCounts {
    pub fn from_predictions(predicted: &[bool], actual: &[bool]) -> Result<Self, MetricsError> {
        if predicted.len() != actual.len() {
            return Err(MetricsError::LengthMismatch {
                left: predicted.len(),
                right: actual.len(),
            });
        }
        let mut c = ConfusionCounts::default();
        for (&p, &a) in predicted.iter().zip(actual) {
            match (p, a) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Precision, recall and F1; every 0/0 is taken as 0.
pub fn classification_metrics(c: &ConfusionCounts) -> ClassificationScores {
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    // 2PR/(P+R) written on counts to avoid rounding in P and R.
    let f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn_);
    ClassificationScores {
        precision,
        recall,
        f1,
    }
}

/// F1 minus the expected F1 of a probe that fires at the test positive rate
/// `q` independently of its input. That probe's expected precision and recall
/// are both `q`, so its F1 is taken as `q`.
pub fn f1_selectivity(f1: f64, q: f64) -> f64 {
    f1 - q
}

/// Monte-Carlo estimate of the mean F1 of random predictions that are
/// positive with probability `q`, scored against `actual`.
pub fn chance_f1_monte_carlo<R: Rng>(actual: &[bool], q: f64, trials: usize, rng: &mut R) -> f64 {
    let mut predicted = vec![false; actual.len()];
    let mut total = 0.0;
    for _ in 0..trials {
        predicted.iter_mut().for_each(|p| *p = rng.random_bool(q));
        let c = ConfusionCounts::from_predictions(&predicted, actual).expect("same length");
        total += classification_metrics(&c).f1;
    }
    total / trials.max(1) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionScores {
    pub rmse: f64,
    pub mae: f64,
}

pub fn regression_metrics(
    predicted: &[f64],
    target: &[f64],
) -> Result<RegressionScores, MetricsError> {
    if predicted.len() != target.len() {
        return Err(MetricsError::LengthMismatch {
            left: predicted.len(),
            right: target.len(),
        });
    }
    if predicted.is_empty() {
        return Err(MetricsError::Empty("regression predictions"));
    }
    let n = predicted.len() as f64;
    let (sq, abs) = predicted
        .iter()
        .zip(target)
        .fold((0.0, 0.0), |(sq, abs), (p, t)| {
            let e = p - t;
            (sq + e * e, abs + e.abs())
        });
    let mae = abs / n;
    // Mathematically rmse >= mae; keep that under rounding.
    let rmse = (sq / n).sqrt().max(mae);
    Ok(RegressionScores { rmse, mae })
}
