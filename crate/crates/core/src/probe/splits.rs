//! Repeated stratified k-fold splitting.
//!
//! Each repeat shuffles the sample indices with its own deterministic stream
//! keyed by (seed, repeat). Walking the shuffled order, positives are dealt to
//! folds round-robin starting at fold 0 and negatives continue the same
//! rotation where the positives stopped. Per-fold positive counts, negative
//! counts and fold sizes therefore each differ by at most one.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng;

const SPLIT_TAG: u64 = 0x0053_504c_4954;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub n_folds: usize,
    pub n_repeats: usize,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            n_folds: 5,
            n_repeats: 2,
            seed: 13,
        }
    }
}

impl SplitSpec {
    pub fn new(n_folds: usize, n_repeats: usize, seed: u64) -> Result<Self, SplitError> {
        let spec = SplitSpec {
            n_folds,
            n_repeats,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), SplitError> {
        if self.n_folds < 2 {
            return Err(SplitError::InvalidSpec("n_folds must be at least 2"));
        }
        if self.n_repeats < 1 {
            return Err(SplitError::InvalidSpec("n_repeats must be at least 1"));
        }
        Ok(())
    }

    /// Fold records produced per attribute.
    pub fn records_per_attribute(&self) -> usize {
        self.n_folds * self.n_repeats
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("invalid split specification: {0}")]
    InvalidSpec(&'static str),
    #[error("{found} positive samples, need at least {needed} for stratification")]
    TooFewPositives { found: usize, needed: usize },
    #[error("{found} negative samples, need at least {needed} for stratification")]
    TooFewNegatives { found: usize, needed: usize },
    #[error("{found} samples, need at least {needed}")]
    TooFewSamples { found: usize, needed: usize },
}

/// One train/test partition. Both index lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub repeat: usize,
    pub fold: usize,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

fn shuffled(n: usize, spec: &SplitSpec, repeat: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut stream = rng::substream(rng::mix(spec.seed, SPLIT_TAG), repeat as u64);
    order.shuffle(&mut stream);
    order
}

fn splits_from_assignment(
    assignment: &[usize],
    n_folds: usize,
    repeat: usize,
    out: &mut Vec<Split>,
) {
    for fold in 0..n_folds {
        let (test, train): (Vec<usize>, Vec<usize>) =
            (0..assignment.len()).partition(|&i| assignment[i] == fold);
        out.push(Split {
            repeat,
            fold,
            train,
            test,
        });
    }
}

/// Splits for a binary target, in (repeat, fold) order.
pub fn stratified_splits(labels: &[bool], spec: &SplitSpec) -> Result<Vec<Split>, SplitError> {
    spec.validate()?;
    let positives = labels.iter().filter(|&&y| y).count();
    let negatives = labels.len() - positives;
    if positives < spec.n_folds {
        return Err(SplitError::TooFewPositives {
            found: positives,
            needed: spec.n_folds,
        });
    }
    if negatives < spec.n_folds {
        return Err(SplitError::TooFewNegatives {
            found: negatives,
            needed: spec.n_folds,
        });
    }
    let k = spec.n_folds;
    let mut out = Vec::with_capacity(spec.records_per_attribute());
    let mut assignment = vec![0usize; labels.len()];
    for repeat in 0..spec.n_repeats {
        let order = shuffled(labels.len(), spec, repeat);
        let (mut next_pos, mut next_neg) = (0usize, positives);
        for &i in &order {
            if labels[i] {
                assignment[i] = next_pos % k;
                next_pos += 1;
            } else {
                assignment[i] = next_neg % k;
                next_neg += 1;
            }
        }
        splits_from_assignment(&assignment, k, repeat, &mut out);
    }
    Ok(out)
}

/// Unstratified shuffled k-fold splits of `n` samples (used for regression
/// targets), in (repeat, fold) order.
pub fn kfold_splits(n: usize, spec: &SplitSpec) -> Result<Vec<Split>, SplitError> {
    spec.validate()?;
    if n < spec.n_folds {
        return Err(SplitError::TooFewSamples {
            found: n,
            needed: spec.n_folds,
        });
    }
    let mut out = Vec::with_capacity(spec.records_per_attribute());
    let mut assignment = vec![0usize; n];
    for repeat in 0..spec.n_repeats {
        for (k, &i) in shuffled(n, spec, repeat).iter().enumerate() {
            assignment[i] = k % spec.n_folds;
        }
        splits_from_assignment(&assignment, spec.n_folds, repeat, &mut out);
    }
    Ok(out)
}
