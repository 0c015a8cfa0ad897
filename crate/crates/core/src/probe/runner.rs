//! One probe per attribute, evaluated under repeated k-fold cross-validation.
//!
//! Attributes are independent tasks over shared read-only inputs. They may run
//! on a worker pool; records are always emitted in (attribute, repeat, fold)
//! order and every random draw is keyed by the seed and the task's position,
//! so results do not depend on the number of workers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::linear::{fit_linear, predict_linear};
use super::logistic::{fit_logistic, predict_logistic, FitError, LogisticConfig};
use super::matrix::Matrix;
use super::splits::{kfold_splits, stratified_splits, Split, SplitError, SplitSpec};
use crate::datamodel::{
    validate_alignment, AlignmentReport, AttributeId, ConceptId, DataError, DatasetRows,
    EmbeddingTable, FoldMetrics, FoldRecord, NormDataset, ProbeResult, RatingDataset,
    SkippedAttribute, Task,
};
use crate::metrics::{
    chance_f1_monte_carlo, classification_metrics, f1_selectivity, regression_metrics,
    ConfusionCounts,
};
use crate::rng;

const CHANCE_TAG: u64 = 0x4348_414e_4345;

/// Dataset a probe suite runs against.
#[derive(Debug, Clone, Copy)]
pub enum ProbeData<'a> {
    Norms(&'a NormDataset),
    Ratings(&'a RatingDataset),
}

impl ProbeData<'_> {
    pub fn task(&self) -> Task {
        match self {
            ProbeData::Norms(_) => Task::Classification,
            ProbeData::Ratings(_) => Task::Regression,
        }
    }

    pub fn concepts(&self) -> &[ConceptId] {
        match self {
            ProbeData::Norms(d) => d.concepts(),
            ProbeData::Ratings(d) => d.concepts(),
        }
    }

    pub fn attributes(&self) -> &[AttributeId] {
        match self {
            ProbeData::Norms(d) => d.attributes(),
            ProbeData::Ratings(d) => d.attributes(),
        }
    }

    pub fn alignment(&self, table: &EmbeddingTable) -> AlignmentReport {
        match self {
            ProbeData::Norms(d) => validate_alignment(table, *d),
            ProbeData::Ratings(d) => validate_alignment(table, *d),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlignmentMode {
    /// Every dataset concept must have an embedding.
    #[default]
    Strict,
    /// Concepts without an embedding are dropped (with a warning).
    Lenient,
}

/// How the chance-level F1 subtracted for selectivity is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SelectivityBaseline {
    /// The test-fold positive rate q.
    #[default]
    ClosedForm,
    /// Mean F1 of `trials` random labelings that fire with probability q.
    MonteCarlo { trials: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub split: SplitSpec,
    pub logistic: LogisticConfig,
    pub alignment: AlignmentMode,
    pub baseline: SelectivityBaseline,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            split: SplitSpec::default(),
            logistic: LogisticConfig::default(),
            alignment: AlignmentMode::Strict,
            baseline: SelectivityBaseline::ClosedForm,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbeError {
    #[error("{} dataset concepts have no embedding, e.g. {}", missing.len(), preview(missing))]
    Alignment { missing: Vec<ConceptId> },
    #[error("attribute `{attribute}`: {source}")]
    Numeric {
        attribute: String,
        #[source]
        source: FitError,
    },
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("worker pool: {0}")]
    Pool(String),
}

fn preview(ids: &[ConceptId]) -> String {
    let shown: Vec<&str> = ids.iter().take(5).map(ConceptId::as_str).collect();
    shown.join(", ")
}

enum Outcome {
    Records(Vec<FoldRecord>),
    Skipped(SkippedAttribute),
}

/// Trains and evaluates one probe per attribute of `data` on the embeddings
/// in `table`.
pub fn run_probe_suite(
    table: &EmbeddingTable,
    data: ProbeData<'_>,
    dataset_name: &str,
    options: &RunOptions,
) -> Result<ProbeResult, ProbeError> {
    options.split.validate()?;
    let report = data.alignment(table);
    if !report.dataset_only.is_empty() {
        match options.alignment {
            AlignmentMode::Strict => {
                return Err(ProbeError::Alignment {
                    missing: report.dataset_only,
                })
            }
            AlignmentMode::Lenient => log::warn!(
                "{} of {} dataset concepts have no embedding and are dropped",
                report.dataset_only.len(),
                data.concepts().len()
            ),
        }
    }

    let matched: std::collections::HashSet<&ConceptId> = report.matched.iter().collect();
    let rows: Vec<usize> = data
        .concepts()
        .iter()
        .enumerate()
        .filter(|(_, c)| matched.contains(c))
        .map(|(i, _)| i)
        .collect();
    let mut values = Vec::with_capacity(rows.len() * table.dim());
    for &i in &rows {
        values.extend_from_slice(table.get(&data.concepts()[i]).expect("matched concept"));
    }
    let x = Matrix::new(rows.len(), table.dim(), values);

    // Regression splits do not depend on the target, so share them.
    let shared_splits = match data {
        ProbeData::Ratings(_) => Some(kfold_splits(rows.len(), &options.split)),
        ProbeData::Norms(_) => None,
    };

    let attributes = data.attributes();
    let evaluate = |j: usize| -> Result<Outcome, ProbeError> {
        let attribute = &attributes[j];
        match data {
            ProbeData::Norms(d) => {
                let y: Vec<bool> = rows.iter().map(|&i| d.label(i, j)).collect();
                classify_attribute(attribute, j, &x, &y, options)
            }
            ProbeData::Ratings(d) => {
                let y: Vec<f64> = rows.iter().map(|&i| d.rating(i, j)).collect();
                match shared_splits.as_ref().expect("regression splits") {
                    Ok(splits) => regress_attribute(attribute, &x, &y, splits),
                    Err(e) => Ok(Outcome::Skipped(SkippedAttribute {
                        attribute: attribute.clone(),
                        reason: e.to_string(),
                    })),
                }
            }
        }
    };

    let outcomes: Vec<Result<Outcome, ProbeError>> = if options.workers == 1 {
        (0..attributes.len()).map(evaluate).collect()
    } else if options.workers == 0 {
        (0..attributes.len())
            .into_par_iter()
            .map(evaluate)
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.workers)
            .build()
            .map_err(|e| ProbeError::Pool(e.to_string()))?;
        pool.install(|| {
            (0..attributes.len())
                .into_par_iter()
                .map(evaluate)
                .collect()
        })
    };

    let mut records = Vec::with_capacity(attributes.len() * options.split.records_per_attribute());
    let mut skipped = Vec::new();
    for outcome in outcomes {
        match outcome? {
            Outcome::Records(r) => records.extend(r),
            Outcome::Skipped(s) => {
                log::info!("skipping attribute `{}`: {}", s.attribute, s.reason);
                skipped.push(s);
            }
        }
    }
    Ok(ProbeResult {
        model_name: table.model_name().to_owned(),
        dataset_name: dataset_name.to_owned(),
        task: data.task(),
        records,
        skipped,
    })
}

fn numeric(attribute: &AttributeId) -> impl Fn(FitError) -> ProbeError + '_ {
    move |source| ProbeError::Numeric {
        attribute: attribute.name().to_owned(),
        source,
    }
}

fn classify_attribute(
    attribute: &AttributeId,
    index: usize,
    x: &Matrix,
    y: &[bool],
    options: &RunOptions,
) -> Result<Outcome, ProbeError> {
    let splits = match stratified_splits(y, &options.split) {
        Ok(s) => s,
        Err(e) => {
            return Ok(Outcome::Skipped(SkippedAttribute {
                attribute: attribute.clone(),
                reason: e.to_string(),
            }))
        }
    };
    let mut records = Vec::with_capacity(splits.len());
    for Split {
        repeat,
        fold,
        train,
        test,
    } in &splits
    {
        let y_train: Vec<bool> = train.iter().map(|&i| y[i]).collect();
        let y_test: Vec<bool> = test.iter().map(|&i| y[i]).collect();
        let model = fit_logistic(&x.select(train), &y_train, &options.logistic)
            .map_err(numeric(attribute))?;
        let predicted = predict_logistic(&model, &x.select(test)).map_err(numeric(attribute))?;
        let counts = ConfusionCounts::from_predictions(&predicted, &y_test)
            .expect("predictions match test size");
        let scores = classification_metrics(&counts);
        let q = y_test.iter().filter(|&&v| v).count() as f64 / y_test.len() as f64;
        let chance = match options.baseline {
            SelectivityBaseline::ClosedForm => q,
            SelectivityBaseline::MonteCarlo { trials } => {
                let key = rng::mix(rng::mix(options.split.seed, CHANCE_TAG), index as u64);
                let mut stream =
                    rng::substream(key, (repeat * options.split.n_folds + fold) as u64);
                chance_f1_monte_carlo(&y_test, q, trials, &mut stream)
            }
        };
        let metrics = FoldMetrics::Classification {
            precision: scores.precision,
            recall: scores.recall,
            f1: scores.f1,
            f1_selectivity: f1_selectivity(scores.f1, chance),
        };
        records.push(FoldRecord::new(
            attribute.clone(),
            *repeat,
            *fold,
            Some(q),
            metrics,
        )?);
    }
    Ok(Outcome::Records(records))
}

fn regress_attribute(
    attribute: &AttributeId,
    x: &Matrix,
    y: &[f64],
    splits: &[Split],
) -> Result<Outcome, ProbeError> {
    let mut records = Vec::with_capacity(splits.len());
    for split in splits {
        let y_train: Vec<f64> = split.train.iter().map(|&i| y[i]).collect();
        let y_test: Vec<f64> = split.test.iter().map(|&i| y[i]).collect();
        let model = fit_linear(&x.select(&split.train), &y_train).map_err(numeric(attribute))?;
        let predicted =
            predict_linear(&model, &x.select(&split.test)).map_err(numeric(attribute))?;
        let scores = regression_metrics(&predicted, &y_test).expect("non-empty test fold");
        records.push(FoldRecord::new(
            attribute.clone(),
            split.repeat,
            split.fold,
            None,
            FoldMetrics::Regression {
                rmse: scores.rmse,
                mae: scores.mae,
            },
        )?);
    }
    Ok(Outcome::Records(records))
}
