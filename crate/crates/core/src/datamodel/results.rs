use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{AttributeId, DataError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Classification,
    Regression,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Classification => "classification",
            Task::Regression => "regression",
        }
    }

    /// Metric reported by default for this task.
    pub fn headline_metric(self) -> Metric {
        match self {
            Task::Classification => Metric::F1Selectivity,
            Task::Regression => Metric::Rmse,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "classification" => Ok(Task::Classification),
            "regression" => Ok(Task::Regression),
            other => Err(DataError::UnknownTask(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Precision,
    Recall,
    F1,
    F1Selectivity,
    Rmse,
    Mae,
}

impl Metric {
    pub const CLASSIFICATION: [Metric; 4] = [
        Metric::Precision,
        Metric::Recall,
        Metric::F1,
        Metric::F1Selectivity,
    ];
    pub const REGRESSION: [Metric; 2] = [Metric::Rmse, Metric::Mae];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Precision => "precision",
            Metric::Recall => "recall",
            Metric::F1 => "f1",
            Metric::F1Selectivity => "f1_selectivity",
            Metric::Rmse => "rmse",
            Metric::Mae => "mae",
        }
    }

    pub fn task(self) -> Task {
        match self {
            Metric::Rmse | Metric::Mae => Task::Regression,
            _ => Task::Classification,
        }
    }

    /// Errors rank ascending, scores descending.
    pub fn higher_is_better(self) -> bool {
        self.task() == Task::Classification
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::CLASSIFICATION
            .iter()
            .chain(Metric::REGRESSION.iter())
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| DataError::UnknownMetric(s.to_owned()))
    }
}

/// Metrics of one fitted probe on one test fold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "lowercase")]
pub enum FoldMetrics {
    Classification {
        precision: f64,
        recall: f64,
        f1: f64,
        f1_selectivity: f64,
    },
    Regression {
        rmse: f64,
        mae: f64,
    },
}

impl FoldMetrics {
    pub fn task(&self) -> Task {
        match self {
            FoldMetrics::Classification { .. } => Task::Classification,
            FoldMetrics::Regression { .. } => Task::Regression,
        }
    }

    pub fn get(&self, metric: Metric) -> Option<f64> {
        match (*self, metric) {
            (FoldMetrics::Classification { precision, .. }, Metric::Precision) => Some(precision),
            (FoldMetrics::Classification { recall, .. }, Metric::Recall) => Some(recall),
            (FoldMetrics::Classification { f1, .. }, Metric::F1) => Some(f1),
            (FoldMetrics::Classification { f1_selectivity, .. }, Metric::F1Selectivity) => {
                Some(f1_selectivity)
            }
            (FoldMetrics::Regression { rmse, .. }, Metric::Rmse) => Some(rmse),
            (FoldMetrics::Regression { mae, .. }, Metric::Mae) => Some(mae),
            _ => None,
        }
    }

    fn validate(&self) -> Result<(), DataError> {
        let bad = |metric: Metric, value: f64| DataError::MetricOutOfRange {
            metric: metric.name(),
            value,
        };
        match *self {
            FoldMetrics::Classification {
                precision,
                recall,
                f1,
                f1_selectivity,
            } => {
                for (m, v) in [
                    (Metric::Precision, precision),
                    (Metric::Recall, recall),
                    (Metric::F1, f1),
                ] {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(bad(m, v));
                    }
                }
                if !(-1.0..=1.0).contains(&f1_selectivity) {
                    return Err(bad(Metric::F1Selectivity, f1_selectivity));
                }
            }
            FoldMetrics::Regression { rmse, mae } => {
                if !(mae >= 0.0 && mae.is_finite()) {
                    return Err(bad(Metric::Mae, mae));
                }
                // rmse >= mae holds exactly in real arithmetic; allow rounding slack.
                if !(rmse.is_finite() && rmse >= mae * (1.0 - 1e-12)) {
                    return Err(bad(Metric::Rmse, rmse));
                }
            }
        }
        Ok(())
    }
}

/// One (attribute, repeat, fold) evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FoldRecordRepr", into = "FoldRecordRepr")]
pub struct FoldRecord {
    pub attribute: AttributeId,
    pub repeat_index: usize,
    pub fold_index: usize,
    /// Positive rate of the test fold; classification only.
    pub test_positive_rate: Option<f64>,
    pub metrics: FoldMetrics,
}

#[derive(Clone, Serialize, Deserialize)]
struct FoldRecordRepr {
    attribute: AttributeId,
    repeat_index: usize,
    fold_index: usize,
    test_positive_rate: Option<f64>,
    metrics: FoldMetrics,
}

impl FoldRecord {
    pub fn new(
        attribute: AttributeId,
        repeat_index: usize,
        fold_index: usize,
        test_positive_rate: Option<f64>,
        metrics: FoldMetrics,
    ) -> Result<Self, DataError> {
        metrics.validate()?;
        match (metrics.task(), test_positive_rate) {
            (Task::Classification, Some(q)) if (0.0..=1.0).contains(&q) => {}
            (Task::Classification, q) => {
                return Err(DataError::MetricOutOfRange {
                    metric: "test_positive_rate",
                    value: q.unwrap_or(f64::NAN),
                })
            }
            (Task::Regression, None) => {}
            (Task::Regression, Some(q)) => {
                return Err(DataError::MetricOutOfRange {
                    metric: "test_positive_rate",
                    value: q,
                })
            }
        }
        Ok(FoldRecord {
            attribute,
            repeat_index,
            fold_index,
            test_positive_rate,
            metrics,
        })
    }

    pub fn task(&self) -> Task {
        self.metrics.task()
    }

    pub fn metric(&self, metric: Metric) -> Option<f64> {
        self.metrics.get(metric)
    }
}

impl TryFrom<FoldRecordRepr> for FoldRecord {
    type Error = DataError;

    fn try_from(r: FoldRecordRepr) -> Result<Self, Self::Error> {
        FoldRecord::new(
            r.attribute,
            r.repeat_index,
            r.fold_index,
            r.test_positive_rate,
            r.metrics,
        )
    }
}

impl From<FoldRecord> for FoldRecordRepr {
    fn from(r: FoldRecord) -> Self {
        FoldRecordRepr {
            attribute: r.attribute,
            repeat_index: r.repeat_index,
            fold_index: r.fold_index,
            test_positive_rate: r.test_positive_rate,
            metrics: r.metrics,
        }
    }
}

/// An attribute the runner could not evaluate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedAttribute {
    pub attribute: AttributeId,
    pub reason: String,
}

/// All fold records of one (model, dataset, task) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub model_name: String,
    pub dataset_name: String,
    pub task: Task,
    pub records: Vec<FoldRecord>,
    #[serde(default)]
    pub skipped: Vec<SkippedAttribute>,
}

impl ProbeResult {
    /// Evaluated attributes in first-appearance order.
    pub fn attributes(&self) -> Vec<&AttributeId> {
        let mut seen = std::collections::HashSet::new();
        self.records
            .iter()
            .map(|r| &r.attribute)
            .filter(|a| seen.insert(a.name()))
            .collect()
    }
}
