//! Fold metrics, aggregation over attributes and types, cross-model
//! correlation, rankings, and the supercategory-purity confound analysis.

mod aggregate;
mod correlation;
mod purity;
mod ranking;
mod scores;

use thiserror::Error;

pub use aggregate::{
    aggregate_by_attribute, aggregate_by_type, attribute_types, bootstrap_mean_ci,
    percentile_sorted, TypeAggregate,
};
pub use correlation::{model_correlations, pearson, pearson_named, CorrelationMatrix};
pub use purity::{
    purity_score_correlation, purity_table, supercategory_purity, supercategory_purity_with,
    unmapped_concepts, PurityRow, PurityVariant,
};
pub use ranking::{rank_models, RankedModel};
pub use scores::{
    chance_f1_monte_carlo, classification_metrics, f1_selectivity, regression_metrics,
    ClassificationScores, ConfusionCounts, RegressionScores,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty {0}")]
    Empty(&'static str),
    #[error("metric `{metric}` is not recorded for {task} results")]
    UnknownMetric { metric: String, task: &'static str },
    #[error("attribute `{0}` has no type label")]
    MissingType(String),
    #[error("type `{0}` has no scored attributes")]
    EmptyType(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("correlation needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("`{0}` is constant; correlation undefined")]
    ConstantVector(String),
    #[error("concept `{0}` has no supercategory")]
    UnmappedConcept(String),
    #[error("attribute `{0}` is not in the norms dataset")]
    UnknownAttribute(String),
}
