//! Validated, immutable data types shared by the rest of the crate.
//!
//! Every constructor checks its invariants and reports the offending field
//! together with the concept (row) or attribute (column) involved.

mod ids;
mod results;
mod tables;

use thiserror::Error;

pub use ids::{AttributeId, ConceptId};
pub use results::{FoldMetrics, FoldRecord, Metric, ProbeResult, SkippedAttribute, Task};
pub use tables::{
    validate_alignment, AlignmentReport, DatasetRows, EmbeddingTable, NormDataset, RatingDataset,
    RatingScale, SupercategoryMap,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DataError {
    #[error("{field} name is empty")]
    EmptyName { field: &'static str },
    #[error("embedding table has no rows")]
    EmptyTable,
    #[error("embedding dimension must be at least 1")]
    ZeroDimension,
    #[error("dataset has no {field}")]
    EmptyDataset { field: &'static str },
    #[error("row `{row}` has {found} entries, expected {expected}")]
    RowLength {
        row: String,
        expected: usize,
        found: usize,
    },
    #[error("{field}: expected {expected} values, found {found}")]
    Shape {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("non-finite {field} value at row `{row}`, column {col}")]
    NonFinite {
        field: &'static str,
        row: String,
        col: usize,
    },
    #[error("duplicate concept `{0}`")]
    DuplicateConcept(String),
    #[error("duplicate attribute `{0}`")]
    DuplicateAttribute(String),
    #[error("label for concept `{concept}`, attribute `{attribute}` is {value}, expected 0 or 1")]
    InvalidLabel {
        concept: String,
        attribute: String,
        value: u8,
    },
    #[error("attribute `{attribute}` has no positive concepts")]
    NoPositives { attribute: String },
    #[error(
        "rating {value} for concept `{concept}`, attribute `{attribute}` outside scale [{low}, {high}]"
    )]
    RatingOutOfRange {
        concept: String,
        attribute: String,
        value: f64,
        low: f64,
        high: f64,
    },
    #[error("invalid rating scale [{low}, {high}]")]
    InvalidScale { low: f64, high: f64 },
    #[error("concept `{concept}` assigned to both `{first}` and `{second}`")]
    ConflictingSupercategory {
        concept: String,
        first: String,
        second: String,
    },
    #[error("{metric} = {value} is out of range")]
    MetricOutOfRange { metric: &'static str, value: f64 },
    #[error("unknown metric `{0}`")]
    UnknownMetric(String),
    #[error("unknown task `{0}`")]
    UnknownTask(String),
}
