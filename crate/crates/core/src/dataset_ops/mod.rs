//! Dataset construction: annotation parsing and assembly, rare-attribute
//! filtering, similarity-based attribute merging, median binarisation of
//! ratings and concept restriction.

mod annotation;
mod binarize;
mod filter;
mod merge;
mod restrict;

use thiserror::Error;

use crate::datamodel::DataError;

pub use annotation::{
    annotation_recall, assemble_norms, parse_annotation_line, parse_annotation_record,
    parse_annotations, AnnotationRecord, AssemblyReport, FailureReason, ParseFailure,
    ParsedAnnotation, ParsedAnnotations, RecallRow, TruthMapping, MISSING_PAIR_LIMIT,
};
pub use binarize::{binarize_ratings, median, BinarizeRule};
pub use filter::filter_rare_attributes;
pub use merge::{apply_merge, plan_attribute_merge, MergeCluster, MergePlan};
pub use restrict::restrict_concepts;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatasetError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid truth token `{0}`")]
    InvalidTruthToken(String),
    #[error("{total} (concept, attribute) pairs have no record, e.g. {pairs:?}")]
    MissingPair {
        total: usize,
        pairs: Vec<(String, String)>,
    },
    #[error(
        "conflicting records for (`{concept}`, `{attribute}`) at lines {first_line} and {second_line}"
    )]
    ConflictingDuplicate {
        concept: String,
        attribute: String,
        first_line: usize,
        second_line: usize,
    },
    #[error("line {line}: unknown concept `{concept}`")]
    UnknownConcept { concept: String, line: usize },
    #[error("line {line}: unknown attribute `{attribute}`")]
    UnknownAttribute { attribute: String, line: usize },
    #[error("empty result: {0}")]
    EmptyResult(String),
    #[error("attribute `{0}` has a zero-norm embedding")]
    ZeroNormVector(String),
    #[error("attribute `{0}` is not covered by the merge plan")]
    UnplannedAttribute(String),
    #[error("attribute `{0}` has a constant rating column")]
    ConstantColumn(String),
    #[error("no concept of the dataset is in the keep set")]
    EmptyIntersection,
}
