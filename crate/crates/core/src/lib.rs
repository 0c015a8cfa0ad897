//! Linear probing of frozen concept representations against semantic
//! feature norms and attribute ratings.
//!
//! The crate is organised bottom-up:
//!
//! - [`datamodel`]: validated concept/attribute ids, embedding tables, norm
//!   and rating datasets, and probe result records.
//! - [`dataset_ops`]: building datasets from annotations, filtering rare
//!   attributes, merging near-duplicate attributes, median binarisation.
//! - [`probe`]: per-attribute logistic and least-squares probes under
//!   repeated stratified cross-validation.
//! - [`metrics`]: F1 and selectivity, RMSE/MAE, bootstrap aggregation by
//!   attribute type, cross-model correlation, rankings and the
//!   supercategory-purity analysis.

pub mod datamodel;
pub mod dataset_ops;
pub mod metrics;
pub mod probe;
pub mod rng;

pub use datamodel::{
    AttributeId, ConceptId, DataError, EmbeddingTable, FoldMetrics, FoldRecord, Metric,
    NormDataset, ProbeResult, RatingDataset, RatingScale, SupercategoryMap, Task,
};
pub use probe::{run_probe_suite, ProbeData, RunOptions};
