//! Instance space analysis for algorithm portfolios.
//!
//! The crate maps where each algorithm of a portfolio works well across a
//! space of problem instances:
//!
//! 1. [`ingest`] reads feature/outcome tables from CSV and normalizes them.
//! 2. [`feature_select`] searches for a small discriminating feature subset
//!    with a genetic algorithm wrapped around a cross-validated SVM.
//! 3. [`project`] fits a PCA on the subset and projects instances to 2D.
//! 4. [`footprint`] computes convex-hull footprints, areas, purity and
//!    density per algorithm.
//! 5. [`classify`] trains per-algorithm SVMs in the 2D space and ranks
//!    algorithms for new instances.
//! 6. [`report`] renders SVG plots and a canonical JSON report.
//!
//! [`pipeline`] wires the stages together on disk, and the `eapr` binary
//! exposes them as subcommands.

// `!(x > 0.0)` is used on purpose so NaN is rejected too; index loops mirror
// the matrix formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod classify;
pub mod config;
pub mod feature_select;
pub mod footprint;
pub mod ingest;
pub mod model;
pub mod pipeline;
pub mod project;
pub mod report;
pub mod seed;

pub use model::{
    validate_table, Coordinates2D, FeatureName, FeatureSubset, InstanceRecord, InstanceTable,
    Outcome, Violation,
};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Ingest(#[from] ingest::IngestError),
    #[error(transparent)]
    Select(#[from] feature_select::SelectError),
    #[error(transparent)]
    Project(#[from] project::ProjectError),
    #[error(transparent)]
    Footprint(#[from] footprint::FootprintError),
    #[error(transparent)]
    Classify(#[from] classify::ClassifyError),
    #[error(transparent)]
    Report(#[from] report::ReportError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
