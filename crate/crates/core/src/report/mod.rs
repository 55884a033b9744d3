//! Plot rendering and the machine-readable analysis report.

mod json;
mod svg;

pub use json::{
    canonical_json, read_report, write_report, AnalysisReport, FeatureLoading, FootprintSummary,
    InstanceCoordinate, Provenance, SelectionSummary, SelectorSummary,
};
pub use svg::{
    feature_color, render_dataset_svg, render_feature_svg, render_footprint_svg, Palette, PlotSpec,
    BLUE_END, YELLOW_END,
};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("nothing to plot")]
    EmptyInput,
    #[error("invalid plot spec: {0}")]
    InvalidSpec(String),
    #[error("report invariant violated: {0}")]
    InvariantViolation(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
