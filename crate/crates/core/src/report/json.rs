use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::ReportError;
use crate::classify::SelectorMetrics;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureLoading {
    pub name: String,
    pub z1: f64,
    pub z2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FootprintSummary {
    pub algorithm: String,
    pub area_good: f64,
    pub area_net: f64,
    /// Areas divided by the area of the hull of all instances.
    pub area_good_normalized: f64,
    pub area_net_normalized: f64,
    pub purity: f64,
    pub density: f64,
    pub good_count: usize,
    pub bad_count: usize,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceCoordinate {
    pub instance_id: String,
    pub dataset: String,
    pub z1: f64,
    pub z2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionSummary {
    pub repeats: usize,
    /// Fraction of repeats whose best subset contained each feature.
    pub frequency: BTreeMap<String, f64>,
    /// Best cross-validated fitness of each repeat, in repeat order.
    pub repeat_fitness: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectorSummary {
    pub cross_validated: SelectorMetrics,
    pub training: SelectorMetrics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Effective configuration (paths excluded).
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    /// SHA-256 of the input file bytes.
    pub input_digest: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub algorithms: Vec<String>,
    pub features: Vec<FeatureLoading>,
    pub dropped_features: Vec<String>,
    pub eigenvalues: Vec<f64>,
    pub explained_variance: Vec<f64>,
    pub explained_variance_2d: f64,
    pub feature_selection: SelectionSummary,
    /// Area of the convex hull of every instance.
    pub space_area: f64,
    pub footprints: Vec<FootprintSummary>,
    /// `overlap[a][b]`, absent when either footprint is degenerate.
    pub overlap: BTreeMap<String, BTreeMap<String, Option<f64>>>,
    pub selector: SelectorSummary,
    pub coordinates: Vec<InstanceCoordinate>,
    pub artifacts: Vec<String>,
    pub provenance: Provenance,
}

impl AnalysisReport {
    /// Every algorithm appears exactly once among the footprints and in both
    /// metric tables.
    pub fn check(&self) -> Result<(), ReportError> {
        let expected: BTreeSet<&str> = self.algorithms.iter().map(String::as_str).collect();
        if expected.len() != self.algorithms.len() {
            return Err(ReportError::InvariantViolation("duplicate algorithm name".into()));
        }
        let mut seen = BTreeSet::new();
        for f in &self.footprints {
            if !seen.insert(f.algorithm.as_str()) {
                return Err(ReportError::InvariantViolation(format!(
                    "footprint of {} listed twice",
                    f.algorithm
                )));
            }
        }
        if seen != expected {
            let missing: Vec<_> = expected.difference(&seen).collect();
            return Err(ReportError::InvariantViolation(format!(
                "footprints missing or unexpected: {missing:?}"
            )));
        }
        for (what, m) in [
            ("cross-validated", &self.selector.cross_validated),
            ("training", &self.selector.training),
        ] {
            let keys: BTreeSet<&str> = m.per_algorithm.keys().map(String::as_str).collect();
            if keys != expected {
                return Err(ReportError::InvariantViolation(format!(
                    "{what} metrics do not cover every algorithm exactly once"
                )));
            }
        }
        Ok(())
    }
}

fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_significant).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Pretty JSON with sorted object keys and every float rounded to six
/// significant digits.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String, ReportError> {
    // serde_json::Map is a BTreeMap here, so keys come out sorted
    let mut v = serde_json::to_value(value)?;
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn write_report(report: &AnalysisReport, path: &Path) -> Result<(), ReportError> {
    report.check()?;
    std::fs::write(path, canonical_json(report)?)?;
    Ok(())
}

pub fn read_report(path: &Path) -> Result<AnalysisReport, ReportError> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}
