//! Domain types shared by every analysis stage.
//!
//! An [`InstanceTable`] is the row universe: each [`InstanceRecord`] carries a
//! feature vector aligned with the table header and one [`Outcome`] per
//! algorithm in the portfolio.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::Error;

/// Opaque, case-sensitive feature identifier (e.g. `MOA`, `CAM`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureName(String);

impl FeatureName {
    pub fn new(name: impl Into<String>) -> Result<Self, Error> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidInput("feature name must be non-empty".into()));
        }
        Ok(Self(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for FeatureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Per-algorithm outcome on one instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Outcome {
    Good,
    Bad,
    /// The algorithm was never run on this instance.
    Missing,
}

impl Outcome {
    /// `+1` for GOOD, `-1` for BAD, `None` for MISSING.
    pub fn sign(self) -> Option<f64> {
        match self {
            Outcome::Good => Some(1.0),
            Outcome::Bad => Some(-1.0),
            Outcome::Missing => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub instance_id: String,
    pub dataset_tag: String,
    pub features: Vec<f64>,
    pub outcomes: Vec<Outcome>,
    /// Extra string columns kept from the source file (grouping keys etc).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attributes: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceTable {
    pub feature_names: Vec<FeatureName>,
    pub algorithm_names: Vec<String>,
    pub rows: Vec<InstanceRecord>,
}

impl InstanceTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn feature_index(&self, name: &FeatureName) -> Option<usize> {
        self.feature_names.iter().position(|f| f == name)
    }

    pub fn algorithm_index(&self, name: &str) -> Option<usize> {
        self.algorithm_names.iter().position(|a| a == name)
    }

    /// Column of feature values, row-aligned.
    pub fn feature_column(&self, index: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.features[index]).collect()
    }

    /// Outcomes of one algorithm, row-aligned.
    pub fn outcomes_of(&self, algorithm: usize) -> Vec<Outcome> {
        self.rows.iter().map(|r| r.outcomes[algorithm]).collect()
    }

    /// Fails with the first violation if the table does not validate.
    pub fn ensure_valid(&self) -> Result<(), Error> {
        match validate_table(self).into_iter().next() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidInput(v.to_string())),
        }
    }
}

/// A chosen set of features, kept sorted by name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureSubset {
    selected: BTreeSet<FeatureName>,
}

impl FeatureSubset {
    pub fn new<I: IntoIterator<Item = FeatureName>>(names: I) -> Result<Self, Error> {
        let selected: BTreeSet<_> = names.into_iter().collect();
        if selected.is_empty() {
            return Err(Error::InvalidInput("feature subset must be non-empty".into()));
        }
        Ok(Self { selected })
    }

    /// Convenience constructor from string slices.
    pub fn from_names(names: &[&str]) -> Result<Self, Error> {
        let names = names
            .iter()
            .map(|n| FeatureName::new(*n))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(names)
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn contains(&self, name: &FeatureName) -> bool {
        self.selected.contains(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &FeatureName> {
        self.selected.iter()
    }

    /// Checks membership in the table header and the cardinality window.
    pub fn check_against(&self, table: &InstanceTable, min_k: usize, max_k: usize) -> Result<(), Error> {
        for name in &self.selected {
            if table.feature_index(name).is_none() {
                return Err(Error::InvalidInput(format!("feature {name} not in table")));
            }
        }
        if self.len() < min_k || self.len() > max_k {
            return Err(Error::InvalidInput(format!(
                "subset size {} outside [{min_k}, {max_k}]",
                self.len()
            )));
        }
        Ok(())
    }

    /// Table column indices of the selected features, in name order.
    pub fn indices_in(&self, table: &InstanceTable) -> Result<Vec<usize>, Error> {
        self.selected
            .iter()
            .map(|n| {
                table
                    .feature_index(n)
                    .ok_or_else(|| Error::InvalidInput(format!("feature {n} not in table")))
            })
            .collect()
    }
}

/// Projected coordinates, one `(z1, z2)` pair per table row.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Coordinates2D {
    pub points: Vec<[f64; 2]>,
}

impl Coordinates2D {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Zero-based data row, `None` for header-level rules.
    pub row: Option<usize>,
    pub column: Option<String>,
    pub rule: &'static str,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.row, &self.column) {
            (Some(r), Some(c)) => write!(f, "row {r}, column {c}: {}", self.rule),
            (Some(r), None) => write!(f, "row {r}: {}", self.rule),
            (None, Some(c)) => write!(f, "column {c}: {}", self.rule),
            (None, None) => f.write_str(self.rule),
        }
    }
}

pub const RULE_DUPLICATE_ID: &str = "duplicate id";
pub const RULE_NON_FINITE: &str = "non-finite feature";
pub const RULE_DUPLICATE_FEATURE: &str = "duplicate feature name";
pub const RULE_FEATURE_LENGTH: &str = "feature vector length mismatch";
pub const RULE_OUTCOME_LENGTH: &str = "outcome vector length mismatch";
pub const RULE_TOO_FEW_ROWS: &str = "fewer than 3 rows";

/// Checks every structural invariant of the table. Empty result means valid.
pub fn validate_table(table: &InstanceTable) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut seen_features = HashSet::new();
    for f in &table.feature_names {
        if !seen_features.insert(f.as_str()) {
            out.push(Violation {
                row: None,
                column: Some(f.to_string()),
                rule: RULE_DUPLICATE_FEATURE,
            });
        }
    }

    if table.rows.len() < 3 {
        out.push(Violation {
            row: None,
            column: None,
            rule: RULE_TOO_FEW_ROWS,
        });
    }

    let mut seen_ids = HashSet::new();
    for (i, row) in table.rows.iter().enumerate() {
        if !seen_ids.insert(row.instance_id.as_str()) {
            out.push(Violation {
                row: Some(i),
                column: Some("instance_id".into()),
                rule: RULE_DUPLICATE_ID,
            });
        }
        if row.features.len() != table.feature_names.len() {
            out.push(Violation {
                row: Some(i),
                column: None,
                rule: RULE_FEATURE_LENGTH,
            });
        } else {
            for (value, name) in row.features.iter().zip(&table.feature_names) {
                if !value.is_finite() {
                    out.push(Violation {
                        row: Some(i),
                        column: Some(name.to_string()),
                        rule: RULE_NON_FINITE,
                    });
                }
            }
        }
        if row.outcomes.len() != table.algorithm_names.len() {
            out.push(Violation {
                row: Some(i),
                column: None,
                rule: RULE_OUTCOME_LENGTH,
            });
        }
    }
    out
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// The four Bugs.jar rows of the published dataset snapshot.
    pub(crate) fn snapshot_table() -> InstanceTable {
        let names = ["wmc", "dit", "noc", "cbo"];
        let rows = [
            ("Jackrabbit", [9.37, 0.78, 0.23, 12.51], [1, 0]),
            ("Accumulo", [11.94, 0.81, 0.22, 13.23], [1, 0]),
            ("Flink", [8.43, 0.75, 0.31, 10.79], [1, 1]),
            ("Wicket", [8.84, 0.58, 0.41, 11.01], [0, 1]),
        ];
        InstanceTable {
            feature_names: names.iter().map(|n| FeatureName::new(*n).unwrap()).collect(),
            algorithm_names: vec!["Kali".into(), "Arja".into()],
            rows: rows
                .iter()
                .map(|(id, f, o)| InstanceRecord {
                    instance_id: id.to_string(),
                    dataset_tag: "Bugs.jar".into(),
                    features: f.to_vec(),
                    outcomes: o
                        .iter()
                        .map(|&b| if b == 1 { Outcome::Good } else { Outcome::Bad })
                        .collect(),
                    attributes: BTreeMap::new(),
                })
                .collect(),
        }
    }

    #[test]
    fn snapshot_rows_validate() {
        assert!(validate_table(&snapshot_table()).is_empty());
    }

    #[test]
    fn duplicate_id_is_one_violation() {
        let mut t = snapshot_table();
        t.rows[3].instance_id = "Flink".into();
        let v = validate_table(&t);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, RULE_DUPLICATE_ID);
        assert_eq!(v[0].row, Some(3));
    }

    #[test]
    fn nan_feature_is_one_violation() {
        let mut t = snapshot_table();
        t.rows[1].features[2] = f64::NAN;
        let v = validate_table(&t);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, RULE_NON_FINITE);
        assert_eq!(v[0].column.as_deref(), Some("noc"));
    }

    #[test]
    fn validation_is_pure() {
        let mut t = snapshot_table();
        t.rows[0].features[0] = f64::INFINITY;
        t.rows.truncate(2);
        assert_eq!(validate_table(&t), validate_table(&t));
        assert_eq!(validate_table(&t).len(), 2);
    }

    #[test]
    fn empty_feature_name_rejected() {
        assert!(FeatureName::new("").is_err());
        assert!(FeatureSubset::new(Vec::new()).is_err());
    }
}
