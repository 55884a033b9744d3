//! CSV ingestion, sub-program aggregation and column normalization.
//!
//! The expected layout is
//! `instance_id,dataset,<feature columns...>,<outcome columns prefixed "aprt:">`
//! with outcome cells `1` (GOOD), `0` (BAD) or empty (MISSING). Delimiter is
//! always a comma and the decimal separator a dot.

use std::collections::{BTreeMap, HashMap};
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::model::{FeatureName, FeatureSubset, InstanceRecord, InstanceTable, Outcome};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("malformed CSV at line {line}: expected {expected} fields, found {found}")]
    MalformedCsv {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("cannot parse {value:?} at line {line}, column {column}")]
    UnparseableCell {
        line: usize,
        column: String,
        value: String,
    },
    #[error("table has no data rows")]
    EmptyTable,
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("conflicting outcome labels for algorithm {algorithm} in group {group:?}")]
    InconsistentOutcomes { group: String, algorithm: String },
    #[error("every selected feature has zero variance")]
    AllFeaturesDropped,
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Which header columns carry algorithm outcomes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutcomeColumns {
    /// Columns whose header starts with the prefix; the algorithm name is the
    /// remainder of the header.
    Prefix(String),
    /// Exactly these columns, algorithm name = column name.
    Named(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub id_column: String,
    /// `None` when the file has no benchmark column; rows get an empty tag.
    pub dataset_column: Option<String>,
    pub outcomes: OutcomeColumns,
    /// String columns kept as row attributes instead of features.
    pub attribute_columns: Vec<String>,
}

impl Default for ColumnSchema {
    fn default() -> Self {
        Self {
            id_column: "instance_id".into(),
            dataset_column: Some("dataset".into()),
            outcomes: OutcomeColumns::Prefix("aprt:".into()),
            attribute_columns: Vec::new(),
        }
    }
}

enum ColumnRole {
    Id,
    Dataset,
    Feature(usize),
    Outcome(usize),
    Attribute(String),
}

/// Parses a UTF-8 CSV feature/outcome table.
///
/// Empty feature cells are read as NaN (absent measurement); the table will
/// then fail validation unless aggregation fills them from sibling rows.
pub fn parse_instance_table<R: Read>(source: R, schema: &ColumnSchema) -> Result<InstanceTable, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let header = reader.headers()?.clone();

    let mut roles = Vec::with_capacity(header.len());
    let mut feature_names = Vec::new();
    let mut algorithm_names = Vec::new();
    let mut have_id = false;
    let mut have_dataset = false;
    for col in header.iter() {
        let role = if col == schema.id_column {
            have_id = true;
            ColumnRole::Id
        } else if schema.dataset_column.as_deref() == Some(col) {
            have_dataset = true;
            ColumnRole::Dataset
        } else if schema.attribute_columns.iter().any(|a| a == col) {
            ColumnRole::Attribute(col.to_string())
        } else if let Some(alg) = outcome_algorithm(&schema.outcomes, col) {
            algorithm_names.push(alg);
            ColumnRole::Outcome(algorithm_names.len() - 1)
        } else {
            feature_names.push(
                FeatureName::new(col).map_err(|_| IngestError::MissingColumn("<empty header>".into()))?,
            );
            ColumnRole::Feature(feature_names.len() - 1)
        };
        roles.push(role);
    }
    if !have_id {
        return Err(IngestError::MissingColumn(schema.id_column.clone()));
    }
    if let (Some(ds), false) = (&schema.dataset_column, have_dataset) {
        return Err(IngestError::MissingColumn(ds.clone()));
    }
    if let OutcomeColumns::Named(names) = &schema.outcomes {
        if let Some(missing) = names.iter().find(|n| !algorithm_names.contains(n)) {
            return Err(IngestError::MissingColumn(missing.clone()));
        }
    }
    for attr in &schema.attribute_columns {
        if !header.iter().any(|h| h == attr) {
            return Err(IngestError::MissingColumn(attr.clone()));
        }
    }

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        // header is line 1
        let line = i + 2;
        if record.len() != header.len() {
            return Err(IngestError::MalformedCsv {
                line,
                expected: header.len(),
                found: record.len(),
            });
        }
        let mut row = InstanceRecord {
            instance_id: String::new(),
            dataset_tag: String::new(),
            features: vec![f64::NAN; feature_names.len()],
            outcomes: vec![Outcome::Missing; algorithm_names.len()],
            attributes: BTreeMap::new(),
        };
        for ((cell, role), col) in record.iter().zip(&roles).zip(header.iter()) {
            let bad_cell = || IngestError::UnparseableCell {
                line,
                column: col.to_string(),
                value: cell.to_string(),
            };
            match role {
                ColumnRole::Id => row.instance_id = cell.to_string(),
                ColumnRole::Dataset => row.dataset_tag = cell.to_string(),
                ColumnRole::Attribute(name) => {
                    row.attributes.insert(name.clone(), cell.to_string());
                }
                ColumnRole::Feature(j) => {
                    if !cell.is_empty() {
                        row.features[*j] = cell.parse::<f64>().map_err(|_| bad_cell())?;
                    }
                }
                ColumnRole::Outcome(j) => {
                    row.outcomes[*j] = match cell {
                        "1" => Outcome::Good,
                        "0" => Outcome::Bad,
                        "" => Outcome::Missing,
                        _ => return Err(bad_cell()),
                    }
                }
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(IngestError::EmptyTable);
    }
    Ok(InstanceTable {
        feature_names,
        algorithm_names,
        rows,
    })
}

fn outcome_algorithm(spec: &OutcomeColumns, column: &str) -> Option<String> {
    match spec {
        OutcomeColumns::Prefix(p) => column.strip_prefix(p.as_str()).map(str::to_string),
        OutcomeColumns::Named(names) => names.iter().find(|n| *n == column).cloned(),
    }
}

/// Column used to group sub-program rows into one program row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GroupKey {
    Dataset,
    Attribute(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AggregationWarning {
    pub group: String,
    pub feature: FeatureName,
}

#[derive(Clone, Debug)]
pub struct Aggregated {
    pub table: InstanceTable,
    /// Groups where a feature had no measured value in any member row; the
    /// aggregated cell is left NaN.
    pub warnings: Vec<AggregationWarning>,
}

/// Collapses rows sharing a group key into one row whose features are the
/// arithmetic mean of the members' measured (non-NaN) values.
///
/// Groups appear in order of first occurrence; the group key becomes the new
/// `instance_id` and the dataset tag of the first member is kept.
pub fn aggregate_rows(table: &InstanceTable, key: &GroupKey) -> Result<Aggregated, IngestError> {
    let mut order: Vec<String> = Vec::new();
    let mut members: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, row) in table.rows.iter().enumerate() {
        let k = match key {
            GroupKey::Dataset => row.dataset_tag.clone(),
            GroupKey::Attribute(name) => row
                .attributes
                .get(name)
                .cloned()
                .ok_or_else(|| IngestError::MissingColumn(name.clone()))?,
        };
        members
            .entry(k.clone())
            .or_insert_with(|| {
                order.push(k);
                Vec::new()
            })
            .push(i);
    }

    let mut rows = Vec::with_capacity(order.len());
    let mut warnings = Vec::new();
    for group in order {
        let idx = &members[&group];
        let first = &table.rows[idx[0]];
        for (a, alg) in table.algorithm_names.iter().enumerate() {
            if idx.iter().any(|&i| table.rows[i].outcomes[a] != first.outcomes[a]) {
                return Err(IngestError::InconsistentOutcomes {
                    group,
                    algorithm: alg.clone(),
                });
            }
        }
        let mut features = Vec::with_capacity(table.feature_names.len());
        for (f, name) in table.feature_names.iter().enumerate() {
            let (sum, count) = idx
                .iter()
                .map(|&i| table.rows[i].features[f])
                .filter(|v| !v.is_nan())
                .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
            if count == 0 {
                warnings.push(AggregationWarning {
                    group: group.clone(),
                    feature: name.clone(),
                });
                features.push(f64::NAN);
            } else {
                features.push(sum / count as f64);
            }
        }
        let mut attributes = BTreeMap::new();
        if let GroupKey::Attribute(name) = key {
            attributes.insert(name.clone(), group.clone());
        }
        rows.push(InstanceRecord {
            instance_id: group,
            dataset_tag: first.dataset_tag.clone(),
            features,
            outcomes: first.outcomes.clone(),
            attributes,
        });
    }
    Ok(Aggregated {
        table: InstanceTable {
            feature_names: table.feature_names.clone(),
            algorithm_names: table.algorithm_names.clone(),
            rows,
        },
        warnings,
    })
}

/// Per-feature centering and scaling (population standard deviation).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    /// Retained features, in subset (name) order.
    pub features: Vec<FeatureName>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    /// Zero-variance features excluded from the standardized matrix.
    pub dropped_features: Vec<FeatureName>,
}

impl ScalingParams {
    /// Standardizes one raw value vector aligned with `self.features`.
    pub fn apply(&self, raw: &[f64]) -> Vec<f64> {
        raw.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(x, (m, s))| (x - m) / s)
            .collect()
    }
}

fn is_zero_variance(mean: f64, std: f64) -> bool {
    std <= 1e-12 * (1.0 + mean.abs())
}

/// Standardizes the subset's columns to zero mean and unit population
/// standard deviation. Returns the row-major matrix (rows aligned with the
/// table, columns aligned with `ScalingParams::features`).
pub fn standardize(
    table: &InstanceTable,
    subset: &FeatureSubset,
) -> Result<(Vec<Vec<f64>>, ScalingParams), crate::Error> {
    if table.len() < 2 {
        return Err(IngestError::TooFewRows {
            needed: 2,
            got: table.len(),
        }
        .into());
    }
    let indices = subset.indices_in(table)?;
    let n = table.len() as f64;
    let mut params = ScalingParams {
        features: Vec::new(),
        means: Vec::new(),
        stds: Vec::new(),
        dropped_features: Vec::new(),
    };
    let mut kept = Vec::new();
    for (name, &col) in subset.iter().zip(&indices) {
        let values = table.feature_column(col);
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let std = var.sqrt();
        if is_zero_variance(mean, std) {
            params.dropped_features.push(name.clone());
        } else {
            params.features.push(name.clone());
            params.means.push(mean);
            params.stds.push(std);
            kept.push(col);
        }
    }
    if kept.is_empty() {
        return Err(IngestError::AllFeaturesDropped.into());
    }
    let matrix = table
        .rows
        .iter()
        .map(|r| {
            let raw: Vec<f64> = kept.iter().map(|&c| r.features[c]).collect();
            params.apply(&raw)
        })
        .collect();
    Ok((matrix, params))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinMaxParams {
    pub min: f64,
    pub max: f64,
}

impl MinMaxParams {
    pub fn fit(values: &[f64]) -> Option<Self> {
        let min = values.iter().copied().reduce(f64::min)?;
        let max = values.iter().copied().reduce(f64::max)?;
        Some(Self { min, max })
    }

    /// Affine map of `[min, max]` onto `[0, 1]`; a constant range maps to 0.5.
    pub fn apply(&self, v: f64) -> f64 {
        if self.max > self.min {
            ((v - self.min) / (self.max - self.min)).clamp(0.0, 1.0)
        } else {
            0.5
        }
    }
}

pub fn minmax_normalize(values: &[f64]) -> Vec<f64> {
    match MinMaxParams::fit(values) {
        Some(p) => values.iter().map(|&v| p.apply(v)).collect(),
        None => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::snapshot_table;
    use proptest::prelude::*;
    use rand::Rng;

    const SNAPSHOT_CSV: &str = "\
Buggy software,wmc,dit,noc,cbo,Kali,Arja
Jackrabbit,9.37,0.78,0.23,12.51,1,0
Accumulo,11.94,0.81,0.22,13.23,1,0
Flink,8.43,0.75,0.31,10.79,1,1
Wicket,8.84,0.58,0.41,11.01,0,1
";

    fn snapshot_schema() -> ColumnSchema {
        ColumnSchema {
            id_column: "Buggy software".into(),
            dataset_column: None,
            outcomes: OutcomeColumns::Named(vec!["Kali".into(), "Arja".into()]),
            attribute_columns: vec![],
        }
    }

    #[test]
    fn parses_snapshot_rows() {
        let t = parse_instance_table(SNAPSHOT_CSV.as_bytes(), &snapshot_schema()).unwrap();
        let names: Vec<_> = t.feature_names.iter().map(|f| f.as_str()).collect();
        assert_eq!(names, ["wmc", "dit", "noc", "cbo"]);
        assert_eq!(t.algorithm_names, ["Kali", "Arja"]);
        let jr = &t.rows[0];
        assert_eq!(jr.instance_id, "Jackrabbit");
        assert_eq!(jr.features[0], 9.37);
        assert_eq!(jr.outcomes, [Outcome::Good, Outcome::Bad]);
        let mut expected = snapshot_table();
        for r in &mut expected.rows {
            r.dataset_tag.clear();
        }
        assert_eq!(t, expected);
        assert!(crate::validate_table(&t).is_empty());
    }

    #[test]
    fn default_schema_with_prefix_and_missing() {
        let csv = "instance_id,dataset,a,b,aprt:X,aprt:Y\n\
                   p1,Defects4J,1.5,2,1,\n\
                   p2,Bugs.jar,3,4,0,1\n";
        let t = parse_instance_table(csv.as_bytes(), &ColumnSchema::default()).unwrap();
        assert_eq!(t.algorithm_names, ["X", "Y"]);
        assert_eq!(t.rows[0].dataset_tag, "Defects4J");
        assert_eq!(t.rows[0].outcomes, [Outcome::Good, Outcome::Missing]);
        assert_eq!(t.rows[1].features, [3.0, 4.0]);
    }

    #[test]
    fn header_only_is_empty_table() {
        let err = parse_instance_table("instance_id,dataset,a,aprt:X\n".as_bytes(), &ColumnSchema::default())
            .unwrap_err();
        assert!(matches!(err, IngestError::EmptyTable));
    }

    #[test]
    fn unparseable_cell_reports_position() {
        let csv = "instance_id,dataset,a,aprt:X\np1,D,abc,1\n";
        match parse_instance_table(csv.as_bytes(), &ColumnSchema::default()).unwrap_err() {
            IngestError::UnparseableCell { line, column, value } => {
                assert_eq!((line, column.as_str(), value.as_str()), (2, "a", "abc"));
            }
            e => panic!("unexpected {e}"),
        }
        let csv = "instance_id,dataset,a,aprt:X\np1,D,1,yes\n";
        assert!(matches!(
            parse_instance_table(csv.as_bytes(), &ColumnSchema::default()),
            Err(IngestError::UnparseableCell { .. })
        ));
    }

    #[test]
    fn short_row_is_malformed() {
        let csv = "instance_id,dataset,a,aprt:X\np1,D,1,1\np2,D,1\n";
        assert!(matches!(
            parse_instance_table(csv.as_bytes(), &ColumnSchema::default()),
            Err(IngestError::MalformedCsv { line: 3, expected: 4, found: 3 })
        ));
    }

    #[test]
    fn missing_id_column() {
        let csv = "id,dataset,a,aprt:X\np1,D,1,1\n";
        assert!(matches!(
            parse_instance_table(csv.as_bytes(), &ColumnSchema::default()),
            Err(IngestError::MissingColumn(_))
        ));
    }

    fn class_table(rows: &[(&str, f64, u8)]) -> InstanceTable {
        InstanceTable {
            feature_names: vec![FeatureName::new("wmc").unwrap()],
            algorithm_names: vec!["A".into()],
            rows: rows
                .iter()
                .enumerate()
                .map(|(i, (prog, v, o))| InstanceRecord {
                    instance_id: format!("c{i}"),
                    dataset_tag: "D".into(),
                    features: vec![*v],
                    outcomes: vec![if *o == 1 { Outcome::Good } else { Outcome::Bad }],
                    attributes: [("program".to_string(), prog.to_string())].into(),
                })
                .collect(),
        }
    }

    #[test]
    fn aggregate_two_rows_mean() {
        let t = class_table(&[("p", 4.0, 1), ("p", 6.0, 1), ("q", 1.0, 0)]);
        let agg = aggregate_rows(&t, &GroupKey::Attribute("program".into())).unwrap();
        assert_eq!(agg.table.len(), 2);
        assert_eq!(agg.table.rows[0].instance_id, "p");
        assert_eq!(agg.table.rows[0].features, [5.0]);
        assert!(agg.warnings.is_empty());
    }

    #[test]
    fn aggregate_single_row_identity() {
        let t = class_table(&[("q", 1.25, 0)]);
        let agg = aggregate_rows(&t, &GroupKey::Attribute("program".into())).unwrap();
        assert_eq!(agg.table.rows[0].features, t.rows[0].features);
        assert_eq!(agg.table.rows[0].outcomes, t.rows[0].outcomes);
    }

    #[test]
    fn aggregate_conflicting_labels() {
        let t = class_table(&[("p", 4.0, 1), ("p", 6.0, 0)]);
        assert!(matches!(
            aggregate_rows(&t, &GroupKey::Attribute("program".into())),
            Err(IngestError::InconsistentOutcomes { .. })
        ));
    }

    #[test]
    fn aggregate_all_missing_warns() {
        let mut t = class_table(&[("p", 4.0, 1), ("p", 6.0, 1)]);
        t.rows[0].features[0] = f64::NAN;
        t.rows[1].features[0] = f64::NAN;
        let agg = aggregate_rows(&t, &GroupKey::Attribute("program".into())).unwrap();
        assert_eq!(agg.warnings.len(), 1);
        assert!(agg.table.rows[0].features[0].is_nan());
    }

    /// Pairwise summation over the sorted values, independent of the
    /// left-to-right fold used by the implementation.
    fn pairwise_sum(v: &[f64]) -> f64 {
        match v.len() {
            0 => 0.0,
            1 => v[0],
            n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
        }
    }

    #[test]
    fn aggregate_seven_rows_matches_pairwise_oracle() {
        let mut rng = crate::seed::rng(11);
        let vals: Vec<f64> = (0..7).map(|_| rng.gen_range(-50.0..50.0)).collect();
        let rows: Vec<_> = vals.iter().map(|&v| ("g", v, 1)).collect();
        let t = class_table(&rows);
        let agg = aggregate_rows(&t, &GroupKey::Attribute("program".into())).unwrap();
        let mut sorted = vals.clone();
        sorted.sort_by(f64::total_cmp);
        let oracle = pairwise_sum(&sorted) / 7.0;
        assert!((agg.table.rows[0].features[0] - oracle).abs() < 1e-12);
    }

    fn single_column(values: &[f64]) -> InstanceTable {
        InstanceTable {
            feature_names: vec![FeatureName::new("x").unwrap()],
            algorithm_names: vec![],
            rows: values
                .iter()
                .enumerate()
                .map(|(i, v)| InstanceRecord {
                    instance_id: i.to_string(),
                    dataset_tag: String::new(),
                    features: vec![*v],
                    outcomes: vec![],
                    attributes: BTreeMap::new(),
                })
                .collect(),
        }
    }

    #[test]
    fn standardize_one_two_three() {
        let t = single_column(&[1.0, 2.0, 3.0]);
        let (m, p) = standardize(&t, &FeatureSubset::from_names(&["x"]).unwrap()).unwrap();
        // population std of {1,2,3} is sqrt(2/3); (3-2)/sqrt(2/3) = 1.224744871391589
        let expected = [-1.224744871391589, 0.0, 1.224744871391589];
        for (row, e) in m.iter().zip(expected) {
            assert!((row[0] - e).abs() < 1e-12);
        }
        assert_eq!(p.means, [2.0]);
    }

    #[test]
    fn constant_column_dropped() {
        let mut t = single_column(&[5.0, 5.0, 5.0]);
        assert!(matches!(
            standardize(&t, &FeatureSubset::from_names(&["x"]).unwrap()),
            Err(crate::Error::Ingest(IngestError::AllFeaturesDropped))
        ));
        t.feature_names.push(FeatureName::new("y").unwrap());
        for (i, r) in t.rows.iter_mut().enumerate() {
            r.features.push(i as f64);
        }
        let (m, p) = standardize(&t, &FeatureSubset::from_names(&["x", "y"]).unwrap()).unwrap();
        assert_eq!(p.dropped_features, [FeatureName::new("x").unwrap()]);
        assert_eq!(p.features, [FeatureName::new("y").unwrap()]);
        assert_eq!(m[0].len(), 1);
    }

    #[test]
    fn minmax_examples() {
        assert_eq!(minmax_normalize(&[2.0, 4.0, 6.0]), [0.0, 0.5, 1.0]);
        assert_eq!(minmax_normalize(&[7.0]), [0.5]);
        assert!(minmax_normalize(&[]).is_empty());
    }

    #[test]
    fn minmax_random_hundred_preserves_ranks() {
        let mut rng = crate::seed::rng(3);
        let v: Vec<f64> = (0..100).map(|_| rng.gen_range(-1e3..1e3)).collect();
        let out = minmax_normalize(&v);
        assert_eq!(out.iter().copied().reduce(f64::min), Some(0.0));
        assert_eq!(out.iter().copied().reduce(f64::max), Some(1.0));
        let rank = |x: &[f64]| {
            let mut idx: Vec<usize> = (0..x.len()).collect();
            idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
            idx
        };
        assert_eq!(rank(&v), rank(&out));
    }

    proptest! {
        #[test]
        fn standardize_is_idempotent(values in prop::collection::vec(-1e3f64..1e3, 3..40)) {
            let t = single_column(&values);
            let subset = FeatureSubset::from_names(&["x"]).unwrap();
            if let Ok((once, _)) = standardize(&t, &subset) {
                let t2 = single_column(&once.iter().map(|r| r[0]).collect::<Vec<_>>());
                let (twice, _) = standardize(&t2, &subset).unwrap();
                for (a, b) in once.iter().zip(&twice) {
                    prop_assert!((a[0] - b[0]).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn minmax_preserves_weak_order(values in prop::collection::vec(-1e6f64..1e6, 1..50)) {
            let out = minmax_normalize(&values);
            for i in 0..values.len() {
                for j in 0..values.len() {
                    if values[i] <= values[j] {
                        prop_assert!(out[i] <= out[j]);
                    }
                }
            }
        }

        #[test]
        fn aggregate_row_count_is_group_count(groups in prop::collection::vec(0u8..6, 1..30)) {
            let rows: Vec<(String, f64, u8)> = groups.iter().map(|g| (format!("g{g}"), *g as f64, g % 2)).collect();
            let borrowed: Vec<(&str, f64, u8)> = rows.iter().map(|(a, b, c)| (a.as_str(), *b, *c)).collect();
            let t = class_table(&borrowed);
            let agg = aggregate_rows(&t, &GroupKey::Attribute("program".into())).unwrap();
            let distinct: std::collections::HashSet<_> = groups.iter().collect();
            prop_assert_eq!(agg.table.len(), distinct.len());
        }
    }
}
