//! Flat `key=value` pipeline configuration with dotted keys.
//!
//! ```text
//! # comments and blank lines are ignored
//! input=data/bugs.csv
//! output=out
//! seed=42
//! repeats=10
//! ga.population=50
//! svm.kernel=rbf
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::classify::{Gamma, KernelKind, SvmConfig};
use crate::feature_select::GaConfig;
use crate::ingest::{ColumnSchema, GroupKey, OutcomeColumns};
use crate::report::{Palette, PlotSpec};
use crate::seed;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("unknown configuration key {0:?}")]
    UnknownKey(String),
    #[error("invalid value {value:?} for {key}")]
    InvalidValue { key: String, value: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub output: PathBuf,
    pub schema: ColumnSchema,
    /// Aggregate sub-program rows by this key before analysis.
    pub group_key: Option<GroupKey>,
    pub ga: GaConfig,
    pub svm: SvmConfig,
    /// Folds for the selector's cross-validated metrics.
    pub selector_folds: usize,
    pub plot: PlotSpec,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            input: PathBuf::new(),
            output: PathBuf::from("eapr-out"),
            schema: ColumnSchema::default(),
            group_key: None,
            ga: GaConfig::default(),
            svm: SvmConfig::default(),
            selector_folds: 5,
            plot: PlotSpec::default(),
            repeats: 1,
            seed: 0,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
    })
}

fn list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

impl PipelineConfig {
    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    /// Sets one dotted key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let invalid = || ConfigError::InvalidValue {
            key: key.to_string(),
            value: value.to_string(),
        };
        match key {
            "input" => self.input = PathBuf::from(value),
            "output" => self.output = PathBuf::from(value),
            "seed" => self.seed = parse(key, value)?,
            "repeats" => {
                self.repeats = parse(key, value)?;
                if self.repeats == 0 {
                    return Err(invalid());
                }
            }
            "ingest.id_column" => self.schema.id_column = value.to_string(),
            "ingest.dataset_column" => {
                self.schema.dataset_column = (!value.is_empty()).then(|| value.to_string())
            }
            "ingest.outcome_prefix" => self.schema.outcomes = OutcomeColumns::Prefix(value.to_string()),
            "ingest.outcome_columns" => self.schema.outcomes = OutcomeColumns::Named(list(value)),
            "ingest.attribute_columns" => self.schema.attribute_columns = list(value),
            "ingest.group_key" => {
                self.group_key = match value {
                    "" => None,
                    "dataset" => Some(GroupKey::Dataset),
                    col => {
                        if !self.schema.attribute_columns.iter().any(|a| a == col) {
                            self.schema.attribute_columns.push(col.to_string());
                        }
                        Some(GroupKey::Attribute(col.to_string()))
                    }
                }
            }
            "ga.population" => self.ga.population_size = parse(key, value)?,
            "ga.generations" => self.ga.generations = parse(key, value)?,
            "ga.crossover" => self.ga.crossover_rate = parse(key, value)?,
            "ga.mutation" => {
                self.ga.mutation_rate = match value {
                    "auto" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "ga.tournament" => self.ga.tournament_size = parse(key, value)?,
            "ga.min_k" => self.ga.min_k = parse(key, value)?,
            "ga.max_k" => self.ga.max_k = parse(key, value)?,
            "ga.cv_folds" => self.ga.cv_folds = parse(key, value)?,
            "svm.kernel" => {
                self.svm.kernel = match value {
                    "linear" => KernelKind::Linear,
                    "rbf" => KernelKind::Rbf,
                    _ => return Err(invalid()),
                }
            }
            "svm.c" => self.svm.c = parse(key, value)?,
            "svm.gamma" => {
                self.svm.gamma = match value {
                    "median" | "median-heuristic" => Gamma::MedianHeuristic,
                    v => Gamma::Value(parse(key, v)?),
                }
            }
            "svm.tolerance" => self.svm.tolerance = parse(key, value)?,
            "svm.max_passes" => self.svm.max_passes = parse(key, value)?,
            "svm.cv_folds" => self.selector_folds = parse(key, value)?,
            "plot.width" => self.plot.width = parse(key, value)?,
            "plot.height" => self.plot.height = parse(key, value)?,
            "plot.margin" => self.plot.margin = parse(key, value)?,
            "plot.radius" => self.plot.point_radius = parse(key, value)?,
            "plot.palette" => {
                self.plot.palette = match value {
                    "colorblind-safe" | "colorblind_safe" => Palette::ColorblindSafe,
                    _ => return Err(invalid()),
                }
            }
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// GA settings for one feature-learning repeat, seeded from the global
    /// seed; `max_k` is capped at the number of available features.
    pub fn ga_for_repeat(&self, repeat: usize, n_features: usize) -> GaConfig {
        GaConfig {
            seed: seed::derive(self.seed, &format!("select-features/{repeat}")),
            max_k: self.ga.max_k.min(n_features),
            ..self.ga.clone()
        }
    }

    pub fn svm_seeded(&self) -> SvmConfig {
        SvmConfig {
            seed: seed::derive(self.seed, "classify"),
            ..self.svm.clone()
        }
    }

    /// Effective settings as sorted key/value pairs, paths excluded, for
    /// report provenance.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("seed", self.seed.to_string());
        put("repeats", self.repeats.to_string());
        put("ingest.id_column", self.schema.id_column.clone());
        put("ingest.dataset_column", self.schema.dataset_column.clone().unwrap_or_default());
        match &self.schema.outcomes {
            OutcomeColumns::Prefix(p) => put("ingest.outcome_prefix", p.clone()),
            OutcomeColumns::Named(n) => put("ingest.outcome_columns", n.join(",")),
        }
        put("ingest.attribute_columns", self.schema.attribute_columns.join(","));
        put(
            "ingest.group_key",
            match &self.group_key {
                None => String::new(),
                Some(GroupKey::Dataset) => "dataset".into(),
                Some(GroupKey::Attribute(a)) => a.clone(),
            },
        );
        put("ga.population", self.ga.population_size.to_string());
        put("ga.generations", self.ga.generations.to_string());
        put("ga.crossover", self.ga.crossover_rate.to_string());
        put(
            "ga.mutation",
            self.ga.mutation_rate.map_or("auto".into(), |m| m.to_string()),
        );
        put("ga.tournament", self.ga.tournament_size.to_string());
        put("ga.min_k", self.ga.min_k.to_string());
        put("ga.max_k", self.ga.max_k.to_string());
        put("ga.cv_folds", self.ga.cv_folds.to_string());
        put(
            "svm.kernel",
            match self.svm.kernel {
                KernelKind::Linear => "linear".into(),
                KernelKind::Rbf => "rbf".into(),
            },
        );
        put("svm.c", self.svm.c.to_string());
        put(
            "svm.gamma",
            match self.svm.gamma {
                Gamma::MedianHeuristic => "median".into(),
                Gamma::Value(g) => g.to_string(),
            },
        );
        put("svm.tolerance", self.svm.tolerance.to_string());
        put("svm.max_passes", self.svm.max_passes.to_string());
        put("svm.cv_folds", self.selector_folds.to_string());
        put("plot.width", self.plot.width.to_string());
        put("plot.height", self.plot.height.to_string());
        put("plot.margin", self.plot.margin.to_string());
        put("plot.radius", self.plot.point_radius.to_string());
        put("plot.palette", "colorblind-safe".into());
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_dotted_keys() {
        let cfg = PipelineConfig::parse_str(
            "# demo\ninput = in.csv\n\nseed=7\nga.population=20\nga.mutation=0.05\nsvm.kernel=linear\nsvm.gamma=0.5\ningest.group_key=program\n",
        )
        .unwrap();
        assert_eq!(cfg.input, PathBuf::from("in.csv"));
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.ga.population_size, 20);
        assert_eq!(cfg.ga.mutation_rate, Some(0.05));
        assert_eq!(cfg.svm.kernel, KernelKind::Linear);
        assert_eq!(cfg.svm.gamma, Gamma::Value(0.5));
        assert_eq!(cfg.group_key, Some(GroupKey::Attribute("program".into())));
        assert_eq!(cfg.schema.attribute_columns, ["program"]);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(PipelineConfig::parse_str("nonsense"), Err(ConfigError::Syntax { line: 1 })));
        assert!(matches!(PipelineConfig::parse_str("ga.bogus=1"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(PipelineConfig::parse_str("repeats=0"), Err(ConfigError::InvalidValue { .. })));
        assert!(matches!(PipelineConfig::parse_str("svm.kernel=poly"), Err(ConfigError::InvalidValue { .. })));
    }

    #[test]
    fn echo_round_trips_through_parser() {
        let cfg = PipelineConfig::parse_str("seed=3\nga.max_k=6\nsvm.c=2.5\n").unwrap();
        let text: String = cfg.echo().iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        let back = PipelineConfig::parse_str(&text).unwrap();
        assert_eq!(back.echo(), cfg.echo());
        assert!(!cfg.echo().contains_key("input"));
    }

    #[test]
    fn repeat_seeds_differ() {
        let cfg = PipelineConfig::default();
        assert_ne!(cfg.ga_for_repeat(0, 20).seed, cfg.ga_for_repeat(1, 20).seed);
        assert_eq!(cfg.ga_for_repeat(0, 3).max_k, 3);
    }
}
