//! End-to-end orchestration. Every stage reads its predecessor's output from
//! the output directory and writes its own, so a staged run and a full
//! pipeline run produce the same files.
//!
//! | stage             | reads                                  | writes                              |
//! |-------------------|----------------------------------------|-------------------------------------|
//! | `ingest`          | input CSV                              | `table.json`                        |
//! | `select-features` | `table.json`                           | `features.json`                     |
//! | `project`         | `table.json`, `features.json`          | `pca_model.json`, `coordinates.json`|
//! | `footprint`       | `table.json`, `coordinates.json`       | `footprints.json`                   |
//! | `classify`        | `table.json`, `coordinates.json`       | `models.json`, `svm_*.json`, `metrics.json` |
//! | `plot`            | all of the above                       | `*.svg`, `report.json`              |

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::classify::{
    cross_validate, predict, select_aprt, train_or_constant, BinaryMetrics, SelectorMetrics, SvmModel,
};
use crate::config::PipelineConfig;
use crate::feature_select::{run_ga, SelectError, SelectionResult};
use crate::footprint::{compute_footprint, convex_hull, footprint_overlap, polygon_area, Footprint};
use crate::ingest::{aggregate_rows, parse_instance_table, standardize, MinMaxParams};
use crate::model::{Coordinates2D, FeatureName, FeatureSubset, InstanceTable};
use crate::project::{explained_variance, fit_pca, transform, PcaModel};
use crate::report::{
    render_dataset_svg, render_feature_svg, render_footprint_svg, write_report, AnalysisReport,
    FeatureLoading, FootprintSummary, InstanceCoordinate, Provenance, SelectionSummary, SelectorSummary,
};
use crate::{seed, Error};

pub const TABLE_FILE: &str = "table.json";
pub const FEATURES_FILE: &str = "features.json";
pub const PCA_FILE: &str = "pca_model.json";
pub const COORDINATES_FILE: &str = "coordinates.json";
pub const FOOTPRINTS_FILE: &str = "footprints.json";
pub const MODELS_FILE: &str = "models.json";
pub const METRICS_FILE: &str = "metrics.json";
pub const REPORT_FILE: &str = "report.json";
pub const DATASETS_SVG: &str = "datasets.svg";

/// Failure of a CLI-level operation, carrying its machine-parsable code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PipelineError {
    Parse(String),
    Degenerate(String),
    Io(String),
    /// A stage ran before the named prerequisite stage.
    Stage(String),
    Model(String),
}

impl PipelineError {
    pub fn code(&self) -> &'static str {
        match self {
            PipelineError::Parse(_) => "E_PARSE",
            PipelineError::Degenerate(_) => "E_DEGENERATE",
            PipelineError::Io(_) => "E_IO",
            PipelineError::Stage(_) => "E_STAGE",
            PipelineError::Model(_) => "E_MODEL",
        }
    }

    fn detail(&self) -> &str {
        match self {
            PipelineError::Parse(s)
            | PipelineError::Degenerate(s)
            | PipelineError::Io(s)
            | PipelineError::Stage(s)
            | PipelineError::Model(s) => s,
        }
    }
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // single line: "<CODE> <detail>"
        write!(f, "{} {}", self.code(), self.detail().replace('\n', " "))
    }
}

impl std::error::Error for PipelineError {}

impl From<Error> for PipelineError {
    fn from(e: Error) -> Self {
        use crate::ingest::IngestError;
        match e {
            Error::Ingest(IngestError::AllFeaturesDropped) | Error::Select(SelectError::DegenerateLabels) => {
                PipelineError::Degenerate(e.to_string())
            }
            Error::Ingest(_) | Error::InvalidInput(_) => PipelineError::Parse(e.to_string()),
            Error::Report(crate::report::ReportError::Io(_)) => PipelineError::Io(e.to_string()),
            _ => PipelineError::Degenerate(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, PipelineError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    SelectFeatures,
    Project,
    Footprint,
    Classify,
    Plot,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Ingest,
        Stage::SelectFeatures,
        Stage::Project,
        Stage::Footprint,
        Stage::Classify,
        Stage::Plot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::SelectFeatures => "select-features",
            Stage::Project => "project",
            Stage::Footprint => "footprint",
            Stage::Classify => "classify",
            Stage::Plot => "plot",
        }
    }

    /// Files this stage needs, each with the stage that produces it, nearest
    /// predecessor first.
    fn prerequisites(self) -> &'static [(&'static str, Stage)] {
        match self {
            Stage::Ingest => &[],
            Stage::SelectFeatures => &[(TABLE_FILE, Stage::Ingest)],
            Stage::Project => &[(FEATURES_FILE, Stage::SelectFeatures), (TABLE_FILE, Stage::Ingest)],
            Stage::Footprint | Stage::Classify => &[
                (COORDINATES_FILE, Stage::Project),
                (FEATURES_FILE, Stage::SelectFeatures),
                (TABLE_FILE, Stage::Ingest),
            ],
            Stage::Plot => &[
                (METRICS_FILE, Stage::Classify),
                (FOOTPRINTS_FILE, Stage::Footprint),
                (COORDINATES_FILE, Stage::Project),
                (FEATURES_FILE, Stage::SelectFeatures),
                (TABLE_FILE, Stage::Ingest),
            ],
        }
    }
}

impl FromStr for Stage {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| PipelineError::Stage(format!("unknown stage {s}")))
    }
}

/// Output of the feature-learning stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureSelection {
    pub subset: FeatureSubset,
    pub frequency: BTreeMap<String, f64>,
    pub repeats: Vec<SelectionResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordinatesFile {
    pub instance_ids: Vec<String>,
    pub coordinates: Coordinates2D,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FootprintsFile {
    pub space_area: f64,
    pub footprints: Vec<Footprint>,
    pub overlap: BTreeMap<String, BTreeMap<String, Option<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsFile {
    pub cross_validated: SelectorMetrics,
    pub training: SelectorMetrics,
}

fn io_err(path: &Path, e: impl fmt::Display) -> PipelineError {
    PipelineError::Io(format!("{}: {e}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| PipelineError::Parse(format!("{}: {e}", path.display())))
}

/// File-name-safe rendering of an algorithm or feature name.
pub fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect()
}

pub fn footprint_svg_name(algorithm: &str) -> String {
    format!("footprint_{}.svg", file_stem(algorithm))
}

pub fn feature_svg_name(feature: &str) -> String {
    format!("feature_{}.svg", file_stem(feature))
}

pub fn model_file_name(algorithm: &str) -> String {
    format!("svm_{}.json", file_stem(algorithm))
}

/// Runs every stage in order.
pub fn run_pipeline(config: &PipelineConfig) -> Result<()> {
    for stage in Stage::ALL {
        run_stage(stage, config)?;
    }
    Ok(())
}

/// Runs exactly one stage after checking its prerequisites exist on disk.
pub fn run_stage(stage: Stage, config: &PipelineConfig) -> Result<()> {
    let out = &config.output;
    for (file, producer) in stage.prerequisites() {
        if !out.join(file).is_file() {
            return Err(PipelineError::Stage(producer.name().to_string()));
        }
    }
    std::fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    match stage {
        Stage::Ingest => stage_ingest(config),
        Stage::SelectFeatures => stage_select_features(config),
        Stage::Project => stage_project(config),
        Stage::Footprint => stage_footprint(config),
        Stage::Classify => stage_classify(config),
        Stage::Plot => stage_plot(config),
    }
}

fn read_input(config: &PipelineConfig) -> Result<Vec<u8>> {
    std::fs::read(&config.input).map_err(|e| io_err(&config.input, e))
}

fn stage_ingest(config: &PipelineConfig) -> Result<()> {
    let bytes = read_input(config)?;
    let mut table =
        parse_instance_table(bytes.as_slice(), &config.schema).map_err(|e| PipelineError::Parse(e.to_string()))?;
    if let Some(key) = &config.group_key {
        let agg = aggregate_rows(&table, key).map_err(|e| PipelineError::Parse(e.to_string()))?;
        for w in &agg.warnings {
            eprintln!("warning: group {:?} has no measured value for {}", w.group, w.feature);
        }
        table = agg.table;
    }
    table.ensure_valid()?;
    write_json(&config.output.join(TABLE_FILE), &table)
}

/// Frequency vote over repeat winners: features chosen in more than half of
/// the repeats, topped up or trimmed by frequency rank (then name) to fit
/// `[min_k, max_k]`.
pub fn vote_subset(
    winners: &[FeatureSubset],
    min_k: usize,
    max_k: usize,
) -> (FeatureSubset, BTreeMap<String, f64>) {
    let mut counts: BTreeMap<FeatureName, usize> = BTreeMap::new();
    for w in winners {
        for f in w.iter() {
            *counts.entry(f.clone()).or_default() += 1;
        }
    }
    let total = winners.len().max(1);
    let mut ranked: Vec<(&FeatureName, usize)> = counts.iter().map(|(f, c)| (f, *c)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let majority = ranked.iter().filter(|(_, c)| 2 * c > total).count();
    let k = majority.clamp(min_k, max_k).min(ranked.len());
    let subset = FeatureSubset::new(ranked[..k].iter().map(|(f, _)| (*f).clone())).expect("winners are non-empty");
    let freq = counts
        .iter()
        .map(|(f, c)| (f.to_string(), *c as f64 / total as f64))
        .collect();
    (subset, freq)
}

fn stage_select_features(config: &PipelineConfig) -> Result<()> {
    let table: InstanceTable = read_json(&config.output.join(TABLE_FILE))?;
    let n = table.feature_names.len();
    if n < config.ga.min_k {
        return Err(PipelineError::Degenerate(format!(
            "{n} features available, at least {} required",
            config.ga.min_k
        )));
    }
    let mut repeats = Vec::with_capacity(config.repeats);
    for r in 0..config.repeats {
        let ga = config.ga_for_repeat(r, n);
        repeats.push(run_ga(&table, &ga).map_err(|e| match e {
            SelectError::InvalidConfig(m) => PipelineError::Parse(m),
            other => PipelineError::Degenerate(other.to_string()),
        })?);
    }
    let winners: Vec<FeatureSubset> = repeats.iter().map(|r| r.best.clone()).collect();
    let (subset, frequency) = vote_subset(&winners, config.ga.min_k, config.ga.max_k.min(n));
    write_json(
        &config.output.join(FEATURES_FILE),
        &FeatureSelection {
            subset,
            frequency,
            repeats,
        },
    )
}

fn stage_project(config: &PipelineConfig) -> Result<()> {
    let table: InstanceTable = read_json(&config.output.join(TABLE_FILE))?;
    let selection: FeatureSelection = read_json(&config.output.join(FEATURES_FILE))?;
    let (matrix, scaling) = standardize(&table, &selection.subset)?;
    let model = fit_pca(&matrix, scaling).map_err(|e| PipelineError::Degenerate(e.to_string()))?;
    let coordinates =
        transform(&model, &table, &selection.subset).map_err(|e| PipelineError::Degenerate(e.to_string()))?;
    write_json(&config.output.join(PCA_FILE), &model)?;
    write_json(
        &config.output.join(COORDINATES_FILE),
        &CoordinatesFile {
            instance_ids: table.rows.iter().map(|r| r.instance_id.clone()).collect(),
            coordinates,
        },
    )
}

fn load_coordinates(config: &PipelineConfig, table: &InstanceTable) -> Result<Coordinates2D> {
    let file: CoordinatesFile = read_json(&config.output.join(COORDINATES_FILE))?;
    let aligned = file.instance_ids.len() == table.len()
        && file.instance_ids.iter().zip(&table.rows).all(|(a, r)| *a == r.instance_id);
    if !aligned {
        return Err(PipelineError::Stage("project".into()));
    }
    Ok(file.coordinates)
}

fn stage_footprint(config: &PipelineConfig) -> Result<()> {
    let table: InstanceTable = read_json(&config.output.join(TABLE_FILE))?;
    let coords = load_coordinates(config, &table)?;
    let mut footprints = Vec::with_capacity(table.algorithm_names.len());
    for (a, name) in table.algorithm_names.iter().enumerate() {
        footprints.push(
            compute_footprint(&coords, &table.outcomes_of(a), name)
                .map_err(|e| PipelineError::Degenerate(e.to_string()))?,
        );
    }
    footprints.sort_by(|a, b| a.algorithm.cmp(&b.algorithm));
    let mut overlap = BTreeMap::new();
    for a in &footprints {
        let row = footprints
            .iter()
            .map(|b| (b.algorithm.clone(), footprint_overlap(a, b).ok()))
            .collect();
        overlap.insert(a.algorithm.clone(), row);
    }
    write_json(
        &config.output.join(FOOTPRINTS_FILE),
        &FootprintsFile {
            space_area: polygon_area(&convex_hull(&coords.points)),
            footprints,
            overlap,
        },
    )
}

fn stage_classify(config: &PipelineConfig) -> Result<()> {
    let table: InstanceTable = read_json(&config.output.join(TABLE_FILE))?;
    let coords = load_coordinates(config, &table)?;
    let svm = config.svm_seeded();
    let mut index = BTreeMap::new();
    let mut cv = BTreeMap::new();
    let mut training = BTreeMap::new();
    for (a, name) in table.algorithm_names.iter().enumerate() {
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for (p, o) in coords.points.iter().zip(table.outcomes_of(a)) {
            if let Some(s) = o.sign() {
                x.push(*p);
                y.push(s);
            }
        }
        // an algorithm with no labelled instance gets a constant BAD model
        let model = if y.is_empty() {
            SvmModel::constant(-1.0, svm.clone())
        } else {
            train_or_constant(&x, &y, &svm).map_err(|e| PipelineError::Degenerate(e.to_string()))?
        };
        let fitted: Vec<f64> = x.iter().map(|p| predict(&model, *p).0).collect();
        training.insert(name.clone(), BinaryMetrics::from_predictions(&y, &fitted));
        let folds = config.selector_folds.min(y.len());
        let held_out = if folds >= 2 {
            cross_validate(&x, &y, folds, &svm).map_err(|e| PipelineError::Degenerate(e.to_string()))?
        } else {
            BinaryMetrics::from_predictions(&y, &fitted)
        };
        cv.insert(name.clone(), held_out);
        let file = model_file_name(name);
        write_json(&config.output.join(&file), &model)?;
        index.insert(name.clone(), file);
    }
    write_json(&config.output.join(MODELS_FILE), &index)?;
    write_json(
        &config.output.join(METRICS_FILE),
        &MetricsFile {
            cross_validated: SelectorMetrics::aggregate(cv),
            training: SelectorMetrics::aggregate(training),
        },
    )
}

fn stage_plot(config: &PipelineConfig) -> Result<()> {
    let out = &config.output;
    let table: InstanceTable = read_json(&out.join(TABLE_FILE))?;
    let selection: FeatureSelection = read_json(&out.join(FEATURES_FILE))?;
    let model: PcaModel = read_json(&out.join(PCA_FILE))?;
    let coords = load_coordinates(config, &table)?;
    let fps: FootprintsFile = read_json(&out.join(FOOTPRINTS_FILE))?;
    let metrics: MetricsFile = read_json(&out.join(METRICS_FILE))?;
    let render = |e: crate::report::ReportError| PipelineError::Degenerate(e.to_string());
    let write = |name: &str, text: String| -> Result<String> {
        let path = out.join(name);
        std::fs::write(&path, text).map_err(|e| io_err(&path, e))?;
        Ok(name.to_string())
    };

    let mut artifacts = Vec::new();
    for f in &fps.footprints {
        let a = table.algorithm_index(&f.algorithm).expect("footprints come from the table");
        let svg = render_footprint_svg(&coords, &table.outcomes_of(a), f, &config.plot).map_err(render)?;
        artifacts.push(write(&footprint_svg_name(&f.algorithm), svg)?);
    }
    for name in &model.scaling.features {
        let column = table.feature_column(table.feature_index(name).expect("model features come from the table"));
        let params = MinMaxParams::fit(&column).expect("table is non-empty");
        let values: Vec<f64> = column.iter().map(|v| params.apply(*v)).collect();
        let svg = render_feature_svg(&coords, &values, name.as_str(), (params.min, params.max), &config.plot)
            .map_err(render)?;
        artifacts.push(write(&feature_svg_name(name.as_str()), svg)?);
    }
    let tags: Vec<String> = table.rows.iter().map(|r| r.dataset_tag.clone()).collect();
    artifacts.push(write(DATASETS_SVG, render_dataset_svg(&coords, &tags, &config.plot).map_err(render)?)?);
    artifacts.push(REPORT_FILE.to_string());
    artifacts.sort();

    let input_digest = seed::digest_hex(&read_input(config)?);
    let report = AnalysisReport {
        algorithms: table.algorithm_names.clone(),
        features: model
            .scaling
            .features
            .iter()
            .zip(&model.loadings)
            .map(|(f, l)| FeatureLoading {
                name: f.to_string(),
                z1: l[0],
                z2: l[1],
            })
            .collect(),
        dropped_features: model.scaling.dropped_features.iter().map(|f| f.to_string()).collect(),
        eigenvalues: model.eigenvalues.clone(),
        explained_variance: explained_variance(&model),
        explained_variance_2d: model.explained_variance_2d,
        feature_selection: SelectionSummary {
            repeats: selection.repeats.len(),
            frequency: selection.frequency.clone(),
            repeat_fitness: selection.repeats.iter().map(|r| r.best_fitness.mean_cv_accuracy).collect(),
        },
        space_area: fps.space_area,
        footprints: fps
            .footprints
            .iter()
            .map(|f| {
                let (g, n) = f.normalized_areas(fps.space_area);
                FootprintSummary {
                    algorithm: f.algorithm.clone(),
                    area_good: f.area_good,
                    area_net: f.area_net,
                    area_good_normalized: g,
                    area_net_normalized: n,
                    purity: f.purity,
                    density: f.density,
                    good_count: f.good_count,
                    bad_count: f.bad_count,
                    degenerate: f.degenerate,
                }
            })
            .collect(),
        overlap: fps.overlap.clone(),
        selector: SelectorSummary {
            cross_validated: metrics.cross_validated,
            training: metrics.training,
        },
        coordinates: table
            .rows
            .iter()
            .zip(&coords.points)
            .map(|(r, p)| InstanceCoordinate {
                instance_id: r.instance_id.clone(),
                dataset: r.dataset_tag.clone(),
                z1: p[0],
                z2: p[1],
            })
            .collect(),
        artifacts,
        provenance: Provenance {
            config: config.echo(),
            seed: config.seed,
            input_digest,
        },
    };
    write_report(&report, &out.join(REPORT_FILE)).map_err(|e| match e {
        crate::report::ReportError::Io(e) => io_err(&out.join(REPORT_FILE), e),
        other => PipelineError::Degenerate(other.to_string()),
    })
}

/// Projection and per-algorithm models loaded from an output directory.
pub struct Selector {
    pub pca: PcaModel,
    pub models: BTreeMap<String, SvmModel>,
}

impl Selector {
    pub fn load(dir: &Path) -> Result<Self> {
        let model_err = |e: PipelineError| PipelineError::Model(e.detail().to_string());
        let pca: PcaModel = read_json(&dir.join(PCA_FILE)).map_err(model_err)?;
        let index: BTreeMap<String, String> = read_json(&dir.join(MODELS_FILE)).map_err(model_err)?;
        if index.is_empty() {
            return Err(PipelineError::Model("no algorithm models".into()));
        }
        let mut models = BTreeMap::new();
        for (alg, file) in index {
            let path: PathBuf = dir.join(&file);
            models.insert(alg, read_json(&path).map_err(model_err)?);
        }
        Ok(Self { pca, models })
    }

    /// Ranked `(algorithm, decision value)` for a named raw feature vector.
    pub fn rank(&self, features: &[(String, f64)]) -> Result<Vec<(String, f64)>> {
        let point = self
            .pca
            .project_named(features)
            .map_err(|e| PipelineError::Model(e.to_string()))?;
        Ok(select_aprt(&self.models, point))
    }
}

/// Reads a feature vector as two CSV lines: feature names, then values.
pub fn parse_feature_vector<R: Read>(mut input: R) -> Result<Vec<(String, f64)>> {
    let mut text = String::new();
    input
        .read_to_string(&mut text)
        .map_err(|e| PipelineError::Io(format!("stdin: {e}")))?;
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let (names, values) = match (lines.next(), lines.next()) {
        (Some(n), Some(v)) => (n, v),
        _ => return Err(PipelineError::Parse("expected a header line and a value line".into())),
    };
    let names: Vec<&str> = names.split(',').map(str::trim).collect();
    let values: Vec<&str> = values.split(',').map(str::trim).collect();
    if names.len() != values.len() {
        return Err(PipelineError::Parse("header and value line differ in length".into()));
    }
    names
        .into_iter()
        .zip(values)
        .map(|(n, v)| {
            v.parse::<f64>()
                .map(|x| (n.to_string(), x))
                .map_err(|_| PipelineError::Parse(format!("cannot parse {v:?} for {n}")))
        })
        .collect()
}

/// `rank,algorithm,decision_value` lines, rank 1 first.
pub fn format_ranking(ranking: &[(String, f64)]) -> String {
    ranking
        .iter()
        .enumerate()
        .map(|(i, (alg, v))| format!("{},{},{v}\n", i + 1, alg))
        .collect()
}

/// The `select` command: load models from `dir`, rank algorithms for the
/// feature vector read from `input`.
pub fn cmd_select<R: Read>(dir: &Path, input: R) -> Result<String> {
    let features = parse_feature_vector(input)?;
    let selector = Selector::load(dir)?;
    Ok(format_ranking(&selector.rank(&features)?))
}
