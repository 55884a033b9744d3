//! Per-algorithm binary SVMs over the 2D instance space.
//!
//! Training uses sequential minimal optimization. Each step updates the pair
//! of multipliers with the largest error gap `|E1 - E2|` among KKT-violating
//! pairs; if that pair cannot make progress a partner is drawn from a seeded
//! random order instead. Training stops once no pair violates the KKT
//! conditions by more than the configured tolerance.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::seed;

#[derive(Debug, thiserror::Error)]
pub enum ClassifyError {
    #[error("labels contain a single class")]
    SingleClassLabels,
    #[error("{coords} points but {labels} labels")]
    LengthMismatch { coords: usize, labels: usize },
    #[error("need at least {needed} instances, got {got}")]
    TooFewInstances { needed: usize, got: usize },
    #[error("invalid SVM configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Linear,
    Rbf,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gamma {
    Value(f64),
    /// `1 / (2 * median(pairwise distance)^2)` over the training points.
    MedianHeuristic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    pub kernel: KernelKind,
    pub c: f64,
    pub gamma: Gamma,
    pub tolerance: f64,
    pub max_passes: usize,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            kernel: KernelKind::Rbf,
            c: 1.0,
            gamma: Gamma::MedianHeuristic,
            tolerance: 1e-3,
            max_passes: 100,
            seed: 0,
        }
    }
}

impl SvmConfig {
    pub fn linear() -> Self {
        Self {
            kernel: KernelKind::Linear,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), ClassifyError> {
        if !(self.c > 0.0) {
            return Err(ClassifyError::InvalidConfig("C must be positive".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(ClassifyError::InvalidConfig("tolerance must be positive".into()));
        }
        if self.max_passes == 0 {
            return Err(ClassifyError::InvalidConfig("max_passes must be positive".into()));
        }
        if let Gamma::Value(g) = self.gamma {
            if !(g > 0.0) {
                return Err(ClassifyError::InvalidConfig("gamma must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Kernel with every parameter resolved.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

impl Kernel {
    pub fn eval(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        match *self {
            Kernel::Linear => a[0] * b[0] + a[1] * b[1],
            Kernel::Rbf { gamma } => {
                let d2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
                (-gamma * d2).exp()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub kernel: Kernel,
    pub support_vectors: Vec<[f64; 2]>,
    pub alphas: Vec<f64>,
    pub labels: Vec<f64>,
    /// Training-set row of each support vector.
    pub support_indices: Vec<usize>,
    pub bias: f64,
    pub converged: bool,
    pub config: SvmConfig,
}

impl SvmModel {
    /// Model with no support vectors that always returns `label`; used for
    /// algorithms whose training labels hold a single class.
    pub fn constant(label: f64, config: SvmConfig) -> Self {
        Self {
            kernel: Kernel::Linear,
            support_vectors: Vec::new(),
            alphas: Vec::new(),
            labels: Vec::new(),
            support_indices: Vec::new(),
            bias: label.signum(),
            converged: true,
            config,
        }
    }

    pub fn decision_value(&self, x: [f64; 2]) -> f64 {
        self.support_vectors
            .iter()
            .zip(self.alphas.iter().zip(&self.labels))
            .map(|(sv, (a, y))| a * y * self.kernel.eval(*sv, x))
            .sum::<f64>()
            + self.bias
    }
}

/// Label and decision value; a zero decision value counts as GOOD.
pub fn predict(model: &SvmModel, point: [f64; 2]) -> (f64, f64) {
    let f = model.decision_value(point);
    (if f >= 0.0 { 1.0 } else { -1.0 }, f)
}

pub fn median_heuristic_gamma(points: &[[f64; 2]]) -> f64 {
    let mut d: Vec<f64> = Vec::with_capacity(points.len() * points.len().saturating_sub(1) / 2);
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            d.push(((points[i][0] - points[j][0]).powi(2) + (points[i][1] - points[j][1]).powi(2)).sqrt());
        }
    }
    if d.is_empty() {
        return 1.0;
    }
    d.sort_by(f64::total_cmp);
    let mid = d.len() / 2;
    let median = if d.len().is_multiple_of(2) { 0.5 * (d[mid - 1] + d[mid]) } else { d[mid] };
    if median > 0.0 {
        1.0 / (2.0 * median * median)
    } else {
        1.0
    }
}

fn resolve_kernel(config: &SvmConfig, points: &[[f64; 2]]) -> Kernel {
    match (config.kernel, config.gamma) {
        (KernelKind::Linear, _) => Kernel::Linear,
        (KernelKind::Rbf, Gamma::Value(g)) => Kernel::Rbf { gamma: g },
        (KernelKind::Rbf, Gamma::MedianHeuristic) => Kernel::Rbf {
            gamma: median_heuristic_gamma(points),
        },
    }
}

struct Solver<'a> {
    y: &'a [f64],
    k: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    /// `F_i = sum_j alpha_j y_j K_ij - y_i`, i.e. the error without bias.
    f: Vec<f64>,
    c: f64,
}

impl Solver<'_> {
    fn in_up(&self, i: usize) -> bool {
        (self.y[i] > 0.0 && self.alpha[i] < self.c) || (self.y[i] < 0.0 && self.alpha[i] > 0.0)
    }

    fn in_low(&self, i: usize) -> bool {
        (self.y[i] > 0.0 && self.alpha[i] > 0.0) || (self.y[i] < 0.0 && self.alpha[i] < self.c)
    }

    /// `(i_up, b_up, i_low, b_low)`: the most violating pair.
    fn extremes(&self) -> (usize, f64, usize, f64) {
        let (mut i_up, mut b_up) = (usize::MAX, f64::INFINITY);
        let (mut i_low, mut b_low) = (usize::MAX, f64::NEG_INFINITY);
        for i in 0..self.y.len() {
            if self.in_up(i) && self.f[i] < b_up {
                i_up = i;
                b_up = self.f[i];
            }
            if self.in_low(i) && self.f[i] > b_low {
                i_low = i;
                b_low = self.f[i];
            }
        }
        (i_up, b_up, i_low, b_low)
    }

    /// Analytic two-multiplier update. Returns false when no progress is made.
    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let (y1, y2) = (self.y[i1], self.y[i2]);
        let (a1, a2) = (self.alpha[i1], self.alpha[i2]);
        let c = self.c;
        let (lo, hi) = if y1 != y2 {
            ((a2 - a1).max(0.0), (c + a2 - a1).min(c))
        } else {
            ((a1 + a2 - c).max(0.0), (a1 + a2).min(c))
        };
        if hi - lo <= 0.0 {
            return false;
        }
        let eta = (self.k[i1][i1] + self.k[i2][i2] - 2.0 * self.k[i1][i2]).max(1e-12);
        let mut a2n = (a2 + y2 * (self.f[i1] - self.f[i2]) / eta).clamp(lo, hi);
        if a2n < 1e-12 * c {
            a2n = 0.0;
        } else if a2n > c * (1.0 - 1e-12) {
            a2n = c;
        }
        if (a2n - a2).abs() < 1e-12 * (a2n + a2 + 1e-12) {
            return false;
        }
        let mut a1n = a1 + y1 * y2 * (a2 - a2n);
        if a1n < 1e-12 * c {
            a1n = 0.0;
        } else if a1n > c * (1.0 - 1e-12) {
            a1n = c;
        }
        let (d1, d2) = (y1 * (a1n - a1), y2 * (a2n - a2));
        for k in 0..self.f.len() {
            self.f[k] += d1 * self.k[i1][k] + d2 * self.k[i2][k];
        }
        self.alpha[i1] = a1n;
        self.alpha[i2] = a2n;
        true
    }
}

/// Trains a soft-margin SVM on labels in `{-1, +1}`.
pub fn train_svm(coords: &[[f64; 2]], labels: &[f64], config: &SvmConfig) -> Result<SvmModel, ClassifyError> {
    config.validate()?;
    if coords.len() != labels.len() {
        return Err(ClassifyError::LengthMismatch {
            coords: coords.len(),
            labels: labels.len(),
        });
    }
    let y: Vec<f64> = labels.iter().map(|l| if *l > 0.0 { 1.0 } else { -1.0 }).collect();
    if !(y.iter().any(|v| *v > 0.0) && y.iter().any(|v| *v < 0.0)) {
        return Err(ClassifyError::SingleClassLabels);
    }
    let n = coords.len();
    let kernel = resolve_kernel(config, coords);
    let k: Vec<Vec<f64>> = coords
        .iter()
        .map(|a| coords.iter().map(|b| kernel.eval(*a, *b)).collect())
        .collect();
    let mut s = Solver {
        y: &y,
        k,
        alpha: vec![0.0; n],
        f: y.iter().map(|v| -v).collect(),
        c: config.c,
    };
    let mut rng = seed::rng(config.seed);
    let tol = config.tolerance;
    let max_iter = config.max_passes.saturating_mul(n.max(1));
    let mut converged = false;

    for _ in 0..max_iter {
        let (i_up, b_up, i_low, b_low) = s.extremes();
        if b_low <= b_up + 2.0 * tol {
            converged = true;
            break;
        }
        if s.take_step(i_up, i_low) {
            continue;
        }
        // fallback: partner for i_up drawn in seeded random order among the
        // low set members that still violate against it
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut stepped = false;
        for j in order {
            if s.in_low(j) && s.f[j] > b_up + 2.0 * tol && s.take_step(i_up, j) {
                stepped = true;
                break;
            }
        }
        if !stepped {
            break;
        }
    }

    let (_, b_up, _, b_low) = s.extremes();
    let threshold = match (b_up.is_finite(), b_low.is_finite()) {
        (true, true) => 0.5 * (b_up + b_low),
        (true, false) => b_up,
        (false, true) => b_low,
        (false, false) => 0.0,
    };
    let bias = -threshold;

    let mut model = SvmModel {
        kernel,
        support_vectors: Vec::new(),
        alphas: Vec::new(),
        labels: Vec::new(),
        support_indices: Vec::new(),
        bias,
        converged,
        config: config.clone(),
    };
    for i in 0..n {
        if s.alpha[i] > 0.0 {
            model.support_vectors.push(coords[i]);
            model.alphas.push(s.alpha[i]);
            model.labels.push(y[i]);
            model.support_indices.push(i);
        }
    }
    Ok(model)
}

/// Largest KKT violation of `model` over its training set:
/// `alpha = 0 => y f >= 1`, `0 < alpha < C => y f = 1`, `alpha = C => y f <= 1`.
pub fn max_kkt_violation(model: &SvmModel, coords: &[[f64; 2]], labels: &[f64]) -> f64 {
    let c = model.config.c;
    let mut alpha = vec![0.0; coords.len()];
    for (&i, &a) in model.support_indices.iter().zip(&model.alphas) {
        alpha[i] = a;
    }
    coords
        .iter()
        .zip(labels)
        .zip(&alpha)
        .map(|((x, y), a)| {
            let m = y * model.decision_value(*x);
            if *a <= 0.0 {
                (1.0 - m).max(0.0)
            } else if *a >= c {
                (m - 1.0).max(0.0)
            } else {
                (m - 1.0).abs()
            }
        })
        .fold(0.0, f64::max)
}

/// Confusion counts and derived rates with GOOD (+1) as the positive class.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BinaryMetrics {
    pub accuracy: f64,
    /// Absent when nothing was predicted positive.
    pub precision: Option<f64>,
    /// Absent when there are no positive instances.
    pub recall: Option<f64>,
    pub true_positive: usize,
    pub false_positive: usize,
    pub true_negative: usize,
    pub false_negative: usize,
}

impl BinaryMetrics {
    pub fn from_predictions(truth: &[f64], predicted: &[f64]) -> Self {
        let mut m = Self::default();
        for (t, p) in truth.iter().zip(predicted) {
            match (*t > 0.0, *p > 0.0) {
                (true, true) => m.true_positive += 1,
                (false, true) => m.false_positive += 1,
                (false, false) => m.true_negative += 1,
                (true, false) => m.false_negative += 1,
            }
        }
        let total = truth.len();
        m.accuracy = if total > 0 {
            (m.true_positive + m.true_negative) as f64 / total as f64
        } else {
            0.0
        };
        let pp = m.true_positive + m.false_positive;
        m.precision = (pp > 0).then(|| m.true_positive as f64 / pp as f64);
        let ap = m.true_positive + m.false_negative;
        m.recall = (ap > 0).then(|| m.true_positive as f64 / ap as f64);
        m
    }
}

/// Stratified fold assignment: each class is shuffled with the seed and
/// dealt round-robin into `folds` buckets. Input order matters, so callers
/// wanting permutation invariance must pass rows in a canonical order.
pub fn stratified_folds(labels: &[f64], folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = seed::rng(seed);
    let mut assignment = vec![0; labels.len()];
    let mut offset = 0;
    for positive in [true, false] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| (labels[i] > 0.0) == positive).collect();
        idx.shuffle(&mut rng);
        for (r, i) in idx.iter().enumerate() {
            assignment[*i] = (r + offset) % folds;
        }
        offset += idx.len();
    }
    assignment
}

/// Trains an SVM, or a constant model when the labels hold a single class.
pub fn train_or_constant(coords: &[[f64; 2]], labels: &[f64], config: &SvmConfig) -> Result<SvmModel, ClassifyError> {
    match train_svm(coords, labels, config) {
        Err(ClassifyError::SingleClassLabels) if !labels.is_empty() => {
            Ok(SvmModel::constant(labels[0], config.clone()))
        }
        other => other,
    }
}

/// Stratified k-fold cross-validation; metrics are pooled over held-out folds.
pub fn cross_validate(
    coords: &[[f64; 2]],
    labels: &[f64],
    folds: usize,
    config: &SvmConfig,
) -> Result<BinaryMetrics, ClassifyError> {
    if folds < 2 {
        return Err(ClassifyError::InvalidConfig("folds must be at least 2".into()));
    }
    if coords.len() != labels.len() {
        return Err(ClassifyError::LengthMismatch {
            coords: coords.len(),
            labels: labels.len(),
        });
    }
    if coords.len() < folds {
        return Err(ClassifyError::TooFewInstances {
            needed: folds,
            got: coords.len(),
        });
    }
    let assignment = stratified_folds(labels, folds, seed::derive(config.seed, "folds"));
    let mut predicted = vec![0.0; labels.len()];
    for fold in 0..folds {
        let (mut tx, mut ty) = (Vec::new(), Vec::new());
        for i in 0..labels.len() {
            if assignment[i] != fold {
                tx.push(coords[i]);
                ty.push(labels[i]);
            }
        }
        if tx.is_empty() {
            continue;
        }
        let model = train_or_constant(&tx, &ty, config)?;
        for i in (0..labels.len()).filter(|&i| assignment[i] == fold) {
            predicted[i] = predict(&model, coords[i]).0;
        }
    }
    Ok(BinaryMetrics::from_predictions(labels, &predicted))
}

/// Per-algorithm metrics plus their unweighted means.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SelectorMetrics {
    pub per_algorithm: BTreeMap<String, BinaryMetrics>,
    pub accuracy: f64,
    /// Mean over algorithms whose precision is defined.
    pub precision: Option<f64>,
    pub recall: Option<f64>,
}

impl SelectorMetrics {
    pub fn aggregate(per_algorithm: BTreeMap<String, BinaryMetrics>) -> Self {
        let mean = |xs: Vec<f64>| (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
        let accuracy = mean(per_algorithm.values().map(|m| m.accuracy).collect()).unwrap_or(0.0);
        let precision = mean(per_algorithm.values().filter_map(|m| m.precision).collect());
        let recall = mean(per_algorithm.values().filter_map(|m| m.recall).collect());
        Self {
            per_algorithm,
            accuracy,
            precision,
            recall,
        }
    }
}

/// Ranks algorithms by descending decision value at `point`; equal values
/// are ordered by name.
pub fn select_aprt(models: &BTreeMap<String, SvmModel>, point: [f64; 2]) -> Vec<(String, f64)> {
    let mut ranked: Vec<(String, f64)> = models
        .iter()
        .map(|(name, m)| (name.clone(), m.decision_value(point)))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked
}
