//! Wrapper feature selection: a genetic algorithm over feature bitmasks whose
//! fitness is the cross-validated accuracy of per-algorithm linear SVMs
//! trained in the 2D projection of the candidate subset.

use std::cmp::Ordering;
use std::collections::HashMap;

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{cross_validate, SvmConfig};
use crate::model::{FeatureName, FeatureSubset, InstanceTable};
use crate::project::{fit_pca, transform};
use crate::{ingest, seed};

#[derive(Debug, thiserror::Error)]
pub enum SelectError {
    #[error("no algorithm has both GOOD and BAD labels on enough instances")]
    DegenerateLabels,
    #[error("invalid GA configuration: {0}")]
    InvalidConfig(String),
    #[error("{0}")]
    Table(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    /// Per-bit flip probability; `None` means `1 / n_features`.
    pub mutation_rate: Option<f64>,
    pub tournament_size: usize,
    pub min_k: usize,
    pub max_k: usize,
    pub cv_folds: usize,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            generations: 100,
            crossover_rate: 0.9,
            mutation_rate: None,
            tournament_size: 2,
            min_k: 4,
            max_k: 12,
            cv_folds: 5,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self, n_features: usize) -> Result<(), SelectError> {
        let bad = |m: &str| Err(SelectError::InvalidConfig(m.to_string()));
        if self.population_size == 0 {
            return bad("population_size must be positive");
        }
        if self.min_k < 2 {
            return bad("min_k must be at least 2");
        }
        if self.max_k < self.min_k {
            return bad("max_k must be >= min_k");
        }
        if self.max_k > n_features {
            return Err(SelectError::InvalidConfig(format!(
                "max_k {} exceeds the {n_features} available features",
                self.max_k
            )));
        }
        if self.tournament_size == 0 || self.tournament_size > self.population_size {
            return bad("tournament_size must be in [1, population_size]");
        }
        if self.cv_folds < 2 {
            return bad("cv_folds must be at least 2");
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return bad("crossover_rate must be a probability");
        }
        if let Some(m) = self.mutation_rate {
            if !(0.0..=1.0).contains(&m) {
                return bad("mutation_rate must be a probability");
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitnessValue {
    pub mean_cv_accuracy: f64,
    pub subset_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub best: FeatureSubset,
    pub best_fitness: FitnessValue,
    /// Best-so-far accuracy after initialization and after each generation.
    pub history: Vec<f64>,
}

/// Ranking used everywhere a "best" subset is picked: higher accuracy, then
/// fewer features, then the lexicographically smallest sorted name list.
/// `Ordering::Less` means `a` is better.
fn rank<'a, A, B>(a: (f64, usize, A), b: (f64, usize, B)) -> Ordering
where
    A: Iterator<Item = &'a FeatureName>,
    B: Iterator<Item = &'a FeatureName>,
{
    b.0.total_cmp(&a.0)
        .then(a.1.cmp(&b.1))
        .then_with(|| a.2.cmp(b.2))
}

pub fn tie_break(candidates: &[(FeatureSubset, FitnessValue)]) -> Option<FeatureSubset> {
    candidates
        .iter()
        .min_by(|(sa, fa), (sb, fb)| {
            rank(
                (fa.mean_cv_accuracy, sa.len(), sa.iter()),
                (fb.mean_cv_accuracy, sb.len(), sb.iter()),
            )
        })
        .map(|(s, _)| s.clone())
}

fn sorted_by_id(table: &InstanceTable) -> InstanceTable {
    let mut sorted = table.clone();
    sorted.rows.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));
    sorted
}

/// Mean (over algorithms) stratified k-fold accuracy of a linear SVM trained
/// on the 2D projection of `subset`. Algorithms with a single label class or
/// fewer labelled rows than folds are skipped.
pub fn evaluate_subset(
    table: &InstanceTable,
    subset: &FeatureSubset,
    config: &GaConfig,
    seed: u64,
) -> Result<FitnessValue, SelectError> {
    subset
        .check_against(table, config.min_k, config.max_k)
        .map_err(|e| SelectError::Table(e.to_string()))?;
    evaluate_sorted(&sorted_by_id(table), subset, config.cv_folds, seed)
}

fn evaluate_sorted(
    table: &InstanceTable,
    subset: &FeatureSubset,
    folds: usize,
    seed: u64,
) -> Result<FitnessValue, SelectError> {
    let subset_size = subset.len();
    let coords = match ingest::standardize(table, subset)
        .ok()
        .and_then(|(m, scaling)| fit_pca(&m, scaling).ok())
    {
        Some(model) => transform(&model, table, subset).map_err(|e| SelectError::Table(e.to_string()))?,
        // every projection failure (all-constant columns, fewer than two
        // varying features) scores zero
        None => {
            return Ok(FitnessValue {
                mean_cv_accuracy: 0.0,
                subset_size,
            })
        }
    };
    let svm = SvmConfig {
        seed,
        ..SvmConfig::linear()
    };
    let mut accuracies = Vec::new();
    for a in 0..table.algorithm_names.len() {
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for (p, row) in coords.points.iter().zip(&table.rows) {
            if let Some(s) = row.outcomes[a].sign() {
                x.push(*p);
                y.push(s);
            }
        }
        let positives = y.iter().filter(|v| **v > 0.0).count();
        if positives == 0 || positives == y.len() || y.len() < folds {
            continue;
        }
        let m = cross_validate(&x, &y, folds, &svm).map_err(|e| SelectError::Table(e.to_string()))?;
        accuracies.push(m.accuracy);
    }
    if accuracies.is_empty() {
        return Err(SelectError::DegenerateLabels);
    }
    Ok(FitnessValue {
        mean_cv_accuracy: accuracies.iter().sum::<f64>() / accuracies.len() as f64,
        subset_size,
    })
}

type Mask = Vec<bool>;

fn mask_to_subset(table: &InstanceTable, mask: &[bool]) -> FeatureSubset {
    FeatureSubset::new(
        mask.iter()
            .zip(&table.feature_names)
            .filter(|(m, _)| **m)
            .map(|(_, f)| f.clone()),
    )
    .expect("repaired masks are non-empty")
}

/// Adds or removes random bits until the popcount lies in `[min_k, max_k]`.
fn repair(mask: &mut [bool], min_k: usize, max_k: usize, rng: &mut ChaCha8Rng) {
    loop {
        let on: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
        if on.len() < min_k {
            let off: Vec<usize> = (0..mask.len()).filter(|&i| !mask[i]).collect();
            mask[off[rng.gen_range(0..off.len())]] = true;
        } else if on.len() > max_k {
            mask[on[rng.gen_range(0..on.len())]] = false;
        } else {
            return;
        }
    }
}

struct Evaluator<'a> {
    table: &'a InstanceTable,
    folds: usize,
    seed: u64,
    cache: HashMap<Mask, FitnessValue>,
}

impl Evaluator<'_> {
    /// Evaluates the uncached masks in parallel; results are inserted in
    /// population order so the cache contents do not depend on scheduling.
    fn evaluate(&mut self, population: &[Mask]) -> Result<Vec<FitnessValue>, SelectError> {
        let mut pending: Vec<&Mask> = Vec::new();
        for m in population {
            if !self.cache.contains_key(m) && !pending.contains(&m) {
                pending.push(m);
            }
        }
        let results: Vec<Result<FitnessValue, SelectError>> = pending
            .par_iter()
            .map(|m| evaluate_sorted(self.table, &mask_to_subset(self.table, m), self.folds, self.seed))
            .collect();
        for (m, r) in pending.into_iter().zip(results) {
            self.cache.insert(m.clone(), r?);
        }
        Ok(population.iter().map(|m| self.cache[m]).collect())
    }
}

fn compare(table: &InstanceTable, a: (&Mask, &FitnessValue), b: (&Mask, &FitnessValue)) -> Ordering {
    let names = |m: &Mask| -> Vec<FeatureName> { mask_to_subset(table, m).iter().cloned().collect() };
    let (na, nb) = (names(a.0), names(b.0));
    rank(
        (a.1.mean_cv_accuracy, a.1.subset_size, na.iter()),
        (b.1.mean_cv_accuracy, b.1.subset_size, nb.iter()),
    )
}

fn tournament<'p>(
    table: &InstanceTable,
    population: &'p [Mask],
    fitness: &[FitnessValue],
    size: usize,
    rng: &mut ChaCha8Rng,
) -> &'p Mask {
    let mut best = rng.gen_range(0..population.len());
    for _ in 1..size {
        let c = rng.gen_range(0..population.len());
        if compare(table, (&population[c], &fitness[c]), (&population[best], &fitness[best])) == Ordering::Less {
            best = c;
        }
    }
    &population[best]
}

/// Runs the genetic search and returns the best subset ever evaluated.
pub fn run_ga(table: &InstanceTable, config: &GaConfig) -> Result<SelectionResult, SelectError> {
    let n = table.feature_names.len();
    config.validate(n)?;
    let table = sorted_by_id(table);
    let mut rng = seed::stage_rng(config.seed, "ga");
    let mut evaluator = Evaluator {
        table: &table,
        folds: config.cv_folds,
        seed: seed::derive(config.seed, "fitness"),
        cache: HashMap::new(),
    };
    let mutation = config.mutation_rate.unwrap_or(1.0 / n as f64);

    let mut population: Vec<Mask> = (0..config.population_size)
        .map(|_| {
            let k = rng.gen_range(config.min_k..=config.max_k);
            let mut mask = vec![false; n];
            for i in sample(&mut rng, n, k) {
                mask[i] = true;
            }
            mask
        })
        .collect();
    let mut fitness = evaluator.evaluate(&population)?;

    let best_of = |pop: &[Mask], fit: &[FitnessValue]| -> usize {
        (0..pop.len())
            .min_by(|&a, &b| compare(&table, (&pop[a], &fit[a]), (&pop[b], &fit[b])))
            .expect("population is non-empty")
    };
    let mut best_idx = best_of(&population, &fitness);
    let (mut best, mut best_fit) = (population[best_idx].clone(), fitness[best_idx]);
    let mut history = vec![best_fit.mean_cv_accuracy];

    for _ in 0..config.generations {
        let mut next = Vec::with_capacity(config.population_size);
        next.push(best.clone());
        while next.len() < config.population_size {
            let p1 = tournament(&table, &population, &fitness, config.tournament_size, &mut rng);
            let p2 = tournament(&table, &population, &fitness, config.tournament_size, &mut rng);
            let mut child: Mask = if rng.gen_bool(config.crossover_rate) {
                p1.iter()
                    .zip(p2)
                    .map(|(a, b)| if rng.gen_bool(0.5) { *a } else { *b })
                    .collect()
            } else {
                p1.clone()
            };
            for bit in child.iter_mut() {
                if rng.gen_bool(mutation) {
                    *bit = !*bit;
                }
            }
            repair(&mut child, config.min_k, config.max_k, &mut rng);
            next.push(child);
        }
        population = next;
        fitness = evaluator.evaluate(&population)?;
        best_idx = best_of(&population, &fitness);
        if compare(&table, (&population[best_idx], &fitness[best_idx]), (&best, &best_fit)) == Ordering::Less {
            best = population[best_idx].clone();
            best_fit = fitness[best_idx];
        }
        history.push(best_fit.mean_cv_accuracy);
    }

    Ok(SelectionResult {
        best: mask_to_subset(&table, &best),
        best_fitness: best_fit,
        history,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::model::{InstanceRecord, Outcome};
    use rand::Rng;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    /// `informative` features drive the labels through fixed linear rules,
    /// the remaining columns are uniform noise.
    pub(crate) fn planted(seed: u64, rows: usize, noise: usize) -> InstanceTable {
        let mut rng = crate::seed::rng(seed);
        let mut feature_names = vec![FeatureName::new("f1").unwrap(), FeatureName::new("f2").unwrap()];
        for j in 0..noise {
            feature_names.push(FeatureName::new(format!("n{j:02}")).unwrap());
        }
        let rules: [fn(f64, f64) -> bool; 3] = [
            |a, b| a + b > 0.0,
            |a, b| a - b > 0.3,
            |a, b| 0.5 * a + b < -0.2,
        ];
        let rows = (0..rows)
            .map(|i| {
                let features: Vec<f64> = (0..2 + noise).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let outcomes = rules
                    .iter()
                    .map(|r| if r(features[0], features[1]) { Outcome::Good } else { Outcome::Bad })
                    .collect();
                InstanceRecord {
                    instance_id: format!("bug{i:04}"),
                    dataset_tag: "synthetic".into(),
                    features,
                    outcomes,
                    attributes: Default::default(),
                }
            })
            .collect();
        InstanceTable {
            feature_names,
            algorithm_names: vec!["A".into(), "B".into(), "C".into()],
            rows,
        }
    }

    fn small_config() -> GaConfig {
        GaConfig {
            population_size: 12,
            generations: 4,
            min_k: 2,
            max_k: 3,
            ..GaConfig::default()
        }
    }

    fn subset(names: &[&str]) -> FeatureSubset {
        FeatureSubset::from_names(names).unwrap()
    }

    fn fv(acc: f64, size: usize) -> FitnessValue {
        FitnessValue {
            mean_cv_accuracy: acc,
            subset_size: size,
        }
    }

    #[test]
    fn tie_break_examples() {
        let ab = subset(&["a", "b"]);
        let abc = subset(&["a", "b", "c"]);
        assert_eq!(tie_break(&[(ab.clone(), fv(0.9, 2)), (abc, fv(0.9, 3))]), Some(ab));
        let bc = subset(&["b", "c"]);
        let ad = subset(&["a", "d"]);
        assert_eq!(tie_break(&[(bc, fv(0.9, 2)), (ad.clone(), fv(0.9, 2))]), Some(ad));
        let a = subset(&["a"]);
        let b = subset(&["b"]);
        assert_eq!(tie_break(&[(a, fv(0.8, 1)), (b.clone(), fv(0.9, 1))]), Some(b));
        assert_eq!(tie_break(&[]), None);
    }

    #[test]
    fn separable_subset_scores_one() {
        // only rule A: f1 + f2 > 0, with a margin band removed
        let mut t = planted(1, 120, 2);
        t.rows.retain(|r| (r.features[0] + r.features[1]).abs() > 0.2);
        for r in &mut t.rows {
            r.outcomes.truncate(1);
        }
        t.algorithm_names.truncate(1);
        let f = evaluate_subset(&t, &subset(&["f1", "f2"]), &small_config(), 3).unwrap();
        assert_eq!(f.mean_cv_accuracy, 1.0);
        assert_eq!(f.subset_size, 2);
    }

    #[test]
    fn shuffled_labels_score_near_majority_rate() {
        let mut t = planted(2, 200, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for a in 0..3 {
            let mut col: Vec<Outcome> = t.rows.iter().map(|r| r.outcomes[a]).collect();
            col.shuffle(&mut rng);
            for (r, o) in t.rows.iter_mut().zip(col) {
                r.outcomes[a] = o;
            }
        }
        let majority: f64 = (0..3)
            .map(|a| {
                let good = t.rows.iter().filter(|r| r.outcomes[a] == Outcome::Good).count() as f64;
                good.max(t.len() as f64 - good) / t.len() as f64
            })
            .sum::<f64>()
            / 3.0;
        let f = evaluate_subset(&t, &subset(&["f1", "f2"]), &small_config(), 4).unwrap();
        assert!((f.mean_cv_accuracy - majority).abs() <= 0.1, "{} vs {majority}", f.mean_cv_accuracy);
    }

    #[test]
    fn evaluation_is_deterministic_and_permutation_invariant() {
        let t = planted(3, 80, 4);
        let s = subset(&["f1", "n01", "n02"]);
        let a = evaluate_subset(&t, &s, &small_config(), 5).unwrap();
        assert_eq!(a, evaluate_subset(&t, &s, &small_config(), 5).unwrap());
        let mut rev = t.clone();
        rev.rows.reverse();
        assert_eq!(a, evaluate_subset(&rev, &s, &small_config(), 5).unwrap());
    }

    #[test]
    fn all_single_class_labels_is_degenerate() {
        let mut t = planted(4, 30, 2);
        for r in &mut t.rows {
            r.outcomes = vec![Outcome::Good, Outcome::Missing, Outcome::Bad];
        }
        assert!(matches!(
            evaluate_subset(&t, &subset(&["f1", "f2"]), &small_config(), 1),
            Err(SelectError::DegenerateLabels)
        ));
    }

    #[test]
    fn zero_generations_returns_initial_best() {
        let t = planted(5, 60, 4);
        let cfg = GaConfig {
            generations: 0,
            ..small_config()
        };
        let r = run_ga(&t, &cfg).unwrap();
        assert_eq!(r.history.len(), 1);
        assert_eq!(r.history[0], r.best_fitness.mean_cv_accuracy);
    }

    #[test]
    fn ga_is_deterministic_with_monotone_history() {
        let t = planted(6, 60, 6);
        let a = run_ga(&t, &small_config()).unwrap();
        let b = run_ga(&t, &small_config()).unwrap();
        assert_eq!(a, b);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.history.len(), 5);
        assert!(a.history.windows(2).all(|w| w[0] <= w[1]));
        assert!((2..=3).contains(&a.best.len()));
    }

    #[test]
    fn config_validation() {
        let t = planted(7, 20, 1);
        let cfg = GaConfig::default();
        assert!(matches!(run_ga(&t, &cfg), Err(SelectError::InvalidConfig(_))));
        let cfg = GaConfig {
            min_k: 1,
            max_k: 2,
            ..GaConfig::default()
        };
        assert!(matches!(run_ga(&t, &cfg), Err(SelectError::InvalidConfig(_))));
    }

    proptest! {
        #[test]
        fn repair_lands_in_window(bits in prop::collection::vec(any::<bool>(), 6..30), seed in any::<u64>(), lo in 2usize..5, extra in 0usize..4) {
            let hi = (lo + extra).min(bits.len());
            let mut mask = bits.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            repair(&mut mask, lo, hi, &mut rng);
            let k = mask.iter().filter(|b| **b).count();
            prop_assert!(k >= lo && k <= hi);
        }
    }
}
