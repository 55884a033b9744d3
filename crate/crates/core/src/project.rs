//! PCA projection of the standardized feature subset onto the plane spanned
//! by the two leading eigenvectors of the covariance matrix.

use serde::{Deserialize, Serialize};

use crate::ingest::{standardize, ScalingParams};
use crate::model::{Coordinates2D, FeatureName, FeatureSubset, InstanceTable};

const JACOBI_TOLERANCE: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, thiserror::Error)]
pub enum ProjectError {
    #[error("PCA needs at least 3 rows and 2 columns, got {rows}x{cols}")]
    TooSmall { rows: usize, cols: usize },
    #[error("non-finite value in PCA input")]
    NonFiniteInput,
    #[error("Jacobi eigensolver did not converge in {0} sweeps")]
    ConvergenceFailure(usize),
    #[error("feature mismatch: {0}")]
    FeatureMismatch(String),
}

/// Fitted projection. Serializes with the scaling fields inlined so the JSON
/// carries feature names, means, stds, loadings and eigenvalues side by side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    #[serde(flatten)]
    pub scaling: ScalingParams,
    /// One `[z1, z2]` loading pair per retained feature.
    pub loadings: Vec<[f64; 2]>,
    /// All eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    pub explained_variance_2d: f64,
}

/// Symmetric eigendecomposition result: eigenvalues descending, eigenvectors
/// as columns (`vectors[k]` is the k-th eigenvector).
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Eigenvectors are sign-normalized so their largest-magnitude component is
/// positive, and sorted by descending eigenvalue. Equal eigenvalues are
/// ordered by lexicographically larger eigenvector first.
pub fn jacobi_eigen(matrix: &[Vec<f64>]) -> Result<SymmetricEigen, ProjectError> {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt().max(1.0);

    let off = |a: &Vec<Vec<f64>>| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    s += a[p][q] * a[p][q];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > JACOBI_TOLERANCE * scale {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(ProjectError::ConvergenceFailure(JACOBI_MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            let mut vec: Vec<f64> = v.iter().map(|row| row[k]).collect();
            fix_sign(&mut vec);
            (a[k][k], vec)
        })
        .collect();
    pairs.sort_by(|(la, va), (lb, vb)| {
        let tol = 1e-12 * la.abs().max(lb.abs()).max(1.0);
        if (la - lb).abs() <= tol {
            lexicographic(vb, va)
        } else {
            lb.total_cmp(la)
        }
    });
    Ok(SymmetricEigen {
        values: pairs.iter().map(|(l, _)| *l).collect(),
        vectors: pairs.into_iter().map(|(_, v)| v).collect(),
    })
}

fn lexicographic(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Flips `v` so its largest-magnitude component is positive; near-ties in
/// magnitude resolve to the lowest index.
fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(lead) = v.iter().position(|x| x.abs() >= max - 1e-9 * max) {
        if v[lead] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Sample covariance (divisor N-1) of a row-major matrix.
pub fn covariance(matrix: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = matrix.len();
    let m = matrix.first().map_or(0, Vec::len);
    let means: Vec<f64> = (0..m)
        .map(|j| matrix.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let mut cov = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let s: f64 = matrix
                .iter()
                .map(|r| (r[i] - means[i]) * (r[j] - means[j]))
                .sum::<f64>()
                / (n as f64 - 1.0);
            cov[i][j] = s;
            cov[j][i] = s;
        }
    }
    cov
}

/// Fits the 2D projection on an already standardized matrix whose columns
/// are described by `scaling`.
pub fn fit_pca(matrix: &[Vec<f64>], scaling: ScalingParams) -> Result<PcaModel, ProjectError> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    if rows < 3 || cols < 2 {
        return Err(ProjectError::TooSmall { rows, cols });
    }
    if scaling.features.len() != cols || matrix.iter().any(|r| r.len() != cols) {
        return Err(ProjectError::FeatureMismatch(format!(
            "{} scaled features for {cols} matrix columns",
            scaling.features.len()
        )));
    }
    if matrix.iter().flatten().any(|x| !x.is_finite()) {
        return Err(ProjectError::NonFiniteInput);
    }
    let eig = jacobi_eigen(&covariance(matrix))?;
    let eigenvalues: Vec<f64> = eig.values.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = eigenvalues.iter().sum();
    let explained_variance_2d = if total > 0.0 {
        ((eigenvalues[0] + eigenvalues[1]) / total).min(1.0)
    } else {
        0.0
    };
    let loadings = (0..cols)
        .map(|j| [eig.vectors[0][j], eig.vectors[1][j]])
        .collect();
    Ok(PcaModel {
        scaling,
        loadings,
        eigenvalues,
        explained_variance_2d,
    })
}

/// Placeholder scaling (mean 0, std 1) for matrices that are already on the
/// standardized scale; features are named `f0, f1, ...`.
pub fn identity_scaling(cols: usize) -> ScalingParams {
    ScalingParams {
        features: (0..cols)
            .map(|j| FeatureName::new(format!("f{j}")).expect("non-empty"))
            .collect(),
        means: vec![0.0; cols],
        stds: vec![1.0; cols],
        dropped_features: Vec::new(),
    }
}

/// Standardizes the subset and fits the projection in one step.
pub fn fit_subset(table: &InstanceTable, subset: &FeatureSubset) -> Result<PcaModel, crate::Error> {
    let (matrix, scaling) = standardize(table, subset)?;
    Ok(fit_pca(&matrix, scaling)?)
}

/// Per-component explained variance ratios `λi / Σλ`.
pub fn explained_variance(model: &PcaModel) -> Vec<f64> {
    let total: f64 = model.eigenvalues.iter().sum();
    if total <= 0.0 {
        return vec![0.0; model.eigenvalues.len()];
    }
    model.eigenvalues.iter().map(|l| l / total).collect()
}

impl PcaModel {
    /// Projects one raw feature vector aligned with `scaling.features`.
    pub fn project(&self, raw: &[f64]) -> [f64; 2] {
        let z = self.scaling.apply(raw);
        let mut out = [0.0; 2];
        for (zj, l) in z.iter().zip(&self.loadings) {
            out[0] += zj * l[0];
            out[1] += zj * l[1];
        }
        out
    }

    /// Projects a named feature vector; every model feature must be present
    /// and no unknown name is accepted.
    pub fn project_named(&self, values: &[(String, f64)]) -> Result<[f64; 2], ProjectError> {
        for (name, _) in values {
            let known = self.scaling.features.iter().any(|f| f.as_str() == name)
                || self.scaling.dropped_features.iter().any(|f| f.as_str() == name);
            if !known {
                return Err(ProjectError::FeatureMismatch(format!("unknown feature {name}")));
            }
        }
        let raw = self
            .scaling
            .features
            .iter()
            .map(|f| {
                values
                    .iter()
                    .find(|(n, _)| n == f.as_str())
                    .map(|(_, v)| *v)
                    .ok_or_else(|| ProjectError::FeatureMismatch(format!("missing feature {f}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.project(&raw))
    }
}

/// Projects every table row into the instance space.
pub fn transform(
    model: &PcaModel,
    table: &InstanceTable,
    subset: &FeatureSubset,
) -> Result<Coordinates2D, ProjectError> {
    let model_names = model
        .scaling
        .features
        .iter()
        .chain(&model.scaling.dropped_features);
    let matches = model_names.clone().count() == subset.len() && model_names.clone().all(|f| subset.contains(f));
    if !matches {
        return Err(ProjectError::FeatureMismatch(
            "subset differs from the model's features".into(),
        ));
    }
    let cols = model
        .scaling
        .features
        .iter()
        .map(|f| {
            table
                .feature_index(f)
                .ok_or_else(|| ProjectError::FeatureMismatch(format!("table lacks feature {f}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let points = table
        .rows
        .iter()
        .map(|r| {
            let raw: Vec<f64> = cols.iter().map(|&c| r.features[c]).collect();
            model.project(&raw)
        })
        .collect();
    Ok(Coordinates2D { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{InstanceRecord, Outcome};
    use proptest::prelude::*;
    use rand::Rng;

    /// Eigenvalue oracle: roots of det(A - xI) isolated by bisection on the
    /// Sylvester inertia count (number of negative pivots of the LDL^T
    /// factorization of A - xI equals the number of eigenvalues below x).
    pub(crate) fn char_poly_roots(a: &[Vec<f64>]) -> Vec<f64> {
        let n = a.len();
        let count_below = |x: f64| -> usize {
            let mut m: Vec<Vec<f64>> = a.to_vec();
            for (i, row) in m.iter_mut().enumerate() {
                row[i] -= x;
            }
            let mut neg = 0;
            for k in 0..n {
                let mut piv = m[k][k];
                if piv == 0.0 {
                    piv = -1e-300;
                }
                if piv < 0.0 {
                    neg += 1;
                }
                for i in k + 1..n {
                    let f = m[i][k] / piv;
                    for j in k + 1..n {
                        m[i][j] -= f * m[k][j];
                    }
                }
                m[k][k] = piv;
            }
            neg
        };
        let bound = a
            .iter()
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
            + 1.0;
        (0..n)
            .map(|k| {
                // k-th smallest eigenvalue: smallest x with count_below(x) > k
                let (mut lo, mut hi) = (-bound, bound);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if count_below(mid) > k {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .rev()
            .collect()
    }

    fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
        (0..rows)
            .map(|_| (0..cols).map(|_| rng.gen_range(-3.0..3.0)).collect())
            .collect()
    }

    fn test_standardize(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n = m.len() as f64;
        let cols = m[0].len();
        let mut out = m.to_vec();
        for j in 0..cols {
            let mean = m.iter().map(|r| r[j]).sum::<f64>() / n;
            let sd = (m.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n).sqrt();
            for r in out.iter_mut() {
                r[j] = (r[j] - mean) / sd;
            }
        }
        out
    }

    #[test]
    fn collinear_points_give_full_variance_on_first_axis() {
        // sample variance of {-1, 0, 1} is 1, so the N-1 covariance is [[1,1],[1,1]]
        let m = vec![vec![-1.0, -1.0], vec![0.0, 0.0], vec![1.0, 1.0]];
        let model = fit_pca(&m, identity_scaling(2)).unwrap();
        assert!((model.eigenvalues[0] - 2.0).abs() < 1e-12);
        assert!(model.eigenvalues[1].abs() < 1e-12);
        assert_eq!(model.explained_variance_2d, 1.0);
        let l = &model.loadings;
        assert!((l[0][0] - l[1][0]).abs() < 1e-12 && l[0][0] > 0.0);
    }

    #[test]
    fn five_by_four_matches_characteristic_roots() {
        let mut rng = crate::seed::rng(5);
        let m = test_standardize(&random_matrix(&mut rng, 5, 4));
        let model = fit_pca(&m, identity_scaling(4)).unwrap();
        let roots = char_poly_roots(&covariance(&m));
        for (l, r) in model.eigenvalues.iter().zip(&roots) {
            assert!((l - r.max(0.0)).abs() < 1e-8, "{l} vs {r}");
        }
    }

    #[test]
    fn loadings_orthonormal_and_sign_fixed() {
        let mut rng = crate::seed::rng(9);
        let m = test_standardize(&random_matrix(&mut rng, 30, 6));
        let model = fit_pca(&m, identity_scaling(6)).unwrap();
        let dot = |a: usize, b: usize| -> f64 { model.loadings.iter().map(|l| l[a] * l[b]).sum() };
        assert!((dot(0, 0) - 1.0).abs() < 1e-9);
        assert!((dot(1, 1) - 1.0).abs() < 1e-9);
        assert!(dot(0, 1).abs() < 1e-9);
        for c in 0..2 {
            let lead = model
                .loadings
                .iter()
                .map(|l| l[c])
                .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                .unwrap();
            assert!(lead > 0.0);
        }
        assert!(model.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        let trace: f64 = (0..6).map(|j| covariance(&m)[j][j]).sum();
        assert!((model.eigenvalues.iter().sum::<f64>() - trace).abs() < 1e-9);
    }

    #[test]
    fn explained_variance_ratios() {
        let mut model = fit_pca(
            &[vec![-1.0, 0.0], vec![0.0, 1.0], vec![1.0, -1.0]],
            identity_scaling(2),
        )
        .unwrap();
        model.eigenvalues = vec![3.0, 1.0];
        assert_eq!(explained_variance(&model), [0.75, 0.25]);
    }

    #[test]
    fn isotropic_data_has_equal_ratios() {
        // three orthogonal zero-mean +-1 columns (Hadamard rows)
        let m = vec![
            vec![1.0, 1.0, 1.0],
            vec![-1.0, 1.0, -1.0],
            vec![1.0, -1.0, -1.0],
            vec![-1.0, -1.0, 1.0],
        ];
        let model = fit_pca(&m, identity_scaling(3)).unwrap();
        for r in explained_variance(&model) {
            assert!((r - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn loading_layout_serializes_per_feature() {
        let names = ["MOA", "AECSL", "PMC", "SPTWNG", "AMC", "CVNI", "VCTC", "CAM", "PUIA"];
        let loadings = [
            [0.38, -0.02],
            [-0.16, 0.19],
            [0.37, -0.04],
            [-0.06, 0.36],
            [0.08, 0.28],
            [0.17, 0.22],
            [0.07, 0.31],
            [-0.34, 0.01],
            [0.12, 0.16],
        ];
        let model = PcaModel {
            scaling: ScalingParams {
                features: names.iter().map(|n| FeatureName::new(*n).unwrap()).collect(),
                means: vec![0.0; 9],
                stds: vec![1.0; 9],
                dropped_features: vec![],
            },
            loadings: loadings.to_vec(),
            eigenvalues: vec![1.0; 9],
            explained_variance_2d: 2.0 / 9.0,
        };
        let json: serde_json::Value = serde_json::to_value(&model).unwrap();
        assert_eq!(json["features"][0], "MOA");
        assert_eq!(json["loadings"][0][0], 0.38);
        assert_eq!(json["loadings"][0][1], -0.02);
        assert_eq!(json["features"][8], "PUIA");
        let back: PcaModel = serde_json::from_value(json).unwrap();
        assert_eq!(back, model);
    }

    fn table_from(m: &[Vec<f64>]) -> InstanceTable {
        InstanceTable {
            feature_names: (0..m[0].len())
                .map(|j| FeatureName::new(format!("f{j}")).unwrap())
                .collect(),
            algorithm_names: vec!["A".into()],
            rows: m
                .iter()
                .enumerate()
                .map(|(i, r)| InstanceRecord {
                    instance_id: format!("i{i:03}"),
                    dataset_tag: "D".into(),
                    features: r.clone(),
                    outcomes: vec![Outcome::Good],
                    attributes: Default::default(),
                })
                .collect(),
        }
    }

    fn all_features(t: &InstanceTable) -> FeatureSubset {
        FeatureSubset::new(t.feature_names.iter().cloned()).unwrap()
    }

    #[test]
    fn mean_instance_maps_to_origin_and_reflection_negates() {
        let mut rng = crate::seed::rng(21);
        let m = random_matrix(&mut rng, 20, 3);
        let t = table_from(&m);
        let s = all_features(&t);
        let model = fit_subset(&t, &s).unwrap();
        let means = model.scaling.means.clone();
        let origin = model.project(&means);
        assert!(origin[0].abs() < 1e-12 && origin[1].abs() < 1e-12);
        let x = &m[4];
        let reflected: Vec<f64> = x.iter().zip(&means).map(|(v, mu)| 2.0 * mu - v).collect();
        let (p, q) = (model.project(x), model.project(&reflected));
        assert!((p[0] + q[0]).abs() < 1e-12 && (p[1] + q[1]).abs() < 1e-12);
    }

    #[test]
    fn first_axis_variance_equals_first_eigenvalue() {
        let mut rng = crate::seed::rng(22);
        let t = table_from(&random_matrix(&mut rng, 40, 5));
        let s = all_features(&t);
        let model = fit_subset(&t, &s).unwrap();
        let z = transform(&model, &t, &s).unwrap();
        let n = z.len() as f64;
        for axis in 0..2 {
            let mean = z.points.iter().map(|p| p[axis]).sum::<f64>() / n;
            let var = z.points.iter().map(|p| (p[axis] - mean).powi(2)).sum::<f64>() / (n - 1.0);
            assert!(mean.abs() < 1e-9);
            assert!((var - model.eigenvalues[axis]).abs() < 1e-8);
        }
    }

    #[test]
    fn transform_rejects_mismatched_subset() {
        let mut rng = crate::seed::rng(23);
        let t = table_from(&random_matrix(&mut rng, 10, 3));
        let model = fit_subset(&t, &all_features(&t)).unwrap();
        let other = FeatureSubset::from_names(&["f0", "f1"]).unwrap();
        assert!(matches!(
            transform(&model, &t, &other),
            Err(ProjectError::FeatureMismatch(_))
        ));
        assert!(matches!(
            model.project_named(&[("zz".into(), 1.0)]),
            Err(ProjectError::FeatureMismatch(_))
        ));
    }

    #[test]
    fn rejects_degenerate_shapes() {
        assert!(matches!(
            fit_pca(&[vec![1.0, 2.0], vec![2.0, 1.0]], identity_scaling(2)),
            Err(ProjectError::TooSmall { .. })
        ));
        assert!(matches!(
            fit_pca(&[vec![1.0, f64::NAN], vec![2.0, 1.0], vec![0.0, 0.0]], identity_scaling(2)),
            Err(ProjectError::NonFiniteInput)
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn two_features_explain_everything(seed in any::<u64>()) {
            let mut rng = crate::seed::rng(seed);
            let m = test_standardize(&random_matrix(&mut rng, 8, 2));
            let model = fit_pca(&m, identity_scaling(2)).unwrap();
            prop_assert!((model.explained_variance_2d - 1.0).abs() < 1e-12);
        }

        #[test]
        fn row_order_does_not_change_projection(seed in any::<u64>()) {
            let mut rng = crate::seed::rng(seed);
            let m = random_matrix(&mut rng, 12, 4);
            let t = table_from(&m);
            let mut rev = t.clone();
            rev.rows.reverse();
            let s = all_features(&t);
            let a = fit_subset(&t, &s).unwrap();
            let b = fit_subset(&rev, &s).unwrap();
            for (x, y) in a.loadings.iter().zip(&b.loadings) {
                prop_assert!((x[0] - y[0]).abs() < 1e-9 && (x[1] - y[1]).abs() < 1e-9);
            }
        }

        #[test]
        fn column_order_permutes_loadings(seed in any::<u64>()) {
            let mut rng = crate::seed::rng(seed);
            let m = test_standardize(&random_matrix(&mut rng, 15, 4));
            let swapped: Vec<Vec<f64>> = m.iter().map(|r| vec![r[3], r[2], r[1], r[0]]).collect();
            let a = fit_pca(&m, identity_scaling(4)).unwrap();
            let b = fit_pca(&swapped, identity_scaling(4)).unwrap();
            for j in 0..4 {
                for c in 0..2 {
                    prop_assert!((a.loadings[j][c] - b.loadings[3 - j][c]).abs() < 1e-9);
                }
            }
        }
    }
}
