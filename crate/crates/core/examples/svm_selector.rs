// Train one SVM per algorithm, cross-validate, and rank algorithms for a
// new point of the instance space.

use std::collections::BTreeMap;

use eapr::classify::{cross_validate, select_aprt, train_svm, SvmConfig};

pub fn run_example() -> anyhow::Result<()> {
    // a grid over [-1, 1]^2: "left" is good where x < 0, "top" where y > 0
    let points: Vec<[f64; 2]> = (0..15)
        .flat_map(|i| (0..15).map(move |j| [-1.0 + i as f64 / 7.0, -1.0 + j as f64 / 7.0]))
        .filter(|p| p[0].abs() > 0.05 && p[1].abs() > 0.05)
        .collect();
    let labels = |good: &dyn Fn([f64; 2]) -> bool| -> Vec<f64> {
        points.iter().map(|p| if good(*p) { 1.0 } else { -1.0 }).collect()
    };
    let tasks = [
        ("left", labels(&|p| p[0] < 0.0)),
        ("top", labels(&|p| p[1] > 0.0)),
    ];

    let config = SvmConfig { seed: 7, ..SvmConfig::default() };
    let mut models = BTreeMap::new();
    for (name, y) in &tasks {
        let cv = cross_validate(&points, y, 5, &config)?;
        let model = train_svm(&points, y, &config)?;
        println!(
            "{name}: {} support vectors, 5-fold accuracy {:.3}",
            model.support_vectors.len(),
            cv.accuracy
        );
        models.insert(name.to_string(), model);
    }
    for query in [[-0.8, -0.5], [0.6, 0.7]] {
        println!("{query:?} -> {:?}", select_aprt(&models, query));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
