// Fit the two-component projection on a feature subset and project a new
// instance given by name.

use eapr::ingest::{parse_instance_table, ColumnSchema};
use eapr::project::{explained_variance, fit_subset, transform};
use eapr::FeatureSubset;

pub fn run_example() -> anyhow::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/synthetic60.csv");
    let table = parse_instance_table(std::fs::File::open(path)?, &ColumnSchema::default())?;
    let subset = FeatureSubset::from_names(&["wmc", "dit", "cbo", "rfc", "loc"])?;

    let model = fit_subset(&table, &subset)?;
    println!("eigenvalues {:?}", model.eigenvalues);
    println!("explained variance {:?}", explained_variance(&model));
    println!("2D explained variance {:.3}", model.explained_variance_2d);
    for (name, l) in model.scaling.features.iter().zip(&model.loadings) {
        println!("  {:<5} z1 {:+.3}  z2 {:+.3}", name.as_str(), l[0], l[1]);
    }

    let coords = transform(&model, &table, &subset)?;
    println!("{} -> {:?}", table.rows[0].instance_id, coords.points[0]);

    let new_instance: Vec<(String, f64)> = [("wmc", 15.0), ("dit", 2.0), ("cbo", 9.0), ("rfc", 35.0), ("loc", 180.0)]
        .iter()
        .map(|(n, v)| (n.to_string(), *v))
        .collect();
    println!("new instance -> {:?}", model.project_named(&new_instance)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
