// Genetic-algorithm feature-subset search on the bundled fixture.

use eapr::feature_select::{run_ga, GaConfig};
use eapr::ingest::{parse_instance_table, ColumnSchema};

pub fn run_example() -> anyhow::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/synthetic60.csv");
    let table = parse_instance_table(std::fs::File::open(path)?, &ColumnSchema::default())?;
    let config = GaConfig {
        population_size: 20,
        generations: 10,
        min_k: 2,
        max_k: 5,
        seed: 42,
        ..GaConfig::default()
    };
    let result = run_ga(&table, &config)?;
    println!(
        "best subset {:?}: mean CV accuracy {:.3}",
        result.best.iter().map(|f| f.as_str()).collect::<Vec<_>>(),
        result.best_fitness.mean_cv_accuracy
    );
    println!("best-so-far per generation {:?}", result.history);
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
