// Parse a feature/outcome CSV, validate it, aggregate rows per dataset and
// standardize a feature subset.

use eapr::ingest::{aggregate_rows, parse_instance_table, standardize, ColumnSchema, GroupKey};
use eapr::FeatureSubset;

pub fn run_example() -> anyhow::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/synthetic60.csv");
    let table = parse_instance_table(std::fs::File::open(path)?, &ColumnSchema::default())?;
    table.ensure_valid()?;
    println!(
        "{} instances, features {:?}, algorithms {:?}",
        table.len(),
        table.feature_names.iter().map(|f| f.as_str()).collect::<Vec<_>>(),
        table.algorithm_names
    );

    // rows measured per class of a bug's patch, collapsed to one row per bug
    let per_class = "instance_id,dataset,bug,wmc,cbo,aprt:Kali\n\
                     c1,Bugs.jar,B-1,10,4,1\n\
                     c2,Bugs.jar,B-1,14,,1\n\
                     c3,Defects4J,D-7,3,2,0\n";
    let schema = ColumnSchema {
        attribute_columns: vec!["bug".into()],
        ..ColumnSchema::default()
    };
    let per_bug = aggregate_rows(&parse_instance_table(per_class.as_bytes(), &schema)?, &GroupKey::Attribute("bug".into()))?;
    for row in &per_bug.table.rows {
        println!("bug {} ({}): wmc {} cbo {}", row.instance_id, row.dataset_tag, row.features[0], row.features[1]);
    }

    let subset = FeatureSubset::from_names(&["wmc", "cbo", "loc"])?;
    let (z, scaling) = standardize(&table, &subset)?;
    println!("first standardized row {:?} (means {:?})", z[0], scaling.means);
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
