// Run every stage on the bundled fixture, read the report back and rank
// algorithms for a new instance with the saved models.

use eapr::config::PipelineConfig;
use eapr::pipeline::{cmd_select, run_pipeline, REPORT_FILE};
use eapr::report::read_report;

pub fn run_example() -> anyhow::Result<()> {
    let dir = env!("CARGO_MANIFEST_DIR");
    let out = tempfile::tempdir()?;
    let mut config = PipelineConfig::parse_str(&std::fs::read_to_string(format!("{dir}/fixtures/synthetic60.conf"))?)?;
    config.input = format!("{dir}/fixtures/synthetic60.csv").into();
    config.output = out.path().to_path_buf();
    run_pipeline(&config)?;

    let report = read_report(&out.path().join(REPORT_FILE))?;
    println!(
        "features {:?}, 2D explained variance {:.3}",
        report.features.iter().map(|f| f.name.as_str()).collect::<Vec<_>>(),
        report.explained_variance_2d
    );
    for f in &report.footprints {
        println!(
            "{:<9} normalized area {:.3}  net {:.3}  purity {:.3}",
            f.algorithm, f.area_good_normalized, f.area_net_normalized, f.purity
        );
    }
    println!("selector CV accuracy {:.3}", report.selector.cross_validated.accuracy);

    // the query needs values for every feature the projection uses
    let names: Vec<&str> = report.features.iter().map(|f| f.name.as_str()).collect();
    let table = eapr::ingest::parse_instance_table(
        std::fs::File::open(format!("{dir}/fixtures/synthetic60.csv"))?,
        &config.schema,
    )?;
    let row = &table.rows[0];
    let values: Vec<String> = names
        .iter()
        .map(|n| row.features[table.feature_names.iter().position(|f| f.as_str() == *n).unwrap()].to_string())
        .collect();
    let query = format!("{}\n{}\n", names.join(","), values.join(","));
    print!("ranking for {}:\n{}", row.instance_id, cmd_select(out.path(), query.as_bytes())?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
