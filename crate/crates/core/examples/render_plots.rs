// Render footprint, feature-distribution and dataset-origin SVGs.

use eapr::footprint::compute_footprint;
use eapr::ingest::{minmax_normalize, parse_instance_table, ColumnSchema};
use eapr::project::{fit_subset, transform};
use eapr::report::{render_dataset_svg, render_feature_svg, render_footprint_svg, PlotSpec};
use eapr::FeatureSubset;

pub fn run_example() -> anyhow::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/synthetic60.csv");
    let table = parse_instance_table(std::fs::File::open(path)?, &ColumnSchema::default())?;
    let subset = FeatureSubset::from_names(&["wmc", "cbo", "loc", "rfc"])?;
    let model = fit_subset(&table, &subset)?;
    let coords = transform(&model, &table, &subset)?;
    let spec = PlotSpec::default();
    let out = tempfile::tempdir()?;

    let labels = table.outcomes_of(0);
    let fp = compute_footprint(&coords, &labels, &table.algorithm_names[0])?;
    let svg = render_footprint_svg(&coords, &labels, &fp, &spec)?;
    std::fs::write(out.path().join("footprint.svg"), &svg)?;

    let wmc = table.feature_column(0);
    let (lo, hi) = wmc.iter().fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(*v), b.max(*v)));
    let feature = render_feature_svg(&coords, &minmax_normalize(&wmc), "wmc", (lo, hi), &spec)?;
    std::fs::write(out.path().join("feature_wmc.svg"), &feature)?;

    let tags: Vec<String> = table.rows.iter().map(|r| r.dataset_tag.clone()).collect();
    let datasets = render_dataset_svg(&coords, &tags, &spec)?;
    std::fs::write(out.path().join("datasets.svg"), &datasets)?;

    println!(
        "wrote footprint ({} bytes), feature ({} bytes) and dataset ({} bytes) plots",
        svg.len(),
        feature.len(),
        datasets.len()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> anyhow::Result<()> {
    run_example()
}
