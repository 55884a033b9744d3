//! `eapr` command-line front end. All work happens in the library; this only
//! assembles the configuration and maps failures to exit codes.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eapr::config::PipelineConfig;
use eapr::pipeline::{cmd_select, run_pipeline, run_stage, PipelineError, Stage};

#[derive(Parser)]
#[command(name = "eapr", version, about = "Instance space analysis of an algorithm portfolio")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat key=value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Input CSV (overrides `input`).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output directory (overrides `output`).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Global seed (overrides `seed` and EAPR_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Any configuration key, e.g. `--set ga.population=20`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage in order.
    Pipeline,
    /// Parse and validate the input table.
    Ingest,
    /// Learn the feature subset.
    SelectFeatures,
    /// Fit the 2D projection.
    Project,
    /// Compute per-algorithm footprints.
    Footprint,
    /// Train the per-algorithm selector models.
    Classify,
    /// Render plots and the analysis report.
    Plot,
    /// Rank algorithms for a feature vector read from stdin
    /// (a header line of feature names, then a line of values).
    Select {
        /// Directory holding pca_model.json and the models (defaults to the output directory).
        #[arg(long)]
        models: Option<PathBuf>,
    },
}

fn load_config(cli: &Cli) -> Result<PipelineConfig, PipelineError> {
    let parse = |e: eapr::config::ConfigError| PipelineError::Parse(e.to_string());
    let mut cfg = PipelineConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Io(format!("{}: {e}", path.display())))?;
        cfg.apply_text(&text).map_err(parse)?;
    }
    if let Ok(seed) = std::env::var("EAPR_SEED") {
        cfg.set("seed", seed.trim()).map_err(parse)?;
    }
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| PipelineError::Parse(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        cfg.set(k.trim(), v.trim()).map_err(parse)?;
    }
    if let Some(p) = &cli.input {
        cfg.input = p.clone();
    }
    if let Some(p) = &cli.output {
        cfg.output = p.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cfg.output.as_os_str().is_empty() {
        return Err(PipelineError::Parse("output path is empty".into()));
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), PipelineError> {
    let cfg = load_config(cli)?;
    let needs_input = matches!(cli.command, Command::Pipeline | Command::Ingest);
    if needs_input && cfg.input.as_os_str().is_empty() {
        return Err(PipelineError::Parse("no input path configured".into()));
    }
    let stage = match &cli.command {
        Command::Pipeline => return run_pipeline(&cfg),
        Command::Select { models } => {
            let dir = models.clone().unwrap_or_else(|| cfg.output.clone());
            print!("{}", cmd_select(&dir, std::io::stdin().lock())?);
            return Ok(());
        }
        Command::Ingest => Stage::Ingest,
        Command::SelectFeatures => Stage::SelectFeatures,
        Command::Project => Stage::Project,
        Command::Footprint => Stage::Footprint,
        Command::Classify => Stage::Classify,
        Command::Plot => Stage::Plot,
    };
    run_stage(stage, &cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
