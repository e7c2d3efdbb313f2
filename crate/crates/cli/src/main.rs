//! `chdc`: run a conformal HDC experiment from a config file and flags.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chdc_core::config::{parse_pairs, ExperimentConfig};
use chdc_core::eval::{run_experiment, summary_table, write_csv, write_json};
use chdc_core::{Error, Result};
use clap::Parser;

/// Runs repeated split-conformal experiments and writes results.csv and
/// results.json into the output directory.
#[derive(Debug, Parser)]
#[command(name = "chdc", version)]
struct Cli {
    /// Flat `key = value` config file; flags below override it.
    config: Option<PathBuf>,

    /// synthetic, mnist, isolet, languages or spike_surrogate.
    #[arg(long)]
    dataset: Option<String>,

    /// Significance level in (0, 1).
    #[arg(long)]
    alpha: Option<String>,

    /// Score kinds, comma separated (e.g. `ratio,discount,penalized:0.5`).
    #[arg(long)]
    score: Option<String>,

    /// Hypervector dimension.
    #[arg(long)]
    d: Option<String>,

    /// Master seed.
    #[arg(long)]
    seed: Option<String>,

    /// Number of repetitions.
    #[arg(long)]
    reps: Option<String>,

    /// Output directory.
    #[arg(long)]
    out: Option<String>,

    /// Any other config key, as `key=value`; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Do not print the summary table.
    #[arg(long, short)]
    quiet: bool,
}

fn read_config(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config {
        field: "config".into(),
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_pairs(&text)
}

fn assignments(cli: &Cli) -> Result<Vec<(String, String)>> {
    let mut pairs = match &cli.config {
        Some(p) => read_config(p)?,
        None => Vec::new(),
    };
    let flags = [
        ("dataset", &cli.dataset),
        ("alpha", &cli.alpha),
        ("scores", &cli.score),
        ("d", &cli.d),
        ("seed", &cli.seed),
        ("repetitions", &cli.reps),
        ("out", &cli.out),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            pairs.push((key.to_string(), v.clone()));
        }
    }
    for item in &cli.set {
        let (k, v) = item.split_once('=').ok_or_else(|| Error::Config {
            field: "--set".into(),
            message: format!("expected KEY=VALUE, got `{item}`"),
        })?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io { path: path.to_path_buf(), source: e })
}

fn run(cli: &Cli) -> Result<()> {
    let config = ExperimentConfig::from_pairs(&assignments(cli)?)?;
    let (plan, metadata) = config.build_plan()?;
    let result = run_experiment(&plan)?;
    fs::create_dir_all(&config.out).map_err(|e| Error::Io { path: config.out.clone(), source: e })?;
    write_csv(&result, create(&config.out.join("results.csv"))?)?;
    write_json(&result, &metadata, create(&config.out.join("results.json"))?)?;
    if !cli.quiet {
        println!("dataset {} (config {})", metadata.dataset, metadata.config_hash);
        print!("{}", summary_table(&result));
        println!("wrote {}", config.out.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
