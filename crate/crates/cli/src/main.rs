use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use linefire_core::config::{Config, Inputs};
use linefire_core::engine::{self, load_results, read_manifest, run_all, Engine, RunOptions};
use linefire_core::gridmodel::total_ignition_points;
use linefire_core::report::{
    build_report, format_ranking_csv, load_matrices, rank_matrices, write_report, ReportError,
};
use linefire_core::scenario::enumerate_scenarios;

/// Wildfire ignition risk ranking for transmission lines.
#[derive(Parser)]
#[command(name = "linefire", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and check every input, then print counts.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Execute every scenario into a results directory.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; defaults to the number of CPUs.
        #[arg(long)]
        parallelism: Option<usize>,
        /// Continue a checkpointed run in `out`.
        #[arg(long)]
        resume: bool,
        /// Stop after roughly this many scenarios, leaving a resumable checkpoint.
        #[arg(long, value_name = "N")]
        stop_after: Option<usize>,
        #[arg(long, default_value_t = engine::DEFAULT_BATCH_SIZE, hide = true)]
        batch_size: usize,
    },
    /// Build ranking, matrices, curves and chart from a finished run.
    Report {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank lines from existing matrix_<branch>.csv files.
    Rank {
        #[arg(long)]
        matrices: PathBuf,
        #[arg(long)]
        config: PathBuf,
    },
}

enum Failure {
    Validation(anyhow::Error),
    Runtime(anyhow::Error),
    Incomplete(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Runtime(_) => 2,
            Failure::Incomplete(_) => 3,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Validation(e) | Failure::Runtime(e) | Failure::Incomplete(e) => e,
        }
    }
}

fn validation<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Validation(e.into())
}

fn runtime<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Runtime(e.into())
}

fn load_inputs(path: &Path) -> Result<Inputs, Failure> {
    let config = Config::load(path).map_err(validation)?;
    Inputs::load(config).map_err(validation)
}

fn validate(config: &Path) -> Result<(), Failure> {
    let inputs = load_inputs(config)?;
    Engine::from_inputs(&inputs).map_err(validation)?;
    let spacing = inputs.config.study.tower_spacing_miles;
    let g = inputs.landscape.geometry();
    println!("landscape: {} x {} cells", g.n_cols, g.n_rows);
    println!("lines: {}", inputs.network.lines().len());
    println!("links: {}", inputs.network.links().len());
    println!("ignition points: {}", total_ignition_points(&inputs.network, spacing));
    println!("scenarios: {}", enumerate_scenarios(&inputs.network, spacing).len());
    println!("weather records: {}", inputs.weather.len());
    Ok(())
}

fn run(
    config: &Path,
    out: &Path,
    parallelism: Option<usize>,
    resume: bool,
    stop_after: Option<usize>,
    batch_size: usize,
) -> Result<(), Failure> {
    let inputs = load_inputs(config)?;
    let engine = Engine::from_inputs(&inputs).map_err(validation)?;
    let keys = enumerate_scenarios(&inputs.network, inputs.config.study.tower_spacing_miles);
    let parallelism = parallelism.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let opts = RunOptions {
        parallelism,
        resume,
        batch_size,
        stop_after,
        ..RunOptions::new(out, inputs.digest.clone())
    };
    let summary = run_all(&engine, &keys, &opts).map_err(runtime)?;
    println!(
        "scenarios: {} done of {} ({} resumed)",
        summary.completed, summary.total, summary.resumed
    );
    if !summary.is_complete() {
        return Err(Failure::Incomplete(anyhow::anyhow!(
            "stopped with {} scenario(s) left; rerun with --resume",
            summary.total - summary.completed
        )));
    }
    Ok(())
}

fn report(config: &Path, results: &Path, out: &Path) -> Result<(), Failure> {
    let inputs = load_inputs(config)?;
    if let Ok(manifest) = read_manifest(results) {
        if manifest.digest != inputs.digest {
            return Err(runtime(anyhow::anyhow!(
                "results in {} were produced from different inputs",
                results.display()
            )));
        }
    }
    let damages = load_results(results).map_err(runtime)?;
    let weights = &inputs.weights;
    let built = build_report(&damages, &inputs.network, inputs.config.study.tower_spacing_miles, weights);
    let built = match built {
        Ok(r) => r,
        Err(ReportError::Incomplete { missing }) => {
            for k in missing.iter().take(10) {
                eprintln!("missing: {k}");
            }
            return Err(Failure::Incomplete(anyhow::anyhow!(
                "{} scenario(s) missing from {}",
                missing.len(),
                results.display()
            )));
        }
        Err(e) => return Err(runtime(e)),
    };
    let written = write_report(&built, weights, out).map_err(runtime)?;
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

fn rank(matrices: &Path, config: &Path) -> Result<(), Failure> {
    let config = Config::load(config).map_err(validation)?;
    let weights = config.weights().map_err(validation)?;
    let loaded = load_matrices(matrices).map_err(validation)?;
    if loaded.is_empty() {
        return Err(validation(anyhow::anyhow!(
            "no matrix_<branch>.csv files in {}",
            matrices.display()
        )));
    }
    let ranking = rank_matrices(&loaded, &weights).map_err(validation)?;
    print!("{}", format_ranking_csv(&ranking));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { config } => validate(config),
        Command::Run {
            config,
            out,
            parallelism,
            resume,
            stop_after,
            batch_size,
        } => run(config, out, *parallelism, *resume, *stop_after, *batch_size),
        Command::Report { config, results, out } => report(config, results, out),
        Command::Rank { matrices, config } => rank(matrices, config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}

