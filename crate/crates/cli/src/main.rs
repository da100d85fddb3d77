//! `benchdyn` command-line pipeline.

mod commands;
mod config;
mod exit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::Overrides;

#[derive(Debug, Parser)]
#[command(name = "benchdyn", version, about = "Benchmark dynamics analytics pipeline")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// TOML run configuration; flags take precedence over its values.
    #[arg(long, global = true, env = "BENCHDYN_CONFIG")]
    config: Option<PathBuf>,
    /// Line-delimited JSON results file.
    #[arg(long, global = true, env = "BENCHDYN_INPUT")]
    input: Option<PathBuf>,
    /// Task hierarchy CSV (child,parent,toplevel).
    #[arg(long, global = true, env = "BENCHDYN_HIERARCHY")]
    hierarchy: Option<PathBuf>,
    /// Metric polarity CSV (metric_name,polarity,provenance).
    #[arg(long, global = true, env = "BENCHDYN_POLARITY")]
    polarity: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "BENCHDYN_OUT")]
    out: Option<PathBuf>,
    #[arg(long, global = true, env = "BENCHDYN_SEED")]
    seed: Option<u64>,
    /// Comma-separated subset of csv,json,svg.
    #[arg(long, global = true, env = "BENCHDYN_FORMAT")]
    format: Option<String>,
    /// Analysis window as FIRST:LAST years.
    #[arg(long, global = true, env = "BENCHDYN_WINDOW")]
    window: Option<String>,
    #[arg(long, global = true, env = "BENCHDYN_COHORT_YEAR")]
    cohort_year: Option<i32>,
    #[arg(long, global = true, env = "BENCHDYN_CENSOR_YEAR")]
    censor_year: Option<i32>,
    #[arg(long, global = true, env = "BENCHDYN_SOM_SIGMA")]
    som_sigma: Option<f64>,
    #[arg(long, global = true, env = "BENCHDYN_SOM_LR")]
    som_lr: Option<f64>,
    #[arg(long, global = true, env = "BENCHDYN_SOM_ITERS")]
    som_iters: Option<usize>,
    /// SOM grid as ROWSxCOLS.
    #[arg(long, global = true, env = "BENCHDYN_GRID")]
    grid: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse results, apply polarity, and list parse errors and polarity conflicts.
    Ingest {
        /// Fail when any result line is malformed.
        #[arg(long)]
        strict: bool,
    },
    /// Extract SOTA trajectories and their normalised fixed-length vectors.
    Trajectories,
    /// Relative improvements, the task-month map, activity counts and descriptive statistics.
    Relimp,
    /// Train the self-organizing map and assign trajectories to clusters.
    Cluster,
    /// Rank trajectories by distance to a gold function.
    Match {
        /// linear, saturation, burst or all.
        #[arg(long, default_value = "all")]
        gold: String,
        #[arg(long, default_value_t = 10)]
        k: usize,
    },
    /// Per benchmark-year lifecycle states and per-task counts.
    Lifecycle,
    /// Dataset utilization ranking, equal-share fraction and top/bottom lists.
    Popularity {
        /// Entries per top/bottom list.
        #[arg(long)]
        list_size: Option<usize>,
    },
    /// Compare top and bottom datasets attribute by attribute.
    Compare {
        #[arg(long, env = "BENCHDYN_ATTRIBUTES")]
        attributes: Option<PathBuf>,
    },
    /// Repository coverage from a random sample of a paper corpus.
    Coverage {
        /// SOTA papers found in the sample.
        #[arg(long)]
        s: Option<u64>,
        /// Sample size.
        #[arg(long)]
        n: Option<u64>,
        /// Corpus size.
        #[arg(long = "T", alias = "t")]
        corpus: Option<u64>,
        /// SOTA papers captured by the repository.
        #[arg(long)]
        c: Option<u64>,
        /// Also print the sample size needed for this margin of error.
        #[arg(long)]
        margin: Option<f64>,
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
    },
    /// Render the task-month map, lifecycle map and activity chart.
    Report,
    /// Run every stage in order.
    All {
        #[arg(long, env = "BENCHDYN_ATTRIBUTES")]
        attributes: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit::exit_code(&err))
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let g = cli.global;
    let file = match &g.config {
        Some(path) => config::load_file(path)?,
        None => config::FileConfig::default(),
    };
    let attributes = match &cli.command {
        Command::Compare { attributes } | Command::All { attributes } => attributes.clone(),
        _ => None,
    };
    let overrides = Overrides {
        results: g.input,
        hierarchy: g.hierarchy,
        polarity: g.polarity,
        attributes,
        out: g.out,
        seed: g.seed,
        formats: g.format,
        window: g.window,
        cohort_year: g.cohort_year,
        censor_year: g.censor_year,
        som_sigma: g.som_sigma,
        som_lr: g.som_lr,
        som_iters: g.som_iters,
        grid: g.grid,
    };
    let cfg = config::resolve(file, overrides)?;
    let mut ctx = commands::Context::new(cfg);
    match cli.command {
        Command::Ingest { strict } => ctx.ingest(strict),
        Command::Trajectories => ctx.trajectories(),
        Command::Relimp => ctx.relimp(),
        Command::Cluster => ctx.cluster(),
        Command::Match { gold, k } => ctx.match_gold(&gold, k),
        Command::Lifecycle => ctx.lifecycle(),
        Command::Popularity { list_size } => ctx.popularity(list_size),
        Command::Compare { .. } => ctx.compare(),
        Command::Coverage { s, n, corpus, c, margin, confidence } => ctx.coverage(s, n, corpus, c, margin, confidence),
        Command::Report => ctx.report(),
        Command::All { .. } => ctx.all(),
    }
}
