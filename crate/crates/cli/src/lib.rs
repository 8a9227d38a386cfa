//! Driver for the `hdisc` tool: instance I/O, pipeline runs, model experiments and the
//! acceptance suite.

pub mod commands;
pub mod fixtures;
pub mod output;
pub mod suite;

use clap::{Parser, Subcommand};
use std::fmt;
use std::path::PathBuf;

pub const TOOL: &str = "hdisc";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_SEED: u64 = 17;

#[derive(Parser, Debug, Clone)]
#[command(name = "hdisc", version, about = "Curve pairs, train tracks and electrified graphs at desk scale")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Instance file (curve pair, track, graph, or frozen values for `suite`).
    #[arg(long, global = true, env = "HDISC_INPUT")]
    pub input: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "HDISC_OUT", default_value = "hdisc-out")]
    pub out: PathBuf,
    #[arg(long, global = true, env = "HDISC_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads.
    #[arg(long, global = true, env = "HDISC_JOBS", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: u64,
    /// Depth bound for split/shift enumeration.
    #[arg(long, global = true, env = "HDISC_BUDGET_DEPTH", default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget_depth: u64,
    /// Sample count: sampled quadruples for delta, or walk trials for `models`.
    #[arg(long, global = true, env = "HDISC_SAMPLE", value_parser = clap::value_parser!(u64).range(1..))]
    pub sample: Option<u64>,
    /// Comma-separated criterion groups or numbers for `suite`.
    #[arg(long, global = true, env = "HDISC_FILTER")]
    pub filter: Option<String>,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Eq)]
pub enum Command {
    /// Surgery sequence and bicorn/track transcript for a curve pair.
    Surgery,
    /// Validation, vertex cycles and moves for a train track.
    Track,
    /// Electrification, delta, separation and path reports for a graph.
    Coarse {
        /// Also regenerate the model regression CSVs.
        #[arg(long)]
        model_suite: bool,
    },
    /// Farey, free-tree, translation and drift experiments.
    Models,
    /// Acceptance criteria 1-10.
    Suite,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Surgery => "surgery",
            Command::Track => "track",
            Command::Coarse { .. } => "coarse",
            Command::Models => "models",
            Command::Suite => "suite",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub jobs: usize,
    pub budget_depth: usize,
    pub sample: Option<usize>,
    pub filter: Option<String>,
}

impl From<Cli> for RunConfig {
    fn from(c: Cli) -> Self {
        RunConfig {
            command: c.command,
            input: c.input,
            out: c.out,
            seed: c.seed,
            jobs: c.jobs as usize,
            budget_depth: c.budget_depth as usize,
            sample: c.sample.map(|s| s as usize),
            filter: c.filter,
        }
    }
}

impl RunConfig {
    pub fn new(command: Command, out: impl Into<PathBuf>) -> RunConfig {
        RunConfig {
            command,
            input: None,
            out: out.into(),
            seed: DEFAULT_SEED,
            jobs: 1,
            budget_depth: 3,
            sample: None,
            filter: None,
        }
    }

    /// Parameters that shape the outputs, in a fixed textual form.
    pub fn canonical(&self) -> String {
        format!(
            "command={} seed={} budget_depth={} sample={} filter={}",
            self.command.name(),
            self.seed,
            self.budget_depth,
            self.sample.map_or("-".into(), |s| s.to_string()),
            self.filter.as_deref().unwrap_or("-")
        )
    }
}

#[derive(Debug)]
pub enum Failure {
    /// Unreadable or invalid input; exit code 2.
    Input(anyhow::Error),
    /// A suite criterion failed; exit code 1.
    Criterion { id: usize, name: String, detail: String },
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Criterion { .. } => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(e) => write!(f, "input error: {e:#}"),
            Failure::Criterion { id, name, detail } => write!(f, "criterion {id} ({name}) failed: {detail}"),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

/// Runs one subcommand and returns the files written.
pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Failure::Input(e.into()))?;
    pool.install(|| match &cfg.command {
        Command::Surgery => commands::surgery::run(cfg),
        Command::Track => commands::track::run(cfg),
        Command::Coarse { model_suite } => commands::coarse::run(cfg, *model_suite),
        Command::Models => commands::models::run(cfg),
        Command::Suite => suite::run(cfg),
    })
}
