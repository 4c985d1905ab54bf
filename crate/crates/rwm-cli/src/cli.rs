//! Flag surface. Every command is deterministic given --seed; wall-clock
//! fields in bench output are the only exception.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rwm_core::{RwmConfig, UpdateStrategy};

#[derive(Parser)]
#[command(
    name = "rwm",
    version,
    about = "Mutually reinforcing random walks over multi-layer networks",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads for parallel sections (0 = one per core).
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Subcommand)]
pub enum Command {
    /// Detect the query node's local community in every layer.
    Query(QueryArgs),
    /// Rank all nodes of every layer by walk score.
    Rank(RankArgs),
    /// Remove a probe set of edges, predict links, report precision.
    Linkpred(LinkpredArgs),
    /// Sample walk contexts for embedding training.
    Sample(SampleArgs),
    /// Generate a synthetic multi-layer dataset.
    Gen(GenArgs),
    /// Time the update strategies on synthetic instances.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

/// Walk parameters shared by every command that runs the engine.
#[derive(Args)]
pub struct WalkFlags {
    /// Probability of following an edge; the rest restarts at the query.
    #[arg(long, default_value_t = 0.9)]
    pub alpha: f64,
    /// Decay of relevance increments per iteration.
    #[arg(long, default_value_t = 0.7)]
    pub lambda: f64,
    /// Operator-change tolerance; sizes the reinforcement phase.
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Probability mass a truncated update must cover.
    #[arg(long, default_value_t = 0.9)]
    pub theta: f64,
    /// Hard cap on iterations.
    #[arg(long, default_value_t = 1000)]
    pub max_iters: usize,
    /// Stop once the largest per-layer L1 change falls below this.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for every randomized step.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Update strategy: exact, earlystop (freeze relevance after the planned
    /// split), or partial (also truncate vector updates).
    #[arg(long, default_value = "partial", value_parser = parse_mode)]
    pub mode: UpdateStrategy,
}

fn parse_mode(s: &str) -> Result<UpdateStrategy, String> {
    match s {
        "a1" => Ok(UpdateStrategy::EarlyStop),
        "a2" => Ok(UpdateStrategy::Partial),
        other => other.parse(),
    }
}

impl WalkFlags {
    pub fn config(&self) -> RwmConfig {
        RwmConfig {
            alpha: self.alpha,
            lambda: self.lambda,
            epsilon: self.epsilon,
            theta: self.theta,
            max_iters: self.max_iters,
            vector_tol: self.tol,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
pub struct QueryArgs {
    /// Dataset manifest (JSON).
    pub manifest: PathBuf,
    /// Layer holding the query nodes.
    #[arg(long)]
    pub layer: usize,
    /// Query node id; repeat for a multi-node query.
    #[arg(long, required = true)]
    pub node: Vec<u32>,
    #[command(flatten)]
    pub walk: WalkFlags,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the artifact here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct RankArgs {
    pub manifest: PathBuf,
    #[arg(long)]
    pub layer: usize,
    #[arg(long, required = true)]
    pub node: Vec<u32>,
    #[command(flatten)]
    pub walk: WalkFlags,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct LinkpredArgs {
    pub manifest: PathBuf,
    /// Layer to probe and predict in.
    #[arg(long)]
    pub target: usize,
    /// Fraction of the target layer's edges removed as the probe set.
    #[arg(long, default_value_t = 0.3)]
    pub remove: f64,
    /// Number of top pairs to emit.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[command(flatten)]
    pub walk: WalkFlags,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct SampleArgs {
    pub manifest: PathBuf,
    /// Layer whose nodes start the walks.
    #[arg(long)]
    pub target: usize,
    #[arg(long, default_value_t = 40)]
    pub walk_length: usize,
    #[arg(long, default_value_t = 10)]
    pub walks_per_node: usize,
    /// Return bias: smaller favors revisiting the previous node.
    #[arg(long, requires = "q")]
    pub p: Option<f64>,
    /// Outward bias: smaller favors leaving the previous neighborhood.
    #[arg(long, requires = "p")]
    pub q: Option<f64>,
    #[command(flatten)]
    pub walk: WalkFlags,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct GenArgs {
    /// Directory receiving layer files, block labels, and the manifest.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub nodes: usize,
    #[arg(long, default_value_t = 10.0)]
    pub avg_degree: f64,
    #[arg(long, default_value_t = 4)]
    pub communities: usize,
    /// Expected fraction of a node's degree leaving its block.
    #[arg(long, default_value_t = 0.2)]
    pub mixing: f64,
    #[arg(long, default_value_t = 3)]
    pub layers: usize,
    /// Probability each base edge survives into a layer.
    #[arg(long, default_value_t = 0.5)]
    pub keep_ratio: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Comma-separated instance sizes.
    #[arg(long, default_value = "2000", value_delimiter = ',')]
    pub nodes: Vec<usize>,
    #[arg(long, default_value_t = 14.0)]
    pub avg_degree: f64,
    #[arg(long, default_value_t = 8)]
    pub communities: usize,
    #[arg(long, default_value_t = 0.3)]
    pub mixing: f64,
    #[arg(long, default_value_t = 3)]
    pub layers: usize,
    #[arg(long, default_value_t = 0.5)]
    pub keep_ratio: f64,
    /// Comma-separated strategies to time.
    #[arg(long, default_value = "exact,earlystop,partial", value_delimiter = ',', value_parser = parse_mode)]
    pub strategies: Vec<UpdateStrategy>,
    /// Query nodes drawn per instance.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Timing repetitions per cell; the median is reported.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: u64,
    #[command(flatten)]
    pub walk: WalkFlags,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
}
