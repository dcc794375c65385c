mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Heat kernel coupling of weighted graphs.
#[derive(Debug, Parser)]
#[command(name = "hkc", version, about)]
struct Cli {
    /// Worker threads for parallel gradient evaluation (0 = all cores).
    #[arg(long, global = true, env = "HKC_THREADS", default_value_t = 0)]
    threads: usize,

    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate an experiment: graphs, coupling functions and a problem file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Minimize the HKC objective for a problem file.
    Solve(SolveArgs),
    /// Propagate initial conditions with the heat operator.
    Heat(HeatArgs),
    /// All-pairs diffusion distances.
    Diffdist(DiffdistArgs),
    /// Leave-one-out retrieval metrics for a distance matrix.
    Eval(EvalArgs),
    /// Laplacian average of two graphs on the same vertices.
    Average(AverageArgs),
    /// Check the valid-Laplacian properties.
    Validate(ValidateArgs),
}

#[derive(Debug, Subcommand)]
enum GenKind {
    /// Two eccentric rings joined by graph-specific bridges.
    Circles(CirclesArgs),
    /// A closed ring and its cracked copy.
    Ring(RingArgs),
    /// Two labeled feature modalities with kNN graphs and class coupling.
    Multimodal(MultimodalArgs),
    /// kNN Gaussian graph from a point-cloud CSV.
    Knn(KnnArgs),
}

#[derive(Debug, Args, Serialize)]
struct CirclesArgs {
    #[arg(long, default_value_t = hkc::data_gen::DEFAULT_N_PER_RING)]
    n_per_ring: usize,
    #[arg(long, default_value_t = 2)]
    bridges: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Heat time used to smooth the landmark indicators (0 keeps indicators).
    #[arg(long, default_value_t = 0.0)]
    landmark_smoothing: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct RingArgs {
    #[arg(long, default_value_t = 70)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Keep the second ring closed.
    #[arg(long)]
    no_crack: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.0)]
    landmark_smoothing: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct MultimodalArgs {
    #[arg(long, default_value_t = 120)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    classes: usize,
    #[arg(long, default_value_t = 8)]
    dim: usize,
    #[arg(long, default_value_t = 4.0)]
    separation: f64,
    #[arg(long, default_value_t = 1.0)]
    ambiguity: f64,
    #[arg(long, default_value_t = 1.0)]
    noise: f64,
    /// Neighbors per point in each modality graph.
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct KnnArgs {
    /// Point-cloud CSV, one row per point.
    #[arg(long)]
    points: PathBuf,
    /// The last column holds integer class labels.
    #[arg(long)]
    labeled: bool,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Global Gaussian bandwidth; self-tuning per-point scales when absent.
    #[arg(long)]
    sigma: Option<f64>,
    /// Output graph JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Route {
    Spectral,
    Block,
}

#[derive(Debug, Args, Serialize)]
struct SolveArgs {
    /// Problem JSON (graph1, graph2, F, G and optional times and alpha).
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated, strictly increasing kernel times.
    #[arg(long, value_delimiter = ',')]
    times: Option<Vec<f64>>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    gtol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long, value_enum)]
    route: Option<Route>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct HeatArgs {
    #[arg(long)]
    graph: PathBuf,
    /// One or more comma-separated times.
    #[arg(long, value_delimiter = ',', required = true)]
    t: Vec<f64>,
    /// Initial conditions, one column per function.
    #[arg(long)]
    init: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct DiffdistArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct EvalArgs {
    /// Square distance matrix CSV.
    #[arg(long)]
    dist: PathBuf,
    /// One integer label per line.
    #[arg(long)]
    labels: PathBuf,
    /// Metrics JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct AverageArgs {
    #[arg(long)]
    g1: PathBuf,
    #[arg(long)]
    g2: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct ValidateArgs {
    /// Graph whose edge set defines the allowed sparsity.
    #[arg(long)]
    graph: PathBuf,
    /// Matrix CSV to check; the graph's own Laplacian when absent.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

/// Exit status for a solve that stopped without converging.
const EXIT_NOT_CONVERGED: u8 = 3;
/// Exit status for numerical failure or an invalid Laplacian.
const EXIT_NUMERICAL: u8 = 4;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: cannot configure {} threads: {e}", cli.threads);
        return ExitCode::FAILURE;
    }

    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
