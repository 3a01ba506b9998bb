//! End-to-end command-line pipeline: ingest a monolith description, train
//! the clustering- and outlier-aware autoencoder, partition the classes,
//! compute metrics and write the reports.

pub mod dot;
pub mod fixtures;
pub mod input;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use cogcn::gcn::LossWeights;
use cogcn::graph::{AppGraph, GraphError};
use cogcn::synth::{planted_graph, PlantedSpec};
use cogcn::trainer::{self, rank_outliers, TrainConfig, TrainError};
use thiserror::Error;

use crate::input::InputError;
use crate::report::{build_report, to_sorted_json, ConfigEcho};

/// Exit codes: 0 success, 1 output IO failure, 2 invalid input file,
/// 3 divergence, 4 invalid flag combination.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("invalid monolith description: {0}")]
    Graph(GraphError),
    #[error("{0}")]
    InvalidFlags(String),
    #[error("{0}")]
    Train(TrainError),
    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Graph(_) => 2,
            CliError::Train(TrainError::Diverged { .. }) => 3,
            CliError::Train(_) | CliError::InvalidFlags(_) => 4,
            CliError::Output { .. } => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cogcn",
    version,
    about = "Partition a monolith's class-dependency graph into candidate microservices \
             and rank refactor-candidate classes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full pipeline on a monolith description file
    Decompose(DecomposeArgs),
    /// Generate a synthetic planted-partition monolith file
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AblationMode {
    /// Drop the clustering objective; cluster post hoc with k-means++
    NoCluster,
    /// Drop the outlier weighting from both reconstruction losses
    NoOutlier,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Monolith description JSON
    #[arg(long)]
    pub input: PathBuf,
    /// Number of candidate microservices K
    #[arg(long)]
    pub clusters: usize,
    #[arg(long, default_value_t = 32)]
    pub embedding_dim: usize,
    #[arg(long, default_value_t = 64)]
    pub hidden_dim: usize,
    /// Loss weights a1,a2,a3
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.1, 0.8])]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 250)]
    pub pretrain_iters: usize,
    #[arg(long, default_value_t = 500)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Treat calls as undirected for propagation and reconstruction
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub symmetrize: bool,
    #[arg(long, default_value_t = 5)]
    pub top_outliers: usize,
    #[arg(long, value_enum)]
    pub ablation: Option<AblationMode>,
    /// Report path; stdout when omitted
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also render the clustered call graph as DOT
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// Also dump the per-iteration loss history as CSV
    #[arg(long)]
    pub loss_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 4)]
    pub blocks: usize,
    #[arg(long, default_value_t = 15)]
    pub nodes_per_block: usize,
    #[arg(long, default_value_t = 0.3)]
    pub p_in: f64,
    #[arg(long, default_value_t = 0.02)]
    pub p_out: f64,
    #[arg(long, default_value_t = 3)]
    pub structural_outliers: usize,
    #[arg(long, default_value_t = 3)]
    pub attribute_outliers: usize,
    #[arg(long, default_value_t = 8)]
    pub attr_dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fixture path; stdout when omitted
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parses real process arguments and runs; returns the process exit code.
pub fn run() -> i32 {
    run_with_args(std::env::args_os())
}

/// Same as [`run`] but over explicit arguments, for in-process testing.
pub fn run_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 4,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Decompose(args) => decompose(&args),
        Command::Synth(args) => synth(&args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Output {
        path: path.display().to_string(),
        source,
    })
}

/// Builds the `TrainConfig` for a decompose invocation.
fn train_config(args: &DecomposeArgs) -> Result<TrainConfig, CliError> {
    if args.alpha.len() != 3 {
        return Err(CliError::InvalidFlags(format!(
            "--alpha expects exactly three comma-separated values, got {}",
            args.alpha.len()
        )));
    }
    Ok(TrainConfig {
        clusters: args.clusters,
        hidden_dim: args.hidden_dim,
        embed_dim: args.embedding_dim,
        pretrain_iters: args.pretrain_iters,
        iters: args.iters,
        weights: LossWeights {
            alpha1: args.alpha[0],
            alpha2: args.alpha[1],
            alpha3: args.alpha[2],
        },
        seed: args.seed,
        symmetrize: args.symmetrize,
        ablation_no_cluster: args.ablation == Some(AblationMode::NoCluster),
        ablation_no_outlier: args.ablation == Some(AblationMode::NoOutlier),
        adam: cogcn::adam::AdamConfig::default(),
    })
}

pub fn decompose(args: &DecomposeArgs) -> Result<(), CliError> {
    let config = train_config(args)?;
    let raw = input::parse_monolith(&args.input)?;
    let graph = AppGraph::build(&raw).map_err(CliError::Graph)?;
    config
        .validate(graph.node_count())
        .map_err(CliError::Train)?;

    let state =
        trainer::fit(graph.adjacency(), graph.attributes(), &config).map_err(CliError::Train)?;
    let ranked = rank_outliers(
        &state.structural_scores,
        &state.attribute_scores,
        args.top_outliers,
    );
    let metrics = cogcn::metrics::evaluate(graph.adjacency(), &state.assignment);
    let echo = ConfigEcho::new(
        &args.input.display().to_string(),
        &config,
        args.top_outliers,
    );
    let loss_path = args.loss_csv.as_ref().map(|p| p.display().to_string());
    let report = build_report(
        &graph,
        raw.classes(),
        &state.assignment,
        &ranked,
        &metrics,
        echo,
        loss_path,
    );

    let json = to_sorted_json(&report);
    match &args.output {
        Some(path) => write_output(path, &json)?,
        None => print!("{json}"),
    }
    if let Some(path) = &args.dot {
        write_output(path, &dot::export_dot(&graph, &state.assignment, &ranked))?;
    }
    if let Some(path) = &args.loss_csv {
        write_output(path, &state.loss_history_csv())?;
    }
    Ok(())
}

pub fn synth(args: &SynthArgs) -> Result<(), CliError> {
    if args.blocks == 0 || args.nodes_per_block == 0 {
        return Err(CliError::InvalidFlags(
            "--blocks and --nodes-per-block must be positive".into(),
        ));
    }
    if !(0.0 <= args.p_out && args.p_out < args.p_in && args.p_in <= 1.0) {
        return Err(CliError::InvalidFlags(
            "need 0 <= --p-out < --p-in <= 1".into(),
        ));
    }
    let n = args.blocks * args.nodes_per_block;
    if args.structural_outliers + args.attribute_outliers > n {
        return Err(CliError::InvalidFlags(format!(
            "{} outliers requested for {n} nodes",
            args.structural_outliers + args.attribute_outliers
        )));
    }
    let spec = PlantedSpec {
        blocks: args.blocks,
        nodes_per_block: args.nodes_per_block,
        p_in: args.p_in,
        p_out: args.p_out,
        structural_outliers: args.structural_outliers,
        attribute_outliers: args.attribute_outliers,
        attr_dim_per_block: args.attr_dim,
        seed: args.seed,
    };
    let graph = planted_graph(&spec);
    let json = fixtures::planted_monolith_json(&spec, &graph);
    match &args.output {
        Some(path) => write_output(path, &json)?,
        None => print!("{json}"),
    }
    Ok(())
}
