//! `ksets`: generate data, build distances, cluster, verify and score from the
//! command line. Stages talk through files (or stdin/stdout with `-`).

mod commands;
mod files;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Exit statuses.
const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
    Verify(String),
}

impl From<ksets_core::Error> for Failure {
    fn from(e: ksets_core::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

pub type CliResult<T = ()> = Result<T, Failure>;

#[derive(Parser, Debug)]
#[command(
    name = "ksets",
    version,
    about = "Cohesion-based clustering: K-sets, hierarchical merging, and friends"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a seeded synthetic dataset.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Build a distance matrix from points or a graph.
    #[command(subcommand)]
    Dist(DistCommand),
    /// Cluster a distance or cohesion matrix.
    #[command(subcommand)]
    Cluster(ClusterCommand),
    /// Check axioms and identities; exits 3 when a check fails.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Score a partition.
    #[command(subcommand)]
    Score(ScoreCommand),
}

#[derive(Subcommand, Debug)]
pub enum GenCommand {
    /// Two concentric rings, written as `x,y,label` CSV.
    Rings(RingsArgs),
    /// Two-parameter stochastic block model, written as an edge list.
    Sbm(SbmArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct RingsArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 300)]
    pub n_outer: usize,
    #[arg(long, default_value_t = 200)]
    pub n_inner: usize,
    /// Outer radius interval `lo,hi`.
    #[arg(long, value_parser = parse_pair, default_value = "20,22")]
    pub r_outer: [f64; 2],
    /// Inner radius interval `lo,hi`.
    #[arg(long, value_parser = parse_pair, default_value = "10,12")]
    pub r_inner: [f64; 2],
    #[arg(short, long, default_value = "-")]
    pub output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct SbmArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Number of equal blocks.
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    #[arg(long, default_value_t = 3.0)]
    pub mean_degree: f64,
    /// `c_in - c_out`; ignored when both rates are given.
    #[arg(long, default_value_t = 5.9)]
    pub gap: f64,
    #[arg(long, requires = "c_out")]
    pub c_in: Option<f64>,
    #[arg(long, requires = "c_in")]
    pub c_out: Option<f64>,
    /// Edge list destination.
    #[arg(short, long, default_value = "-")]
    pub output: PathBuf,
    /// Ground-truth block of every surviving node, one per line.
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum DistCommand {
    /// Hop counts in a graph (the epsilon graph when reading points).
    Geodesic(GraphDistArgs),
    /// Effective resistance in a connected graph.
    Resistance(GraphDistArgs),
    /// Euclidean distance between points.
    Euclidean(PointsArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct GraphDistArgs {
    /// Points CSV (`x,y,label`); ignored when `--edges` is given.
    #[arg(short, long, default_value = "-")]
    pub input: PathBuf,
    /// Read an edge list instead of points.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Connect points closer than this.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Keep only the largest connected component.
    #[arg(long)]
    pub largest_component: bool,
    /// Writes the original ids of the kept nodes, one per line.
    #[arg(long)]
    pub kept: Option<PathBuf>,
    /// Distance for unreachable pairs (geodesic only): `auto` (largest finite
    /// distance plus one), `error`, or a number.
    #[arg(long, default_value = "auto", value_parser = parse_unreachable)]
    pub unreachable: UnreachableArg,
    #[arg(short, long, default_value = "-")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub enum UnreachableArg {
    Auto,
    Error,
    Value(f64),
}

#[derive(Args, Debug, Serialize)]
pub struct PointsArgs {
    #[arg(short, long, default_value = "-")]
    pub input: PathBuf,
    #[arg(short, long, default_value = "-")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    Distance,
    Cohesion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyArg {
    Greedy,
    FirstFound,
}

#[derive(Subcommand, Debug)]
pub enum ClusterCommand {
    /// Agglomerative merging of cohesive pairs.
    Hier(HierArgs),
    /// K-sets on a distance matrix.
    Ksets(KsetsArgs),
    /// K-sets on a cohesion matrix.
    DualKsets(KsetsArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ClusterIo {
    #[arg(short, long, default_value = "-")]
    pub input: PathBuf,
    /// Input matrix type; defaults to distance for `hier`/`ksets` and
    /// cohesion for `dual-ksets`.
    #[arg(long, value_enum)]
    pub kind: Option<MatrixKind>,
    /// Ground-truth labels (label file or points CSV) for NMI.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// JSON run report destination.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Cluster label of every point, one per line.
    #[arg(short, long, default_value = "-")]
    pub output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct HierArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub io: ClusterIo,
    #[arg(long, value_enum, default_value_t = PolicyArg::Greedy)]
    pub policy: PolicyArg,
    /// Extra merges past the natural stopping point.
    #[arg(long, default_value_t = 0)]
    pub forced_merges: usize,
    /// Text dendrogram destination.
    #[arg(long)]
    pub tree: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct KsetsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub io: ClusterIo,
    #[arg(long)]
    pub k: usize,
    /// Seed for the random initial partition.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Initial labels instead of a seeded partition.
    #[arg(long)]
    pub init: Option<PathBuf>,
    #[arg(long, default_value_t = ksets_core::ksets::DEFAULT_MAX_PASSES)]
    pub max_passes: usize,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Distance axioms D1-D4.
    Metric(VerifyArgs),
    /// Cohesion axioms C1-C3.
    Cohesion(VerifyArgs),
    /// Distance -> cohesion -> distance round trip (and the reverse).
    Duality(VerifyArgs),
    /// The ten equivalent cluster statements agree on every set.
    Theorem1(Theorem1Args),
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(short, long, default_value = "-")]
    pub input: PathBuf,
    /// Input matrix type (duality only).
    #[arg(long, value_enum, default_value_t = MatrixKind::Distance)]
    pub kind: MatrixKind,
}

#[derive(Args, Debug, Serialize)]
pub struct Theorem1Args {
    #[arg(short, long, default_value = "-")]
    pub input: PathBuf,
    /// Comma-separated members of one set; all proper subsets when omitted.
    #[arg(long, value_delimiter = ',')]
    pub set: Option<Vec<usize>>,
}

#[derive(Subcommand, Debug)]
pub enum ScoreCommand {
    /// Normalized mutual information between two labelings.
    Nmi(NmiArgs),
    /// Modularity Q and normalized modularity R of a partition.
    Modularity(ModularityArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct NmiArgs {
    pub a: PathBuf,
    pub b: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct ModularityArgs {
    #[arg(short, long, default_value = "-")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = MatrixKind::Distance)]
    pub kind: MatrixKind,
    #[arg(long)]
    pub labels: PathBuf,
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts[..] {
        [a, b] => Ok([
            a.parse().map_err(|_| format!("bad number {a:?}"))?,
            b.parse().map_err(|_| format!("bad number {b:?}"))?,
        ]),
        _ => Err(format!("expected lo,hi, got {s:?}")),
    }
}

fn parse_unreachable(s: &str) -> Result<UnreachableArg, String> {
    match s {
        "auto" => Ok(UnreachableArg::Auto),
        "error" => Ok(UnreachableArg::Error),
        v => v
            .parse()
            .map(UnreachableArg::Value)
            .map_err(|_| format!("expected auto, error or a number, got {v:?}")),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Gen(c) => commands::gen(c),
        Command::Dist(c) => commands::dist(c),
        Command::Cluster(c) => commands::cluster(c),
        Command::Verify(c) => commands::verify(c),
        Command::Score(c) => commands::score(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_DATA)
        }
        Err(Failure::Verify(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(EXIT_VERIFY)
        }
    }
}
