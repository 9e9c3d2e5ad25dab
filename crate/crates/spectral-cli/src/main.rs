//! Command line front end: build similarity graphs, export Laplacian
//! spectra, embed, cluster, and simulate heat diffusion, from CSV sample
//! files or edge lists, with reproducible seeded runs.

mod commands;
mod config;
mod svg;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spectral::Error;

const EXIT_HELP: &str = "\
Exit codes:
  0  success
  2  parse error (unreadable or malformed input, missing setting)
  3  invalid request (bad recipe, bad dimensions, unsupported plot)
  4  numerical failure (asymmetry, no convergence, isolated node, unstable step)
  5  disconnected graph where a connected one is required

Failures print a single line to stderr: `error: <Name>: <details>`.";

#[derive(Parser)]
#[command(
    name = "spectral",
    version,
    about = "Spectral graph toolkit: similarity graphs, Laplacian spectra, embeddings, clustering, heat diffusion",
    after_help = EXIT_HELP
)]
struct Cli {
    /// TOML file supplying defaults for any flag (flags win over the file)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Print the fully resolved configuration as TOML and exit
    #[arg(long, global = true)]
    dump_config: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a similarity graph and export one of its matrices
    Graph(GraphCmd),
    /// Solve an eigenproblem of the graph and export the spectrum
    Spectrum(SpectrumCmd),
    /// Embed the graph nodes with a Laplacian eigenmap
    EmbedLem(EmbedLemCmd),
    /// Fit a locality preserving projection and embed the samples
    EmbedLpp(EmbedLppCmd),
    /// Cluster the nodes with spectral coordinates and seeded k-means
    Cluster(ClusterCmd),
    /// Simulate or analytically solve heat diffusion on the graph
    Diffuse(DiffuseCmd),
}

/// Input and output paths shared by every command.
#[derive(Args, Clone, Default)]
struct IoArgs {
    /// Input file: .csv rows of sample coordinates, or .edges lines "i j w"
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,

    /// Primary output file
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,

    /// Input format override (default: inferred from the extension)
    #[arg(long, value_enum)]
    format: Option<FormatArg>,

    /// Node count for edge-list inputs (default: largest index mentioned)
    #[arg(long)]
    nodes: Option<usize>,
}

/// Graph-construction settings used when the input is a sample file.
#[derive(Args, Clone, Default)]
struct RecipeArgs {
    /// Recipe for turning samples into a graph
    #[arg(long = "graph", value_enum, value_name = "RECIPE")]
    graph_recipe: Option<RecipeArg>,

    /// Neighborhood radius for the epsilon recipe (strictly closer counts)
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,

    /// Neighbor count for the knn recipe (clusters on recipes other than knn)
    #[arg(long)]
    k: Option<usize>,

    /// Neighbor agreement rule for the knn recipe [default: symmetric]
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,

    /// Edge weighting for epsilon and knn recipes [default: binary]
    #[arg(long, value_enum)]
    weighting: Option<WeightingArg>,

    /// Gaussian bandwidth (full recipe and gaussian weighting)
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
}

#[derive(Args)]
struct GraphCmd {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    recipe: RecipeArgs,
    /// Which matrix to export [default: weights]
    #[arg(long, value_enum)]
    matrix: Option<MatrixArg>,
}

#[derive(Args)]
struct SpectrumCmd {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    recipe: RecipeArgs,
    /// Which eigenproblem to solve [default: generalized]
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
}

#[derive(Args)]
struct EmbedLemCmd {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    recipe: RecipeArgs,
    /// Embedding dimension
    #[arg(long)]
    m: Option<usize>,
    /// Eigenvector normalization constraint [default: d-weighted]
    #[arg(long, value_enum)]
    constraint: Option<ConstraintArg>,
    /// Also render the embedding as a scatter SVG (1-D or 2-D only)
    #[arg(long, value_name = "FILE")]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedLppCmd {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    recipe: RecipeArgs,
    /// Number of projection components
    #[arg(long)]
    m: Option<usize>,
    /// Feature expansion applied before fitting [default: none]
    #[arg(long, value_enum)]
    expansion: Option<ExpansionArg>,
    /// Also write the fitted projection model to this file
    #[arg(long, value_name = "FILE")]
    model_out: Option<PathBuf>,
    /// Also render the embedding as a scatter SVG (1-D or 2-D only)
    #[arg(long, value_name = "FILE")]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct ClusterCmd {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    recipe: RecipeArgs,
    /// Number of clusters (--k is a synonym when the recipe is not knn)
    #[arg(long)]
    clusters: Option<usize>,
    /// Random seed for centroid initialization [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Also write {inertia, iterations, ari_vs_reference?} JSON here
    #[arg(long, value_name = "FILE")]
    metrics: Option<PathBuf>,
    /// Reference labels for the ari_vs_reference metric
    #[arg(long, value_name = "FILE")]
    reference: Option<PathBuf>,
    /// Also render the spectral coordinates colored by cluster
    #[arg(long, value_name = "FILE")]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct DiffuseCmd {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    recipe: RecipeArgs,
    /// Initial temperatures, one value per node
    #[arg(long, value_name = "FILE")]
    h0: Option<PathBuf>,
    /// Euler step size (discrete mode, together with --steps)
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    /// Number of Euler steps (discrete mode, together with --dt)
    #[arg(long)]
    steps: Option<usize>,
    /// Record every s-th step of the discrete trajectory [default: 1]
    #[arg(long, value_name = "S")]
    sample_every: Option<usize>,
    /// Comma-separated times to solve analytically (instead of --dt/--steps)
    #[arg(long, value_name = "T1,T2,...")]
    times: Option<String>,
    /// Unstable step handling: reject fails, proceed warns [default: reject]
    #[arg(long, value_enum, value_name = "POLICY")]
    on_instability: Option<PolicyArg>,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Edges,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
enum RecipeArg {
    Epsilon,
    Knn,
    Full,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Mutual,
    Symmetric,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
enum WeightingArg {
    Binary,
    Gaussian,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
enum KindArg {
    /// Eigenvectors of the plain Laplacian
    Ordinary,
    /// Eigenvectors of the symmetric normalized Laplacian
    SymNormalized,
    /// The generalized problem, unit weighted norm
    Generalized,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MatrixArg {
    Weights,
    Laplacian,
    SymNormalized,
    RandomWalk,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ConstraintArg {
    DWeighted,
    Identity,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    Reject,
    Proceed,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ExpansionArg {
    None,
    #[value(name = "monomials-1")]
    Monomials1,
    #[value(name = "monomials-2")]
    Monomials2,
}

/// Everything that can fail after argument parsing: a library error or the
/// plot-dimension restriction, each with a stable name and exit code.
#[derive(Debug)]
enum CliError {
    Lib(Error),
    PlotDimension(usize),
}

impl CliError {
    fn name(&self) -> &'static str {
        match self {
            CliError::Lib(e) => e.name(),
            CliError::PlotDimension(_) => "PlotDimension",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) => match e {
                Error::Parse(_)
                | Error::Io(_)
                | Error::InvalidData(_)
                | Error::InvalidEdgeList(_) => 2,
                Error::InvalidRecipe(_) | Error::InvalidExpansion(_) | Error::ShapeError(_) => 3,
                Error::NotSymmetric
                | Error::NoConvergence { .. }
                | Error::IsolatedNode(_)
                | Error::SingularConstraint { .. }
                | Error::UnstableStep { .. } => 4,
                Error::DisconnectedGraph { .. } => 5,
            },
            CliError::PlotDimension(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::PlotDimension(m) => {
                write!(f, "scatter plots support 1 or 2 dimensions, got {m}")
            }
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {}", e.name(), e);
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let file_cfg = match &cli.config {
        Some(path) => config::FileConfig::load(path)?,
        None => config::FileConfig::default(),
    };
    let resolved = config::resolve(&cli.command, &file_cfg)?;
    if cli.dump_config {
        print!("{}", resolved.to_toml());
        return Ok(());
    }
    commands::execute(&resolved)
}
