use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "expertnet", version, about = "Query routing experiments on expert networks")]
pub struct Cli {
    /// Worker threads for sweeps and network construction.
    #[arg(long, global = true, env = "EXPERTNET_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build one network and write it as JSON.
    Generate(GenerateArgs),
    /// Monte Carlo path-length sweep.
    Sweep(SweepArgs),
    /// Evaluate the path-length bounds for a configuration.
    Bounds(BoundsArgs),
    /// Predict the mean path-length ratio between two exponents.
    Predict(PredictArgs),
    /// Fit the power-law exponent from external expert and edge files.
    Ingest(IngestArgs),
    /// Total-ability distribution of a diversified network.
    Distribution(DistributionArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Unified,
    Diversified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Expert count. For the diversified model, n must be a perfect m-th power
    /// unless --lambda is given.
    #[arg(long)]
    pub n: Option<usize>,
    /// Rows (unified).
    #[arg(long)]
    pub h: Option<usize>,
    /// Areas (diversified).
    #[arg(long)]
    pub m: Option<usize>,
    /// Maximum level per area (diversified).
    #[arg(long)]
    pub lambda: Option<u32>,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Drop all long-range contacts (the r -> infinity limit).
    #[arg(long)]
    pub no_long_range: bool,
    /// Output JSON file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write experts.csv and edges.csv (long-range links) to this directory.
    #[arg(long)]
    pub export_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    #[arg(long)]
    pub n: Option<usize>,
    /// Row counts (unified), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub h: Vec<usize>,
    /// Area counts (diversified), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<usize>,
    #[arg(long)]
    pub lambda: Option<u32>,
    /// Long-range counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub k: Vec<usize>,
    /// Exponents: comma separated values or `start:stop:step` ranges.
    #[arg(long, default_value = "0")]
    pub r: String,
    /// Misreading scale factors, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub c: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub realizations: usize,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub no_long_range: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Report file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Forwarding histogram CSV. Needs a single-point sweep.
    #[arg(long)]
    pub histogram_out: Option<PathBuf>,
    #[arg(long, default_value_t = expertnet::harness::DEFAULT_BIN_WIDTH)]
    pub bin_width: f64,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub h: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub lambda: Option<u32>,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Exponents: comma separated values or `start:stop:step` ranges.
    #[arg(long)]
    pub r: String,
    /// Use the constants carried through the proofs instead of bare shapes.
    #[arg(long)]
    pub explicit_constants: bool,
    /// Constant of the diversified upper bound (default 2m).
    #[arg(long, requires = "explicit_constants")]
    pub c0: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub n: f64,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long)]
    pub r1: f64,
    #[arg(long)]
    pub r2: f64,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Rows `id,e_1,...,e_m`; an optional header row is skipped.
    #[arg(long)]
    pub experts: PathBuf,
    /// Rows `src_id,dst_id`; an optional header row is skipped.
    #[arg(long)]
    pub edges: PathBuf,
}

#[derive(Debug, Args)]
pub struct DistributionArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub lambda: Option<u32>,
    #[arg(long)]
    pub n: Option<u64>,
    /// CSV file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
