use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "randci", version, about = "Exact and randomized binomial confidence intervals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute one interval and echo its inputs.
    Interval(IntervalArgs),
    /// Sweep exact non-coverage and expected length over a theta grid.
    Coverage(CoverageArgs),
    /// Long-run non-coverage with a deterministic or seeded auxiliary sequence.
    Simulate(SimulateArgs),
    /// Side-by-side curves plus domination and refinement summaries.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    #[value(alias = "clopper-pearson")]
    Cp,
    Stevens,
    StevensGeneralized,
    Antithetic,
    Discrete,
    Korn,
    Split,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TextFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DataFormat {
    Csv,
    Json,
    Svg,
}

impl DataFormat {
    pub fn extension(self) -> &'static str {
        match self {
            DataFormat::Csv => "csv",
            DataFormat::Json => "json",
            DataFormat::Svg => "svg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    Seeded,
    Weyl,
    VanDerCorput,
    Periodic,
}

/// Where results go: `--out`, else `$RANDCI_OUT_DIR/<default name>`, else stdout.
#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = "RANDCI_OUT_DIR", hide_env_values = true)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct IntervalArgs {
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub y: Option<u32>,
    /// Compact 0/1 string such as 11000.
    #[arg(long)]
    pub bits: Option<String>,
    #[arg(long)]
    pub y1: Option<u32>,
    #[arg(long)]
    pub y2: Option<u32>,
    #[arg(long)]
    pub n1: Option<u32>,
    #[arg(long)]
    pub n2: Option<u32>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub v: Option<f64>,
    #[arg(long)]
    pub v_lower: Option<f64>,
    #[arg(long)]
    pub v_upper: Option<f64>,
    /// Discrete level as `k/M`; the lower end uses `(k-1)/M`.
    #[arg(long)]
    pub w: Option<String>,
    #[arg(long, value_enum, default_value_t = TextFormat::Text)]
    pub format: TextFormat,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CoverageArgs {
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Level count M for the discrete method.
    #[arg(long)]
    pub levels: Option<u128>,
    #[arg(long)]
    pub n1: Option<u32>,
    #[arg(long)]
    pub n2: Option<u32>,
    /// `default`, `uniform:K` or `list:t1,t2,...`.
    #[arg(long, default_value = "default")]
    pub grid: String,
    #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
    pub format: DataFormat,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub source: SourceArg,
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub theta: f64,
    #[arg(long)]
    pub m: u64,
    /// Seed of the binomial data stream.
    #[arg(long)]
    pub seed: u64,
    /// Seed of the auxiliary stream for `--source seeded`; defaults to `--seed`.
    #[arg(long)]
    pub aux_seed: Option<u64>,
    /// Weyl multiplier; defaults to sqrt(2).
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub base: Option<u32>,
    /// Period N of the identity permutation.
    #[arg(long)]
    pub period: Option<u32>,
    /// Explicit permutation of 1..=N, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub perm: Option<Vec<u32>>,
    #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
    pub format: DataFormat,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Two or more methods, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    pub methods: Vec<MethodArg>,
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub levels: Option<u128>,
    #[arg(long)]
    pub n1: Option<u32>,
    #[arg(long)]
    pub n2: Option<u32>,
    #[arg(long, default_value = "default")]
    pub grid: String,
    /// Points of the v grid for the containment check.
    #[arg(long, default_value_t = 101)]
    pub v_points: usize,
    #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
    pub format: DataFormat,
    #[command(flatten)]
    pub output: OutputArgs,
}
