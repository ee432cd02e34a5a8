use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(name = "chowla-lab", version, about = "Finite-prefix experiments on sequences over {-1, 0, 1}")]
pub struct Cli {
    /// Worker threads; 0 uses every available core.
    #[arg(long, global = true, env = "CHOWLA_LAB_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[arg(long, global = true, value_enum, default_value_t = ReportFormat::Json)]
    pub report: ReportFormat,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub report_path: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a sequence prefix and save it as an SQZ1 file.
    Generate(GenerateArgs),
    /// Chowla correlation battery.
    Chowla(ChowlaArgs),
    /// Correlation with an observable along an orbit.
    Sarnak(SarnakArgs),
    /// Scan of normalized exponential sums over a grid of frequencies.
    Davenport(DavenportArgs),
    /// Block complexity and entropy estimates of `z` and `z²`.
    Entropy(EntropyArgs),
    /// Relatively independent extension test.
    HatTest(HatTestArgs),
    #[command(subcommand)]
    Toeplitz(ToeplitzCommand),
    /// Audit a pair `(h(z²), h(z))` against the entropy bounds.
    Bounds(BoundsArgs),
    /// Iterated block recoding toward a deterministic sequence.
    Determinize(DeterminizeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Mobius,
    Liouville,
    MuB,
    Sturmian,
    Bernoulli,
    Coded,
    SquaresNeeded,
    ExampleAa,
    /// Sturmian support with uniform random signs.
    SignedSturmian,
    /// Sturmian support times B(1/4, 1/2, 1/4) over {-1, 0, 1}.
    TernarySturmian,
}

impl Kind {
    pub fn is_random(self) -> bool {
        matches!(
            self,
            Kind::Bernoulli | Kind::Coded | Kind::SquaresNeeded | Kind::SignedSturmian | Kind::TernarySturmian
        )
    }
}

#[derive(Args, Debug, Serialize)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Rotation angle (Sturmian kinds); defaults to the golden ratio conjugate.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// Two probabilities draw from {-1, 1}, three from {-1, 0, 1}.
    #[arg(long, value_delimiter = ',')]
    pub probs: Vec<f64>,
    #[arg(long, default_value_t = 2)]
    pub k0: usize,
    /// `prime-squares` or a comma-separated list of pairwise coprime squares.
    #[arg(long, default_value = "prime-squares")]
    pub bset: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Claim {
    Theorem,
    Consistency,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Exponents in {1, 2}, not all 2.
    Full,
    /// Every exponent 1.
    Linear,
}

#[derive(Args, Debug, Serialize)]
pub struct ChowlaArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub max_lag: usize,
    #[arg(long, default_value_t = 2)]
    pub max_r: usize,
    /// Sum length; defaults to the longest the file allows.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0.02)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Claim::Consistency)]
    pub claim: Claim,
    /// Family whose verdict sets the exit code.
    #[arg(long, value_enum, default_value_t = Family::Full)]
    pub family: Family,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    Rotation,
    Periodic,
    Subshift,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    Cos,
    Sin,
}

#[derive(Args, Debug, Serialize)]
pub struct SarnakArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = System::Rotation)]
    pub system: System,
    #[arg(long, default_value_t = 0.414_213_562_373_095_1)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub x0: f64,
    #[arg(long, value_enum, default_value_t = Observable::Cos)]
    pub f: Observable,
    /// Values of one period (periodic system).
    #[arg(long, value_delimiter = ',')]
    pub pattern: Vec<f64>,
    /// Point of the subshift (subshift system).
    #[arg(long)]
    pub orbit: Option<PathBuf>,
    /// Lags `a_2 < ... < a_r` of the strong form; the first lag 0 is implicit.
    #[arg(long, value_delimiter = ',')]
    pub lags: Vec<usize>,
    /// Exponents, one per factor; defaults to all 1.
    #[arg(long, value_delimiter = ',')]
    pub exponents: Vec<u8>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Fail when the final `|value|` reaches this.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct DavenportArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    #[arg(long)]
    pub n: Option<usize>,
    /// Fail when the maximum reaches this.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct EntropyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub n_max: usize,
    /// Lower end of the estimation window; defaults to `n_max / 2`.
    #[arg(long)]
    pub n_lo: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct HatTestArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    #[arg(long, default_value_t = 0.01)]
    pub tol: f64,
    /// Audit threshold on squared-block frequency; defaults to `tol`.
    #[arg(long)]
    pub min_mass: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum ToeplitzCommand {
    /// Build `t` from a reference sequence.
    Build(ToeplitzBuildArgs),
    /// Window types, good intervals and the entropy lower bound.
    Analyze(ToeplitzAnalyzeArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ToeplitzBuildArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct ToeplitzAnalyzeArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub ell: u32,
    #[arg(long)]
    pub k: usize,
    /// Reference sequence; enables the entropy lower bound.
    #[arg(long = "ref")]
    pub reference: Option<PathBuf>,
    /// Also scan window offsets inside each interval.
    #[arg(long)]
    pub scan_offsets: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct BoundsArgs {
    #[arg(long)]
    pub h_square: f64,
    #[arg(long)]
    pub h_full: f64,
    /// The subshift is closed under recurrence; enables the lower bound.
    #[arg(long)]
    pub recurrent: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct DeterminizeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub n_block: usize,
    #[arg(long)]
    pub big_n: usize,
    /// Steps to run; step `l` uses `epsilon / 2^l`.
    #[arg(long, default_value_t = 1)]
    pub steps: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
