use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

use waring_core::ledger::RowField;
use waring_core::local::RhoSource;

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Debug, Parser)]
#[command(name = "waring", version, about = "Circle-method laboratory for Waring's problem")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Output format: JSON lines, CSV, or aligned text.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true, help_heading = "Global options")]
    pub format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, help_heading = "Global options")]
    pub threads: Option<usize>,
    /// Directory for cached smooth sets.
    #[arg(long, env = "WARING_CACHE_DIR", global = true, help_heading = "Global options")]
    pub cache_dir: Option<PathBuf>,
    /// Cap on series/table cells held in memory.
    #[arg(long, default_value_t = 1 << 28, global = true, help_heading = "Global options")]
    pub max_cells: u64,
    /// Cap on quadrature panels.
    #[arg(long, default_value_t = 1 << 24, global = true, help_heading = "Global options")]
    pub max_panels: u64,
    /// Cap on enumerated tuples.
    #[arg(long, default_value_t = 1 << 30, global = true, help_heading = "Global options")]
    pub max_tuples: u64,
    /// Cap on listed arcs.
    #[arg(long, default_value_t = 1 << 24, global = true, help_heading = "Global options")]
    pub max_arcs: u64,
    /// Seed for sampled checks.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true, help_heading = "Global options")]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    K,
    W,
    LambdaW,
    LambdaW1,
    T,
    U,
    DeltaInv,
    R,
    UFloor,
    H,
}

impl From<FieldArg> for RowField {
    fn from(f: FieldArg) -> Self {
        match f {
            FieldArg::K => RowField::K,
            FieldArg::W => RowField::W,
            FieldArg::LambdaW => RowField::LambdaW,
            FieldArg::LambdaW1 => RowField::LambdaW1,
            FieldArg::T => RowField::T,
            FieldArg::U => RowField::U,
            FieldArg::DeltaInv => RowField::DeltaInv,
            FieldArg::R => RowField::R,
            FieldArg::UFloor => RowField::UFloor,
            FieldArg::H => RowField::H,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SumKindArg {
    /// Classical Weyl sum f.
    F,
    /// Smooth Weyl sum g (needs --eta).
    G,
    /// Complete sum S(q, a).
    Complete,
    /// Oscillatory integral v(beta).
    V,
    /// Major-arc approximant gap for f (or g with --eta).
    Approx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArcKindArg {
    Major,
    Minor,
    Pruned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountMethod {
    Conv,
    Dft,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RhoArg {
    Dickman,
    Empirical,
    One,
}

impl From<RhoArg> for RhoSource {
    fn from(r: RhoArg) -> Self {
        match r {
            RhoArg::Dickman => RhoSource::Dickman,
            RhoArg::Empirical => RhoSource::Empirical,
            RhoArg::One => RhoSource::One,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify exponent rows with exact rational arithmetic.
    LedgerVerify(LedgerVerifyArgs),
    /// Print the built-in exponent table.
    LedgerTable,
    /// Smooth-number set A_eta(P) and its density.
    Smooth(SmoothArgs),
    /// Dickman's function.
    Dickman(DickmanArgs),
    /// Weyl sums, complete sums, v(beta) and major-arc approximants.
    Sums(SumsArgs),
    /// Major, minor or pruned arcs.
    Arcs(ArcsArgs),
    /// Major/minor classification of a point.
    Classify(ClassifyArgs),
    /// Exact representation counts R(n).
    Count(CountArgs),
    /// Even moments, minor-arc moment split, Hölder check.
    Moments(MomentsArgs),
    /// Vinogradov mean value J_{s,k}(X).
    Vinogradov(VinogradovArgs),
    /// Truncated singular series.
    Series(SeriesArgs),
    /// p-adic local density against the Euler factor.
    Local(LocalArgs),
    /// Truncated singular integral beside its closed form.
    Integral(IntegralArgs),
    /// Exact R(n) against the main term.
    Asymptotic(AsymptoticArgs),
    /// Chained verification report.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct LedgerVerifyArgs {
    /// Verify the built-in table (the default when --rows is absent).
    #[arg(long)]
    pub all: bool,
    /// CSV file of rows replacing the built-in table.
    #[arg(long)]
    pub rows: Option<PathBuf>,
    /// Perturb the row with this k before verifying.
    #[arg(long = "mutate-row")]
    pub mutate_row: Option<u32>,
    /// Field perturbed by --mutate-row.
    #[arg(long, value_enum, default_value_t = FieldArg::LambdaW)]
    pub field: FieldArg,
}

#[derive(Debug, Args)]
pub struct SmoothArgs {
    /// Size parameter P.
    #[arg(long = "P")]
    pub p: f64,
    /// Smoothness exponent: primes up to P^eta.
    #[arg(long)]
    pub eta: f64,
    /// Also list the members.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Args)]
pub struct DickmanArgs {
    /// Box size X.
    #[arg(long, num_args = 1.., required = true)]
    pub x: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct SumsArgs {
    #[arg(long, value_enum, default_value_t = SumKindArg::F)]
    pub kind: SumKindArg,
    /// Exponent k.
    #[arg(long)]
    pub k: u32,
    /// Size parameter P.
    #[arg(long = "P", default_value_t = 1.0)]
    pub p: f64,
    /// Real frequency; overrides --a/--q/--beta.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Numerator of the rational part a/q.
    #[arg(long, default_value_t = 0)]
    pub a: i64,
    /// Denominator q of the rational part a/q.
    #[arg(long, default_value_t = 1)]
    pub q: u64,
    /// Offset from a/q.
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// Smoothness exponent: primes up to P^eta.
    #[arg(long)]
    pub eta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ArcsArgs {
    #[arg(long, value_enum, default_value_t = ArcKindArg::Major)]
    pub kind: ArcKindArg,
    /// Exponent k.
    #[arg(long)]
    pub k: u32,
    /// Size parameter P.
    #[arg(long = "P")]
    pub p: f64,
    /// Pruning parameter (default log log P).
    #[arg(long = "W")]
    pub w: Option<f64>,
    /// Emit one record per arc.
    #[arg(long)]
    pub list: bool,
    /// Compare classification with membership on this many seeded points.
    #[arg(long, default_value_t = 0)]
    pub samples: u64,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Frequency in [0, 1).
    #[arg(long)]
    pub alpha: f64,
    /// Exponent k.
    #[arg(long)]
    pub k: u32,
    /// Size parameter P.
    #[arg(long = "P")]
    pub p: f64,
    /// Continued-fraction fast path.
    #[arg(long)]
    pub fast: bool,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    /// Exponent k.
    #[arg(long)]
    pub k: u32,
    /// Number of classical variables.
    #[arg(long)]
    pub t: u32,
    /// Number of smooth variables.
    #[arg(long, default_value_t = 0)]
    pub u: u32,
    /// Smoothness exponent: primes up to P^eta.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Target integer.
    #[arg(long)]
    pub n: Option<u64>,
    /// First target of the range.
    #[arg(long)]
    pub lo: Option<u64>,
    /// Last target of the range.
    #[arg(long)]
    pub hi: Option<u64>,
    /// Fix P instead of P = n^{1/k}; counts every n up to the full degree.
    #[arg(long = "P")]
    pub p: Option<f64>,
    #[arg(long, value_enum, default_value_t = CountMethod::Both)]
    pub method: CountMethod,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    /// Exponent k.
    #[arg(long)]
    pub k: u32,
    /// Size parameter P.
    #[arg(long = "P")]
    pub p: f64,
    /// Half-order: the moment is of order 2s.
    #[arg(long)]
    pub s: Option<u32>,
    /// Smooth sum g instead of f.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Even order w of a minor-arc moment split.
    #[arg(long)]
    pub w: Option<u32>,
    /// Quadrature panels per unit length (default 4 * degree).
    #[arg(long)]
    pub grid: Option<u64>,
    /// Also integrate the minor arcs directly.
    #[arg(long)]
    pub direct: bool,
    /// Hölder check with the weights of the built-in row with this k.
    #[arg(long = "holder-row")]
    pub holder_row: Option<u32>,
}

#[derive(Debug, Args)]
pub struct VinogradovArgs {
    /// Number of variables on each side.
    #[arg(long)]
    pub s: u32,
    /// Exponent k.
    #[arg(long)]
    pub k: u32,
    /// Box size X.
    #[arg(long = "X")]
    pub x: u64,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    /// Target integer.
    #[arg(long)]
    pub n: Option<u64>,
    /// First target of the range.
    #[arg(long)]
    pub lo: Option<u64>,
    /// Last target of the range.
    #[arg(long)]
    pub hi: Option<u64>,
    /// Number of variables.
    #[arg(long)]
    pub s: u32,
    /// Exponent k.
    #[arg(long)]
    pub k: u32,
    /// Truncation point Q of the singular series.
    #[arg(long = "Q")]
    pub q: u64,
    /// Emit each A(q) for a single n.
    #[arg(long)]
    pub terms: bool,
    /// Check min > 0.05 and max < 20 over the range.
    #[arg(long)]
    pub positivity: bool,
}

#[derive(Debug, Args)]
pub struct LocalArgs {
    /// Prime p.
    #[arg(long)]
    pub p: u64,
    /// Prime-power exponent gamma.
    #[arg(long)]
    pub gamma: u32,
    /// Target integer.
    #[arg(long)]
    pub n: u64,
    /// Number of variables.
    #[arg(long)]
    pub s: u32,
    /// Exponent k.
    #[arg(long)]
    pub k: u32,
}

#[derive(Debug, Args)]
pub struct IntegralArgs {
    /// Target integer.
    #[arg(long)]
    pub n: u64,
    /// Exponent k.
    #[arg(long)]
    pub k: u32,
    /// Number of variables.
    #[arg(long)]
    pub s: u32,
    /// Cutoff of the tau integral.
    #[arg(long = "W", default_value_t = 50.0)]
    pub w: f64,
}

#[derive(Debug, Args)]
pub struct AsymptoticArgs {
    /// Exponent k.
    #[arg(long)]
    pub k: u32,
    /// Number of classical variables.
    #[arg(long)]
    pub t: u32,
    /// Number of smooth variables.
    #[arg(long, default_value_t = 0)]
    pub u: u32,
    /// Smoothness exponent: primes up to P^eta.
    #[arg(long)]
    pub eta: Option<f64>,
    /// First target of the range.
    #[arg(long)]
    pub lo: u64,
    /// Last target of the range.
    #[arg(long)]
    pub hi: u64,
    /// Truncation point Q of the singular series.
    #[arg(long = "Q", default_value_t = 200)]
    pub q: u64,
    /// Density factor used for each smooth variable.
    #[arg(long, value_enum, default_value_t = RhoArg::Dickman)]
    pub rho: RhoArg,
    /// Emit every point instead of the summary.
    #[arg(long)]
    pub points: bool,
    /// Fail unless the mean ratio lies in [1 - tol, 1 + tol].
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Perturb the ledger row with this k.
    #[arg(long = "mutate-row")]
    pub mutate_row: Option<u32>,
    #[arg(long, value_enum, default_value_t = FieldArg::LambdaW)]
    pub field: FieldArg,
}
