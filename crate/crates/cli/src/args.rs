use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "rankver",
    version,
    about = "Verify winners, leads and ranks from one observation per population"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test whether the observed winner is the best population.
    Verify(VerifyArgs),
    /// Lower confidence bound on the winner's lead over every other population.
    Bound(BoundArgs),
    /// Verify how many leading ranks are in the correct order.
    Ranks(RanksArgs),
    /// Power curves of the selective winner test and the Gupta-Nagel rule.
    Power(PowerArgs),
    /// Monte Carlo experiments: power, error rates, coverage and FWER.
    Sim(SimArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Choose from the file extension; anything but `.json` is read as CSV.
    Auto,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Multinomial,
    Binomial,
    NormalVariance,
    BradleyTerry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TieModeArg {
    Random,
    LowestIndex,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// Distribution family of the observations.
    #[arg(long, value_enum, default_value_t = FamilyArg::Multinomial)]
    pub family: FamilyArg,
    /// Trials per population (binomial family).
    #[arg(long)]
    pub trials_per_arm: Option<u64>,
    /// Observations per group (normal-variance family).
    #[arg(long)]
    pub obs_per_group: Option<u64>,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Dataset of `label,value` rows (CSV) or `[{"label", "value"}]` (JSON).
    pub data: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Auto)]
    pub format: Format,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// How tied values are ordered; random tie-breaking needs --seed when ties occur.
    #[arg(long, value_enum, default_value_t = TieModeArg::Random)]
    pub tie_mode: TieModeArg,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Test at n alpha / (n - 1).
    #[arg(long)]
    pub adjusted: bool,
    /// Randomize at the observed atom with the selective p-value (needs --seed).
    #[arg(long)]
    pub randomized: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundMethodArg {
    /// Invert the unadjusted pairwise test.
    #[value(name = "2")]
    Two,
    /// Invert the selective test.
    #[value(name = "2prime")]
    TwoPrime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AtomArg {
    /// Count the observed atom (conservative).
    Include,
    /// Drop the observed atom (liberal).
    Exclude,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value_t = BoundMethodArg::TwoPrime)]
    pub method: BoundMethodArg,
    #[arg(long, value_enum, default_value_t = AtomArg::Include)]
    pub atom: AtomArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RankMethodArg {
    /// Unadjusted adjacent-pair tests.
    #[value(name = "3")]
    Three,
    /// Selective tests conditioning on the verified prefix.
    #[value(name = "3prime")]
    ThreePrime,
}

#[derive(Debug, Args)]
pub struct RanksArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value_t = RankMethodArg::Three)]
    pub method: RankMethodArg,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Master seed; every trial derives its own stream from it.
    #[arg(long, required = true)]
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Write the CSV table here; the JSON report then goes to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Total count of the multinomial.
    #[arg(long)]
    pub m: Option<u64>,
    /// Number of populations.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub delta_min: f64,
    #[arg(long, default_value_t = 3.0)]
    pub delta_max: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 13)]
    pub delta_steps: usize,
    /// Randomize the selective test at the observed atom.
    #[arg(long)]
    pub randomized: bool,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentArg {
    Power,
    ErrorRate,
    Coverage,
    Fwer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimMethodArg {
    #[value(name = "2")]
    Two,
    #[value(name = "2prime")]
    TwoPrime,
    #[value(name = "3")]
    Three,
    #[value(name = "3prime")]
    ThreePrime,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[arg(long, value_enum)]
    pub experiment: ExperimentArg,
    #[command(flatten)]
    pub curve: CurveArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Natural parameters, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Vec<f64>,
    /// Bound method for coverage (2, 2prime) or rank method for FWER (3, 3prime).
    #[arg(long, value_enum)]
    pub method: Option<SimMethodArg>,
    /// Winner test at n alpha / (n - 1).
    #[arg(long)]
    pub adjusted: bool,
}
