use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use satotate::measures::GroupKind;
use satotate::tracedist::DensityRoute;

#[derive(Debug, Parser)]
#[command(
    name = "satotate",
    version,
    about = "Trace distributions of genus-2 Sato-Tate groups and finite-field census",
    args_override_self = true
)]
pub struct Cli {
    /// Worker threads for sampling and census [default: available cores]
    #[arg(long, global = true, env = "SATOTATE_THREADS")]
    pub threads: Option<usize>,

    /// Flat `key = value` file supplying defaults for the subcommand's flags
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the trace density f(s1)
    Density(CurveArgs),
    /// Tabulate the distribution function F(s1)
    Cdf(CurveArgs),
    /// Leading-order extremal approximations at eps = d/sqrt(q)
    Table(TableArgs),
    /// Draw seeded Monte Carlo samples of the trace
    Sample(SampleArgs),
    /// Enumerate curves over F_q and write the census cache
    Census(CensusArgs),
    /// Scatter of (s1, delta0) points per discriminant label
    Strata(StrataArgs),
    /// Run the internal consistency suite
    Selfcheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupArg {
    #[value(name = "G")]
    G,
    #[value(name = "H")]
    H,
    #[value(name = "Delta")]
    Delta,
}

impl From<GroupArg> for GroupKind {
    fn from(g: GroupArg) -> Self {
        match g {
            GroupArg::G => GroupKind::Usp4,
            GroupArg::H => GroupKind::Su2xSu2,
            GroupArg::Delta => GroupKind::DiagonalSu2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Series,
    Quadrature,
    Closed,
}

impl From<RouteArg> for DensityRoute {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Series => DensityRoute::Series,
            RouteArg::Quadrature => DensityRoute::Quadrature,
            RouteArg::Closed => DensityRoute::ClosedForm,
        }
    }
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct CurveArgs {
    #[arg(long, value_enum)]
    pub group: GroupArg,
    #[arg(long, value_enum, default_value = "quadrature")]
    pub route: RouteArg,
    /// Number of equally spaced points, endpoints included
    #[arg(long, default_value_t = 401)]
    pub grid: usize,
    #[arg(long, default_value_t = -4.0)]
    pub from: f64,
    #[arg(long, default_value_t = 4.0)]
    pub to: f64,
    /// Write CSV here instead of standard output
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    /// Also write an SVG line plot
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub q: f64,
    /// Defect d = 4 sqrt(q) - |a1|
    #[arg(long)]
    pub d: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub group: GroupArg,
    #[arg(long, default_value_t = 1_000_000)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Compare with the analytic distribution (needs at least 10^6 draws)
    #[arg(long)]
    pub ks: bool,
    /// Write the draws as CSV (index,s1)
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CensusArgs {
    #[arg(long)]
    pub q: u64,
    /// Include sextic models with leading coefficient 1 or a non-residue
    #[arg(long)]
    pub degree6: bool,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrataMode {
    /// Classes observed in a curve census (q <= 31)
    Census,
    /// All Weil-admissible integer pairs (any odd prime q)
    Weil,
}

#[derive(Debug, Clone, Args)]
pub struct StrataArgs {
    #[arg(long)]
    pub q: u64,
    /// Comma-separated discriminant labels
    #[arg(
        long = "D",
        value_name = "D1,D2,...",
        value_delimiter = ',',
        required = true
    )]
    pub discs: Vec<i64>,
    #[arg(long, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    /// Write the scatter CSV here instead of standard output
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "census")]
    pub mode: StrataMode,
}
