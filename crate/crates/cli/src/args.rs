use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "fbf-blasius",
    version,
    about = "Free-boundary solver for extended Blasius problems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one problem at a single ε.
    Solve(Common),
    /// Solve a decreasing ε list (default: the nine reference values).
    Sweep(Common),
    /// Compare the free-boundary f''(0) at ε = 1e-8 with truncated shooting.
    Compare(CompareArgs),
    /// Write an SVG of f, f', f'' against η.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: Common,
    /// Truncated boundary of the shooting solve.
    #[arg(long, default_value_t = 10.0)]
    pub eta_inf: f64,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub common: Common,
    /// Curves to draw.
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["f", "fp", "fpp"])]
    pub components: Vec<Component>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WarmStart {
    Chain,
    Cold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Component {
    F,
    Fp,
    Fpp,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long = "p", allow_negative_numbers = true)]
    pub p: f64,
    /// One ε, or a comma-separated decreasing list for `sweep`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub eps: Vec<f64>,
    /// Output file; the table goes to standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, allow_negative_numbers = true)]
    pub newton_tol: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub residual_tol: Option<f64>,
    #[arg(long, value_enum, default_value = "chain")]
    pub warm_start: WarmStart,
    /// Problem 2 only: use the unsimplified third-component formula.
    #[arg(long)]
    pub paper_literal_rhs: bool,
}
