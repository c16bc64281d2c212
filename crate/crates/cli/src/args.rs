//! Command-line flags.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "fts", version, about = "Finite-time singularity fits of hyperinflation price series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one model and print a report.
    Fit(FitArgs),
    /// Monte Carlo uncertainties of the singular fit, or a sweep over Δi.
    Mc(McArgs),
    /// Model curve as CSV, strictly below t_c.
    Curve(CurveArgs),
    /// Price level and year-over-year inflation at one date.
    Predict(PredictArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Rate,
    Index,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitsArg {
    Fraction,
    Percent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DayArg {
    Mid,
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnchorArg {
    Start,
    Mid,
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Linear,
    Doubleexp,
    Singularity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DivisorArg {
    N,
    #[value(name = "n-k")]
    NMinusK,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    /// ln P(t)
    Logp,
    /// P(t)
    Price,
    /// growth per period, Δt·dp/dt
    Rate,
    /// time for P to double
    Doubling,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// CSV of `date,value` rows.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "rate")]
    pub kind: KindArg,
    #[arg(long, value_enum, default_value = "fraction")]
    pub units: UnitsArg,
    #[arg(long, value_enum, default_value = "mid")]
    pub day_convention: DayArg,
    /// Where a yearly observation sits within its year.
    #[arg(long, value_enum, default_value = "start")]
    pub year_anchor: AnchorArg,
    /// Inclusive window FROM:TO, e.g. 1921-05:1923-11.
    #[arg(long)]
    pub window: Option<String>,
    #[arg(long, value_enum, default_value = "n")]
    pub chi_divisor: DivisorArg,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value = "singularity")]
    pub model: ModelArg,
    /// Also write the report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Relative error on every rate (0.25 = 25%).
    #[arg(long, default_value_t = 0.25)]
    pub di: f64,
    /// Generations.
    #[arg(long, default_value_t = 4000)]
    pub m: usize,
    #[arg(long, env = "FTS_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Acceptance threshold on |mean - direct| / std.
    #[arg(long, default_value_t = 0.1)]
    pub threshold: f64,
    /// Sweep FROM:TO:STEP in percent, inclusive; prints CSV.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Worker threads; output does not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, default_value_t = 30)]
    pub bins: usize,
    /// Write the t_c histogram as CSV.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    /// Report from `fit` or `mc`.
    #[arg(long, conflicts_with_all = ["c0", "b"])]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub tc: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, requires = "p0")]
    pub c0: Option<f64>,
    #[arg(long)]
    pub p0: Option<f64>,
    #[arg(long)]
    pub t0: Option<f64>,
    /// B of p = A + B (tc - t)^-alpha.
    #[arg(long, conflicts_with = "c0")]
    pub b: Option<f64>,
    /// A of the same form.
    #[arg(long, requires = "b")]
    pub a: Option<f64>,
    /// Sampling period for `rate`; defaults to the report's.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_enum, default_value = "logp")]
    pub quantity: Quantity,
    /// Start: a date or a time coordinate.
    #[arg(long)]
    pub from: Option<String>,
    /// End: a date or a time coordinate.
    #[arg(long)]
    pub to: Option<String>,
    /// Cover only this span before t_c.
    #[arg(long, conflicts_with = "from")]
    pub before_tc: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub report: PathBuf,
    /// A date (YYYY, YYYY-MM, YYYY-MM-DD) or a time coordinate.
    #[arg(long)]
    pub at: String,
}
