use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "wade", version, about = "Super-profit oil price model runs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Super profit S(t) = (p(t) - p0) q(t) over a price history.
    Superprofit(SuperprofitArgs),
    /// Optimal demand, super profit, costate and reserves along a price path.
    Optimal(OptimalArgs),
    /// Family of solves over varied initial or terminal reserves.
    Sweep(SweepArgs),
    /// Dynamic win-win reference price dP0/dt = f(i) - mu P0.
    Winwin(WinwinArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Run directory; defaults to <WADE_OUT_DIR or wade-runs>/<command>.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Root for run directories.
    #[arg(long, env = "WADE_OUT_DIR", hide_env_values = true)]
    pub out_root: Option<PathBuf>,
    /// Also write SVG plots.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Resampling {
    Step,
    Linear,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Reserve growth rate, 1/year, in [0, 1).
    #[arg(long, default_value_t = wade_core::model::DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Objective exponent (integer >= 2).
    #[arg(long, default_value_t = wade_core::model::DEFAULT_M)]
    pub m: u32,
    /// Costate scale constant [default: 0.2].
    #[arg(long, conflicts_with = "calibrate_demand")]
    pub c0: Option<f64>,
    /// Calibrate c0 so the optimal demand at the first node equals this value (m = 2 only).
    #[arg(long)]
    pub calibrate_demand: Option<f64>,
    /// Win-win reference price, USD/barrel.
    #[arg(long, default_value_t = wade_core::model::DEFAULT_REFERENCE_PRICE)]
    pub p0: f64,
    /// Half-width of the singular band around p0, USD/barrel.
    #[arg(long, default_value_t = wade_core::pontryagin::DEFAULT_EPSILON_BAND)]
    pub epsilon_band: f64,
    /// Clamp prices inside the band to p0 ± band instead of failing.
    #[arg(long)]
    pub clip: bool,
    /// Time-varying growth rate as a `year,value` CSV (overrides --alpha in the dynamics).
    #[arg(long)]
    pub alpha_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PathArgs {
    /// Annual prices as a `year,value` CSV.
    #[arg(long, conflicts_with = "synthetic_prices")]
    pub prices: Option<PathBuf>,
    /// Synthetic price ramp `LO:HI` over the grid instead of a CSV.
    #[arg(long)]
    pub synthetic_prices: Option<String>,
    /// Resampling of the price CSV.
    #[arg(long, value_enum, default_value_t = Resampling::Step)]
    pub price_resample: Resampling,
    /// Grid start (synthetic prices only).
    #[arg(long, default_value_t = 0.0)]
    pub t_start: f64,
    /// Grid end (synthetic prices only).
    #[arg(long, default_value_t = 100.0)]
    pub t_end: f64,
    /// Number of grid steps; defaults to one per year for CSV input.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Rest-of-world demand as a `year,value` CSV (linear resampling).
    #[arg(long, conflicts_with = "w")]
    pub other_demand: Option<PathBuf>,
    /// Constant rest-of-world demand.
    #[arg(long, default_value_t = 0.0)]
    pub w: f64,
    /// Initial reserves Q.
    #[arg(long, default_value_t = 1000.0)]
    pub q0: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SuperprofitArgs {
    /// Annual prices as a `year,value` CSV.
    #[arg(long)]
    pub prices: PathBuf,
    /// Quantities as a `year,value` CSV.
    #[arg(long, conflicts_with = "quantity")]
    pub quantities: Option<PathBuf>,
    /// Constant quantity.
    #[arg(long, default_value_t = 1.0)]
    pub quantity: f64,
    #[arg(long, value_enum, default_value_t = Resampling::Step)]
    pub price_resample: Resampling,
    /// Reference price, USD/barrel.
    #[arg(long, default_value_t = wade_core::model::DEFAULT_REFERENCE_PRICE)]
    pub p0: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OptimalArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub path: PathArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum SweepModeArg {
    Initial,
    Terminal,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum ReversalArg {
    TimeReversed,
    Literal,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub mode: SweepModeArg,
    /// Reserve value at the window start (Q0 or Y0).
    #[arg(long)]
    pub lo: f64,
    /// Reserve value at the window end (Q* or Y*).
    #[arg(long)]
    pub hi: f64,
    /// Sweep indices, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_negative_numbers = true
    )]
    pub k: Vec<i64>,
    /// Window start t0.
    #[arg(long, default_value_t = 0.0)]
    pub t0: f64,
    /// Window length h; defaults to the grid span.
    #[arg(long)]
    pub h: Option<f64>,
    /// Use normalized indexing k / K with this K instead of k / (t0 + h).
    #[arg(long)]
    pub k_max: Option<u64>,
    /// Reversed-time equation for terminal sweeps.
    #[arg(long, value_enum, default_value_t = ReversalArg::TimeReversed)]
    pub reversal: ReversalArg,
    /// Terminal mode: also forward-solve from --q0 and report the reversal error.
    #[arg(long)]
    pub check_reversal: bool,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub path: PathArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum ResponseArg {
    Linear,
    Saturating,
    Constant,
}

#[derive(Debug, Clone, Args)]
pub struct WinwinArgs {
    /// Depreciation rate mu in [0, 1).
    #[arg(long)]
    pub mu: f64,
    /// Reasonable profit, USD/barrel.
    #[arg(long, default_value_t = 0.0)]
    pub pr: f64,
    /// Investment per barrel as a `year,value` CSV.
    #[arg(long, conflicts_with = "investment_const")]
    pub investment: Option<PathBuf>,
    /// Constant investment per barrel.
    #[arg(long, default_value_t = 0.0)]
    pub investment_const: f64,
    /// Response f(i).
    #[arg(long = "f", value_enum, default_value_t = ResponseArg::Linear)]
    pub response: ResponseArg,
    /// Slope of the linear response.
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    /// Ceiling of the saturating response.
    #[arg(long, default_value_t = 1.0)]
    pub ceiling: f64,
    /// Value of the constant response.
    #[arg(long, default_value_t = 0.0)]
    pub f_value: f64,
    /// Initial reference price P0(t_start).
    #[arg(long, default_value_t = wade_core::model::DEFAULT_REFERENCE_PRICE)]
    pub p0_init: f64,
    /// Grid start when no CSV fixes the grid.
    #[arg(long, default_value_t = 0.0)]
    pub t_start: f64,
    #[arg(long, default_value_t = 50.0)]
    pub t_end: f64,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Feed P0(t) as the reference price of an optimal solve over these prices.
    #[arg(long)]
    pub chain_prices: Option<PathBuf>,
    #[command(flatten)]
    pub chain_model: ModelArgs,
    #[arg(long, default_value_t = 1000.0)]
    pub q0: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}
