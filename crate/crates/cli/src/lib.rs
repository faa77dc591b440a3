//! Command-line front end for the tidal array economic model.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod tables;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use error::{CliError, CliResult};
pub use format::Format;

#[derive(Debug, Parser)]
#[command(
    name = "tidal-econ",
    version,
    about = "Economic metrics for tidal stream turbine arrays"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,

    /// Write output to a file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Suppress the version banner in human output
    #[arg(long, global = true)]
    pub plain: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// NPV, LCOE, payback, IRR and break-even power for one design
    Metrics {
        /// Project configuration (JSON)
        config: PathBuf,
    },
    /// Split published costs into fixed and per-turbine components
    #[command(subcommand)]
    Split(SplitCommand),
    /// Optimistic / typical / pessimistic metric table
    Scenarios { config: PathBuf },
    /// One-parameter sensitivity curve
    Sweep(SweepArgs),
    /// Break-even functional along a power-versus-turbine-count curve
    Curve(CurveArgs),
}

#[derive(Debug, Subcommand)]
pub enum SplitCommand {
    /// Line through two observations at different array sizes
    TwoPoints(ObsArgs),
    /// One observation plus a fixed-to-turbine cost ratio
    Ratio {
        /// Fixed cost divided by per-turbine cost
        #[arg(long)]
        ratio: f64,
        #[command(flatten)]
        obs: ObsArgs,
    },
}

#[derive(Debug, Args)]
pub struct ObsArgs {
    /// CAPEX observations CSV (`n_t,total_gbp_m` or `capacity_mw,per_mw_gbp_m,rate_to_gbp`)
    #[arg(long, value_name = "PATH")]
    pub capex_csv: Option<PathBuf>,
    /// OPEX observations CSV, same layouts as --capex-csv
    #[arg(long, value_name = "PATH")]
    pub opex_csv: Option<PathBuf>,
    /// Total CAPEX (£m) at a turbine count
    #[arg(long, value_name = "N_T:TOTAL")]
    pub capex: Vec<String>,
    /// Total OPEX (£m/yr) at a turbine count
    #[arg(long, value_name = "N_T:TOTAL")]
    pub opex: Vec<String>,
    /// CAPEX per MW (£m/MW) for an array of the given capacity
    #[arg(long, value_name = "CAPACITY_MW:PER_MW")]
    pub capex_per_mw: Vec<String>,
    /// OPEX per MW (£m/MW/yr) for an array of the given capacity
    #[arg(long, value_name = "CAPACITY_MW:PER_MW")]
    pub opex_per_mw: Vec<String>,
    /// Turbine rating, needed for per-MW observations
    #[arg(long)]
    pub rating_mw: Option<f64>,
    /// Multiplier from the source currency to pounds for inline observations
    #[arg(long, default_value_t = 1.0)]
    pub rate_to_gbp: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub config: PathBuf,
    /// Parameter to vary (CA_f, CA_t, O_f, O_t, r, L, T_e, availability, n_t, P_avg, C_E)
    #[arg(long)]
    pub param: String,
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long, default_value_t = 11)]
    pub steps: usize,
    /// npv, lcoe, payback or irr
    #[arg(long, default_value = "lcoe")]
    pub metric: String,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    pub config: PathBuf,
    /// CSV with header `n_t,p_avg_mw`
    #[arg(long, value_name = "PATH")]
    pub power_curve: PathBuf,
    /// Break-even power per turbine (MW); defaults to the config or the design's own
    #[arg(long)]
    pub p_be: Option<f64>,
    /// Economies-of-volume coefficient (MW per turbine per turbine)
    #[arg(long)]
    pub ev: Option<f64>,
}

/// Rendered command output plus warnings destined for stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub body: String,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct Style {
    pub format: Format,
    pub color: bool,
    pub banner: bool,
}

pub fn run(cli: &Cli, color: bool) -> CliResult<Output> {
    let style = Style {
        format: cli.format,
        color: color && cli.format == Format::Human,
        banner: !cli.plain && cli.format == Format::Human,
    };
    let mut out = match &cli.command {
        Command::Metrics { config } => commands::metrics(config, style),
        Command::Split(cmd) => commands::split(cmd, style),
        Command::Scenarios { config } => commands::scenarios(config, style),
        Command::Sweep(args) => commands::sweep(args, style),
        Command::Curve(args) => commands::curve(args, style),
    }?;
    if style.banner {
        out.body = format!("tidal-econ {}\n\n{}", env!("CARGO_PKG_VERSION"), out.body);
    }
    Ok(out)
}
