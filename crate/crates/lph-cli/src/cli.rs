use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_GRID: &str = "400x400x50";
pub const DEFAULT_JAC_GRID: &str = "100x100";
pub const DEFAULT_BAND: f64 = 1e-3;
pub const DEFAULT_ROUNDS: usize = 4;
pub const DEFAULT_PROBE_TARGET: f64 = 1e3;
pub const DEFAULT_TMIN: f64 = 1e-3;
pub const DEFAULT_TMAX: f64 = 1e-1;
pub const DEFAULT_TN: usize = 16;
pub const DEFAULT_R: f64 = 1.0;
pub const DEFAULT_W: f64 = 1e-4;
pub const DEFAULT_SMIN: f64 = 1e-6;
pub const DEFAULT_SMAX: f64 = 1e6;
pub const DEFAULT_SN: usize = 61;
pub const DEFAULT_PTRIG_N: usize = 65;
pub const DEFAULT_SERIES_ORDER: usize = 2;
pub const DEFAULT_BRANCH_N: usize = 10_000;
pub const DEFAULT_MC_N: usize = 1_000_000;

#[derive(Debug, Parser)]
#[command(name = "lph", version, about = "Numerics for the Heisenberg group with an l^p sub-Finsler norm")]
pub struct Cli {
    /// Exponent p in [1, inf]; spell infinity as "inf".
    #[arg(long, global = true, value_parser = parse_p)]
    pub p: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file, written atomically; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate p-trigonometric pairs, their duals and the small-angle series.
    Ptrig(PtrigArgs),
    /// Trace a geodesic from the identity.
    Geodesic(GeodesicArgs),
    /// Dump the reduced Jacobian on a grid.
    Jacobian(JacobianArgs),
    /// Estimate the curvature exponent, or probe its divergence for p > 2.
    Ncurv(NcurvArgs),
    /// Scan the integral form of the measure contraction inequality.
    McpCheck(McpArgs),
    /// Homothety volume sweep and geodesic-dimension fit.
    Geodim(GeodimArgs),
    /// Ray-function table along w = s·θ.
    Rayplot(RayArgs),
    /// The l^1 (p = 1) or l^inf (p = inf) group.
    #[command(subcommand)]
    Ell1(Ell1Command),
    /// Print the default of every option as JSON.
    Defaults,
}

#[derive(Debug, Args)]
pub struct PtrigArgs {
    /// Number of angles in [0, 2π_p].
    #[arg(long, default_value_t = DEFAULT_PTRIG_N)]
    pub n: usize,
    /// Tabulate the small-angle series on [0, validity) instead.
    #[arg(long)]
    pub series: bool,
    /// Highest series term kept, at most 2.
    #[arg(long, default_value_t = DEFAULT_SERIES_ORDER)]
    pub order: usize,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub w: f64,
    #[arg(long = "t-end", default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 101)]
    pub n: usize,
    /// Add columns from the ODE integrator.
    #[arg(long)]
    pub ode: bool,
}

#[derive(Debug, Args)]
pub struct JacobianArgs {
    /// NθxNw, a third factor is ignored.
    #[arg(long, default_value = DEFAULT_JAC_GRID, value_parser = parse_grid)]
    pub grid: Grid,
    /// Include the exponent functional N.
    #[arg(long)]
    pub nexp: bool,
}

#[derive(Debug, Args)]
pub struct NcurvArgs {
    #[arg(long, default_value = DEFAULT_GRID, value_parser = parse_grid)]
    pub grid: Grid,
    #[arg(long, default_value_t = DEFAULT_ROUNDS)]
    pub rounds: usize,
    /// Level the divergence probe must exceed (p > 2).
    #[arg(long, default_value_t = DEFAULT_PROBE_TARGET)]
    pub target: f64,
    #[arg(long = "expect-satisfied")]
    pub expect_satisfied: bool,
}

#[derive(Debug, Args)]
pub struct McpArgs {
    /// Exponent N of the inequality.
    #[arg(long)]
    pub n: f64,
    #[arg(long, default_value = DEFAULT_GRID, value_parser = parse_grid)]
    pub grid: Grid,
    #[arg(long, default_value_t = DEFAULT_BAND)]
    pub band: f64,
    #[arg(long = "expect-satisfied")]
    pub expect_satisfied: bool,
}

#[derive(Debug, Args)]
pub struct GeodimArgs {
    #[arg(long, default_value_t = DEFAULT_TMIN)]
    pub tmin: f64,
    #[arg(long, default_value_t = DEFAULT_TMAX)]
    pub tmax: f64,
    #[arg(long, default_value_t = DEFAULT_TN)]
    pub tn: usize,
    #[arg(long = "R", default_value_t = DEFAULT_R)]
    pub r: f64,
    /// Defaults to π_q/4.
    #[arg(long = "Theta")]
    pub theta: Option<f64>,
    #[arg(long = "W", default_value_t = DEFAULT_W)]
    pub w: f64,
    /// Also fit the exponents of the four subdomains.
    #[arg(long)]
    pub decomposition: bool,
}

#[derive(Debug, Args)]
pub struct RayArgs {
    #[arg(long, default_value_t = DEFAULT_SMIN)]
    pub smin: f64,
    #[arg(long, default_value_t = DEFAULT_SMAX)]
    pub smax: f64,
    /// Points per sign.
    #[arg(long, default_value_t = DEFAULT_SN)]
    pub n: usize,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub y: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub z: f64,
}

#[derive(Debug, Subcommand)]
pub enum Ell1Command {
    /// Regime and cut-locus membership of a point.
    Classify(PointArgs),
    /// A length minimizer to a point.
    Geodesic {
        #[command(flatten)]
        point: PointArgs,
        /// Number of steps of an H1 staircase; the canonical path when absent.
        #[arg(long)]
        staircase: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
    },
    /// Certify that a neighbourhood of the branching point collapses at time t.
    Branch {
        #[arg(long, default_value_t = 0.125)]
        t: f64,
        #[arg(long, default_value_t = DEFAULT_BRANCH_N)]
        n: usize,
    },
    /// Analytic and Monte-Carlo volume of a homothety of an H1 box.
    Volume {
        /// x-range of the box as lo,hi.
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "1,2")]
        x: [f64; 2],
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "1,2")]
        y: [f64; 2],
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true, default_value = "-0.1,0.1")]
        z: [f64; 2],
        #[arg(long, default_value_t = 0.1)]
        t: f64,
        #[arg(long, default_value_t = DEFAULT_MC_N)]
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub n_theta: usize,
    pub n_w: usize,
    pub n_t: Option<usize>,
}

pub fn parse_p(s: &str) -> Result<f64, String> {
    let p = match s {
        "inf" | "Inf" | "infinity" => f64::INFINITY,
        _ => s.parse::<f64>().map_err(|e| format!("{s}: {e}"))?,
    };
    if p >= 1.0 {
        Ok(p)
    } else {
        Err(format!("p = {s} must lie in [1, inf]"))
    }
}

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<usize> = s
        .split('x')
        .map(|t| t.parse::<usize>().map_err(|e| format!("{s}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [a, b] if a > 0 && b > 0 => Ok(Grid { n_theta: a, n_w: b, n_t: None }),
        [a, b, c] if a > 0 && b > 0 && c > 0 => Ok(Grid { n_theta: a, n_w: b, n_t: Some(c) }),
        _ => Err(format!("grid {s} must look like NθxNw or NθxNwxNt with positive sizes")),
    }
}

pub fn parse_range(s: &str) -> Result<[f64; 2], String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("{s}: expected lo,hi"))?;
    let lo = a.trim().parse::<f64>().map_err(|e| format!("{s}: {e}"))?;
    let hi = b.trim().parse::<f64>().map_err(|e| format!("{s}: {e}"))?;
    Ok([lo, hi])
}
