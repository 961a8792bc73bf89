//! Command-line surface: argument parsing, configuration merging, command
//! dispatch and exit codes.
//!
//! Exit codes: `0` success, `2` configuration or input error, `3` numerical
//! tolerance failure, `4` budget exceeded.

mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use config::{Format, RunConfig};
use report::{Header, Report};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "SELBERG3D_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

/// Failure of a CLI run, classified by exit code.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Library(#[from] Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io(_) => EXIT_CONFIG,
            Self::Library(e) => match e {
                Error::BudgetExceeded(_) => EXIT_BUDGET,
                Error::QuadratureFailure(_)
                | Error::SeriesDivergence(_)
                | Error::ConvergenceFailure(_)
                | Error::PeriodicityViolation(_) => EXIT_TOLERANCE,
                _ => EXIT_CONFIG,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "selberg3d", version, about = "Selberg trace formula and zeta function tools for Bianchi groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every report-producing command.
#[derive(Debug, Clone, Default, Args)]
pub struct IoArgs {
    /// TOML configuration file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Report path; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the command named in a configuration file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Geometry of upper half-space.
    #[command(subcommand)]
    Geom(GeomCmd),
    /// Rank-2 lattice character sums.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Bianchi groups and their conjugacy classes.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Eisenstein series.
    #[command(subcommand)]
    Eis(EisCmd),
    /// Selberg zeta function and its topological terms.
    #[command(subcommand)]
    Zeta(ZetaCmd),
    /// Trace formula sides.
    #[command(subcommand)]
    Trace(TraceCmd),
    /// Test-function transforms.
    #[command(subcommand)]
    Shc(ShcCmd),
}

#[derive(Debug, Subcommand)]
pub enum GeomCmd {
    /// Classify one matrix, or every group element up to a height.
    Classify(ClassifyArgs),
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Entries `a,b,c,d` as complex literals, e.g. `2,0,0,0.5` or `1+i,0,0,1-i`.
    #[arg(long, allow_hyphen_values = true)]
    pub matrix: Option<String>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub height: Option<i64>,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Subcommand)]
pub enum LatticeCmd {
    /// `L(Λ, ψ)` by direct summation.
    Lsum(LsumArgs),
    /// The constant `η_Λ`.
    Eta(EtaArgs),
    /// Direct summation against the Siegel-function closed form.
    KroneckerCheck(LsumArgs),
}

#[derive(Debug, Args)]
pub struct LsumArgs {
    /// Lattice parameter, e.g. `i` or `rho`.
    #[arg(long, default_value = "i")]
    pub tau: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub u: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub v: f64,
    #[arg(long)]
    pub xmax: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Args)]
pub struct EtaArgs {
    #[arg(long, default_value = "i")]
    pub tau: String,
    /// Ladder `x = 2^k` for `k` in `[k_min, k_max]`.
    #[arg(long, default_value_t = 14)]
    pub k_min: i32,
    #[arg(long, default_value_t = 24)]
    pub k_max: i32,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Subcommand)]
pub enum GroupCmd {
    /// Elements of `PSL(2, O_d)` up to an entry height.
    Enumerate(EnumerateArgs),
    /// Cuspidal elliptic, loxodromic and non-cuspidal elliptic classes.
    Classes(ClassesArgs),
    /// The exact cuspidal-elliptic identity.
    VerifyIdentity(IdentityArgs),
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub height: Option<i64>,
    /// Budget on the number of elements.
    #[arg(long, default_value_t = crate::bianchi::DEFAULT_ELEMENT_CAP)]
    pub max_elements: usize,
    /// Include the element list in the report.
    #[arg(long)]
    pub list: bool,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ClassKind {
    Cusp,
    Lox,
    Nce,
    All,
}

#[derive(Debug, Args)]
pub struct ClassesArgs {
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub height: Option<i64>,
    #[arg(long)]
    pub norm_bound: Option<f64>,
    #[arg(long, value_enum, default_value_t = ClassKind::All)]
    pub kind: ClassKind,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Args)]
pub struct IdentityArgs {
    #[arg(long)]
    pub d: Option<u32>,
    /// Characters joined by `+` (`trivial`, `sign`, `cubic`) or a representation file.
    #[arg(long)]
    pub rep: Option<String>,
    /// Search height for the cuspidal elliptic classes.
    #[arg(long)]
    pub height: Option<i64>,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TruncationArg {
    Direct,
    Periodized,
}

#[derive(Debug, Subcommand)]
pub enum EisCmd {
    /// Sample the truncated Eisenstein series.
    Eval(EisArgs),
    /// Relative residual of the eigenvalue equation at a point.
    Eigencheck(EisArgs),
}

#[derive(Debug, Args)]
pub struct EisArgs {
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub rep: Option<String>,
    #[arg(long, default_value = "1.8")]
    pub s: String,
    /// Points `x,y,r`; repeatable.
    #[arg(long = "point", allow_hyphen_values = true)]
    pub points: Vec<String>,
    #[arg(long)]
    pub coset_height: Option<i64>,
    #[arg(long, value_enum, default_value_t = TruncationArg::Direct)]
    pub truncation: TruncationArg,
    /// Largest dual-lattice mode kept by the periodized sum.
    #[arg(long, default_value_t = 3.0)]
    pub mu_max: f64,
    /// Finite-difference step of the eigencheck.
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Subcommand)]
pub enum ZetaCmd {
    /// Partial Euler product.
    Partial(ZetaArgs),
    /// Log-derivative series, checked against a central difference.
    Logderiv(ZetaArgs),
    /// Residue table of the topological terms.
    Divisor(DivisorArgs),
    /// The cusp integral by quadrature and by series.
    CuspIntegral(CuspArgs),
}

#[derive(Debug, Args)]
pub struct ZetaArgs {
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub rep: Option<String>,
    /// Evaluation points; repeatable.
    #[arg(long = "s", allow_hyphen_values = true)]
    pub s: Vec<String>,
    #[arg(long)]
    pub norm_bound: Option<f64>,
    #[arg(long)]
    pub height: Option<i64>,
    /// Truncation of the `(k, l)` sum in the product.
    #[arg(long)]
    pub kl_tol: Option<f64>,
    /// Largest power `T₀ⁿ` in the series.
    #[arg(long, default_value_t = 40)]
    pub n_max: u32,
    /// Step of the central difference.
    #[arg(long, default_value_t = 1e-4)]
    pub delta: f64,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Args)]
pub struct DivisorArgs {
    /// Stabilizer index `[Γ_∞ : Γ'_∞]`.
    #[arg(long)]
    pub case: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub l: u32,
    #[arg(long = "trS0", allow_hyphen_values = true)]
    pub tr_s0: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = -6)]
    pub n_min: i64,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Args)]
pub struct CuspArgs {
    #[arg(long = "s", allow_hyphen_values = true)]
    pub s: Vec<String>,
    /// Angles in `(0, π]`, e.g. `pi/3`; repeatable.
    #[arg(long = "t")]
    pub t: Vec<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Subcommand)]
pub enum TraceCmd {
    /// Term-by-term geometric side for the resolvent pair.
    GeometricSide(GeometricArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum NormalizationArg {
    Standard,
    Egm,
}

#[derive(Debug, Args)]
pub struct GeometricArgs {
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub rep: Option<String>,
    #[arg(long, default_value = "2")]
    pub s: String,
    #[arg(long, default_value = "3")]
    pub b: String,
    #[arg(long)]
    pub norm_bound: Option<f64>,
    #[arg(long)]
    pub height: Option<i64>,
    /// `tr 𝔖(0)`, when known.
    #[arg(long = "trS0", allow_hyphen_values = true)]
    pub tr_s0: Option<f64>,
    /// `η_Λ` for the cusp lattice; estimated when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    #[arg(long, value_enum, default_value_t = NormalizationArg::Standard)]
    pub normalization: NormalizationArg,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Subcommand)]
pub enum ShcCmd {
    /// Transform-pair and Selberg–Harish-Chandra checks on the resolvent.
    Check(ShcArgs),
}

#[derive(Debug, Args)]
pub struct ShcArgs {
    #[arg(long, default_value = "2")]
    pub s0: String,
    #[arg(long, default_value = "3")]
    pub b: String,
    /// Points of the transform check; repeatable.
    #[arg(long = "s", allow_hyphen_values = true)]
    pub s: Vec<String>,
    /// Points of the `g` check; repeatable.
    #[arg(long = "x")]
    pub x: Vec<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub io: IoArgs,
}

impl Command {
    fn io(&self) -> Option<&IoArgs> {
        Some(match self {
            Self::Run { .. } => return None,
            Self::Geom(GeomCmd::Classify(a)) => &a.io,
            Self::Lattice(LatticeCmd::Lsum(a) | LatticeCmd::KroneckerCheck(a)) => &a.io,
            Self::Lattice(LatticeCmd::Eta(a)) => &a.io,
            Self::Group(GroupCmd::Enumerate(a)) => &a.io,
            Self::Group(GroupCmd::Classes(a)) => &a.io,
            Self::Group(GroupCmd::VerifyIdentity(a)) => &a.io,
            Self::Eis(EisCmd::Eval(a) | EisCmd::Eigencheck(a)) => &a.io,
            Self::Zeta(ZetaCmd::Partial(a) | ZetaCmd::Logderiv(a)) => &a.io,
            Self::Zeta(ZetaCmd::Divisor(a)) => &a.io,
            Self::Zeta(ZetaCmd::CuspIntegral(a)) => &a.io,
            Self::Trace(TraceCmd::GeometricSide(a)) => &a.io,
            Self::Shc(ShcCmd::Check(a)) => &a.io,
        })
    }
}

/// Worker threads from [`THREADS_ENV`], installed as the global pool.
fn configure_threads() -> Result<usize, CliError> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| CliError::Config(format!("{THREADS_ENV}={v:?} is not a count")))?;
        if n == 0 {
            return Err(CliError::Config(format!("{THREADS_ENV} must be at least 1")));
        }
        // a second call within one process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(rayon::current_num_threads())
}

/// Builds the report for a parsed command.
pub fn execute(cmd: &Command, cfg: &RunConfig) -> Result<Report, CliError> {
    commands::dispatch(cmd, cfg)
}

/// Re-parses `run --config` as the command named in the file.
fn resolve_run(cli: Cli) -> Result<(Command, RunConfig), CliError> {
    match cli.command {
        Command::Run { config } => {
            let cfg = RunConfig::load(&config)?;
            let name = cfg.command.clone().ok_or_else(|| CliError::Config(format!("{} names no command", config.display())))?;
            let mut argv: Vec<String> = vec!["selberg3d".into()];
            argv.extend(name.split_whitespace().map(str::to_string));
            if argv.get(1).map(String::as_str) == Some("run") {
                return Err(CliError::Config("a configuration cannot name `run`".into()));
            }
            argv.push("--config".into());
            argv.push(config.display().to_string());
            let inner = Cli::try_parse_from(&argv).map_err(|e| CliError::Config(format!("command {name:?}: {e}")))?;
            Ok((inner.command, cfg))
        }
        other => {
            let cfg = RunConfig::load_optional(other.io().and_then(|io| io.config.as_deref()))?;
            Ok((other, cfg))
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match run_inner(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("selberg3d: {e}");
            e.exit_code()
        }
    }
}

fn run_inner(cli: Cli) -> Result<i32, CliError> {
    let threads = configure_threads()?;
    let (cmd, cfg) = resolve_run(cli)?;
    let io = cmd.io().cloned().unwrap_or_default();
    let format = cfg.format(io.format);
    let out = cfg.output(io.output.as_deref());
    let start = Instant::now();
    let report = execute(&cmd, &cfg)?;
    let header = Header {
        timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        wall_time_s: start.elapsed().as_secs_f64(),
        threads,
    };
    report::emit(&report.render(format, &header)?, out.as_deref())?;
    if report.passed {
        Ok(EXIT_OK)
    } else {
        eprintln!("selberg3d: `{}` failed its tolerance check", report.command);
        Ok(EXIT_TOLERANCE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_classes() {
        assert_eq!(CliError::Config("x".into()).exit_code(), EXIT_CONFIG);
        assert_eq!(CliError::from(Error::BudgetExceeded("x".into())).exit_code(), EXIT_BUDGET);
        assert_eq!(CliError::from(Error::SeriesDivergence("x".into())).exit_code(), EXIT_TOLERANCE);
        assert_eq!(CliError::from(Error::TrivialCharacter).exit_code(), EXIT_CONFIG);
    }

    #[test]
    fn parses_every_subcommand() {
        let lines = [
            "geom classify --matrix 2,0,0,0.5",
            "lattice lsum --tau i --u 0.5 --v 0 --xmax 0",
            "lattice eta --tau rho",
            "lattice kronecker-check --u 0.5",
            "group enumerate --d 1 --height 2",
            "group classes --kind lox",
            "group verify-identity --d 1 --rep trivial",
            "eis eval --point 0,0,3 --point 0.1,0.2,2",
            "eis eigencheck",
            "zeta partial --s 2 --s 2.5",
            "zeta logderiv",
            "zeta divisor --case 3 --k 1 --l 1 --trS0 1 --n-min -6",
            "zeta cusp-integral --s 2 --t pi/3",
            "trace geometric-side --trS0 -1",
            "shc check --x 0.5",
            "run --config c.toml",
        ];
        for l in lines {
            let argv: Vec<&str> = std::iter::once("selberg3d").chain(l.split_whitespace()).collect();
            Cli::try_parse_from(argv).unwrap_or_else(|e| panic!("{l}: {e}"));
        }
    }
}
