//! `cssc` — circuit complexity of coherent-spin-state operators.
//!
//! Three subcommands cover the library surface:
//! - `complexity`: closed-form complexity of a chosen model, optionally
//!   swept over a time grid, as CSV or JSON rows;
//! - `squeeze`: squeezing-parameter table for the one-axis-twisting
//!   model, with the boundary-function and squeezing-rewrite complexity
//!   routes side by side (they must agree — a disagreement is an
//!   internal defect, not user error);
//! - `verify`: the verification suites (metric, geodesic, identities,
//!   oracle), one JSON line per check.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error,
//! 3 internal identity violation.

mod sweep;
mod verify;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "cssc",
    version,
    about = "Circuit complexity of coherent-spin-state operators",
    long_about = "Computes Nielsen circuit complexity of the operators that create \
                  coherent spin states, for static targets and for targets evolved \
                  under driven-spin models, and runs the numerical verification \
                  suites backing every closed form."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Complexity of one model, optionally over a time grid
    #[command(after_help = "Columns: t,f1,f2,f3,norm,complexity. The f-columns are the \
                            three boundary functions of the evolved target (f1 = 0 for \
                            planar models), norm = sqrt(f1^2+f2^2+f3^2). For the dicke \
                            model the complexity column adds the oscillator displacement \
                            cost on top of the spin rotation described by the f-columns.")]
    Complexity(ComplexityArgs),
    /// Squeezing table for the one-axis-twisting model
    #[command(after_help = "Columns: t,var_jy,var_jz,corr_yz,xi2_y,xi2_z,g_pair_zz,\
                            complexity_bf,complexity_sq; `--exact` appends \
                            var_jy_exact,var_jz_exact,corr_yz_exact,xi2_y_exact,\
                            xi2_z_exact,g_pair_zz_exact from the dense evolver. \
                            complexity_bf uses the boundary functions, complexity_sq \
                            the squeezing-parameter rewrite; the two are checked to \
                            agree to 1e-12 on every row.")]
    Squeeze(SqueezeArgs),
    /// Run verification suites; one JSON line per check
    #[command(after_help = "Each line has fields check, samples, max_deviation, \
                            tolerance, pass, wall_ms; the command exits 1 if any \
                            check fails. Output is deterministic for a fixed seed \
                            except for wall_ms.")]
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    /// Fixed rotation target (theta, phi)
    Static,
    /// Azimuthal precession of the target under H = B*Jz
    SpinMagnet,
    /// One-axis twisting H = 2*delta*Jz^2 + Omega*Jx (frozen-spin regime)
    Oat,
    /// Isotropic LMG (kappa = 1): precession at omega_1 = B + lambda
    LmgIso,
    /// Anisotropic LMG frozen-spin boundary functions
    LmgFrozen,
    /// Spin rotation plus oscillator displacement
    Dicke,
}

impl ModelArg {
    pub fn name(self) -> &'static str {
        match self {
            ModelArg::Static => "static",
            ModelArg::SpinMagnet => "spin-magnet",
            ModelArg::Oat => "oat",
            ModelArg::LmgIso => "lmg-iso",
            ModelArg::LmgFrozen => "lmg-frozen",
            ModelArg::Dicke => "dicke",
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

/// Model parameters and sweep controls shared by `complexity` and
/// `squeeze`. Every physical parameter is optional at parse time; which
/// ones are required, defaulted or refused is decided per model, so the
/// diagnostics can name the offending flag.
#[derive(Args)]
pub struct SweepArgs {
    /// Polar angle of the target rotation (radians, default 0)
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// Azimuthal angle of the target rotation (radians, default 0)
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    /// Field strength B (spin-magnet, lmg-iso, lmg-frozen)
    #[arg(long = "B", allow_negative_numbers = true)]
    b: Option<f64>,
    /// Transverse drive Omega (oat)
    #[arg(long = "Omega", allow_negative_numbers = true)]
    omega_drive: Option<f64>,
    /// Twisting strength delta (oat)
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Collective spin magnitude J = N/2 (oat; alternative to --N)
    #[arg(long = "J", allow_negative_numbers = true)]
    j: Option<f64>,
    /// Coupling lambda (lmg-iso, lmg-frozen; default 1)
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Anisotropy kappa in [0, 1] (lmg-frozen; must be 1 for lmg-iso)
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// Particle number N (oat: sets J = N/2; lmg models: even, default 2)
    #[arg(long = "N")]
    n_particles: Option<u32>,
    /// Geodesic branch index (default 0, the minimal branch)
    #[arg(long)]
    n: Option<u32>,
    /// Oscillator displacement, real part (dicke, default 0)
    #[arg(long, allow_negative_numbers = true)]
    alpha_r: Option<f64>,
    /// Oscillator displacement, imaginary part (dicke, default 0)
    #[arg(long, allow_negative_numbers = true)]
    alpha_i: Option<f64>,
    /// Oscillator frequency omega (dicke)
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    /// Start of the time grid (default 0)
    #[arg(long, allow_negative_numbers = true)]
    t_min: Option<f64>,
    /// End of the time grid (default t-min)
    #[arg(long, allow_negative_numbers = true)]
    t_max: Option<f64>,
    /// Number of grid points (default 1)
    #[arg(long)]
    steps: Option<usize>,
    /// Output format
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Write the table to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ComplexityArgs {
    /// Model selector
    #[arg(long, value_enum)]
    model: ModelArg,
    #[command(flatten)]
    params: SweepArgs,
}

#[derive(Args)]
pub struct SqueezeArgs {
    /// Model selector (`oat` is the only squeezing model; default)
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[command(flatten)]
    params: SweepArgs,
    /// Append exact dense-evolution columns (2J must be an integer)
    #[arg(long)]
    exact: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    All,
    Metric,
    Geodesic,
    Identities,
    Oracle,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Which suite to run
    #[arg(value_enum, default_value_t = SuiteArg::All)]
    suite: SuiteArg,
    /// Seed for the randomized checks
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Override every check tolerance with one absolute value
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
}

/// A failure carrying its process exit code. Usage problems name the
/// offending flag in a single line; verification failures and internal
/// identity violations use their dedicated codes.
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(field: &str, reason: impl std::fmt::Display) -> Self {
        Failure {
            code: 2,
            message: format!("{field}: {reason}"),
        }
    }

    pub fn verification(failed: usize, total: usize) -> Self {
        Failure {
            code: 1,
            message: format!("verification failed: {failed} of {total} checks"),
        }
    }

    pub fn internal(reason: impl std::fmt::Display) -> Self {
        Failure {
            code: 3,
            message: format!("internal identity violation: {reason}"),
        }
    }

    /// Map a library error onto the exit-code contract: identity
    /// violations are internal defects, parameter rejections keep the
    /// field name they already carry, everything else is a usage
    /// problem as well.
    pub fn from_core(err: cssc_core::Error) -> Self {
        match err {
            cssc_core::Error::IdentityViolation(msg) => Failure::internal(msg),
            cssc_core::Error::InvalidParameter { name, reason } => Failure::usage(name, reason),
            other => Failure {
                code: 2,
                message: other.to_string(),
            },
        }
    }
}

/// Apply the `CSSC_THREADS` cap before any sweep runs. Unset means the
/// rayon default; anything set must be a positive integer.
fn configure_threads() -> Result<(), Failure> {
    let raw = match std::env::var("CSSC_THREADS") {
        Err(std::env::VarError::NotPresent) => return Ok(()),
        Err(std::env::VarError::NotUnicode(_)) => {
            return Err(Failure::usage("CSSC_THREADS", "is not valid unicode"))
        }
        Ok(s) => s,
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::usage("CSSC_THREADS", format!("`{raw}` is not a positive integer")))?;
    if threads == 0 {
        return Err(Failure::usage("CSSC_THREADS", "must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::usage("CSSC_THREADS", e))
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Complexity(args) => sweep::cmd_complexity(&args),
        Command::Squeeze(args) => sweep::cmd_squeeze(&args),
        Command::Verify(args) => verify::cmd_verify(&args),
    }
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests arrive as "errors" but are not.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(fail) => {
            eprintln!("error: {}", fail.message);
            fail.code
        }
    }
}

fn main() {
    std::process::exit(run());
}
