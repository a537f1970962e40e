//! `corrlab`: conditional entropies, minimizing measurements and discord
//! for qudit-qubit states.
//!
//! Exit codes: 0 ok, 2 parse or usage error, 3 invalid state,
//! 4 approximation not applicable, 1 anything else.

mod commands;
mod input;
mod output;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use corrlab::{Error, MinimizerConfig, Tolerances};

use commands::{Loaded, ScanArgs};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn parse(message: String) -> Self {
        Self { code: 2, message }
    }

    pub fn usage(message: String) -> Self {
        Self { code: 2, message }
    }

    pub fn invalid_state(message: String) -> Self {
        Self { code: 3, message }
    }

    pub fn io(message: String) -> Self {
        Self { code: 1, message }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnknownEntropy(_)
            | Error::UnknownMethod(_)
            | Error::Unsupported(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidDimension(_) => 2,
            Error::NotHermitian { .. } | Error::InvalidState(_) | Error::Domain(..) => 3,
            Error::ApproximationInvalid(_) | Error::AlignmentViolated(_) | Error::DegenerateQubit => 4,
            _ => 1,
        };
        Self { code, message: e.to_string() }
    }
}

#[derive(Debug, Parser)]
#[command(name = "corrlab", version, about = "Minimizing local measurements, conditional entropies and discord")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for grid evaluations (default: all cores).
    #[arg(long, global = true, env = "CORRLAB_JOBS")]
    jobs: Option<usize>,
    /// Max |rho - rho^H| entry accepted for matrix input.
    #[arg(long, global = true, default_value_t = corrlab::tolerances::HERMITIAN)]
    tol_hermitian: f64,
    /// Smallest eigenvalue accepted is -tol.
    #[arg(long, global = true, default_value_t = corrlab::tolerances::POSITIVITY)]
    tol_positivity: f64,
    /// Eigenvalue gap below which the optimum is reported as degenerate.
    #[arg(long, global = true, default_value_t = corrlab::tolerances::DEGENERATE)]
    tol_degenerate: f64,
    /// Angle (rad) from every principal axis beyond which an optimum is a crossover.
    #[arg(long, global = true, default_value_t = corrlab::tolerances::CROSSOVER_ANGLE)]
    tol_crossover: f64,
}

#[derive(Debug, Args)]
struct OracleOpts {
    /// Points on the Fibonacci hemisphere grid.
    #[arg(long, default_value_t = 2000)]
    grid: usize,
}

impl OracleOpts {
    fn config(&self) -> MinimizerConfig {
        MinimizerConfig { grid_n: self.grid.max(1), ..MinimizerConfig::default() }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Plane {
    Xz,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bloch decomposition, marginal entropies and correlation ellipsoid (JSON).
    Analyze {
        state: PathBuf,
        /// Entropic form: vn, quad or tsallis:<q>.
        #[arg(long, default_value = "vn")]
        entropy: String,
    },
    /// Minimizing projective measurement on B (JSON).
    Optimize {
        state: PathBuf,
        #[arg(long, default_value = "vn")]
        entropy: String,
        /// exact (quadratic entropy only), weak or oracle.
        #[arg(long, default_value = "oracle")]
        method: String,
        #[command(flatten)]
        oracle: OracleOpts,
    },
    /// Quantum discord, exact or weak-correlation estimate (JSON).
    Discord {
        state: PathBuf,
        /// oracle or weak.
        #[arg(long, default_value = "oracle")]
        method: String,
        #[command(flatten)]
        oracle: OracleOpts,
    },
    /// Entropy decrease along k = (sin t, 0, cos t) for a two-qubit state (CSV).
    ///
    /// Columns: theta, ds_quad, ds_vn (exact), ds_vn_weak (second order),
    /// discord, discord_quad (second order), then ds_<form> for each
    /// --entropy given.
    Profile {
        state: PathBuf,
        /// Extra entropic forms to tabulate exactly.
        #[arg(long)]
        entropy: Vec<String>,
        #[arg(long, value_enum, default_value = "xz")]
        plane: Plane,
        /// Rows are theta = 2 pi i / steps for i = 0..=steps.
        #[arg(long, default_value_t = 360)]
        steps: usize,
    },
    /// Sector labels of J_x = J_y X states over an (r_A, J_x) grid (CSV).
    ///
    /// Columns: r_A, J_x, sector (A, B, C, D or invalid), crossover.
    /// A: both optima in the xy plane; B: both along z; C: quadratic in the
    /// plane, von Neumann off it; D: quadratic along z, von Neumann off it.
    ScanSectors {
        #[arg(long = "r-b", alias = "r_B", allow_hyphen_values = true)]
        r_b: f64,
        #[arg(long = "j-z", alias = "J_z", allow_hyphen_values = true)]
        j_z: f64,
        /// Points per axis.
        #[arg(long, default_value_t = 100)]
        grid: usize,
        #[arg(long, default_value_t = 0.99)]
        r_a_max: f64,
        #[arg(long, default_value_t = 0.99)]
        j_x_max: f64,
        /// Oracle grid per point.
        #[arg(long, default_value_t = 2000)]
        oracle_grid: usize,
    },
    /// Post-measurement Bloch vectors of A on the correlation ellipsoid (CSV).
    ///
    /// Columns: r1..rD, both outcomes for each of --samples directions.
    Ellipsoid {
        state: PathBuf,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
}

fn load(path: &Path, tol: &Tolerances) -> Result<Loaded, CliError> {
    let file = input::read_state_file(path)?;
    let state = file.to_state(tol)?;
    Ok(Loaded { file, state })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    if let Some(jobs) = g.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| CliError::io(format!("thread pool: {e}")))?;
    }
    let tol = Tolerances {
        hermitian: g.tol_hermitian,
        positivity: g.tol_positivity,
        degenerate: g.tol_degenerate,
        crossover_angle: g.tol_crossover,
    };
    let text = match &cli.command {
        Command::Analyze { state, entropy } => commands::analyze(&load(state, &tol)?, entropy, &tol)?,
        Command::Optimize { state, entropy, method, oracle } => {
            commands::optimize(&load(state, &tol)?, entropy, method, &oracle.config(), &tol)?
        }
        Command::Discord { state, method, oracle } => {
            commands::discord(&load(state, &tol)?, method, &oracle.config(), &tol)?
        }
        Command::Profile { state, entropy, plane: Plane::Xz, steps } => {
            commands::profile_csv(&load(state, &tol)?, *steps, entropy)?
        }
        Command::ScanSectors { r_b, j_z, grid, r_a_max, j_x_max, oracle_grid } => {
            let args = ScanArgs { r_b: *r_b, j_z: *j_z, grid: *grid, r_a_max: *r_a_max, j_x_max: *j_x_max };
            let config = MinimizerConfig { grid_n: (*oracle_grid).max(1), ..MinimizerConfig::default() };
            commands::scan_sectors_csv(&args, &config, &tol)?
        }
        Command::Ellipsoid { state, samples } => commands::ellipsoid_csv(&load(state, &tol)?, *samples)?,
    };
    output::emit(&text, g.out.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("corrlab: {e}");
            ExitCode::from(e.code)
        }
    }
}
