//! Command-line front end for `curvint`.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success; simulation completed |
//! | 1 | a verification check failed |
//! | 2 | invalid configuration or arguments |
//! | 3 | initial state on or too close to a singularity |
//! | 4 | trajectory reached the radial pole |
//! | 5 | trajectory reached an angular singularity |
//! | 6 | step size underflow |
//! | 7 | I/O error |

pub mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use curvint::output::{write_check_csv, write_check_summary, write_potential_curve_csv, write_trajectory_csv};
use curvint::systems::potential_curve;
use curvint::verify::sampling::DEFAULT_SEED;
use curvint::verify::suite::{default_pw_grid, verify_grid, verify_system};
use curvint::{integrate, AngularIndex, DynamicsError, Termination};
use thiserror::Error;

pub use config::{ConfigError, RunConfig};

pub const SEED_ENV: &str = "CURVINT_SEED";

pub mod exit {
    pub const OK: u8 = 0;
    pub const CHECK_FAILED: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const SINGULAR_START: u8 = 3;
    pub const RADIAL_POLE: u8 = 4;
    pub const ANGULAR_SINGULARITY: u8 = 5;
    pub const STEP_UNDERFLOW: u8 = 6;
    pub const IO: u8 = 7;
}

pub fn termination_code(t: Termination) -> u8 {
    match t {
        Termination::Completed => exit::OK,
        Termination::HitRadialPole => exit::RADIAL_POLE,
        Termination::HitAngularSingularity => exit::ANGULAR_SINGULARITY,
        Termination::StepUnderflow => exit::STEP_UNDERFLOW,
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("cannot read {path}: {source}")]
    ReadConfig { path: PathBuf, source: io::Error },
    #[error("{SEED_ENV} must be an unsigned integer, got `{0}`")]
    Seed(String),
    #[error("singular initial state: {0}")]
    SingularStart(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::ReadConfig { .. } | CliError::Seed(_) | CliError::Invalid(_) => {
                exit::CONFIG
            }
            CliError::SingularStart(_) => exit::SINGULAR_START,
            CliError::Io(_) => exit::IO,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "curvint",
    version,
    about = "Superintegrable Kepler-related systems on spaces of constant curvature"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one trajectory and write it as CSV with invariant columns.
    Simulate(RunArgs),
    /// Run the verification suite; the default PW grid when no system is given.
    Verify(VerifyArgs),
    /// Kepler potential on the sphere, plane and hyperbolic plane as CSV.
    PotentialCurve(CurveArgs),
    /// Print the effective configuration in the config-file format.
    DumpConfig(RunArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    /// Angular index as `p/q` or `p`.
    #[arg(long)]
    pub m: Option<AngularIndex>,
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub ka: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kb: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
}

impl RunArgs {
    fn touches_system(&self) -> bool {
        self.config.is_some()
            || self.kappa.is_some()
            || self.m.is_some()
            || self.g.is_some()
            || self.ka.is_some()
            || self.kb.is_some()
    }

    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
                    path: path.clone(),
                    source,
                })?;
                RunConfig::parse(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(v) = self.kappa {
            cfg.kappa = v;
        }
        if let Some(m) = self.m {
            cfg.m_num = m.num();
            cfg.m_den = m.den();
        }
        if let Some(v) = self.g {
            cfg.g = v;
        }
        if let Some(v) = self.ka {
            cfg.k_a = v;
        }
        if let Some(v) = self.kb {
            cfg.k_b = v;
        }
        if let Some(v) = self.t_end {
            cfg.t_end = v;
        }
        if let Some(v) = self.rel_tol {
            cfg.integrator.rel_tol = v;
        }
        if let Some(v) = self.abs_tol {
            cfg.integrator.abs_tol = v;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Add deliberately broken invariants; the report must then fail.
    #[arg(long)]
    pub negative_control: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub g: f64,
    #[arg(long, default_value_t = 0.05)]
    pub r_min: f64,
    #[arg(long, default_value_t = 3.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 300)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn open_out(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Seed from `CURVINT_SEED`, or the library default.
pub fn seed_from_env() -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Seed(v)),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_SEED),
        Err(std::env::VarError::NotUnicode(v)) => Err(CliError::Seed(v.to_string_lossy().into_owned())),
    }
}

pub fn cmd_simulate(args: &RunArgs) -> Result<u8, CliError> {
    let cfg = args.resolve()?;
    let spec = cfg.spec()?;
    let traj = match integrate(cfg.state, &spec, cfg.t_end, &cfg.integrator) {
        Ok(t) => t,
        Err(DynamicsError::SingularInitialState(msg)) => return Err(CliError::SingularStart(msg)),
        Err(DynamicsError::System(e)) => return Err(CliError::SingularStart(e.to_string())),
        Err(DynamicsError::InvalidConfig(msg)) => return Err(CliError::Invalid(msg)),
    };
    let mut w = open_out(cfg.out.as_deref())?;
    write_trajectory_csv(&mut w, &traj, &spec, cfg.invariant_columns)?;
    w.flush()?;
    if traj.termination != Termination::Completed {
        eprintln!(
            "trajectory stopped at t = {} ({})",
            traj.t_final(),
            traj.termination.name()
        );
    }
    Ok(termination_code(traj.termination))
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<u8, CliError> {
    let seed = seed_from_env()?;
    let mut cfg = args.run.resolve()?;
    cfg.negative_control |= args.negative_control;
    let rows = if args.run.touches_system() {
        let spec = cfg.spec()?;
        curvint::dynamics::margin_violation(&cfg.state, &spec, cfg.integrator.singularity_margin)
            .map_or(Ok(()), |tag| {
                Err(CliError::SingularStart(format!("{:?} ({})", cfg.state, tag.name())))
            })?;
        verify_system(&spec, Some(cfg.state), &cfg.suite_options(seed))
    } else {
        verify_grid(&default_pw_grid(), &cfg.suite_options(seed))
    };
    let mut w = open_out(cfg.out.as_deref())?;
    write_check_csv(&mut w, &rows)?;
    w.flush()?;
    write_check_summary(io::stderr().lock(), &rows)?;
    Ok(if rows.iter().all(|r| r.pass) {
        exit::OK
    } else {
        exit::CHECK_FAILED
    })
}

pub fn cmd_potential_curve(args: &CurveArgs) -> Result<u8, CliError> {
    let rows =
        potential_curve(args.g, args.r_min, args.r_max, args.samples).map_err(|e| CliError::Invalid(e.to_string()))?;
    let mut w = open_out(args.out.as_deref())?;
    write_potential_curve_csv(&mut w, &rows)?;
    w.flush()?;
    Ok(exit::OK)
}

pub fn cmd_dump_config(args: &RunArgs) -> Result<u8, CliError> {
    let cfg = args.resolve()?;
    // `--out` is part of the dumped configuration, so the dump goes to stdout.
    let mut w = io::stdout().lock();
    w.write_all(cfg.to_config_string().as_bytes())?;
    w.flush()?;
    Ok(exit::OK)
}

pub fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::PotentialCurve(a) => cmd_potential_curve(a),
        Command::DumpConfig(a) => cmd_dump_config(a),
    }
}
