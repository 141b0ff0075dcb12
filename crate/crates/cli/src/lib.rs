//! Command-line front end for `hdet-core`: state files, measures, convex-roof
//! estimates and the seeded verification suites.
//!
//! Exit codes: 0 on success, 1 when a verification check fails, 2 on usage,
//! format or I/O errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use hdet::convexroof::{convex_roof_estimate, separable_mixture, DensityMatrix, RoofConfig};
use hdet::locc::random_povm;
use hdet::qstate::{measure, random_haar_state_with, random_product_state_with, state_hdet};
use hdet::random::rng_from_seed;
use hdet::{CMatrix, HdetBudget, MeasureKind};
use rand::Rng;
use serde_json::json;
use thiserror::Error;

pub mod report;
pub mod statefile;
pub mod suites;

use report::SuiteSummary;
use statefile::StateFile;
use suites::{Suite, SuiteOptions};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error(transparent)]
    Core(#[from] hdet::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hdet",
    version,
    about = "Cayley hyperdeterminants of qudit states"
)]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, env = "HDE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Largest number of permutation-sum terms one hyperdeterminant may use.
    #[arg(long, global = true, default_value_t = hdet::hyperdet::DEFAULT_MAX_TERMS)]
    pub budget: f64,
    /// Load state files without checking normalisation or trace.
    #[arg(long, global = true)]
    pub no_normalize_check: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    /// |hdet|
    E1,
    /// |hdet|^2
    E2,
}

impl From<Which> for MeasureKind {
    fn from(w: Which) -> Self {
        match w {
            Which::E1 => MeasureKind::Hdet,
            Which::E2 => MeasureKind::Tangle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RandomKind {
    /// Haar-random pure state.
    Pure,
    /// Equal-weight mixture of Haar-random pure states.
    Mixed,
    /// Random mixture of random product states.
    Separable,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the hyperdeterminant of a pure state file.
    Hdet { path: PathBuf },
    /// Print |hdet| or |hdet|^2 of a pure state file.
    Measure {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Which::E1)]
        which: Which,
    },
    /// Run a verification suite; exit 1 if any check fails.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Instance count for every check in the suite.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Upper bound on the convex roof of a mixed state file.
    Roof {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Which::E1)]
        which: Which,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 500)]
        iters: usize,
        /// Largest ensemble size tried (default r^2 for rank r).
        #[arg(long)]
        m_max: Option<usize>,
    },
    /// Write a random state file.
    RandomState {
        /// Number of subsystems (even for mixed kinds).
        #[arg(long)]
        qudits: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value_t = RandomKind::Pure)]
        kind: RandomKind,
        /// Mixture size for mixed kinds.
        #[arg(long, default_value_t = 3)]
        members: usize,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a random two-outcome POVM as JSON.
    RandomPovm {
        #[arg(long)]
        d: usize,
    },
}

fn budget(cli: &Cli) -> Result<HdetBudget, CliError> {
    if !(cli.budget >= 1.0) {
        return Err(CliError::Usage(format!(
            "--budget must be at least 1, got {}",
            cli.budget
        )));
    }
    Ok(HdetBudget::new(cli.budget))
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let b = budget(cli)?;
    let check = !cli.no_normalize_check;
    match &cli.command {
        Command::Hdet { path } => {
            let psi = StateFile::read(path)?.into_pure(check)?;
            if psi.subsystems() % 2 == 1 {
                writeln!(
                    err,
                    "warning: {} subsystems is odd; hdet vanishes identically",
                    psi.subsystems()
                )?;
                writeln!(out, "hdet = 0")?;
                return Ok(EXIT_OK);
            }
            let h = state_hdet(&psi, b)?;
            writeln!(out, "hdet.re = {:.14e}", h.re)?;
            writeln!(out, "hdet.im = {:.14e}", h.im)?;
            writeln!(out, "|hdet| = {:.14e}", h.norm())?;
        }
        Command::Measure { path, which } => {
            let psi = StateFile::read(path)?.into_pure(check)?;
            let kind = MeasureKind::from(*which);
            let v = measure(&psi, kind, b)?;
            if v.odd_order {
                writeln!(
                    err,
                    "warning: {} subsystems is odd; the measure vanishes identically",
                    psi.subsystems()
                )?;
            }
            writeln!(out, "{} = {:.14e}", kind.label(), v.value)?;
            if psi.local_dim() == 2 && !v.odd_order {
                match kind {
                    MeasureKind::Hdet => writeln!(out, "concurrence = {:.14e}", 2.0 * v.value)?,
                    MeasureKind::Tangle => writeln!(out, "n-tangle = {:.14e}", 4.0 * v.value)?,
                }
            }
        }
        Command::Verify { suite, trials } => {
            let opts = SuiteOptions {
                seed: cli.seed,
                trials: *trials,
                budget: b,
            };
            let output = suites::run(*suite, &opts)?;
            for r in &output.records {
                report::emit(out, r)?;
            }
            for t in &output.failures {
                report::emit(out, &json!({"failing_trial": t}))?;
            }
            let summary = SuiteSummary::from_records(suite.name(), &output.records);
            report::emit(out, &summary)?;
            return Ok(if summary.pass {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            });
        }
        Command::Roof {
            path,
            which,
            restarts,
            iters,
            m_max,
        } => {
            let rho = StateFile::read(path)?.into_mixed(check)?;
            let kind = MeasureKind::from(*which);
            let cfg = RoofConfig {
                restarts: *restarts,
                iterations: *iters,
                m_max: *m_max,
                seed: cli.seed,
                hdet_budget: b,
            };
            let est = convex_roof_estimate(&rho, kind, &cfg)?;
            writeln!(
                out,
                "upper bound ({} convex roof) = {:.14e}",
                kind.label(),
                est.value
            )?;
            writeln!(out, "eigen-ensemble average = {:.14e}", est.eigen_value)?;
            writeln!(out, "ensemble size = {}", est.best.len())?;
            writeln!(
                out,
                "reconstruction residual = {:.3e}",
                est.best.residual(&rho)
            )?;
        }
        Command::RandomState {
            qudits,
            d,
            kind,
            members,
            out: path,
        } => {
            let file = random_state(*qudits, *d, *kind, *members, cli.seed)?;
            write_state(&file, path.as_deref(), out)?;
        }
        Command::RandomPovm { d } => {
            let povm = random_povm(*d, cli.seed)?;
            let mat = |m: &CMatrix| -> Vec<Vec<[f64; 2]>> {
                (0..m.nrows())
                    .map(|i| {
                        (0..m.ncols())
                            .map(|j| [m[(i, j)].re, m[(i, j)].im])
                            .collect()
                    })
                    .collect()
            };
            let value = json!({
                "d": d,
                "seed": cli.seed,
                "sigma": povm.sigma(),
                "u1": mat(povm.u1()),
                "u2": mat(povm.u2()),
                "v": mat(povm.v()),
                "completeness_residual": povm.completeness_residual(),
            });
            report::emit(out, &value)?;
        }
    }
    Ok(EXIT_OK)
}

fn random_state(
    qudits: usize,
    d: usize,
    kind: RandomKind,
    members: usize,
    seed: u64,
) -> Result<StateFile, CliError> {
    let mut rng = rng_from_seed(seed);
    if kind != RandomKind::Pure && members == 0 {
        return Err(CliError::Usage("--members must be positive".into()));
    }
    match kind {
        RandomKind::Pure => Ok(StateFile::pure(&random_haar_state_with(
            qudits, d, &mut rng,
        )?)),
        RandomKind::Mixed => {
            let parts = (0..members)
                .map(|_| {
                    random_haar_state_with(qudits, d, &mut rng)
                        .map(|p| DensityMatrix::from_pure(&p))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let w = vec![1.0 / members as f64; members];
            StateFile::mixed(&DensityMatrix::mixture(&w, &parts)?)
        }
        RandomKind::Separable => {
            let sets = (0..members)
                .map(|_| random_product_state_with(qudits, d, &mut rng).map(|p| p.1))
                .collect::<Result<Vec<_>, _>>()?;
            let raw: Vec<f64> = (0..members).map(|_| 0.05 + rng.random::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
            StateFile::mixed(&separable_mixture(&sets, &w)?)
        }
    }
}

fn write_state(file: &StateFile, path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => file.write(p),
        None => Ok(out.write_all(file.to_text().as_bytes())?),
    }
}
