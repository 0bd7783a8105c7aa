//! Command-line front end: problem files, certificates and branch tables.

pub mod problem;
mod render;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use neumann_core::checker::{self, CheckError};
use neumann_core::galerkin::{
    self, BasisSize, BranchPoint, ContinuationOptions, GalerkinBasis, GalerkinError, NewtonOptions, Nonlinearity,
    QuadSpec, SeedOptions,
};
use neumann_core::spectra::{self, DomainSpec};

pub use problem::{load, Problem, ProblemFile};

/// Failure classes, each with its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<CheckError> for CliError {
    fn from(e: CheckError) -> Self {
        match e {
            CheckError::MissingFamily => CliError::Validation(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<GalerkinError> for CliError {
    fn from(e: GalerkinError) -> Self {
        match e {
            GalerkinError::UnsupportedDomain(_) | GalerkinError::InvalidBasis(_) => CliError::Validation(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpectrumFormat {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BuiltinDomain {
    Interval,
    Disc,
    Cylinder,
}

#[derive(Debug, Parser)]
#[command(name = "neumann", version, about = "Existence certificates and solvers for -Δu = f(u) with Neumann conditions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List eigenvalues of -Δ below a bound.
    Spectrum {
        #[arg(long, value_enum)]
        domain: BuiltinDomain,
        /// Interval length.
        #[arg(long, default_value_t = 1.0)]
        length: f64,
        #[arg(long = "max")]
        max: f64,
        #[arg(long, value_enum, default_value = "table")]
        format: SpectrumFormat,
    },
    /// Local and total indices of the constant solutions.
    Index {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Run every criterion and print a certificate.
    Check {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Bifurcation index from infinity over the `bif` window.
    Bif {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Search for nonconstant solutions at a fixed parameter.
    Solve {
        file: PathBuf,
        /// Seed only along this basis function.
        #[arg(long)]
        seed_mode: Option<usize>,
        /// Seed amplitude.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Trace a solution branch in the parameter and write it as CSV.
    Continue {
        file: PathBuf,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        seed_mode: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        /// Append the Galerkin coefficients to each row.
        #[arg(long)]
        coefficients: bool,
    },
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn io(e: std::io::Error) -> CliError {
    CliError::Numerical(format!("write failed: {e}"))
}

pub fn execute(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Spectrum { domain, length, max, format } => {
            let d = match domain {
                BuiltinDomain::Interval => DomainSpec::Interval { length: *length },
                BuiltinDomain::Disc => DomainSpec::Disc,
                BuiltinDomain::Cylinder => DomainSpec::Cylinder,
            };
            d.validate().map_err(|e| CliError::Validation(e.to_string()))?;
            if !max.is_finite() {
                return Err(CliError::Validation("--max must be finite".into()));
            }
            let lines = spectra::spectrum(&d, *max).map_err(|e| CliError::Numerical(e.to_string()))?;
            out.write_all(render::spectrum(&lines, *format).as_bytes()).map_err(io)
        }
        Command::Index { file, format } => {
            let p = load(file)?;
            let (spec, warnings) = p.spec_at(0.0)?;
            warn(err, &warnings);
            let report = checker::check_all(&spec)?;
            let index = report.index.expect("check_all always computes the index");
            out.write_all(render::index(&spec, &index, *format).as_bytes()).map_err(io)
        }
        Command::Check { file, format } => {
            let p = load(file)?;
            let (spec, warnings) = p.spec_at(0.0)?;
            warn(err, &warnings);
            let report = checker::check_all(&spec)?;
            out.write_all(render::check(&spec, &report, *format).as_bytes()).map_err(io)
        }
        Command::Bif { file, format } => {
            let p = load(file)?;
            if p.bif.is_none() {
                return Err(CliError::Validation("the problem file has no bif section".into()));
            }
            let (spec, warnings) = p.spec_at(0.0)?;
            warn(err, &warnings);
            let report = checker::bif_index(&spec)?;
            let meets = checker::check_bif_meets(&spec);
            out.write_all(render::bif(&report, &meets, *format).as_bytes()).map_err(io)
        }
        Command::Solve { file, seed_mode, eps, lambda, format } => {
            let p = load(file)?;
            let basis = basis_for(&p)?;
            let f = Nonlinearity::new(p.expr.clone());
            let (zeros, warnings) = p.zeros_at(*lambda)?;
            warn(err, &warnings);
            let found = seek(&basis, &f, *lambda, &zeros, &p, *seed_mode, *eps)?;
            if found.is_empty() {
                let _ = writeln!(err, "note: no nonconstant solution found from the seeds; certificate unverified numerically");
            }
            out.write_all(render::solutions(&basis, &found, *format).as_bytes()).map_err(io)
        }
        Command::Continue { file, from, to, step, output, seed_mode, eps, coefficients } => {
            if !(*step > 0.0) {
                return Err(CliError::Validation("--step must be positive".into()));
            }
            let p = load(file)?;
            let basis = basis_for(&p)?;
            let f = Nonlinearity::new(p.expr.clone());
            let (zeros, warnings) = p.zeros_at(*from)?;
            warn(err, &warnings);
            let start = match seek(&basis, &f, *from, &zeros, &p, *seed_mode, *eps)?.into_iter().next() {
                Some(s) => s,
                None => {
                    let z = zeros
                        .first()
                        .ok_or_else(|| CliError::Numerical(format!("no solution to start from at lambda = {from}")))?;
                    let _ = writeln!(err, "note: no nonconstant start found; following the constant z = {}", z.value);
                    galerkin::newton_solve(&basis, &basis.constant(z.value), *from, &f, newton_opts(&p))?
                }
            };
            let opts = ContinuationOptions {
                step: *step,
                tol: p.solver.tol.unwrap_or(ContinuationOptions::default().tol),
                ..Default::default()
            };
            let branch = galerkin::continue_branch(&basis, &f, &start, (*from, *to), &opts)?;
            let csv = render::branch_csv(&branch.points, *coefficients);
            std::fs::write(output, csv)
                .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", output.display())))?;
            let blowup = galerkin::detect_blowup(&branch.points, opts.norm_cap);
            out.write_all(render::branch_summary(&branch, blowup).as_bytes()).map_err(io)
        }
    }
}

fn warn(err: &mut dyn Write, warnings: &[String]) {
    for w in warnings {
        let _ = writeln!(err, "warning: {w}");
    }
}

const DEFAULT_INTERVAL_MODES: usize = 64;
const DEFAULT_DISC_MODES: usize = 48;

fn basis_for(p: &Problem) -> Result<GalerkinBasis, CliError> {
    let modes = p.solver.modes.unwrap_or(match p.domain {
        DomainSpec::Disc => DEFAULT_DISC_MODES,
        _ => DEFAULT_INTERVAL_MODES,
    });
    let quad = QuadSpec { nodes: p.solver.quad_order, angular: None };
    Ok(galerkin::build_basis(&p.domain, BasisSize::Count(modes), quad)?)
}

fn newton_opts(p: &Problem) -> NewtonOptions {
    NewtonOptions {
        tol: p.solver.tol.unwrap_or(1e-10),
        max_iters: 80,
    }
}

/// Nonconstant solutions at `lam`, either from the default seeding or from
/// `z + eps·φ_m` for a single basis function `m`.
fn seek(
    basis: &GalerkinBasis,
    f: &Nonlinearity,
    lam: f64,
    zeros: &[checker::ZeroData],
    p: &Problem,
    seed_mode: Option<usize>,
    eps: Option<f64>,
) -> Result<Vec<BranchPoint>, CliError> {
    let mut opts = SeedOptions { newton: newton_opts(p), ..Default::default() };
    if let Some(e) = eps {
        opts.eps = vec![e];
    }
    let Some(m) = seed_mode else {
        return Ok(galerkin::find_nonconstant(basis, f, lam, zeros, &opts));
    };
    if m >= basis.len() {
        return Err(CliError::Validation(format!("--seed-mode {m} exceeds the {} basis functions", basis.len())));
    }
    let known: Vec<_> = zeros.iter().map(|z| basis.constant(z.value)).collect();
    let mut found: Vec<BranchPoint> = Vec::new();
    for z in zeros {
        for &e in &opts.eps {
            let seed = basis.constant(z.value) + basis.unit(m) * e;
            let Ok(s) = galerkin::newton_solve_deflated(basis, &seed, lam, f, opts.newton, &known) else {
                continue;
            };
            let far = basis.distance_to_constants(&s.coeffs) > opts.min_distance_to_constants;
            let new = found.iter().all(|q| (&q.coeffs - &s.coeffs).norm() > opts.min_separation);
            if far && new {
                found.push(s);
                break;
            }
        }
    }
    Ok(found)
}
