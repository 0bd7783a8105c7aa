//! The JSON problem file and its resolution into checker inputs.

use std::collections::BTreeMap;
use std::path::Path;

use neumann_core::checker::{Family, ProblemSpec, SlopeLaw, ZeroData};
use neumann_core::expr::{self, Expr, Var};
use neumann_core::spectra::{DomainSpec, SpectralLine};
use neumann_core::SO2Rep;
use serde::Deserialize;

use crate::CliError;

/// Half-width of the zero search window.
pub const ZERO_SEARCH_RADIUS: f64 = 100.0;
/// Supplied zeros with `|f(z)|` at least this large draw a warning.
pub const ZERO_RESIDUAL_WARN: f64 = 1e-6;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub domain: DomainFile,
    pub expr: String,
    #[serde(default)]
    pub slope_at_infinity: Option<f64>,
    #[serde(default)]
    pub slope_at_infinity_expr: Option<String>,
    #[serde(default)]
    pub zeros: Option<Vec<ZeroFile>>,
    #[serde(default)]
    pub bif: Option<BifFile>,
    #[serde(default)]
    pub solver: Option<SolverFile>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainFile {
    Interval { length: f64 },
    Disc {},
    Cylinder {},
    Custom { lines: Vec<LineFile> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineFile {
    pub eigenvalue: f64,
    /// Multiplicity of each mode, keyed by the mode number as a string.
    pub rep: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZeroFile {
    pub value: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BifFile {
    pub lambda_minus: f64,
    pub lambda_plus: f64,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverFile {
    #[serde(default)]
    pub modes: Option<usize>,
    #[serde(default)]
    pub quad_order: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
}

/// A validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub domain: DomainSpec,
    pub expr: Expr,
    pub slope_law: SlopeLaw,
    /// Zeros supplied in the file; `None` means detect them.
    pub supplied_zeros: Option<Vec<ZeroData>>,
    pub bif: Option<BifFile>,
    pub solver: SolverFile,
}

impl DomainFile {
    pub fn resolve(&self) -> Result<DomainSpec, CliError> {
        let d = match self {
            DomainFile::Interval { length } => DomainSpec::Interval { length: *length },
            DomainFile::Disc {} => DomainSpec::Disc,
            DomainFile::Cylinder {} => DomainSpec::Cylinder,
            DomainFile::Custom { lines } => {
                let mut out = Vec::with_capacity(lines.len());
                for l in lines {
                    let mut pairs = Vec::new();
                    for (k, &j) in &l.rep {
                        let k: u64 = k
                            .parse()
                            .map_err(|_| CliError::Validation(format!("rep key {k:?} is not a mode number")))?;
                        pairs.push((k, j));
                    }
                    out.push(SpectralLine::custom(l.eigenvalue, SO2Rep::from_pairs(pairs)));
                }
                DomainSpec::Custom { lines: out }
            }
        };
        d.validate().map_err(|e| CliError::Validation(format!("domain: {e}")))?;
        Ok(d)
    }
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("problem file: {e}")))
    }

    pub fn resolve(&self) -> Result<Problem, CliError> {
        let domain = self.domain.resolve()?;
        let expr = expr::parse(&self.expr).map_err(|e| CliError::Validation(format!("expr: {e}")))?;
        let slope_law = match (self.slope_at_infinity, &self.slope_at_infinity_expr) {
            (Some(s), None) => SlopeLaw::Expr(Expr::num(s)),
            (None, Some(src)) => {
                let e = expr::parse(src)
                    .map_err(|e| CliError::Validation(format!("slope_at_infinity_expr: {e}")))?;
                if e.mentions(Var::U) {
                    return Err(CliError::Validation("slope_at_infinity_expr must not mention u".into()));
                }
                SlopeLaw::Expr(e)
            }
            (Some(_), Some(_)) => {
                return Err(CliError::Validation(
                    "give only one of slope_at_infinity and slope_at_infinity_expr".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Validation(
                    "one of slope_at_infinity or slope_at_infinity_expr is required".into(),
                ))
            }
        };
        if let Some(b) = self.bif {
            if !(b.lambda_minus < b.lambda_plus) {
                return Err(CliError::Validation("bif needs lambda_minus < lambda_plus".into()));
            }
        }
        let solver = self.solver.unwrap_or_default();
        if solver.modes == Some(0) || solver.quad_order == Some(0) {
            return Err(CliError::Validation("solver sizes must be positive".into()));
        }
        if solver.tol.is_some_and(|t| !(t > 0.0)) {
            return Err(CliError::Validation("solver tol must be positive".into()));
        }
        Ok(Problem {
            domain,
            expr,
            slope_law,
            supplied_zeros: self
                .zeros
                .as_ref()
                .map(|zs| zs.iter().map(|z| ZeroData::new(z.value, z.slope)).collect()),
            bif: self.bif,
            solver,
        })
    }
}

/// Reads and validates a problem file.
pub fn load(path: &Path) -> Result<Problem, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    ProblemFile::from_json(&text)?.resolve()
}

impl Problem {
    pub fn slope_inf_at(&self, lam: f64) -> Result<f64, CliError> {
        match &self.slope_law {
            SlopeLaw::Expr(e) => e.eval(0.0, lam).map_err(|e| CliError::Numerical(format!("slope at infinity: {e}"))),
            SlopeLaw::Endpoints { minus, plus } => Ok(0.5 * (minus + plus)),
        }
    }

    /// Zeros of `f(·, lam)` with their slopes, plus warnings. Supplied zeros
    /// are trusted but checked against the expression.
    pub fn zeros_at(&self, lam: f64) -> Result<(Vec<ZeroData>, Vec<String>), CliError> {
        let mut warnings = Vec::new();
        if let Some(zs) = &self.supplied_zeros {
            for z in zs {
                match self.expr.eval(z.value, lam) {
                    Ok(v) if v.abs() < ZERO_RESIDUAL_WARN => {}
                    Ok(v) => warnings.push(format!("supplied zero {} has |f| = {:e}", z.value, v.abs())),
                    Err(e) => warnings.push(format!("supplied zero {}: {e}", z.value)),
                }
            }
            return Ok((zs.clone(), warnings));
        }
        let scan = expr::find_zeros(&self.expr, ZERO_SEARCH_RADIUS, lam, expr::DEFAULT_CELLS);
        for d in &scan.diagnostics {
            warnings.push(format!("zero search: {d:?}"));
        }
        let slope_inf = self.slope_inf_at(lam)?;
        if let Some(w) = expr::asymptotic_slope_warning(&self.expr, slope_inf, lam) {
            warnings.push(w);
        }
        Ok((scan.zeros.iter().map(|z| ZeroData::new(z.value, z.slope)).collect(), warnings))
    }

    /// Checker input at parameter `lam`, with the family attached when the
    /// file has a `bif` section.
    pub fn spec_at(&self, lam: f64) -> Result<(ProblemSpec, Vec<String>), CliError> {
        let (zeros, warnings) = self.zeros_at(lam)?;
        let mut spec = ProblemSpec::new(self.domain.clone(), zeros, self.slope_inf_at(lam)?);
        if let Some(b) = self.bif {
            spec.family = Some(Family::with_law(self.slope_law.clone(), b.lambda_minus, b.lambda_plus));
        }
        Ok((spec, warnings))
    }
}
