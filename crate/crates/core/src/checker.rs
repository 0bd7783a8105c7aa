//! Decides which existence, continuation and bifurcation criteria apply to a
//! problem, and cross-checks every positive answer against the total index.
//!
//! Hypotheses are evaluated literally, alternative by alternative. The raw
//! index difference is computed separately; a criterion that fires while the
//! index vanishes is reported as an internal inconsistency instead of being
//! reconciled.

use std::fmt;

use thiserror::Error;

use crate::degree::{self, DegreeError, IndexReport, Location, SlopeData};
use crate::euler_ring::{EulerElement, Tri};
use crate::expr::{EvalError, Expr};
use crate::reps::SO2Rep;
use crate::spectra::{self, DomainSpec, SpectraError, SpectralLine, RESONANCE_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheckError {
    #[error("slope {0} is resonant with the spectrum")]
    ResonantSlope(f64),
    #[error("the domain has no eigenvalue with a nontrivial eigenspace")]
    NoNontrivialLambda0,
    #[error("the problem has no parameter family")]
    MissingFamily,
    #[error("the slope at infinity crosses the spectrum more than once in [{lambda_minus}, {lambda_plus}]: at {crossings:?}")]
    MultipleCrossings {
        lambda_minus: f64,
        lambda_plus: f64,
        crossings: Vec<f64>,
    },
    #[error("internal inconsistency: {theorem} applies but {detail}")]
    InternalInconsistency { theorem: TheoremId, detail: String },
    #[error(transparent)]
    Degree(#[from] DegreeError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error("cannot evaluate the slope at infinity: {0}")]
    Eval(#[from] EvalError),
}

/// A constant solution `z` with its slope `f'(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroData {
    pub value: f64,
    pub slope: f64,
}

impl ZeroData {
    pub fn new(value: f64, slope: f64) -> Self {
        Self { value, slope }
    }
}

/// How `f'(∞, λ)` depends on `λ`.
#[derive(Debug, Clone, PartialEq)]
pub enum SlopeLaw {
    /// An expression in `lambda`.
    Expr(Expr),
    /// Only the endpoint slopes are known; sampled by linear interpolation.
    Endpoints { minus: f64, plus: f64 },
}

/// A parameter family `f(u, λ)` through its slope at infinity `f'(∞, λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub slope_inf: SlopeLaw,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    /// Samples used to verify that the crossing is isolated.
    pub grid: usize,
}

impl Family {
    pub const DEFAULT_GRID: usize = 1001;

    pub fn new(slope_inf: Expr, lambda_minus: f64, lambda_plus: f64) -> Self {
        Self::with_law(SlopeLaw::Expr(slope_inf), lambda_minus, lambda_plus)
    }

    pub fn with_law(slope_inf: SlopeLaw, lambda_minus: f64, lambda_plus: f64) -> Self {
        Self {
            slope_inf,
            lambda_minus,
            lambda_plus,
            grid: Self::DEFAULT_GRID,
        }
    }

    pub fn slope_at(&self, lam: f64) -> Result<f64, EvalError> {
        match &self.slope_inf {
            SlopeLaw::Expr(e) => e.eval(0.0, lam),
            SlopeLaw::Endpoints { minus, plus } => {
                let span = self.lambda_plus - self.lambda_minus;
                if span == 0.0 {
                    return Ok(*minus);
                }
                Ok(minus + (plus - minus) * (lam - self.lambda_minus) / span)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub domain: DomainSpec,
    pub zeros: Vec<ZeroData>,
    pub slope_inf: f64,
    pub family: Option<Family>,
}

impl ProblemSpec {
    pub fn new(domain: DomainSpec, zeros: Vec<ZeroData>, slope_inf: f64) -> Self {
        Self {
            domain,
            zeros,
            slope_inf,
            family: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoremId {
    LsExistence,
    So2Existence1,
    So2Existence2,
    So2Existence3,
    DegenerateExistence,
    Continuation,
    BifInfinity,
    BifMeets,
    None,
}

impl TheoremId {
    pub fn is_existence(self) -> bool {
        matches!(
            self,
            TheoremId::LsExistence
                | TheoremId::So2Existence1
                | TheoremId::So2Existence2
                | TheoremId::So2Existence3
                | TheoremId::DegenerateExistence
        )
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TheoremId::LsExistence => "LS-existence",
            TheoremId::So2Existence1 => "SO2-existence-1",
            TheoremId::So2Existence2 => "SO2-existence-2",
            TheoremId::So2Existence3 => "SO2-existence-3",
            TheoremId::DegenerateExistence => "degenerate-existence",
            TheoremId::Continuation => "continuation",
            TheoremId::BifInfinity => "bif-infinity",
            TheoremId::BifMeets => "bif-meets",
            TheoremId::None => "none",
        })
    }
}

/// Which hypothesis set of the degenerate criterion was satisfied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegenerateConditions {
    /// No eigenspace below `λ_i0` has a point with isotropy `Z_k'`.
    Isotropy,
    /// No eigenspace below `λ_i0` contains `R[1,k']`, and no resonant slope
    /// hits an eigenspace with isotropy `Z_k'`.
    ModeFree,
}

/// The data that satisfied a hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    None,
    /// A zero in `Z₊` with even `ν(f'(z0))`.
    EvenZero { z0: f64, slope: f64, nu: u64 },
    /// The number of zeros in `Z₊` with even `ν`, which is not 1.
    EvenCount { count: usize },
    /// A zero in `Z₊` whose slope exceeds `λ₀`.
    AboveLambda0 { z0: f64, slope: f64, lambda0: f64 },
    /// Two points whose slopes exceed `λ₀`, the first also above `reference`.
    TwoAbove { first: Location, first_slope: f64, second: Location, second_slope: f64, reference: f64 },
    /// The only point above `λ₀` and a nontrivial eigenvalue between its
    /// slope and `reference`.
    OneAboveWithGap { z0: Location, slope: f64, lambda_i0: f64, rep: SO2Rep, reference: f64 },
    /// An eigenvalue above every other slope carrying a fresh mode `k'`.
    FreshMode { lambda_i0: f64, k: u64, reference: f64 },
    Degenerate { z0: Location, slope: f64, lambda_i0: f64, k: u64, conditions: DegenerateConditions },
    Continuation { via: TheoremId },
    Bif { element: EulerElement, slope_minus: f64, slope_plus: f64 },
    Meets { lambda0: f64, eigenvalue: f64, rep: SO2Rep },
}

fn fmt_loc(l: &Location) -> String {
    match l {
        Location::Zero(z) => format!("z = {z}"),
        Location::Infinity => "infinity".into(),
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::None => write!(f, "-"),
            Witness::EvenZero { z0, slope, nu } => write!(f, "z0 = {z0}, slope {slope}, nu = {nu} (even)"),
            Witness::EvenCount { count } => write!(f, "{count} zeros in Z+ with even nu"),
            Witness::AboveLambda0 { z0, slope, lambda0 } => {
                write!(f, "z0 = {z0}, slope {slope} > lambda0 = {lambda0:.6}")
            }
            Witness::TwoAbove { first, first_slope, second, second_slope, reference } => write!(
                f,
                "{} slope {first_slope}, {} slope {second_slope}; reference slope {reference}",
                fmt_loc(first),
                fmt_loc(second)
            ),
            Witness::OneAboveWithGap { z0, slope, lambda_i0, rep, reference } => write!(
                f,
                "{} slope {slope}; eigenvalue {lambda_i0:.6} with {rep} between it and {reference}",
                fmt_loc(z0)
            ),
            Witness::FreshMode { lambda_i0, k, reference } => {
                write!(f, "eigenvalue {lambda_i0:.6} below {reference} carries fresh mode k' = {k}")
            }
            Witness::Degenerate { z0, slope, lambda_i0, k, conditions } => write!(
                f,
                "{} slope {slope}, eigenvalue {lambda_i0:.6}, k' = {k} ({})",
                fmt_loc(z0),
                match conditions {
                    DegenerateConditions::Isotropy => "isotropy conditions",
                    DegenerateConditions::ModeFree => "mode-free conditions",
                }
            ),
            Witness::Continuation { via } => write!(f, "via {via}"),
            Witness::Bif { element, slope_minus, slope_plus } => {
                write!(f, "BIF = {element} for slopes {slope_minus} -> {slope_plus}")
            }
            Witness::Meets { lambda0, eigenvalue, rep } => {
                write!(f, "lambda0 = {lambda0:.9}, eigenvalue {eigenvalue:.9} with {rep}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub theorem: TheoremId,
    pub applies: bool,
    /// Index of the enumerated alternative that fired, when there are several.
    pub alternative: Option<u8>,
    pub witness: Witness,
    pub index_crosscheck: Tri,
    pub notes: Vec<String>,
}

impl Verdict {
    fn new(theorem: TheoremId) -> Self {
        Self {
            theorem,
            applies: false,
            alternative: None,
            witness: Witness::None,
            index_crosscheck: Tri::Undetermined,
            notes: Vec::new(),
        }
    }

    fn fire(mut self, alternative: Option<u8>, witness: Witness) -> Self {
        self.applies = true;
        self.alternative = alternative;
        self.witness = witness;
        self
    }

    fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }
}

fn nu_value(domain: &DomainSpec, a: f64) -> Result<u64, CheckError> {
    let nu = spectra::nu(domain, a)?;
    if nu.resonant {
        return Err(CheckError::ResonantSlope(a));
    }
    Ok(nu.value)
}

/// Fails on the first resonant slope among the zeros and infinity.
fn require_non_resonant(p: &ProblemSpec) -> Result<(), CheckError> {
    for s in p.zeros.iter().map(|z| z.slope).chain([p.slope_inf]) {
        if spectra::is_resonant(&p.domain, s)? {
            return Err(CheckError::ResonantSlope(s));
        }
    }
    Ok(())
}

fn require_lambda0(domain: &DomainSpec) -> Result<f64, CheckError> {
    match spectra::lambda0(domain) {
        Ok(l) => Ok(l),
        Err(SpectraError::NotFound) => Err(CheckError::NoNontrivialLambda0),
        Err(e) => Err(e.into()),
    }
}

fn z_plus(p: &ProblemSpec) -> impl Iterator<Item = &ZeroData> {
    p.zeros.iter().filter(|z| z.slope > 0.0)
}

/// Lines with eigenvalue strictly between `a` and `b` (in either order).
fn lines_between(domain: &DomainSpec, a: f64, b: f64) -> Result<Vec<SpectralLine>, CheckError> {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    Ok(spectra::spectrum(domain, hi)?
        .into_iter()
        .filter(|l| l.eigenvalue > lo)
        .collect())
}

/// Modes `k'` with `R[1,k'] ⊂ V(λ_i0)` and `R[1,k'] ⊄ V(λ_i)` below it.
fn fresh_modes(domain: &DomainSpec, line: &SpectralLine) -> Result<Vec<u64>, CheckError> {
    let below = spectra::spectrum(domain, line.eigenvalue)?;
    Ok(line
        .rep
        .nontrivial_modes()
        .filter(|&k| below.iter().all(|l| !l.rep.contains_mode(k)))
        .collect())
}

/// The Leray–Schauder criterion; only the conditional matching the sign of
/// `f'(∞)` and the parity of `ν(f'(∞))` is evaluated.
pub fn check_ls(p: &ProblemSpec) -> Result<Verdict, CheckError> {
    require_non_resonant(p)?;
    let v = Verdict::new(TheoremId::LsExistence);
    let mut even = Vec::new();
    for z in z_plus(p) {
        let nu = nu_value(&p.domain, z.slope)?;
        if nu % 2 == 0 {
            even.push((z, nu));
        }
    }
    if p.slope_inf < 0.0 || nu_value(&p.domain, p.slope_inf)? % 2 == 1 {
        let alt = if p.slope_inf < 0.0 { 1 } else { 2 };
        return Ok(match even.first() {
            Some((z, nu)) => v.fire(
                Some(alt),
                Witness::EvenZero {
                    z0: z.value,
                    slope: z.slope,
                    nu: *nu,
                },
            ),
            None => v.note("every zero in Z+ has odd nu"),
        });
    }
    Ok(if even.len() != 1 {
        v.fire(Some(3), Witness::EvenCount { count: even.len() })
    } else {
        v.note("exactly one zero in Z+ has even nu")
    })
}

/// Criterion for `f'(∞) < 0`: some zero has slope above `λ₀`.
pub fn check_so2_1(p: &ProblemSpec) -> Result<Verdict, CheckError> {
    require_non_resonant(p)?;
    let lambda0 = require_lambda0(&p.domain)?;
    let v = Verdict::new(TheoremId::So2Existence1);
    if p.slope_inf >= 0.0 {
        return Ok(v.note("needs a negative slope at infinity"));
    }
    let best = z_plus(p).max_by(|a, b| a.slope.total_cmp(&b.slope));
    Ok(match best {
        Some(z) if z.slope > lambda0 => v.fire(
            None,
            Witness::AboveLambda0 {
                z0: z.value,
                slope: z.slope,
                lambda0,
            },
        ),
        _ => v.note(format!("no zero in Z+ has slope above lambda0 = {lambda0:.6}")),
    })
}

/// A point of `Z₊ ∪ {∞}` for the positive-slope criteria.
#[derive(Debug, Clone, Copy)]
struct Point {
    loc: Location,
    slope: f64,
}

/// Alternatives (1)-(3) shared by the two positive-slope criteria: `anchor`
/// plays the role of `f'(∞)` (respectively `f'(z0)`) and `others` are the
/// remaining points.
fn positive_alternatives(
    domain: &DomainSpec,
    lambda0: f64,
    anchor: f64,
    others: &[Point],
) -> Result<Option<(u8, Witness)>, CheckError> {
    let mut sorted = others.to_vec();
    sorted.sort_by(|a, b| b.slope.total_cmp(&a.slope));

    // (1) two points above λ₀, the larger one above the anchor. The two
    // largest slopes are the best candidates for both inequalities.
    if let [first, second, ..] = sorted.as_slice() {
        if second.slope > lambda0 && first.slope > anchor {
            return Ok(Some((
                1,
                Witness::TwoAbove {
                    first: first.loc,
                    first_slope: first.slope,
                    second: second.loc,
                    second_slope: second.slope,
                    reference: anchor,
                },
            )));
        }
    }

    // (2) exactly one point above λ₀, separated from the anchor by a
    // nontrivial eigenspace.
    let above: Vec<&Point> = sorted.iter().filter(|q| q.slope > lambda0).collect();
    if let [only] = above.as_slice() {
        let gap = lines_between(domain, only.slope, anchor)?
            .into_iter()
            .find(|l| l.rep.is_nontrivial());
        if let Some(line) = gap {
            return Ok(Some((
                2,
                Witness::OneAboveWithGap {
                    z0: only.loc,
                    slope: only.slope,
                    lambda_i0: line.eigenvalue,
                    rep: line.rep,
                    reference: anchor,
                },
            )));
        }
    }

    // (3) an eigenvalue above every other slope but below the anchor whose
    // eigenspace brings in a mode absent from all lower eigenspaces.
    let floor = sorted.first().map_or(f64::NEG_INFINITY, |q| q.slope);
    if floor < anchor {
        for line in spectra::spectrum(domain, anchor)? {
            if line.eigenvalue <= floor {
                continue;
            }
            if let Some(&k) = fresh_modes(domain, &line)?.first() {
                return Ok(Some((
                    3,
                    Witness::FreshMode {
                        lambda_i0: line.eigenvalue,
                        k,
                        reference: anchor,
                    },
                )));
            }
        }
    }
    Ok(None)
}

/// Criterion for `f'(∞) > 0` with `ν(f'(∞))` odd.
pub fn check_so2_2(p: &ProblemSpec) -> Result<Verdict, CheckError> {
    require_non_resonant(p)?;
    let lambda0 = require_lambda0(&p.domain)?;
    let v = Verdict::new(TheoremId::So2Existence2);
    if p.slope_inf <= 0.0 {
        return Ok(v.note("needs a positive slope at infinity"));
    }
    if nu_value(&p.domain, p.slope_inf)? % 2 == 0 {
        return Ok(v.note("nu at infinity is even"));
    }
    let points: Vec<Point> = z_plus(p)
        .map(|z| Point {
            loc: Location::Zero(z.value),
            slope: z.slope,
        })
        .collect();
    Ok(match positive_alternatives(&p.domain, lambda0, p.slope_inf, &points)? {
        Some((alt, w)) => v.fire(Some(alt), w),
        None => v.note("none of the alternatives holds"),
    })
}

/// Criterion for `f'(∞) > 0` with `ν(f'(∞))` even.
pub fn check_so2_3(p: &ProblemSpec) -> Result<Verdict, CheckError> {
    require_non_resonant(p)?;
    let lambda0 = require_lambda0(&p.domain)?;
    let v = Verdict::new(TheoremId::So2Existence3);
    if p.slope_inf <= 0.0 {
        return Ok(v.note("needs a positive slope at infinity"));
    }
    if nu_value(&p.domain, p.slope_inf)? % 2 == 1 {
        return Ok(v.note("nu at infinity is odd"));
    }
    let plus: Vec<&ZeroData> = z_plus(p).collect();
    let mut any_even = false;
    for (i, z0) in plus.iter().enumerate() {
        if nu_value(&p.domain, z0.slope)? % 2 == 1 {
            continue;
        }
        any_even = true;
        let mut others: Vec<Point> = plus
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, z)| Point {
                loc: Location::Zero(z.value),
                slope: z.slope,
            })
            .collect();
        others.push(Point {
            loc: Location::Infinity,
            slope: p.slope_inf,
        });
        if let Some((alt, w)) = positive_alternatives(&p.domain, lambda0, z0.slope, &others)? {
            return Ok(v.fire(Some(alt), w));
        }
    }
    Ok(if any_even {
        v.note("none of the alternatives holds for any zero with even nu")
    } else {
        v.note("no zero in Z+ has even nu")
    })
}

struct Site {
    loc: Location,
    slope: f64,
    /// Eigenspace hit by the slope, if resonant.
    kernel: Option<SO2Rep>,
}

fn sites(p: &ProblemSpec) -> Result<Vec<Site>, CheckError> {
    let mut out = Vec::new();
    let all = p
        .zeros
        .iter()
        .map(|z| (Location::Zero(z.value), z.slope))
        .chain([(Location::Infinity, p.slope_inf)]);
    for (loc, slope) in all {
        let kernel = spectra::eigenspace_at(&p.domain, slope)?.map(|l| l.rep);
        out.push(Site { loc, slope, kernel });
    }
    Ok(out)
}

/// Conditions of the degenerate criterion for one choice of point `z0`,
/// eigenvalue line `lines[li]` and mode `k`, given the other sites.
fn degenerate_conditions(
    sites: &[Site],
    s0: &Site,
    lines: &[spectra::SpectralLine],
    li: usize,
    k: u64,
) -> Option<DegenerateConditions> {
    // Regular, or a kernel with no fixed points and no Z_k isotropy.
    let regular = match &s0.kernel {
        None => true,
        Some(e) => e.fixed_subspace().is_zero() && !e.has_isotropy_exactly(k),
    };
    if !regular {
        return None;
    }
    let below = &lines[..li];
    if below.iter().all(|l| !l.rep.has_isotropy_exactly(k)) {
        return Some(DegenerateConditions::Isotropy);
    }
    let mode_free = below.iter().all(|l| !l.rep.contains_mode(k));
    let kernels_ok = sites
        .iter()
        .filter_map(|s| s.kernel.as_ref())
        .all(|e| !e.has_isotropy_exactly(k));
    (mode_free && kernels_ok).then_some(DegenerateConditions::ModeFree)
}

fn ceiling_without(sites: &[Site], i: usize) -> f64 {
    sites
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, s)| s.slope)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The degenerate criterion: resonant slopes are allowed.
///
/// Reports the first witness found, scanning points in order, lines upward
/// and modes upward.
pub fn check_degenerate(p: &ProblemSpec) -> Result<Verdict, CheckError> {
    let v = Verdict::new(TheoremId::DegenerateExistence);
    let sites = sites(p)?;
    for (i, s0) in sites.iter().enumerate() {
        let ceiling = ceiling_without(&sites, i);
        let lines = spectra::spectrum(&p.domain, s0.slope - RESONANCE_TOL)?;
        for (li, line) in lines.iter().enumerate() {
            if line.eigenvalue <= ceiling + RESONANCE_TOL {
                continue;
            }
            for k in line.rep.nontrivial_modes() {
                if let Some(conditions) = degenerate_conditions(&sites, s0, &lines, li, k) {
                    return Ok(v.fire(
                        None,
                        Witness::Degenerate {
                            z0: s0.loc,
                            slope: s0.slope,
                            lambda_i0: line.eigenvalue,
                            k,
                            conditions,
                        },
                    ));
                }
            }
        }
    }
    Ok(v.note("no point, eigenvalue and mode satisfy the conditions"))
}

/// Tests one specific witness `(z0, λ_i0, k)` of the degenerate criterion.
/// `lambda_i0` must be an eigenvalue within the resonance tolerance.
pub fn degenerate_witness(
    p: &ProblemSpec,
    z0: Location,
    lambda_i0: f64,
    k: u64,
) -> Result<Option<DegenerateConditions>, CheckError> {
    let sites = sites(p)?;
    let Some(i) = sites.iter().position(|s| match (s.loc, z0) {
        (Location::Infinity, Location::Infinity) => true,
        (Location::Zero(a), Location::Zero(b)) => (a - b).abs() <= 1e-9 * (1.0 + a.abs()),
        _ => false,
    }) else {
        return Ok(None);
    };
    let s0 = &sites[i];
    let lines = spectra::spectrum(&p.domain, s0.slope - RESONANCE_TOL)?;
    let Some(li) = lines.iter().position(|l| (l.eigenvalue - lambda_i0).abs() <= RESONANCE_TOL) else {
        return Ok(None);
    };
    if lines[li].eigenvalue <= ceiling_without(&sites, i) + RESONANCE_TOL || !lines[li].rep.contains_mode(k) || k == 0 {
        return Ok(None);
    }
    Ok(degenerate_conditions(&sites, s0, &lines, li, k))
}

/// Continuation from `λ = 0`: applies whenever an existence criterion
/// applies to `f(·, 0)`, whose zeros and slopes are those of `p`.
pub fn check_continuation(p: &ProblemSpec) -> Result<Verdict, CheckError> {
    let v = Verdict::new(TheoremId::Continuation);
    for (id, check) in existence_checks() {
        if let Ok(found) = check(p) {
            if found.applies {
                let v = v.fire(None, Witness::Continuation { via: id });
                return Ok(if id == TheoremId::DegenerateExistence {
                    v.note("either nonconstant solutions accumulate at a constant one, or the continua exist")
                } else {
                    v
                });
            }
        }
    }
    Ok(v.note("no existence criterion applies at lambda = 0"))
}

type Check = fn(&ProblemSpec) -> Result<Verdict, CheckError>;

fn existence_checks() -> [(TheoremId, Check); 5] {
    [
        (TheoremId::LsExistence, check_ls),
        (TheoremId::So2Existence1, check_so2_1),
        (TheoremId::So2Existence2, check_so2_2),
        (TheoremId::So2Existence3, check_so2_3),
        (TheoremId::DegenerateExistence, check_degenerate),
    ]
}

/// Result of a bifurcation index computation.
#[derive(Debug, Clone, PartialEq)]
pub struct BifReport {
    pub element: EulerElement,
    pub nonzero: bool,
    pub slope_minus: f64,
    pub slope_plus: f64,
    /// A nontrivial eigenspace lies strictly between the slopes.
    pub crosses_nontrivial: bool,
    /// Total dimension of the eigenspaces strictly between the slopes.
    pub dimension_between: u64,
}

impl BifReport {
    pub fn criterion(&self) -> bool {
        self.crosses_nontrivial || self.dimension_between % 2 == 1
    }
}

/// `BIF = deg(slope_plus) - deg(slope_minus)` with the eigenspace criterion
/// evaluated alongside; the two must agree.
pub fn bif_index_from_slopes(domain: &DomainSpec, slope_minus: f64, slope_plus: f64) -> Result<BifReport, CheckError> {
    for s in [slope_minus, slope_plus] {
        if spectra::is_resonant(domain, s)? {
            return Err(CheckError::ResonantSlope(s));
        }
    }
    let plus = degree::grad_linear_degree(domain, slope_plus)?;
    let minus = degree::grad_linear_degree(domain, slope_minus)?;
    let element = plus.checked_sub(&minus).map_err(DegreeError::from)?;
    let between = lines_between(domain, slope_minus, slope_plus)?;
    let report = BifReport {
        nonzero: !element.is_zero(),
        element,
        slope_minus,
        slope_plus,
        crosses_nontrivial: between.iter().any(|l| l.rep.is_nontrivial()),
        dimension_between: between.iter().map(SpectralLine::dimension).sum(),
    };
    if report.nonzero != report.criterion() {
        return Err(CheckError::InternalInconsistency {
            theorem: TheoremId::BifInfinity,
            detail: format!(
                "BIF = {} disagrees with the eigenspace criterion between {slope_minus} and {slope_plus}",
                report.element
            ),
        });
    }
    Ok(report)
}

/// Bifurcation index over the family's parameter interval.
pub fn bif_index(p: &ProblemSpec) -> Result<BifReport, CheckError> {
    let fam = p.family.as_ref().ok_or(CheckError::MissingFamily)?;
    let s_minus = fam.slope_at(fam.lambda_minus)?;
    let s_plus = fam.slope_at(fam.lambda_plus)?;
    bif_index_from_slopes(&p.domain, s_minus, s_plus)
}

pub fn check_bif(p: &ProblemSpec) -> Result<Verdict, CheckError> {
    let r = bif_index(p)?;
    let v = Verdict::new(TheoremId::BifInfinity);
    let w = Witness::Bif {
        element: r.element.clone(),
        slope_minus: r.slope_minus,
        slope_plus: r.slope_plus,
    };
    let mut v = if r.nonzero {
        v.fire(None, w)
    } else {
        Verdict { witness: w, ..v }.note("the bifurcation index vanishes")
    };
    v.index_crosscheck = if r.nonzero { Tri::Yes } else { Tri::No };
    Ok(v)
}

/// Parameters in `[λ₋, λ₊]` at which `f'(∞, λ)` meets the spectrum, with
/// the eigenvalue met, located on a uniform grid and refined by bisection.
pub fn spectral_crossings(domain: &DomainSpec, fam: &Family) -> Result<Vec<(f64, f64)>, CheckError> {
    let n = fam.grid.max(2);
    let (a, b) = (fam.lambda_minus, fam.lambda_plus);
    let lams: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
    let slopes = lams.iter().map(|&l| fam.slope_at(l)).collect::<Result<Vec<f64>, _>>()?;
    let top = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lines = spectra::spectrum(domain, top + 1.0)?;
    let mut out: Vec<(f64, f64)> = Vec::new();
    let h = (b - a) / (n - 1) as f64;
    for line in &lines {
        let e = line.eigenvalue;
        let d: Vec<f64> = slopes.iter().map(|s| s - e).collect();
        let mut found = Vec::new();
        for i in 0..n {
            if d[i].abs() < RESONANCE_TOL {
                found.push(lams[i]);
            } else if i + 1 < n && d[i + 1].abs() >= RESONANCE_TOL && (d[i] > 0.0) != (d[i + 1] > 0.0) {
                let (mut lo, mut hi, mut dlo) = (lams[i], lams[i + 1], d[i]);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let dm = fam.slope_at(mid)? - e;
                    if (dm > 0.0) == (dlo > 0.0) {
                        lo = mid;
                        dlo = dm;
                    } else {
                        hi = mid;
                    }
                }
                found.push(0.5 * (lo + hi));
            }
        }
        found.sort_by(f64::total_cmp);
        let mut last = f64::NEG_INFINITY;
        for l in found {
            if l - last > 1.5 * h {
                out.push((l, e));
            }
            last = l;
        }
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(out)
}

/// Bifurcation from infinity at an isolated crossing `λ₀`.
pub fn check_bif_meets(p: &ProblemSpec) -> Result<Verdict, CheckError> {
    let fam = p.family.as_ref().ok_or(CheckError::MissingFamily)?;
    let crossings = spectral_crossings(&p.domain, fam)?;
    let v = Verdict::new(TheoremId::BifMeets);
    let (lambda0, eigenvalue) = match crossings.as_slice() {
        [] => return Ok(v.note("the slope at infinity does not meet the spectrum")),
        [only] => *only,
        _ => {
            return Err(CheckError::MultipleCrossings {
                lambda_minus: fam.lambda_minus,
                lambda_plus: fam.lambda_plus,
                crossings: crossings.iter().map(|c| c.0).collect(),
            })
        }
    };
    let rep = spectra::eigenspace_at(&p.domain, eigenvalue)?
        .map(|l| l.rep)
        .ok_or(CheckError::ResonantSlope(eigenvalue))?;
    let mut v = if rep.is_nontrivial() || rep.dimension() % 2 == 1 {
        v.fire(None, Witness::Meets { lambda0, eigenvalue, rep })
    } else {
        v.note(format!("the crossed eigenspace {rep} is trivial and even-dimensional"))
    };
    v.index_crosscheck = match bif_index(p) {
        Ok(r) if r.nonzero => Tri::Yes,
        Ok(_) => Tri::No,
        Err(_) => Tri::Undetermined,
    };
    Ok(v)
}

/// Whether the slope signs alternate along the zeros as they must for a
/// continuous `f` with the given slope at infinity.
pub fn slope_signs_alternate(p: &ProblemSpec) -> bool {
    let mut zs: Vec<&ZeroData> = p.zeros.iter().collect();
    zs.sort_by(|a, b| a.value.total_cmp(&b.value));
    if zs.is_empty() {
        return false;
    }
    let first_positive = p.slope_inf > 0.0;
    zs.iter().enumerate().all(|(i, z)| (z.slope > 0.0) == (first_positive == (i % 2 == 0)))
        && (zs.len() % 2 == 1)
}

/// All verdicts with the total index attached.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub verdicts: Vec<Verdict>,
    pub index: Option<IndexReport>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn applying(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| v.applies)
    }
}

fn degrade(theorem: TheoremId, r: Result<Verdict, CheckError>) -> Result<Verdict, CheckError> {
    match r {
        Ok(v) => Ok(v),
        Err(e @ CheckError::InternalInconsistency { .. }) => Err(e),
        Err(e) => Ok(Verdict::new(theorem).note(format!("not applicable: {e}"))),
    }
}

/// Runs every criterion and checks each positive existence verdict against
/// the total index.
pub fn check_all(p: &ProblemSpec) -> Result<CheckReport, CheckError> {
    let slopes = p
        .zeros
        .iter()
        .map(|z| SlopeData::classify(&p.domain, z.slope, Location::Zero(z.value)))
        .collect::<Result<Vec<_>, _>>()?;
    let inf = SlopeData::classify(&p.domain, p.slope_inf, Location::Infinity)?;
    let index = degree::total_index(&p.domain, &slopes, &inf)?;

    let mut notes = Vec::new();
    if !p.zeros.is_empty() && !slope_signs_alternate(p) {
        notes.push(
            "zero slopes do not alternate in sign as a continuous f with this slope at infinity requires".to_string(),
        );
    }

    let mut verdicts = Vec::new();
    for (id, check) in existence_checks() {
        let mut v = degrade(id, check(p))?;
        v.index_crosscheck = if id == TheoremId::LsExistence {
            match index.ls_total {
                Some(0) => Tri::No,
                Some(_) => Tri::Yes,
                None => Tri::Undetermined,
            }
        } else {
            index.grad_total.partial_is_nonzero()
        };
        if v.applies && v.index_crosscheck == Tri::No {
            return Err(CheckError::InternalInconsistency {
                theorem: id,
                detail: format!(
                    "the total index vanishes (LS {:?}, gradient {})",
                    index.ls_total, index.grad_total
                ),
            });
        }
        verdicts.push(v);
    }
    let mut cont = degrade(TheoremId::Continuation, check_continuation(p))?;
    cont.index_crosscheck = index.grad_total.partial_is_nonzero();
    verdicts.push(cont);
    if p.family.is_some() {
        verdicts.push(degrade(TheoremId::BifInfinity, check_bif(p))?);
        verdicts.push(degrade(TheoremId::BifMeets, check_bif_meets(p))?);
    }
    Ok(CheckReport {
        verdicts,
        index: Some(index),
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use std::f64::consts::PI;

    const UNIT: DomainSpec = DomainSpec::Interval { length: 1.0 };

    fn zeros(list: &[(f64, f64)]) -> Vec<ZeroData> {
        list.iter().map(|&(z, s)| ZeroData::new(z, s)).collect()
    }

    #[test]
    fn ls_examples() {
        let p = ProblemSpec::new(UNIT, zeros(&[(-3.0, -0.9), (0.0, 20.0), (3.0, -0.9)]), -1.0);
        let v = check_ls(&p).unwrap();
        assert!(v.applies);
        assert_eq!(v.alternative, Some(1));

        let p = ProblemSpec::new(UNIT, zeros(&[(-3.0, -0.9), (0.0, 5.0), (3.0, -0.9)]), -1.0);
        assert!(!check_ls(&p).unwrap().applies);

        // Below 100 the eigenvalues are 0, π², 4π², 9π², so ν(100) = 4 and the
        // single zero with ν(20) = 2 is the one even zero.
        let p = ProblemSpec::new(UNIT, zeros(&[(0.0, 20.0)]), 100.0);
        let v = check_ls(&p).unwrap();
        assert!(!v.applies, "{v:?}");
    }

    #[test]
    fn ls_refuses_resonance() {
        let p = ProblemSpec::new(UNIT, zeros(&[(0.0, PI * PI)]), -1.0);
        assert!(matches!(check_ls(&p), Err(CheckError::ResonantSlope(_))));
    }

    #[test]
    fn so2_examples() {
        let p = ProblemSpec::new(DomainSpec::Disc, zeros(&[(-8.0, -0.9), (0.0, 5.0), (8.0, -0.9)]), -1.0);
        assert!(check_so2_1(&p).unwrap().applies);

        let p = ProblemSpec::new(DomainSpec::Disc, zeros(&[(-2.0, 70.0), (0.0, -1.0), (2.0, 5.0)]), 60.0);
        let v = check_so2_2(&p).unwrap();
        assert!(v.applies);
        assert_eq!(v.alternative, Some(1));

        let p = ProblemSpec::new(UNIT, zeros(&[(0.0, 5.0)]), -1.0);
        assert_eq!(check_so2_1(&p), Err(CheckError::NoNontrivialLambda0));
    }

    #[test]
    fn degenerate_examples() {
        let l0 = spectra::lambda0(&DomainSpec::Disc).unwrap();
        let p = ProblemSpec::new(DomainSpec::Disc, zeros(&[(-1.0, -1.0), (0.0, 0.5 * l0), (1.0, -1.0)]), -1.0);
        assert!(!check_degenerate(&p).unwrap().applies);

        // Fresh-mode pattern on the cylinder with k' = 2: 2k'(k'+1) = 12 and
        // k'(k'+2) = 8.
        let p = ProblemSpec::new(DomainSpec::Cylinder, zeros(&[(-1.0, -1.0), (0.0, 14.0), (1.0, -1.0)]), -1.0);
        let v = check_degenerate(&p).unwrap();
        assert!(v.applies, "{v:?}");
    }

    #[test]
    fn bif_examples() {
        let r = bif_index_from_slopes(&UNIT, 5.0, 5.0).unwrap();
        assert!(r.element.is_zero() && !r.nonzero);
        let r = bif_index_from_slopes(&UNIT, 5.0, 15.0).unwrap();
        assert!(r.nonzero);
        assert_eq!(r.element, "(2;)".parse().unwrap());
        let r = bif_index_from_slopes(&DomainSpec::Disc, 3.0, 4.0).unwrap();
        assert!(r.nonzero && r.crosses_nontrivial);
        assert_eq!(r.element, "(0; 1:-1)".parse().unwrap());
        let back = bif_index_from_slopes(&DomainSpec::Disc, 4.0, 3.0).unwrap();
        assert_eq!(back.element, -&r.element);
    }

    #[test]
    fn meets_examples() {
        let mut p = ProblemSpec::new(UNIT, vec![], -1.0);
        p.family = Some(Family::new(parse("lambda").unwrap(), 5.0, 15.0));
        let v = check_bif_meets(&p).unwrap();
        assert!(v.applies);
        let Witness::Meets { lambda0, .. } = v.witness else { panic!() };
        assert!((lambda0 - PI * PI).abs() < 1e-9);

        let custom = DomainSpec::Custom {
            lines: vec![
                SpectralLine::custom(0.0, SO2Rep::block(1, 0)),
                SpectralLine::custom(10.0, SO2Rep::block(2, 0)),
            ],
        };
        let mut p = ProblemSpec::new(custom, vec![], -1.0);
        p.family = Some(Family::new(parse("lambda").unwrap(), 5.0, 15.0));
        assert!(!check_bif_meets(&p).unwrap().applies);

        let mut p = ProblemSpec::new(UNIT, vec![], -1.0);
        p.family = Some(Family::new(parse("lambda").unwrap(), 5.0, 50.0));
        assert!(matches!(check_bif_meets(&p), Err(CheckError::MultipleCrossings { .. })));
    }

    #[test]
    fn empty_zero_set() {
        let p = ProblemSpec::new(DomainSpec::Disc, vec![], -1.0);
        let r = check_all(&p).unwrap();
        assert_eq!(r.applying().count(), 0);
    }

    #[test]
    fn alternation() {
        let p = ProblemSpec::new(UNIT, zeros(&[(-3.0, -0.9), (0.0, 20.0), (3.0, -0.9)]), -1.0);
        assert!(slope_signs_alternate(&p));
        let p = ProblemSpec::new(UNIT, zeros(&[(0.0, 20.0)]), -1.0);
        assert!(!slope_signs_alternate(&p));
    }
}
