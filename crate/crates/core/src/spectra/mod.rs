//! Neumann spectra of `-Δ` with their `SO(2)`-isotypic eigenspaces.
//!
//! * interval `(0, L)`: `(nπ/L)²`, eigenfunction `cos(nπx/L)`, trivial action;
//! * unit disc: `x_{kn}²` where `x_{kn}` is the `n`-th zero of `J_k'`, with
//!   eigenspace `R[1,k]` spanned by `J_k(x_{kn} r) {cos kθ, sin kθ}`;
//! * cylinder (disc × (0,1)): `(πn)² + x_{kj}²`, again with block `R[1,k]`.
//!
//! Numerically coincident eigenvalues are merged into one line whose
//! representation is the direct sum of the merged blocks.

pub mod bessel;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use thiserror::Error;

use crate::reps::SO2Rep;
pub use bessel::{bessel_j, bessel_j_prime, bessel_prime_zero, bessel_prime_zeros_below, BesselError};

/// Eigenvalues closer than this are treated as one eigenvalue.
pub const GROUPING_TOL: f64 = 1e-9;
/// A value closer than this to an eigenvalue is flagged resonant.
pub const RESONANCE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("the domain has no eigenvalue with a nontrivial eigenspace")]
    NotFound,
    #[error(transparent)]
    Bessel(#[from] BesselError),
}

/// Index tuple identifying one eigenfunction family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModeLabel {
    /// `cos(nπx/L)`.
    Interval { n: u64 },
    /// `J_k(x_{kn} r) e^{±ikθ}`.
    Disc { k: u64, n: u64 },
    /// `J_k(x_{kj} r) e^{±ikθ} cos(πnz)`.
    Cylinder { k: u64, n: u64, j: u64 },
    /// One block of mode `k` on a hand-entered line.
    Custom { k: u64 },
}

impl ModeLabel {
    /// Angular mode of the block this label spans.
    pub fn mode(&self) -> u64 {
        match *self {
            ModeLabel::Interval { .. } => 0,
            ModeLabel::Disc { k, .. } | ModeLabel::Cylinder { k, .. } | ModeLabel::Custom { k } => k,
        }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeLabel::Interval { n } => write!(f, "({n})"),
            ModeLabel::Disc { k, n } => write!(f, "({k},{n})"),
            ModeLabel::Cylinder { k, n, j } => write!(f, "({k},{n},{j})"),
            ModeLabel::Custom { k } => write!(f, "(k={k})"),
        }
    }
}

/// One eigenvalue of `-Δ` with its eigenspace.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLine {
    pub eigenvalue: f64,
    pub rep: SO2Rep,
    pub labels: Vec<ModeLabel>,
}

impl SpectralLine {
    /// A hand-entered line; labels are synthesized from the representation.
    pub fn custom(eigenvalue: f64, rep: SO2Rep) -> Self {
        let labels = rep
            .blocks()
            .flat_map(|(k, j)| std::iter::repeat_n(ModeLabel::Custom { k }, j as usize))
            .collect();
        Self { eigenvalue, rep, labels }
    }

    pub fn dimension(&self) -> u64 {
        self.rep.dimension()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    Interval { length: f64 },
    Disc,
    Cylinder,
    Custom { lines: Vec<SpectralLine> },
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::Interval { length } => write!(f, "interval(0,{length})"),
            DomainSpec::Disc => write!(f, "disc"),
            DomainSpec::Cylinder => write!(f, "cylinder"),
            DomainSpec::Custom { lines } => write!(f, "custom({} lines)", lines.len()),
        }
    }
}

impl DomainSpec {
    pub fn validate(&self) -> Result<(), SpectraError> {
        match self {
            DomainSpec::Interval { length } if !(*length > 0.0 && length.is_finite()) => Err(
                SpectraError::InvalidDomain(format!("interval length must be positive, got {length}")),
            ),
            DomainSpec::Custom { lines } => {
                for (i, line) in lines.iter().enumerate() {
                    if !(line.eigenvalue >= 0.0 && line.eigenvalue.is_finite()) {
                        return Err(SpectraError::InvalidDomain(format!(
                            "line {i}: eigenvalue must be finite and nonnegative"
                        )));
                    }
                    if line.rep.dimension() == 0 {
                        return Err(SpectraError::InvalidDomain(format!(
                            "line {i}: eigenspace must be nonzero"
                        )));
                    }
                    if i > 0 && line.eigenvalue <= lines[i - 1].eigenvalue {
                        return Err(SpectraError::InvalidDomain(
                            "custom eigenvalues must be strictly increasing".into(),
                        ));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn cache_key(&self) -> Option<String> {
        match self {
            DomainSpec::Interval { length } => Some(format!("interval:{:x}", length.to_bits())),
            DomainSpec::Disc => Some("disc".into()),
            DomainSpec::Cylinder => Some("cylinder".into()),
            DomainSpec::Custom { .. } => None,
        }
    }
}

fn raw_lines(domain: &DomainSpec, lambda_max: f64) -> Vec<(f64, ModeLabel)> {
    let mut raw = Vec::new();
    match domain {
        DomainSpec::Interval { length } => {
            for n in 0u64.. {
                let ev = (n as f64 * PI / length).powi(2);
                if ev >= lambda_max {
                    break;
                }
                raw.push((ev, ModeLabel::Interval { n }));
            }
        }
        DomainSpec::Disc => {
            for (ev, k, n) in disc_eigenvalues(lambda_max) {
                raw.push((ev, ModeLabel::Disc { k, n }));
            }
        }
        DomainSpec::Cylinder => {
            for n in 0u64.. {
                let axial = (PI * n as f64).powi(2);
                if axial >= lambda_max {
                    break;
                }
                for (ev, k, j) in disc_eigenvalues(lambda_max - axial) {
                    raw.push((axial + ev, ModeLabel::Cylinder { k, n, j }));
                }
            }
        }
        DomainSpec::Custom { lines } => {
            for line in lines.iter().filter(|l| l.eigenvalue < lambda_max) {
                for label in &line.labels {
                    raw.push((line.eigenvalue, *label));
                }
            }
        }
    }
    raw
}

/// `(x_{kn}², k, n)` for every disc eigenvalue below `lambda_max`.
fn disc_eigenvalues(lambda_max: f64) -> Vec<(f64, u64, u64)> {
    let mut out = Vec::new();
    if lambda_max <= 0.0 {
        return out;
    }
    out.push((0.0, 0, 0));
    let x_max = lambda_max.sqrt();
    for k in 0u64.. {
        let zeros = bessel_prime_zeros_below(k, x_max);
        if zeros.is_empty() && k > 0 {
            // x_{k1} increases with k, so no larger k contributes.
            break;
        }
        for (i, x) in zeros.into_iter().enumerate() {
            out.push((x * x, k, i as u64 + 1));
        }
    }
    out
}

fn group(mut raw: Vec<(f64, ModeLabel)>) -> Vec<SpectralLine> {
    raw.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut lines: Vec<SpectralLine> = Vec::new();
    let mut anchor = f64::NEG_INFINITY;
    for (ev, label) in raw {
        let block = SO2Rep::block(1, label.mode());
        match lines.last_mut() {
            Some(line) if ev - anchor <= GROUPING_TOL => {
                line.rep = line.rep.direct_sum(&block);
                line.labels.push(label);
            }
            _ => {
                anchor = ev;
                lines.push(SpectralLine {
                    eigenvalue: ev,
                    rep: block,
                    labels: vec![label],
                });
            }
        }
    }
    lines
}

type Cache = Mutex<HashMap<String, (f64, Vec<SpectralLine>)>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// All distinct eigenvalues below `lambda_max`, ascending.
pub fn spectrum(domain: &DomainSpec, lambda_max: f64) -> Result<Vec<SpectralLine>, SpectraError> {
    domain.validate()?;
    if let DomainSpec::Custom { lines } = domain {
        return Ok(lines.iter().filter(|l| l.eigenvalue < lambda_max).cloned().collect());
    }
    let key = domain.cache_key().expect("built-in domains are cacheable");
    {
        let guard = cache().lock().unwrap_or_else(|e| e.into_inner());
        if let Some((computed, lines)) = guard.get(&key) {
            if lambda_max <= *computed {
                return Ok(lines.iter().filter(|l| l.eigenvalue < lambda_max).cloned().collect());
            }
        }
    }
    // Compute past the cut so a cluster straddling it is grouped correctly.
    let computed = lambda_max.max(1.0) + 1.0;
    let lines = group(raw_lines(domain, computed));
    let out = lines.iter().filter(|l| l.eigenvalue < lambda_max).cloned().collect();
    let mut guard = cache().lock().unwrap_or_else(|e| e.into_inner());
    let keep = guard.get(&key).is_none_or(|(c, _)| *c < computed);
    if keep {
        // Lines within a unit of the computed bound may lack late partners.
        let safe = computed - 0.5;
        let stored = lines.into_iter().filter(|l| l.eigenvalue < safe).collect();
        guard.insert(key, (safe, stored));
    }
    Ok(out)
}

/// The counting function `ν(a)` with its resonance flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Nu {
    pub value: u64,
    /// `a` lies within [`RESONANCE_TOL`] of an eigenvalue.
    pub resonant: bool,
}

/// `ν(a) = Σ_{λ_i < a} dim V(λ_i)`, and `0` for `a <= 0`.
pub fn nu(domain: &DomainSpec, a: f64) -> Result<Nu, SpectraError> {
    let lines = spectrum(domain, a.max(0.0) + 2.0 * RESONANCE_TOL)?;
    let resonant = lines.iter().any(|l| (l.eigenvalue - a).abs() < RESONANCE_TOL);
    let value = if a <= 0.0 {
        0
    } else {
        lines.iter().filter(|l| l.eigenvalue < a).map(SpectralLine::dimension).sum()
    };
    Ok(Nu { value, resonant })
}

/// Whether `a` is within [`RESONANCE_TOL`] of an eigenvalue.
pub fn is_resonant(domain: &DomainSpec, a: f64) -> Result<bool, SpectraError> {
    Ok(eigenspace_at(domain, a)?.is_some())
}

/// The spectral line within [`RESONANCE_TOL`] of `a`, if any.
pub fn eigenspace_at(domain: &DomainSpec, a: f64) -> Result<Option<SpectralLine>, SpectraError> {
    if a < -RESONANCE_TOL {
        return Ok(None);
    }
    let lines = spectrum(domain, a + 2.0 * RESONANCE_TOL)?;
    Ok(lines.into_iter().find(|l| (l.eigenvalue - a).abs() < RESONANCE_TOL))
}

/// `⊕_{λ_i < a} V(λ_i)`, leaving out a line that `a` resonates with.
pub fn rep_below(domain: &DomainSpec, a: f64) -> Result<SO2Rep, SpectraError> {
    if a <= 0.0 {
        return Ok(SO2Rep::zero());
    }
    let lines = spectrum(domain, a)?;
    Ok(lines
        .iter()
        .filter(|l| l.eigenvalue < a - RESONANCE_TOL)
        .fold(SO2Rep::zero(), |acc, l| acc.direct_sum(&l.rep)))
}

/// The smallest eigenvalue whose eigenspace is a nontrivial representation.
pub fn lambda0(domain: &DomainSpec) -> Result<f64, SpectraError> {
    match domain {
        DomainSpec::Interval { .. } => {
            domain.validate()?;
            Err(SpectraError::NotFound)
        }
        DomainSpec::Custom { lines } => {
            domain.validate()?;
            lines
                .iter()
                .find(|l| l.rep.is_nontrivial())
                .map(|l| l.eigenvalue)
                .ok_or(SpectraError::NotFound)
        }
        // λ_11 = x_11² on both; on the cylinder the axial modes only add.
        DomainSpec::Disc | DomainSpec::Cylinder => {
            let mut bound = 8.0;
            loop {
                let lines = spectrum(domain, bound)?;
                if let Some(l) = lines.iter().find(|l| l.rep.is_nontrivial()) {
                    return Ok(l.eigenvalue);
                }
                bound *= 2.0;
            }
        }
    }
}

/// Checks `k(k+2) < λ_{k1} < 2k(k+1)` for `1 <= k <= k_max`.
pub fn check_lambda_k1_bounds(k_max: u64) -> Result<bool, SpectraError> {
    for k in 1..=k_max {
        let x = bessel_prime_zero(k, 1)?;
        let lam = x * x;
        let kf = k as f64;
        if !(kf * (kf + 2.0) < lam && lam < 2.0 * kf * (kf + 1.0)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_low_spectrum() {
        let s = spectrum(&DomainSpec::Disc, 1.0).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].eigenvalue, 0.0);
        assert_eq!(s[0].rep, SO2Rep::block(1, 0));

        let s = spectrum(&DomainSpec::Disc, 5.0).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s[1].eigenvalue - 3.389957708).abs() < 1e-8);
        assert_eq!(s[1].rep, SO2Rep::block(1, 1));
        assert_eq!(s[1].labels, vec![ModeLabel::Disc { k: 1, n: 1 }]);
    }

    #[test]
    fn interval_spectrum() {
        let s = spectrum(&DomainSpec::Interval { length: 1.0 }, 50.0).unwrap();
        let ev: Vec<f64> = s.iter().map(|l| l.eigenvalue).collect();
        assert_eq!(ev.len(), 3);
        for (n, e) in ev.iter().enumerate() {
            let want = (n as f64 * PI).powi(2);
            assert!((e - want).abs() <= 1e-12 * want.max(1.0));
        }
        assert!(s.iter().all(|l| l.rep == SO2Rep::block(1, 0)));
    }

    #[test]
    fn nu_examples() {
        for d in [DomainSpec::Disc, DomainSpec::Cylinder, DomainSpec::Interval { length: 1.0 }] {
            assert_eq!(nu(&d, -1.0).unwrap().value, 0);
        }
        assert_eq!(nu(&DomainSpec::Disc, 5.0).unwrap().value, 3);
        assert_eq!(nu(&DomainSpec::Disc, 60.0).unwrap().value % 2, 1);
        assert_eq!(nu(&DomainSpec::Interval { length: 1.0 }, 5.0).unwrap().value, 1);
        assert_eq!(nu(&DomainSpec::Interval { length: 1.0 }, 20.0).unwrap().value, 2);
        let at_pi2 = nu(&DomainSpec::Interval { length: 1.0 }, PI * PI).unwrap();
        assert!(at_pi2.resonant);
    }

    #[test]
    fn lambda0_examples() {
        let d = lambda0(&DomainSpec::Disc).unwrap();
        assert!(3.0 < d && d < 4.0);
        assert_eq!(lambda0(&DomainSpec::Cylinder).unwrap(), d);
        assert_eq!(lambda0(&DomainSpec::Interval { length: 1.0 }), Err(SpectraError::NotFound));
    }

    #[test]
    fn k1_bounds() {
        assert!(check_lambda_k1_bounds(1).unwrap());
        assert!(check_lambda_k1_bounds(10).unwrap());
    }

    #[test]
    fn rep_below_skips_resonant_line() {
        let l11 = lambda0(&DomainSpec::Disc).unwrap();
        assert_eq!(rep_below(&DomainSpec::Disc, l11).unwrap(), SO2Rep::block(1, 0));
        assert_eq!(
            rep_below(&DomainSpec::Disc, 5.0).unwrap(),
            SO2Rep::from_pairs([(0, 1), (1, 1)])
        );
        let line = eigenspace_at(&DomainSpec::Disc, l11 + 1e-9).unwrap().unwrap();
        assert_eq!(line.rep, SO2Rep::block(1, 1));
    }

    #[test]
    fn custom_validation() {
        let bad = DomainSpec::Custom {
            lines: vec![
                SpectralLine::custom(0.0, SO2Rep::block(1, 0)),
                SpectralLine::custom(0.0, SO2Rep::block(1, 1)),
            ],
        };
        assert!(matches!(spectrum(&bad, 10.0), Err(SpectraError::InvalidDomain(_))));
        assert!(spectrum(&DomainSpec::Interval { length: -1.0 }, 1.0).is_err());
    }
}
