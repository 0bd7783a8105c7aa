//! Closed-form Leray–Schauder and `SO(2)`-gradient degrees.
//!
//! The linearization of `-Δu = f(u)` at a constant `z` is `-Δ - f'(z)`, whose
//! negative directions are exactly the eigenspaces with eigenvalue below
//! `f'(z)`. Every degree computed here is therefore a product over those
//! eigenspaces of the degree of `-Id`, which has the explicit form
//!
//! ```text
//! deg(-Id, R[j0,0] ⊕ R[j1,k1] ⊕ ...) = ((-1)^j0; k_i: (-1)^j0 · j_i).
//! ```
//!
//! At a resonant slope only some coordinates are determined; the remaining
//! ones are reported as unknown.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::euler_ring::{Coordinate, EulerElement, EulerError, PartialEulerElement};
use crate::reps::SO2Rep;
use crate::spectra::{self, DomainSpec, SpectraError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DegreeError {
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Euler(#[from] EulerError),
    #[error("Morse index {index} of the mode-{mode} block is odd")]
    OddMorseIndex { mode: u64, index: u64 },
    #[error("slope {0} is resonant with the spectrum")]
    ResonantSlope(f64),
    #[error("slope {0} is resonant but no eigenspace was supplied")]
    MissingDegenerateInfo(f64),
}

fn sign(parity: u64) -> i64 {
    if parity % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `∇_{SO(2)}-deg(-Id, B(V))`.
pub fn deg_neg_id(v: &SO2Rep) -> EulerElement {
    let s = sign(v.multiplicity(0));
    EulerElement::from_parts(s, v.nontrivial_modes().map(|k| (k, s * v.multiplicity(k) as i64)))
}

/// Morse indices of the isotypic blocks of a self-adjoint isomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MorseBlockData {
    pub blocks: BTreeMap<u64, u64>,
}

impl MorseBlockData {
    pub fn new<I: IntoIterator<Item = (u64, u64)>>(blocks: I) -> Self {
        Self {
            blocks: blocks.into_iter().collect(),
        }
    }
}

/// Degree of an equivariant linear isomorphism from its block Morse indices.
pub fn deg_linear_iso(m: &MorseBlockData) -> Result<EulerElement, DegreeError> {
    let s = sign(m.blocks.get(&0).copied().unwrap_or(0));
    let mut torus = Vec::new();
    for (&k, &idx) in m.blocks.range(1..) {
        if idx % 2 != 0 {
            return Err(DegreeError::OddMorseIndex { mode: k, index: idx });
        }
        torus.push((k, s * (idx / 2) as i64));
    }
    Ok(EulerElement::from_parts(s, torus))
}

fn non_resonant_nu(domain: &DomainSpec, lam: f64) -> Result<u64, DegreeError> {
    let nu = spectra::nu(domain, lam)?;
    if nu.resonant {
        return Err(DegreeError::ResonantSlope(lam));
    }
    Ok(nu.value)
}

/// `deg_LS` of the linearization with slope `lam`: `(-1)^{ν(lam)}`.
pub fn ls_linear_degree(domain: &DomainSpec, lam: f64) -> Result<i64, DegreeError> {
    Ok(sign(non_resonant_nu(domain, lam)?))
}

/// Product of `deg(-Id)` over the eigenspaces below `lam`; `𝕀` for `lam < 0`.
pub fn grad_linear_degree(domain: &DomainSpec, lam: f64) -> Result<EulerElement, DegreeError> {
    non_resonant_nu(domain, lam)?;
    if lam <= 0.0 {
        return Ok(EulerElement::unit());
    }
    let lines = spectra::spectrum(domain, lam)?;
    let factors: Vec<EulerElement> = lines.iter().map(|l| deg_neg_id(&l.rep)).collect();
    Ok(EulerElement::product(&factors)?)
}

/// Where a slope is taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Zero(f64),
    Infinity,
}

/// A slope `f'(z)` or `f'(∞)` with its resonance flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeData {
    pub value: f64,
    pub location: Location,
    pub resonant: bool,
}

impl SlopeData {
    /// Flags resonance against the spectrum of `domain`.
    pub fn classify(domain: &DomainSpec, value: f64, location: Location) -> Result<Self, DegreeError> {
        Ok(Self {
            value,
            location,
            resonant: spectra::is_resonant(domain, value)?,
        })
    }
}

/// Local Leray–Schauder and gradient indices.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalIndex {
    /// `None` when the slope is resonant.
    pub ls: Option<i64>,
    pub grad: PartialEulerElement,
}

/// Index of an isolated constant solution, or of the problem at infinity.
///
/// For a resonant slope `eigenspace` must be the eigenspace `E` the slope
/// hits. With `V` the sum of the eigenspaces strictly below the slope:
///
/// * `Z_k` is known to vanish if `R[1,k] ⊄ V` and `E` has no isotropy `Z_k`;
/// * if `E^{SO(2)} = 0`, the `SO(2)` coordinate and each `Z_k` at which `E`
///   has no isotropy agree with `deg(-Id, V)`;
/// * every other coordinate is unknown.
pub fn local_index(
    domain: &DomainSpec,
    s: &SlopeData,
    eigenspace: Option<&SO2Rep>,
) -> Result<LocalIndex, DegreeError> {
    if !s.resonant {
        return Ok(LocalIndex {
            ls: Some(ls_linear_degree(domain, s.value)?),
            grad: grad_linear_degree(domain, s.value)?.into(),
        });
    }
    let e = eigenspace.ok_or(DegreeError::MissingDegenerateInfo(s.value))?;
    let v = spectra::rep_below(domain, s.value)?;
    Ok(LocalIndex {
        ls: None,
        grad: degenerate_grad_index(&v, e),
    })
}

/// The partially known gradient index at a resonant slope, from the space
/// `v` below the slope and the kernel `e`.
pub fn degenerate_grad_index(v: &SO2Rep, e: &SO2Rep) -> PartialEulerElement {
    let reference = deg_neg_id(v);
    let kernel_fixed_free = e.fixed_subspace().is_zero();
    let max_e = e.nontrivial_modes().max().unwrap_or(0);
    let candidates: BTreeSet<u64> = v
        .nontrivial_modes()
        .chain((1..=max_e).filter(|&k| e.has_isotropy_exactly(k)))
        .collect();

    let mut known = BTreeMap::new();
    let mut unknown = BTreeSet::new();
    if kernel_fixed_free {
        known.insert(Coordinate::So2, reference.a0());
    } else {
        unknown.insert(Coordinate::So2);
    }
    for k in candidates {
        let c = Coordinate::Torus(k);
        if kernel_fixed_free && !e.has_isotropy_exactly(k) {
            known.insert(c, reference.coeff(k));
        } else {
            unknown.insert(c);
        }
    }
    PartialEulerElement::new(known, unknown, true)
}

/// Local and total indices of the constant solutions and at infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexReport {
    pub ls_at_infinity: Option<i64>,
    pub ls_locals: Vec<(f64, Option<i64>)>,
    pub ls_total: Option<i64>,
    pub grad_at_infinity: PartialEulerElement,
    pub grad_locals: Vec<(f64, PartialEulerElement)>,
    pub grad_total: PartialEulerElement,
}

fn index_with_lookup(domain: &DomainSpec, s: &SlopeData) -> Result<LocalIndex, DegreeError> {
    let s = SlopeData {
        resonant: s.resonant || spectra::is_resonant(domain, s.value)?,
        ..*s
    };
    let e = if s.resonant {
        spectra::eigenspace_at(domain, s.value)?.map(|l| l.rep)
    } else {
        None
    };
    local_index(domain, &s, e.as_ref())
}

/// Index on the large ball minus the local indices of all constant
/// solutions, in both the Leray–Schauder and the gradient setting.
///
/// Resonant slopes are never treated as regular: they go through the
/// degenerate rules of [`local_index`] and may leave coordinates unknown.
pub fn total_index(
    domain: &DomainSpec,
    slopes: &[SlopeData],
    slope_inf: &SlopeData,
) -> Result<IndexReport, DegreeError> {
    let at_inf = index_with_lookup(domain, slope_inf)?;
    let mut ls_locals = Vec::new();
    let mut grad_locals = Vec::new();
    let mut ls_total = at_inf.ls;
    let mut grad_total = at_inf.grad.clone();
    for s in slopes {
        let z = match s.location {
            Location::Zero(z) => z,
            Location::Infinity => f64::INFINITY,
        };
        let local = index_with_lookup(domain, s)?;
        ls_total = match (ls_total, local.ls) {
            (Some(t), Some(l)) => Some(t.checked_sub(l).ok_or(EulerError::Overflow)?),
            _ => None,
        };
        grad_total = grad_total.partial_sub(&local.grad)?;
        ls_locals.push((z, local.ls));
        grad_locals.push((z, local.grad));
    }
    Ok(IndexReport {
        ls_at_infinity: at_inf.ls,
        ls_locals,
        ls_total,
        grad_at_infinity: at_inf.grad,
        grad_locals,
        grad_total,
    })
}
