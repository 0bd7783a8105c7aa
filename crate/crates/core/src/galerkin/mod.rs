//! Spectral-Galerkin discretization of `-Δu = f(u, λ)` with Neumann
//! conditions on an interval or the unit disc.
//!
//! Unknowns are coefficients in the L²-orthonormal Neumann eigenbasis, so the
//! stiffness matrix is the diagonal of eigenvalues. The nonlinearity is
//! applied pointwise on quadrature nodes and projected back.

mod continuation;
pub mod quadrature;
mod solve;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

pub use continuation::{continue_branch, detect_blowup, Branch, ContinuationOptions, Degeneracy, DegeneracyKind, Termination};
pub use solve::{
    energy, find_nonconstant, inertia, jacobian, lambda_derivative, newton_solve, newton_solve_deflated, residual,
    singular_parameters, BranchPoint, Inertia, Nonlinearity, NewtonOptions, SeedOptions,
};

use crate::expr::EvalError;
use crate::spectra::{self, bessel_j, bessel_prime_zero, DomainSpec, ModeLabel, SpectraError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GalerkinError {
    #[error("the solver supports the interval and the disc, not {0}")]
    UnsupportedDomain(String),
    #[error("invalid discretization: {0}")]
    InvalidBasis(String),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("Newton did not converge in {iters} iterations (residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64 },
    #[error("singular Jacobian at lambda = {0}")]
    SingularJacobian(f64),
    #[error("coefficient vector has length {got}, basis has {want} modes")]
    DimensionMismatch { got: usize, want: usize },
}

/// Angular factor of a basis function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Angular {
    /// No angular dependence (every interval mode, radial disc modes).
    Const,
    Cos(u64),
    Sin(u64),
}

impl Angular {
    pub fn mode(self) -> u64 {
        match self {
            Angular::Const => 0,
            Angular::Cos(k) | Angular::Sin(k) => k,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisMode {
    pub eigenvalue: f64,
    pub label: ModeLabel,
    pub angular: Angular,
    /// Factor making the mode L²-orthonormal.
    pub norm: f64,
    /// `x_{kn}` for disc modes, `nπ/L` for interval modes.
    pub frequency: f64,
}

/// Which eigenfunctions to keep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisSize {
    /// The lowest `n` basis functions, completed to whole eigenspaces.
    Count(usize),
    /// Every eigenfunction with eigenvalue below the bound.
    Below(f64),
    /// Disc modes `(k, n)` with `k <= k_max` and radial index `n <= n_max`.
    DiscGrid { k_max: u64, n_max: u64 },
}

/// Quadrature resolution; `None` picks a default that integrates products
/// of retained modes to near machine precision.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadSpec {
    /// Interval: total node count. Disc: radial node count.
    pub nodes: Option<usize>,
    /// Disc: number of equispaced angles.
    pub angular: Option<usize>,
}

const PANEL_POINTS: usize = 10;

#[derive(Debug, Clone)]
pub struct GalerkinBasis {
    pub domain: DomainSpec,
    pub modes: Vec<BasisMode>,
    /// Node coordinates: `(x, 0)` on the interval, `(r, θ)` on the disc.
    pub nodes: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
    /// `values[(q, m)]` is mode `m` at node `q`.
    pub values: DMatrix<f64>,
    eigenvalues: DVector<f64>,
}

fn select_labels(domain: &DomainSpec, size: BasisSize) -> Result<Vec<(f64, ModeLabel)>, GalerkinError> {
    let dims = |l: &ModeLabel| if l.mode() == 0 { 1 } else { 2 };
    match size {
        BasisSize::Below(bound) => Ok(spectra::spectrum(domain, bound)?
            .into_iter()
            .flat_map(|line| line.labels.into_iter().map(move |l| (line.eigenvalue, l)))
            .collect()),
        BasisSize::Count(n) => {
            if n == 0 {
                return Err(GalerkinError::InvalidBasis("need at least one mode".into()));
            }
            let mut bound = 10.0;
            loop {
                let lines = spectra::spectrum(domain, bound)?;
                let mut out = Vec::new();
                let mut count = 0;
                for line in lines {
                    if count >= n {
                        break;
                    }
                    for l in line.labels {
                        count += dims(&l);
                        out.push((line.eigenvalue, l));
                    }
                }
                if count >= n {
                    return Ok(out);
                }
                bound *= 2.0;
            }
        }
        BasisSize::DiscGrid { k_max, n_max } => {
            if *domain != DomainSpec::Disc {
                return Err(GalerkinError::InvalidBasis("a (k, n) grid needs the disc".into()));
            }
            let mut out = Vec::new();
            for k in 0..=k_max {
                let first = if k == 0 { 0 } else { 1 };
                for n in first..=n_max {
                    let x = bessel_prime_zero(k, n).map_err(SpectraError::from)?;
                    out.push((x * x, ModeLabel::Disc { k, n }));
                }
            }
            out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            Ok(out)
        }
    }
}

/// Builds the orthonormal eigenbasis and its quadrature.
pub fn build_basis(domain: &DomainSpec, size: BasisSize, quad: QuadSpec) -> Result<GalerkinBasis, GalerkinError> {
    match domain {
        DomainSpec::Interval { .. } | DomainSpec::Disc => {}
        other => return Err(GalerkinError::UnsupportedDomain(other.to_string())),
    }
    domain.validate()?;
    let labels = select_labels(domain, size)?;
    let mut modes = Vec::new();
    for (ev, label) in labels {
        match label {
            ModeLabel::Interval { n } => {
                let DomainSpec::Interval { length } = domain else { unreachable!() };
                let norm = if n == 0 { 1.0 / length.sqrt() } else { (2.0 / length).sqrt() };
                modes.push(BasisMode {
                    eigenvalue: ev,
                    label,
                    angular: Angular::Const,
                    norm,
                    frequency: n as f64 * PI / length,
                });
            }
            ModeLabel::Disc { k, n } => {
                let x = bessel_prime_zero(k, n).map_err(SpectraError::from)?;
                // ∫_0^1 J_k(xr)² r dr = (1 - k²/x²) J_k(x)² / 2 when J_k'(x) = 0.
                let radial = if k == 0 && n == 0 {
                    0.5
                } else {
                    let jx = bessel_j(k as i64, x).map_err(SpectraError::from)?;
                    0.5 * (1.0 - (k * k) as f64 / (x * x)) * jx * jx
                };
                if k == 0 {
                    let norm = 1.0 / (2.0 * PI * radial).sqrt();
                    modes.push(BasisMode { eigenvalue: ev, label, angular: Angular::Const, norm, frequency: x });
                } else {
                    let norm = 1.0 / (PI * radial).sqrt();
                    for angular in [Angular::Cos(k), Angular::Sin(k)] {
                        modes.push(BasisMode { eigenvalue: ev, label, angular, norm, frequency: x });
                    }
                }
            }
            _ => unreachable!("labels come from the interval or the disc"),
        }
    }

    let (nodes, weights) = match domain {
        DomainSpec::Interval { length } => {
            // Each 10-point panel spans at most a third of a period of the
            // highest product frequency.
            let top = modes.iter().map(|m| m.frequency).fold(0.0, f64::max);
            let panels = match quad.nodes {
                Some(q) => q.div_ceil(PANEL_POINTS).max(1),
                None => ((3.0 * top * length / PI).ceil() as usize).max(4),
            };
            let (x, w) = quadrature::composite(0.0, *length, panels, PANEL_POINTS);
            (x.into_iter().map(|x| (x, 0.0)).collect::<Vec<_>>(), w)
        }
        _ => {
            let top = modes.iter().map(|m| m.frequency).fold(0.0, f64::max);
            let k_top = modes.iter().map(|m| m.angular.mode()).max().unwrap_or(0) as usize;
            let n_max = modes
                .iter()
                .map(|m| match m.label {
                    ModeLabel::Disc { n, .. } => n as usize,
                    _ => 0,
                })
                .max()
                .unwrap_or(0);
            let nr = quad.nodes.unwrap_or((2 * n_max + 8).max(top.ceil() as usize + 24));
            let nt = quad.angular.unwrap_or((4 * k_top + 4).max(8 * k_top + 32));
            if nr == 0 || nt == 0 {
                return Err(GalerkinError::InvalidBasis("empty quadrature".into()));
            }
            let (gr, gw) = quadrature::gauss_legendre(nr);
            let mut nodes = Vec::with_capacity(nr * nt);
            let mut weights = Vec::with_capacity(nr * nt);
            for (t, wt) in gr.iter().zip(&gw) {
                let r = 0.5 * (t + 1.0);
                for j in 0..nt {
                    nodes.push((r, 2.0 * PI * j as f64 / nt as f64));
                    weights.push(0.5 * wt * r * 2.0 * PI / nt as f64);
                }
            }
            (nodes, weights)
        }
    };

    let mut values = DMatrix::zeros(nodes.len(), modes.len());
    for (m, mode) in modes.iter().enumerate() {
        for (q, &(a, b)) in nodes.iter().enumerate() {
            values[(q, m)] = eval_mode(mode, a, b);
        }
    }
    let eigenvalues = DVector::from_iterator(modes.len(), modes.iter().map(|m| m.eigenvalue));
    Ok(GalerkinBasis {
        domain: domain.clone(),
        modes,
        nodes,
        weights,
        values,
        eigenvalues,
    })
}

/// A basis function at `(x, _)` on the interval or `(r, θ)` on the disc.
fn eval_mode(mode: &BasisMode, a: f64, b: f64) -> f64 {
    match mode.label {
        ModeLabel::Interval { .. } => mode.norm * (mode.frequency * a).cos(),
        ModeLabel::Disc { k, .. } => {
            let radial = spectra::bessel::j_unchecked(k, mode.frequency * a);
            let angular = match mode.angular {
                Angular::Const => 1.0,
                Angular::Cos(k) => (k as f64 * b).cos(),
                Angular::Sin(k) => (k as f64 * b).sin(),
            };
            mode.norm * radial * angular
        }
        _ => unreachable!(),
    }
}

impl GalerkinBasis {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    fn check_len(&self, c: &DVector<f64>) -> Result<(), GalerkinError> {
        if c.len() != self.len() {
            return Err(GalerkinError::DimensionMismatch { got: c.len(), want: self.len() });
        }
        Ok(())
    }

    /// `u` on the quadrature nodes.
    pub fn synthesize(&self, c: &DVector<f64>) -> DVector<f64> {
        &self.values * c
    }

    /// `⟨g, φ_m⟩` for nodal values `g`.
    pub fn project(&self, g: &DVector<f64>) -> DVector<f64> {
        let wg = g.component_mul(&DVector::from_column_slice(&self.weights));
        self.values.tr_mul(&wg)
    }

    /// Discrete Gram matrix; the identity up to quadrature error.
    pub fn gram(&self) -> DMatrix<f64> {
        let mut wv = self.values.clone();
        for (q, w) in self.weights.iter().enumerate() {
            wv.row_mut(q).scale_mut(*w);
        }
        self.values.tr_mul(&wv)
    }

    /// `u` at an arbitrary point.
    pub fn eval(&self, c: &DVector<f64>, a: f64, b: f64) -> f64 {
        self.modes.iter().zip(c.iter()).map(|(m, ci)| ci * eval_mode(m, a, b)).sum()
    }

    /// Index of the constant mode.
    fn constant_mode(&self) -> usize {
        self.modes.iter().position(|m| m.eigenvalue == 0.0).expect("every basis contains the constants")
    }

    /// Coefficients of the constant function `z`.
    pub fn constant(&self, z: f64) -> DVector<f64> {
        let mut c = DVector::zeros(self.len());
        let m = self.constant_mode();
        c[m] = z / self.modes[m].norm;
        c
    }

    /// Unit coefficient vector of mode `m`.
    pub fn unit(&self, m: usize) -> DVector<f64> {
        let mut c = DVector::zeros(self.len());
        c[m] = 1.0;
        c
    }

    pub fn l2_norm(&self, c: &DVector<f64>) -> f64 {
        c.norm()
    }

    /// `(‖u‖² + ‖∇u‖²)^{1/2}`.
    pub fn h1_norm(&self, c: &DVector<f64>) -> f64 {
        c.iter().zip(self.eigenvalues.iter()).map(|(ci, l)| (1.0 + l) * ci * ci).sum::<f64>().sqrt()
    }

    /// L² distance from `u` to the constant functions.
    pub fn distance_to_constants(&self, c: &DVector<f64>) -> f64 {
        let m = self.constant_mode();
        c.iter().enumerate().filter(|(i, _)| *i != m).map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    /// L² norm of the part of `u` with angular mode `k`.
    pub fn angular_content(&self, c: &DVector<f64>, k: u64) -> f64 {
        self.modes
            .iter()
            .zip(c.iter())
            .filter(|(m, _)| m.angular.mode() == k)
            .map(|(_, v)| v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// Coefficients of `u(r, θ - α)`. The identity on the interval.
    pub fn rotate(&self, c: &DVector<f64>, alpha: f64) -> DVector<f64> {
        let mut out = c.clone();
        for (i, m) in self.modes.iter().enumerate() {
            if let Angular::Cos(k) = m.angular {
                let j = i + 1;
                debug_assert_eq!(self.modes[j].angular, Angular::Sin(k));
                let (s, co) = (k as f64 * alpha).sin_cos();
                let (a, b) = (c[i], c[j]);
                out[i] = a * co - b * s;
                out[j] = a * s + b * co;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_off_identity(g: &DMatrix<f64>) -> f64 {
        let n = g.nrows();
        (g - DMatrix::<f64>::identity(n, n)).abs().max()
    }

    #[test]
    fn interval_basis_is_classical() {
        let b = build_basis(&DomainSpec::Interval { length: 1.0 }, BasisSize::Count(4), QuadSpec::default()).unwrap();
        assert_eq!(b.len(), 4);
        for (n, m) in b.modes.iter().enumerate() {
            assert!((m.eigenvalue - (n as f64 * PI).powi(2)).abs() < 1e-12);
            let x = 0.3;
            let want = if n == 0 { 1.0 } else { 2f64.sqrt() * (n as f64 * PI * x).cos() };
            assert!((eval_mode(m, x, 0.0) - want).abs() < 1e-14);
        }
        assert!(max_off_identity(&b.gram()) < 1e-12);
    }

    #[test]
    fn interval_gram_at_64_modes() {
        let b = build_basis(&DomainSpec::Interval { length: 2.5 }, BasisSize::Count(64), QuadSpec::default()).unwrap();
        assert!(max_off_identity(&b.gram()) < 1e-10);
    }

    #[test]
    fn disc_gram_and_norms() {
        let b = build_basis(&DomainSpec::Disc, BasisSize::Below(50.0), QuadSpec::default()).unwrap();
        assert!(max_off_identity(&b.gram()) < 1e-10);
        // Radial normalization against direct quadrature of ∫ J_k(xr)² r dr.
        let (t, w) = quadrature::gauss_legendre(120);
        for m in b.modes.iter().filter(|m| m.label != ModeLabel::Disc { k: 0, n: 0 }) {
            let ModeLabel::Disc { k, .. } = m.label else { unreachable!() };
            let integral: f64 = t
                .iter()
                .zip(&w)
                .map(|(ti, wi)| {
                    let r = 0.5 * (ti + 1.0);
                    0.5 * wi * r * spectra::bessel::j_unchecked(k, m.frequency * r).powi(2)
                })
                .sum();
            let angular = if k == 0 { 2.0 * PI } else { PI };
            assert!((m.norm * m.norm * integral * angular - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn disc_grid_selection() {
        let b = build_basis(&DomainSpec::Disc, BasisSize::DiscGrid { k_max: 2, n_max: 2 }, QuadSpec::default()).unwrap();
        // k = 0: n = 0, 1, 2; k = 1, 2: n = 1, 2, two functions each.
        assert_eq!(b.len(), 3 + 8);
        assert!(max_off_identity(&b.gram()) < 1e-10);
    }

    #[test]
    fn count_completes_eigenspaces() {
        let b = build_basis(&DomainSpec::Disc, BasisSize::Count(2), QuadSpec::default()).unwrap();
        assert_eq!(b.len(), 3);
    }

    #[test]
    fn cylinder_is_unsupported() {
        assert!(matches!(
            build_basis(&DomainSpec::Cylinder, BasisSize::Count(4), QuadSpec::default()),
            Err(GalerkinError::UnsupportedDomain(_))
        ));
    }

    #[test]
    fn rotation_moves_nodal_values() {
        let b = build_basis(&DomainSpec::Disc, BasisSize::Below(20.0), QuadSpec::default()).unwrap();
        let c = DVector::from_iterator(b.len(), (0..b.len()).map(|i| ((i * 7 + 3) % 5) as f64 - 2.0));
        let rc = b.rotate(&c, 0.7);
        let got = b.eval(&rc, 0.6, 1.9);
        let want = b.eval(&c, 0.6, 1.9 - 0.7);
        assert!((got - want).abs() < 1e-12);
        assert!((b.l2_norm(&rc) - b.l2_norm(&c)).abs() < 1e-12);
    }

    #[test]
    fn constants_and_norms() {
        let b = build_basis(&DomainSpec::Disc, BasisSize::Below(20.0), QuadSpec::default()).unwrap();
        let c = b.constant(2.0);
        assert!((b.eval(&c, 0.3, 1.0) - 2.0).abs() < 1e-13);
        assert!((b.l2_norm(&c) - 2.0 * PI.sqrt()).abs() < 1e-12);
        assert_eq!(b.distance_to_constants(&c), 0.0);
    }
}
