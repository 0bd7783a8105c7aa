use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{quadrature, GalerkinBasis, GalerkinError};
use crate::checker::ZeroData;
use crate::expr::{EvalError, Expr};

/// `f(u, λ)` with its partial derivatives, differentiated once up front.
#[derive(Debug, Clone, PartialEq)]
pub struct Nonlinearity {
    pub f: Expr,
    pub du: Expr,
    pub dlambda: Expr,
}

impl Nonlinearity {
    pub fn new(f: Expr) -> Self {
        Self {
            du: f.diff_u(),
            dlambda: f.diff_lambda(),
            f,
        }
    }
}

/// One solution `(u, λ)` of the discrete problem.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchPoint {
    pub lambda: f64,
    pub coeffs: DVector<f64>,
    pub l2_norm: f64,
    pub h1_norm: f64,
    pub residual_inf: f64,
    pub newton_iters: usize,
}

impl BranchPoint {
    pub(crate) fn new(basis: &GalerkinBasis, coeffs: DVector<f64>, lambda: f64, residual_inf: f64, iters: usize) -> Self {
        Self {
            lambda,
            l2_norm: basis.l2_norm(&coeffs),
            h1_norm: basis.h1_norm(&coeffs),
            coeffs,
            residual_inf,
            newton_iters: iters,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    /// Bound on the largest residual component.
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iters: 25 }
    }
}

fn nodal(u: &DVector<f64>, lam: f64, e: &Expr) -> Result<DVector<f64>, EvalError> {
    let mut out = DVector::zeros(u.len());
    for (o, &ui) in out.iter_mut().zip(u.iter()) {
        *o = e.eval(ui, lam)?;
    }
    Ok(out)
}

/// `R_m = λ_m c_m - ⟨f(u, λ), φ_m⟩`.
pub fn residual(basis: &GalerkinBasis, c: &DVector<f64>, lam: f64, f: &Nonlinearity) -> Result<DVector<f64>, GalerkinError> {
    basis.check_len(c)?;
    let u = basis.synthesize(c);
    let g = nodal(&u, lam, &f.f)?;
    Ok(basis.eigenvalues().component_mul(c) - basis.project(&g))
}

/// `∂R/∂c = diag(λ_m) - ⟨f_u(u, λ) φ_n, φ_m⟩`; symmetric.
pub fn jacobian(basis: &GalerkinBasis, c: &DVector<f64>, lam: f64, f: &Nonlinearity) -> Result<DMatrix<f64>, GalerkinError> {
    basis.check_len(c)?;
    let u = basis.synthesize(c);
    let d = nodal(&u, lam, &f.du)?;
    let mut weighted = basis.values.clone();
    for q in 0..weighted.nrows() {
        weighted.row_mut(q).scale_mut(basis.weights[q] * d[q]);
    }
    let mut j = -basis.values.tr_mul(&weighted);
    for (m, ev) in basis.eigenvalues().iter().enumerate() {
        j[(m, m)] += ev;
    }
    Ok(j)
}

/// `∂R/∂λ = -⟨f_λ(u, λ), φ_m⟩`.
pub fn lambda_derivative(
    basis: &GalerkinBasis,
    c: &DVector<f64>,
    lam: f64,
    f: &Nonlinearity,
) -> Result<DVector<f64>, GalerkinError> {
    basis.check_len(c)?;
    let u = basis.synthesize(c);
    Ok(-basis.project(&nodal(&u, lam, &f.dlambda)?))
}

/// Discrete energy `½ Σ λ_m c_m² - ∫ F(u)` with `F(t) = ∫_0^t f(s, λ) ds`
/// integrated adaptively at every node. Its gradient is the residual.
pub fn energy(basis: &GalerkinBasis, c: &DVector<f64>, lam: f64, f: &Nonlinearity) -> Result<f64, GalerkinError> {
    basis.check_len(c)?;
    let u = basis.synthesize(c);
    let quadratic: f64 = 0.5 * c.iter().zip(basis.eigenvalues().iter()).map(|(ci, l)| l * ci * ci).sum::<f64>();
    let g = |s: f64| f.f.eval(s, lam);
    let mut potential = 0.0;
    for (ui, w) in u.iter().zip(&basis.weights) {
        potential += w * quadrature::adaptive(&g, 0.0, *ui, 1e-12)?;
    }
    Ok(quadratic - potential)
}

/// Multiplicative deflation `M(c) = Π (‖c - c_i‖⁻² + 1)`; returns `log M`
/// and its gradient.
fn deflation(c: &DVector<f64>, known: &[DVector<f64>]) -> (f64, DVector<f64>) {
    let mut log_m = 0.0;
    let mut grad = DVector::zeros(c.len());
    for k in known {
        let d = c - k;
        let r2 = d.norm_squared().max(1e-300);
        let factor = 1.0 / r2 + 1.0;
        log_m += factor.ln();
        grad += d * (-2.0 / (r2 * r2) / factor);
    }
    (log_m, grad)
}

/// Newton's method with backtracking on the residual norm, optionally
/// deflating known solutions so that it cannot converge back to them.
fn newton(
    basis: &GalerkinBasis,
    c0: &DVector<f64>,
    lam: f64,
    f: &Nonlinearity,
    opts: NewtonOptions,
    known: &[DVector<f64>],
) -> Result<BranchPoint, GalerkinError> {
    let mut c = c0.clone();
    let mut r = residual(basis, &c, lam, f)?;
    for it in 0..=opts.max_iters {
        let rinf = r.amax();
        if rinf <= opts.tol {
            return Ok(BranchPoint::new(basis, c, lam, rinf, it));
        }
        if it == opts.max_iters {
            return Err(GalerkinError::NoConvergence { iters: it, residual: rinf });
        }
        let j = jacobian(basis, &c, lam, f)?;
        let d = j.lu().solve(&(-&r)).ok_or(GalerkinError::SingularJacobian(lam))?;
        let (step, log_m0) = if known.is_empty() {
            (d, 0.0)
        } else {
            let (log_m, grad) = deflation(&c, known);
            let s = grad.dot(&d);
            // A negative factor reverses a step that heads into a known
            // solution.
            let tau = 1.0 / (1.0 - s);
            let tau = if tau.is_finite() { tau } else { 1.0 };
            (d * tau, log_m)
        };
        // Merit: log ‖M·R‖.
        let merit0 = log_m0 + r.norm().ln();
        let mut alpha = 1.0;
        let mut accepted = None;
        let mut fallback = None;
        for _ in 0..12 {
            let trial = &c + &step * alpha;
            if let Ok(rt) = residual(basis, &trial, lam, f) {
                let lm = if known.is_empty() { 0.0 } else { deflation(&trial, known).0 };
                let merit = lm + rt.norm().ln();
                if merit.is_finite() {
                    if merit < merit0 {
                        accepted = Some((trial, rt));
                        break;
                    }
                    fallback = Some((trial, rt));
                }
            }
            alpha *= 0.5;
        }
        let Some((next, rn)) = accepted.or(fallback) else {
            return Err(GalerkinError::NoConvergence { iters: it, residual: rinf });
        };
        c = next;
        r = rn;
    }
    unreachable!("the loop returns on its last iteration")
}

/// Damped Newton from `c0`. Fails with `NoConvergence` after `max_iters`.
pub fn newton_solve(
    basis: &GalerkinBasis,
    c0: &DVector<f64>,
    lam: f64,
    f: &Nonlinearity,
    opts: NewtonOptions,
) -> Result<BranchPoint, GalerkinError> {
    newton(basis, c0, lam, f, opts, &[])
}

/// Damped Newton on `M(c)·R(c)`, where `M` blows up at each of `known`.
/// The returned point solves `R = 0` to `opts.tol`.
pub fn newton_solve_deflated(
    basis: &GalerkinBasis,
    c0: &DVector<f64>,
    lam: f64,
    f: &Nonlinearity,
    opts: NewtonOptions,
    known: &[DVector<f64>],
) -> Result<BranchPoint, GalerkinError> {
    newton(basis, c0, lam, f, opts, known)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedOptions {
    /// Seed amplitudes, tried in order until one converges.
    pub eps: Vec<f64>,
    pub newton: NewtonOptions,
    /// Distance to every constant a solution must exceed.
    pub min_distance_to_constants: f64,
    /// Distance separating two reported solutions.
    pub min_separation: f64,
}

impl Default for SeedOptions {
    fn default() -> Self {
        Self {
            eps: vec![0.1, 0.02, 0.5],
            newton: NewtonOptions {
                tol: 1e-10,
                max_iters: 80,
            },
            min_distance_to_constants: 1e-3,
            min_separation: 1e-4,
        }
    }
}

/// Nonconstant solutions found by seeding `z + ε·φ_m` for each constant zero
/// `z` and each nonconstant mode with eigenvalue below `f'(z)`.
///
/// Constants and earlier finds are deflated. An empty result means the
/// seeds missed, not that no solution exists.
pub fn find_nonconstant(
    basis: &GalerkinBasis,
    f: &Nonlinearity,
    lam: f64,
    zeros: &[ZeroData],
    opts: &SeedOptions,
) -> Vec<BranchPoint> {
    let mut known: Vec<DVector<f64>> = zeros.iter().map(|z| basis.constant(z.value)).collect();
    let mut found: Vec<BranchPoint> = Vec::new();
    for z in zeros {
        let base = basis.constant(z.value);
        for (m, mode) in basis.modes.iter().enumerate() {
            if mode.eigenvalue <= 0.0 || mode.eigenvalue >= z.slope {
                continue;
            }
            for &eps in &opts.eps {
                let seed = &base + basis.unit(m) * eps;
                let Ok(p) = newton(basis, &seed, lam, f, opts.newton, &known) else { continue };
                let far_from_constants = basis.distance_to_constants(&p.coeffs) > opts.min_distance_to_constants;
                let new = found.iter().all(|q| (&q.coeffs - &p.coeffs).norm() > opts.min_separation);
                if far_from_constants && new {
                    known.push(p.coeffs.clone());
                    found.push(p);
                    break;
                }
            }
        }
    }
    found
}

/// Eigenvalue sign counts of the symmetric Jacobian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

/// Inertia of the Jacobian at `(c, λ)`; eigenvalues with magnitude at most
/// `zero_tol` count as zero.
pub fn inertia(
    basis: &GalerkinBasis,
    c: &DVector<f64>,
    lam: f64,
    f: &Nonlinearity,
    zero_tol: f64,
) -> Result<Inertia, GalerkinError> {
    let j = jacobian(basis, c, lam, f)?;
    let eig = SymmetricEigen::new(j).eigenvalues;
    let mut out = Inertia { negative: 0, zero: 0, positive: 0 };
    for e in eig.iter() {
        if e.abs() <= zero_tol {
            out.zero += 1;
        } else if *e < 0.0 {
            out.negative += 1;
        } else {
            out.positive += 1;
        }
    }
    Ok(out)
}

/// Parameters in `[lo, hi]` at which the Jacobian at fixed `c` is singular,
/// located by bisecting jumps of the negative-eigenvalue count found on a
/// uniform grid of `samples` points. Each entry carries the jump size.
pub fn singular_parameters(
    basis: &GalerkinBasis,
    f: &Nonlinearity,
    c: &DVector<f64>,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Result<Vec<(f64, usize)>, GalerkinError> {
    let count = |lam: f64| inertia(basis, c, lam, f, 0.0).map(|i| i.negative);
    let n = samples.max(2);
    let grid: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let counts = grid.iter().map(|&l| count(l)).collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    for i in 0..n - 1 {
        if counts[i] == counts[i + 1] {
            continue;
        }
        let (mut a, mut b, ca) = (grid[i], grid[i + 1], counts[i]);
        while b - a > 1e-13 * (1.0 + a.abs()) {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if count(mid)? == ca {
                a = mid;
            } else {
                b = mid;
            }
        }
        out.push((0.5 * (a + b), counts[i].abs_diff(counts[i + 1])));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::{build_basis, BasisSize, QuadSpec};
    use super::*;
    use crate::expr::parse;
    use crate::spectra::DomainSpec;
    use rand::{rngs::StdRng, Rng, SeedableRng};
    use std::f64::consts::PI;

    fn interval(modes: usize) -> GalerkinBasis {
        build_basis(&DomainSpec::Interval { length: 1.0 }, BasisSize::Count(modes), QuadSpec::default()).unwrap()
    }

    fn nl(s: &str) -> Nonlinearity {
        Nonlinearity::new(parse(s).unwrap())
    }

    #[test]
    fn residual_of_exact_states() {
        let b = interval(8);
        let r = residual(&b, &b.constant(3.0), 0.0, &nl("0")).unwrap();
        assert!(r.amax() < 1e-14);
        for m in 0..8 {
            let c = b.unit(m);
            let r = residual(&b, &c, b.modes[m].eigenvalue, &nl("lambda*u")).unwrap();
            assert!(r.amax() < 1e-10, "mode {m}: {}", r.amax());
        }
    }

    #[test]
    fn residual_is_energy_gradient() {
        let mut rng = StdRng::seed_from_u64(11);
        for (domain, size) in [
            (DomainSpec::Interval { length: 1.3 }, BasisSize::Count(6)),
            (DomainSpec::Disc, BasisSize::Below(15.0)),
        ] {
            let b = build_basis(&domain, size, QuadSpec::default()).unwrap();
            let f = nl("6*atan(u) - u + 0.3*lambda*u^2");
            for _ in 0..3 {
                let c = DVector::from_fn(b.len(), |_, _| rng.random_range(-1.0..1.0));
                let lam = rng.random_range(-1.0..1.0);
                let r = residual(&b, &c, lam, &f).unwrap();
                for m in 0..b.len() {
                    let h = 1e-5;
                    let e = |s: f64| energy(&b, &(&c + b.unit(m) * s), lam, &f).unwrap();
                    let fd = (e(h) - e(-h)) / (2.0 * h);
                    assert!((fd - r[m]).abs() <= 1e-6 * r[m].abs().max(1.0), "{fd} vs {}", r[m]);
                }
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let b = interval(6);
        let f = nl("21*tanh(u) - u");
        let c = DVector::from_fn(6, |i, _| 0.3 / (i as f64 + 1.0));
        let j = jacobian(&b, &c, 0.0, &f).unwrap();
        for n in 0..6 {
            let h = 1e-6;
            let rp = residual(&b, &(&c + b.unit(n) * h), 0.0, &f).unwrap();
            let rm = residual(&b, &(&c - b.unit(n) * h), 0.0, &f).unwrap();
            let col = (rp - rm) / (2.0 * h);
            assert!((col - j.column(n)).amax() < 1e-6);
        }
        assert!((&j - j.transpose()).amax() < 1e-12);
    }

    #[test]
    fn newton_basics() {
        let b = interval(16);
        let p = newton_solve(&b, &(b.unit(1) * 0.3 + b.unit(0) * 0.2), 0.0, &nl("-u"), NewtonOptions::default()).unwrap();
        assert!(p.l2_norm < 1e-10);

        let f = nl("21*tanh(u) - u");
        let mut x = 21.0f64;
        for _ in 0..100 {
            x = 21.0 * x.tanh();
        }
        let p = newton_solve(&b, &b.constant(x), 0.0, &f, NewtonOptions::default()).unwrap();
        assert_eq!(p.newton_iters, 0);
        assert_eq!(b.distance_to_constants(&p.coeffs), 0.0);
    }

    #[test]
    fn tanh_nonconstant_solution() {
        let b = interval(32);
        let f = nl("21*tanh(u) - u");
        // Small seeds fall back to u = 0 without deflation.
        let p = newton_solve(&b, &(b.unit(1) * 0.5), 0.0, &f, NewtonOptions::default()).unwrap();
        assert!(p.l2_norm < 1e-10);
        let p = newton_solve(&b, &(b.unit(1) * 2.0), 0.0, &f, NewtonOptions::default()).unwrap();
        assert!(p.l2_norm > 0.1);
        assert!(b.distance_to_constants(&p.coeffs) > 0.1);
    }

    #[test]
    fn find_nonconstant_cases() {
        let b = interval(32);
        let zeros = [ZeroData::new(0.0, -1.0)];
        assert!(find_nonconstant(&b, &nl("-u"), 0.0, &zeros, &SeedOptions::default()).is_empty());

        let f = nl("21*tanh(u) - u");
        let zeros = [ZeroData::new(0.0, 20.0)];
        let found = find_nonconstant(&b, &f, 0.0, &zeros, &SeedOptions::default());
        assert!(!found.is_empty());
        for p in &found {
            assert!(p.residual_inf <= 1e-10);
            assert!(b.distance_to_constants(&p.coeffs) > 0.1);
        }
    }

    #[test]
    fn linear_singular_scan() {
        let b = interval(12);
        let s = singular_parameters(&b, &nl("lambda*u"), &DVector::zeros(12), -1.0, 45.0, 200).unwrap();
        let want = [0.0, PI * PI, 4.0 * PI * PI];
        assert_eq!(s.len(), 3);
        for ((got, jump), w) in s.iter().zip(want) {
            assert!((got - w).abs() < 1e-8, "{got} vs {w}");
            assert_eq!(*jump, 1);
        }
        let i = inertia(&b, &DVector::zeros(12), 5.0, &nl("lambda*u"), 1e-8).unwrap();
        assert_eq!(i.negative, 1);
        assert_eq!(i.zero, 0);
    }
}
