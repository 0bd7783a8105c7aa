//! Pseudo-arclength continuation in `(c, λ)`.

use nalgebra::{DMatrix, DVector};

use super::solve::{inertia, jacobian, lambda_derivative, residual, BranchPoint, Nonlinearity};
use super::{GalerkinBasis, GalerkinError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationOptions {
    /// Initial and largest arclength step.
    pub step: f64,
    pub min_step: f64,
    pub max_steps: usize,
    /// Stop once the H¹ norm exceeds this.
    pub norm_cap: f64,
    pub tol: f64,
    pub corrector_iters: usize,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            step: 0.1,
            min_step: 1e-6,
            max_steps: 5000,
            norm_cap: 1e3,
            tol: 1e-10,
            corrector_iters: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// The next point would leave the parameter range.
    RangeExit,
    /// The last point exceeds the norm cap.
    NormCap,
    /// The corrector kept failing down to the minimum step.
    StepUnderflow,
    MaxSteps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegeneracyKind {
    /// The branch turns back in `λ`.
    Fold,
    /// The Jacobian changes inertia without a turn: solutions are not
    /// isolated there, or another branch crosses.
    Singular,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Degeneracy {
    /// Index of the point after which it was detected.
    pub after: usize,
    pub lambda: f64,
    pub kind: DegeneracyKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub points: Vec<BranchPoint>,
    pub termination: Termination,
    pub degeneracies: Vec<Degeneracy>,
}

/// `[[J, R_λ], [tᵀ]]`.
fn bordered(j: &DMatrix<f64>, r_lam: &DVector<f64>, t: &DVector<f64>) -> DMatrix<f64> {
    let n = j.nrows();
    let mut a = DMatrix::zeros(n + 1, n + 1);
    a.view_mut((0, 0), (n, n)).copy_from(j);
    a.view_mut((0, n), (n, 1)).copy_from(r_lam);
    a.row_mut(n).copy_from(&t.transpose());
    a
}

fn split(x: &DVector<f64>) -> (DVector<f64>, f64) {
    let n = x.len() - 1;
    (x.rows(0, n).into_owned(), x[n])
}

fn join(c: &DVector<f64>, lam: f64) -> DVector<f64> {
    let mut x = DVector::zeros(c.len() + 1);
    x.rows_mut(0, c.len()).copy_from(c);
    x[c.len()] = lam;
    x
}

/// Unit tangent at `x` oriented so that `orient·t > 0`.
fn tangent(
    basis: &GalerkinBasis,
    f: &Nonlinearity,
    x: &DVector<f64>,
    orient: &DVector<f64>,
) -> Result<DVector<f64>, GalerkinError> {
    let (c, lam) = split(x);
    let j = jacobian(basis, &c, lam, f)?;
    let rl = lambda_derivative(basis, &c, lam, f)?;
    let mut rhs = DVector::zeros(x.len());
    rhs[x.len() - 1] = 1.0;
    let t = bordered(&j, &rl, orient)
        .lu()
        .solve(&rhs)
        .ok_or(GalerkinError::SingularJacobian(lam))?;
    let norm = t.norm();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(GalerkinError::SingularJacobian(lam));
    }
    Ok(t / norm)
}

/// Newton on `R(c, λ) = 0`, `t·(x - x0) = h` from the predictor.
fn correct(
    basis: &GalerkinBasis,
    f: &Nonlinearity,
    x0: &DVector<f64>,
    t: &DVector<f64>,
    h: f64,
    opts: &ContinuationOptions,
) -> Result<(DVector<f64>, f64, usize), GalerkinError> {
    let mut x = x0 + t * h;
    for it in 0..=opts.corrector_iters {
        let (c, lam) = split(&x);
        let r = residual(basis, &c, lam, f)?;
        let arc = t.dot(&(&x - x0)) - h;
        let rinf = r.amax();
        if rinf <= opts.tol && arc.abs() <= 1e-10 * (1.0 + h) {
            return Ok((x, rinf, it));
        }
        if it == opts.corrector_iters {
            return Err(GalerkinError::NoConvergence { iters: it, residual: rinf });
        }
        let j = jacobian(basis, &c, lam, f)?;
        let rl = lambda_derivative(basis, &c, lam, f)?;
        let rhs = -join(&r, arc);
        let dx = bordered(&j, &rl, t)
            .lu()
            .solve(&rhs)
            .ok_or(GalerkinError::SingularJacobian(lam))?;
        x += dx;
    }
    unreachable!("the loop returns on its last iteration")
}

/// Follows the solution branch through `start` toward `lambda_range.1`.
///
/// The step halves on corrector failure and grows by 1.3 after easy steps,
/// never above `opts.step`. Folds and inertia changes are recorded as
/// degeneracies.
pub fn continue_branch(
    basis: &GalerkinBasis,
    f: &Nonlinearity,
    start: &BranchPoint,
    lambda_range: (f64, f64),
    opts: &ContinuationOptions,
) -> Result<Branch, GalerkinError> {
    let (from, to) = lambda_range;
    let (lo, hi) = if from <= to { (from, to) } else { (to, from) };
    let dir = if to >= from { 1.0 } else { -1.0 };
    let n = basis.len();
    let mut x = join(&start.coeffs, start.lambda);
    let mut seed = DVector::zeros(n + 1);
    seed[n] = dir;
    let mut t = tangent(basis, f, &x, &seed)?;
    if t[n] * dir < 0.0 {
        t = -t;
    }
    let mut points = vec![start.clone()];
    let mut degeneracies = Vec::new();
    let mut neg = inertia(basis, &start.coeffs, start.lambda, f, 0.0)?.negative;
    let mut h = opts.step;
    let mut termination = Termination::MaxSteps;
    let mut steps = 0;
    while steps < opts.max_steps {
        let attempt = correct(basis, f, &x, &t, h, opts).and_then(|(xn, rinf, iters)| {
            let tn = tangent(basis, f, &xn, &t)?;
            Ok((xn, rinf, iters, tn))
        });
        let (xn, rinf, iters, tn) = match attempt {
            Ok(v) => v,
            Err(_) => {
                h *= 0.5;
                if h < opts.min_step {
                    termination = Termination::StepUnderflow;
                    break;
                }
                continue;
            }
        };
        steps += 1;
        let (c, lam) = split(&xn);
        if lam < lo || lam > hi {
            termination = Termination::RangeExit;
            break;
        }
        let point = BranchPoint::new(basis, c, lam, rinf, iters);
        let after = points.len() - 1;
        let neg_new = inertia(basis, &point.coeffs, lam, f, 0.0)?.negative;
        if tn[n] * t[n] < 0.0 {
            degeneracies.push(Degeneracy { after, lambda: lam, kind: DegeneracyKind::Fold });
        } else if neg_new != neg {
            degeneracies.push(Degeneracy { after, lambda: lam, kind: DegeneracyKind::Singular });
        }
        neg = neg_new;
        let capped = point.h1_norm > opts.norm_cap;
        points.push(point);
        x = xn;
        t = tn;
        if capped {
            termination = Termination::NormCap;
            break;
        }
        if iters <= 3 {
            h = (h * 1.3).min(opts.step);
        }
    }
    Ok(Branch { points, termination, degeneracies })
}

/// Extrapolates `1/‖u‖_{H¹} → 0` by a secant through the last two points
/// once the branch has passed `norm_cap`.
pub fn detect_blowup(branch: &[BranchPoint], norm_cap: f64) -> Option<f64> {
    let [.., a, b] = branch else { return None };
    if b.h1_norm <= norm_cap {
        return None;
    }
    let (ya, yb) = (1.0 / a.h1_norm, 1.0 / b.h1_norm);
    if ya == yb {
        return None;
    }
    Some(b.lambda - yb * (b.lambda - a.lambda) / (yb - ya))
}

#[cfg(test)]
mod tests {
    use super::super::{build_basis, newton_solve_deflated, BasisSize, NewtonOptions, QuadSpec};
    use super::*;
    use crate::expr::parse;
    use crate::spectra::DomainSpec;
    use std::f64::consts::PI;

    fn interval(modes: usize) -> GalerkinBasis {
        build_basis(&DomainSpec::Interval { length: 1.0 }, BasisSize::Count(modes), QuadSpec::default()).unwrap()
    }

    #[test]
    fn linear_problem_reports_degeneracy() {
        let b = interval(8);
        let f = Nonlinearity::new(parse("lambda*u").unwrap());
        let start = BranchPoint::new(&b, DVector::zeros(8), 5.0, 0.0, 0);
        let opts = ContinuationOptions { step: 0.5, ..Default::default() };
        let br = continue_branch(&b, &f, &start, (5.0, 15.0), &opts).unwrap();
        assert_eq!(br.termination, Termination::RangeExit);
        let singular: Vec<_> = br.degeneracies.iter().filter(|d| d.kind == DegeneracyKind::Singular).collect();
        assert_eq!(singular.len(), 1);
        let i = singular[0].after;
        assert!(br.points[i].lambda < PI * PI && br.points[i + 1].lambda > PI * PI);
    }

    #[test]
    fn blowup_at_the_first_nonzero_eigenvalue() {
        let b = interval(32);
        let f = Nonlinearity::new(parse("lambda*u - atan(u)").unwrap());
        let lam0 = PI * PI + 0.9;
        let start = newton_solve_deflated(
            &b,
            &(b.unit(1) * 1.0),
            lam0,
            &f,
            NewtonOptions { tol: 1e-10, max_iters: 60 },
            &[DVector::zeros(32)],
        )
        .unwrap();
        assert!(start.l2_norm > 0.1);
        let opts = ContinuationOptions { step: 1.0, ..Default::default() };
        let br = continue_branch(&b, &f, &start, (lam0, PI * PI - 0.5), &opts).unwrap();
        assert_eq!(br.termination, Termination::NormCap);
        for w in br.points.windows(2) {
            let d = (join(&w[1].coeffs, w[1].lambda) - join(&w[0].coeffs, w[0].lambda)).norm();
            assert!(d <= 2.0 * opts.step);
            assert!(w[1].residual_inf <= 1e-10);
        }
        let hat = detect_blowup(&br.points, opts.norm_cap).unwrap();
        assert!((hat - PI * PI).abs() < 0.05, "{hat}");
        assert_eq!(detect_blowup(&br.points[..3], opts.norm_cap), None);
    }
}
