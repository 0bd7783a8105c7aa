//! Zeros of `f(·, λ)` on a bracket by sign-change scan and bisection.

use super::{EvalError, Expr};

pub const DEFAULT_CELLS: usize = 100_000;
const BISECT_TOL: f64 = 1e-12;
const MERGE_TOL: f64 = 1e-9;
const TOUCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub value: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZeroDiagnostic {
    /// `|f|` nearly vanishes at a local minimum without changing sign: a
    /// double zero may be hiding there.
    SuspectEvenTouch { at: f64, value: f64 },
    /// `f` or `f'` could not be evaluated at this point.
    EvalFailure { at: f64, error: EvalError },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ZeroScan {
    pub zeros: Vec<Zero>,
    pub diagnostics: Vec<ZeroDiagnostic>,
}

fn bisect(f: &dyn Fn(f64) -> Option<f64>, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    while b - a > BISECT_TOL {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let Some(fm) = f(m) else { break };
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Golden-section search for the minimum of `|f|` on `[a, b]`.
fn min_abs(f: &dyn Fn(f64) -> Option<f64>, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let h = |x: f64| f(x).map_or(f64::INFINITY, f64::abs);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..80 {
        if h(c) < h(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    let x = 0.5 * (a + b);
    (x, h(x))
}

/// Zeros of `e(·, lam)` in `[-r, r]` with their slopes `∂e/∂u`.
///
/// Every simple zero separated from its neighbours by more than
/// `2r / cells` is found. Points where `e` cannot be evaluated are skipped
/// and reported.
pub fn find_zeros(e: &Expr, r: f64, lam: f64, cells: usize) -> ZeroScan {
    assert!(r > 0.0 && cells > 0, "need a nonempty bracket and grid");
    let de = e.diff_u();
    let mut scan = ZeroScan::default();
    let f = |x: f64| e.eval(x, lam).ok();
    let h = 2.0 * r / cells as f64;
    let xs: Vec<f64> = (0..=cells).map(|i| -r + i as f64 * h).collect();
    let mut vals = Vec::with_capacity(xs.len());
    for &x in &xs {
        match e.eval(x, lam) {
            Ok(v) => vals.push(Some(v)),
            Err(error) => {
                if scan.diagnostics.len() < 16 {
                    scan.diagnostics.push(ZeroDiagnostic::EvalFailure { at: x, error });
                }
                vals.push(None);
            }
        }
    }

    let mut roots = Vec::new();
    for i in 0..xs.len() {
        let Some(fi) = vals[i] else { continue };
        if fi == 0.0 {
            roots.push(xs[i]);
            continue;
        }
        if let Some(Some(fj)) = vals.get(i + 1) {
            if *fj != 0.0 && (fi > 0.0) != (*fj > 0.0) {
                roots.push(bisect(&f, xs[i], xs[i + 1], fi));
            }
        }
        // A local minimum of |f| that stays on one side of zero.
        if i > 0 && i + 1 < xs.len() {
            if let (Some(fl), Some(fr)) = (vals[i - 1], vals[i + 1]) {
                let same_side = (fl > 0.0) == (fi > 0.0) && (fr > 0.0) == (fi > 0.0) && fl != 0.0 && fr != 0.0;
                if same_side && fi.abs() <= fl.abs() && fi.abs() <= fr.abs() {
                    let (at, value) = min_abs(&f, xs[i - 1], xs[i + 1]);
                    if value < TOUCH_TOL {
                        scan.diagnostics.push(ZeroDiagnostic::SuspectEvenTouch { at, value });
                    }
                }
            }
        }
    }

    roots.sort_by(f64::total_cmp);
    let mut merged: Vec<f64> = Vec::new();
    for z in roots {
        if merged.last().is_none_or(|&m| z - m > MERGE_TOL) {
            merged.push(z);
        }
    }
    for z in merged {
        match de.eval(z, lam) {
            Ok(slope) => scan.zeros.push(Zero { value: z, slope }),
            Err(error) => scan.diagnostics.push(ZeroDiagnostic::EvalFailure { at: z, error }),
        }
    }
    scan
}

/// Compares the attested slope at infinity with `f(±U)/U` at `U = 10⁶`.
/// Returns a warning when either side differs by more than 1%.
pub fn asymptotic_slope_warning(e: &Expr, attested: f64, lam: f64) -> Option<String> {
    const FAR: f64 = 1e6;
    let tol = 0.01 * attested.abs().max(1.0);
    for x in [FAR, -FAR] {
        match e.eval(x, lam) {
            Ok(v) => {
                let ratio = v / x;
                if (ratio - attested).abs() > tol {
                    return Some(format!(
                        "f(u)/u = {ratio:.6} at u = {x:e}, but the slope at infinity is given as {attested}"
                    ));
                }
            }
            Err(err) => return Some(format!("cannot sample f at u = {x:e}: {err}")),
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn identity_has_one_zero() {
        let s = find_zeros(&parse("u").unwrap(), 10.0, 0.0, DEFAULT_CELLS);
        assert_eq!(s.zeros.len(), 1);
        assert!(s.zeros[0].value.abs() < 1e-12);
        assert_eq!(s.zeros[0].slope, 1.0);
    }

    #[test]
    fn tanh_fixture_zeros() {
        let e = parse("21*tanh(u) - u").unwrap();
        let s = find_zeros(&e, 30.0, 0.0, DEFAULT_CELLS);
        assert_eq!(s.zeros.len(), 3);
        assert!((s.zeros[1].slope - 20.0).abs() < 1e-9);
        let ustar = s.zeros[2].value;
        // Root oracle: u* = 21 tanh(u*) solved by fixed-point iteration.
        let mut x = 21.0f64;
        for _ in 0..100 {
            x = 21.0 * x.tanh();
        }
        assert!((ustar - x).abs() < 1e-10);
        assert!((s.zeros[0].value + x).abs() < 1e-10);
        assert!(s.zeros[0].slope < 0.0 && s.zeros[2].slope < 0.0);
    }

    #[test]
    fn no_real_zeros() {
        let s = find_zeros(&parse("u^2 + 1").unwrap(), 30.0, 0.0, DEFAULT_CELLS);
        assert!(s.zeros.is_empty());
        assert!(s.diagnostics.is_empty());
    }

    #[test]
    fn even_touch_is_flagged() {
        let s = find_zeros(&parse("(u - 0.123456)^2").unwrap(), 5.0, 0.0, 1000);
        assert!(s.zeros.is_empty());
        assert!(matches!(s.diagnostics[0], ZeroDiagnostic::SuspectEvenTouch { .. }));
    }

    #[test]
    fn asymptotic_check() {
        let e = parse("6*atan(u) - u").unwrap();
        assert_eq!(asymptotic_slope_warning(&e, -1.0, 0.0), None);
        assert!(asymptotic_slope_warning(&e, 2.0, 0.0).is_some());
        let fam = parse("lambda*u - atan(u)").unwrap();
        assert_eq!(asymptotic_slope_warning(&fam, 9.0, 9.0), None);
    }
}
