//! Symbolic derivatives against central differences on random expressions.

use neumann_core::expr::{parse, Expr};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// A random expression in `u` and `lambda` that stays smooth and bounded
/// near the sample points.
fn random_expr(rng: &mut StdRng, depth: u32) -> String {
    if depth == 0 || rng.random_bool(0.25) {
        return match rng.random_range(0..4) {
            0 => "u".into(),
            1 => "lambda".into(),
            _ => format!("{:.3}", rng.random_range(-3.0..3.0)),
        };
    }
    let a = random_expr(rng, depth - 1);
    match rng.random_range(0..9) {
        0 => format!("({a}) + ({})", random_expr(rng, depth - 1)),
        1 => format!("({a}) - ({})", random_expr(rng, depth - 1)),
        2 => format!("({a}) * ({})", random_expr(rng, depth - 1)),
        3 => format!("({a}) / (2 + sin({}))", random_expr(rng, depth - 1)),
        4 => format!("({a})^{}", rng.random_range(2..4)),
        5 => format!("atan({a})"),
        6 => format!("tanh({a})"),
        7 => format!("cos({a})"),
        _ => format!("-({a})"),
    }
}

fn central(e: &Expr, u: f64, lam: f64, du: f64, dl: f64) -> f64 {
    let h = 1e-5;
    (e.eval(u + h * du, lam + h * dl).unwrap() - e.eval(u - h * du, lam - h * dl).unwrap()) / (2.0 * h)
}

#[test]
fn derivatives_match_finite_differences() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut tested = 0;
    while tested < 300 {
        let src = random_expr(&mut rng, 4);
        let e = parse(&src).unwrap_or_else(|err| panic!("{src}: {err}"));
        let (du, dl) = (e.diff_u(), e.diff_lambda());
        let u = rng.random_range(-1.5..1.5);
        let lam = rng.random_range(-1.5..1.5);
        let (Ok(v), Ok(gu), Ok(gl)) = (e.eval(u, lam), du.eval(u, lam), dl.eval(u, lam)) else { continue };
        if !v.is_finite() || v.abs() > 1e4 {
            continue;
        }
        let fu = central(&e, u, lam, 1.0, 0.0);
        let fl = central(&e, u, lam, 0.0, 1.0);
        let tol = |x: f64| 1e-6 * (1.0 + x.abs());
        assert!((gu - fu).abs() < tol(fu), "d/du of {src} at ({u}, {lam}): {gu} vs {fu}");
        assert!((gl - fl).abs() < tol(fl), "d/dlambda of {src} at ({u}, {lam}): {gl} vs {fl}");
        tested += 1;
    }
}

#[test]
fn derivative_of_constant_in_u_vanishes() {
    let e = parse("lambda^2 + sin(lambda)").unwrap();
    assert_eq!(e.diff_u().eval(3.0, 1.2).unwrap(), 0.0);
}
