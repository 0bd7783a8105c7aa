//! Gauss–Legendre rules.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "a rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi's estimate, then Newton on P_n.
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, t);
            let dt = p / d;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, t);
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// `P_n(t)` and `P_n'(t)` by the three-term recurrence.
fn legendre(n: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// Composite rule on `[a, b]` with `panels` equal panels of `per_panel`
/// Gauss points each.
pub fn composite(a: f64, b: f64, panels: usize, per_panel: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(per_panel);
    let h = (b - a) / panels as f64;
    let mut x = Vec::with_capacity(panels * per_panel);
    let mut w = Vec::with_capacity(panels * per_panel);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (t, wt) in gx.iter().zip(&gw) {
            x.push(mid + 0.5 * h * t);
            w.push(0.5 * h * wt);
        }
    }
    (x, w)
}

/// `∫_a^b g` by adaptive bisection, comparing 5- and 10-point Gauss rules on
/// each piece. Fails if `g` fails anywhere it is sampled.
pub fn adaptive<E>(g: &dyn Fn(f64) -> Result<f64, E>, a: f64, b: f64, tol: f64) -> Result<f64, E> {
    fn rule<E>(g: &dyn Fn(f64) -> Result<f64, E>, a: f64, b: f64, n: usize) -> Result<f64, E> {
        let (x, w) = gauss_legendre(n);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut s = 0.0;
        for (t, wt) in x.iter().zip(&w) {
            s += wt * g(mid + half * t)?;
        }
        Ok(s * half)
    }
    fn go<E>(g: &dyn Fn(f64) -> Result<f64, E>, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64, E> {
        let coarse = rule(g, a, b, 5)?;
        let fine = rule(g, a, b, 10)?;
        if (fine - coarse).abs() <= tol || depth == 0 {
            return Ok(fine);
        }
        let m = 0.5 * (a + b);
        Ok(go(g, a, m, 0.5 * tol, depth - 1)? + go(g, m, b, 0.5 * tol, depth - 1)?)
    }
    if a == b {
        return Ok(0.0);
    }
    go(g, a, b, tol, 40)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..2 * n {
                let got: f64 = x.iter().zip(&w).map(|(t, wt)| wt * t.powi(deg as i32)).sum();
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "n={n} deg={deg}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn large_rules_stay_accurate() {
        let (x, w) = gauss_legendre(80);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        let got: f64 = x.iter().zip(&w).map(|(t, wt)| wt * (20.0 * t).cos()).sum();
        assert!((got - 2.0 * 20f64.sin() / 20.0).abs() < 1e-13);
    }

    #[test]
    fn composite_and_adaptive() {
        let (x, w) = composite(0.0, 1.0, 7, 4);
        let got: f64 = x.iter().zip(&w).map(|(t, wt)| wt * t.exp()).sum();
        assert!((got - (1f64.exp() - 1.0)).abs() < 1e-13);
        let r: Result<f64, ()> = adaptive(&|t: f64| Ok(t.atan()), 0.0, 30.0, 1e-12);
        let want = 30.0 * 30f64.atan() - 0.5 * (1.0 + 900f64).ln();
        assert!((r.unwrap() - want).abs() < 1e-10);
    }
}
