//! Spectra against direct enumeration of the separated eigenvalues.

use std::f64::consts::PI;

use neumann_core::spectra::{self, bessel_prime_zero, DomainSpec};
use neumann_core::SO2Rep;

/// `(eigenvalue, mode)` for each real plane (`k >= 1`) or line (`k = 0`).
fn cylinder_modes(max: f64) -> Vec<(f64, u64)> {
    let mut out = Vec::new();
    for k in 0u64..20 {
        let first = if k == 0 { 0 } else { 1 };
        for j in first.. {
            let x = bessel_prime_zero(k, j).unwrap();
            if x * x >= max {
                break;
            }
            for n in 0.. {
                let lam = x * x + (PI * n as f64).powi(2);
                if lam >= max {
                    break;
                }
                out.push((lam, k));
            }
        }
    }
    out
}

#[test]
fn cylinder_matches_enumeration() {
    let max = 80.0;
    let modes = cylinder_modes(max);
    let lines = spectra::spectrum(&DomainSpec::Cylinder, max).unwrap();
    let total: u64 = lines.iter().map(|l| l.dimension()).sum();
    let want: u64 = modes.iter().map(|m| if m.1 == 0 { 1 } else { 2 }).sum();
    assert_eq!(total, want);
    for l in &lines {
        let here: Vec<_> = modes.iter().filter(|m| (m.0 - l.eigenvalue).abs() < 1e-9).collect();
        let rep = SO2Rep::from_pairs(here.iter().map(|m| (m.1, 1)));
        assert_eq!(l.rep, rep, "at {}", l.eigenvalue);
    }
    for w in lines.windows(2) {
        assert!(w[1].eigenvalue > w[0].eigenvalue);
    }
}

#[test]
fn interval_spectrum_and_nu() {
    for length in [0.5, 1.0, 3.0] {
        let d = DomainSpec::Interval { length };
        let lines = spectra::spectrum(&d, 200.0).unwrap();
        for (n, l) in lines.iter().enumerate() {
            assert!((l.eigenvalue - (n as f64 * PI / length).powi(2)).abs() < 1e-9);
            assert_eq!(l.rep, SO2Rep::block(1, 0));
        }
        for w in lines.windows(2) {
            let mid = 0.5 * (w[0].eigenvalue + w[1].eigenvalue);
            let nu = spectra::nu(&d, mid).unwrap();
            assert!(!nu.resonant);
            assert_eq!(nu.value, lines.iter().filter(|l| l.eigenvalue < mid).count() as u64);
            assert!(spectra::is_resonant(&d, w[1].eigenvalue).unwrap());
        }
    }
}

#[test]
fn nu_counts_dimensions_below() {
    for d in [DomainSpec::Disc, DomainSpec::Cylinder] {
        let lines = spectra::spectrum(&d, 120.0).unwrap();
        for w in lines.windows(2) {
            let mid = 0.5 * (w[0].eigenvalue + w[1].eigenvalue);
            let want: u64 = lines.iter().filter(|l| l.eigenvalue < mid).map(|l| l.dimension()).sum();
            assert_eq!(spectra::nu(&d, mid).unwrap().value, want);
            let below = spectra::rep_below(&d, mid).unwrap();
            assert_eq!(below.dimension(), want);
        }
    }
}
