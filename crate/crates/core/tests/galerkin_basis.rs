//! Discretization invariants of the Galerkin bases.

use std::f64::consts::PI;

use neumann_core::galerkin::{build_basis, BasisSize, GalerkinBasis, QuadSpec};
use neumann_core::spectra::DomainSpec;

fn max_offdiag_error(b: &GalerkinBasis) -> f64 {
    let g = b.gram();
    let mut worst: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - want).abs());
        }
    }
    worst
}

#[test]
fn bases_are_orthonormal() {
    let interval = build_basis(&DomainSpec::Interval { length: 2.0 }, BasisSize::Count(40), QuadSpec::default()).unwrap();
    assert!(max_offdiag_error(&interval) < 1e-12);
    let disc = build_basis(&DomainSpec::Disc, BasisSize::DiscGrid { k_max: 5, n_max: 4 }, QuadSpec::default()).unwrap();
    assert!(max_offdiag_error(&disc) < 1e-11);
}

#[test]
fn synthesis_then_projection_is_identity() {
    let b = build_basis(&DomainSpec::Disc, BasisSize::Below(60.0), QuadSpec::default()).unwrap();
    let c = nalgebra::DVector::from_fn(b.len(), |i, _| ((i * 7 + 3) % 11) as f64 / 11.0 - 0.5);
    let back = b.project(&b.synthesize(&c));
    assert!((back - &c).amax() < 1e-11);
}

#[test]
fn rotation_is_an_isometry_and_composes() {
    let b = build_basis(&DomainSpec::Disc, BasisSize::DiscGrid { k_max: 4, n_max: 3 }, QuadSpec::default()).unwrap();
    let c = nalgebra::DVector::from_fn(b.len(), |i, _| (i as f64).sin());
    let r = b.rotate(&b.rotate(&c, 0.4), 0.9);
    assert!((b.l2_norm(&r) - b.l2_norm(&c)).abs() < 1e-12);
    assert!((r - b.rotate(&c, 1.3)).amax() < 1e-12);
    assert!((b.rotate(&c, 2.0 * PI) - &c).amax() < 1e-12);
    // u(r, θ - α) evaluated pointwise.
    let rc = b.rotate(&c, 0.7);
    assert!((b.eval(&rc, 0.6, 1.9) - b.eval(&c, 0.6, 1.2)).abs() < 1e-12);
}
