//! Randomized properties of the criteria on hand-entered spectra.

use neumann_core::checker::{self, ProblemSpec, ZeroData};
use neumann_core::spectra::{DomainSpec, SpectralLine};
use neumann_core::SO2Rep;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

fn random_custom(rng: &mut StdRng) -> Vec<SpectralLine> {
    let mut lines = vec![SpectralLine::custom(0.0, SO2Rep::block(1, 0))];
    let mut ev = 0.0;
    for _ in 0..rng.random_range(1..8) {
        ev += rng.random_range(0.5..4.0);
        let rep = if rng.random_bool(0.4) {
            SO2Rep::block(rng.random_range(1..4), 0)
        } else {
            SO2Rep::block(rng.random_range(1..3), rng.random_range(1..6))
        };
        lines.push(SpectralLine::custom(ev, rep));
    }
    lines
}

fn avoid(rng: &mut StdRng, lines: &[SpectralLine], lo: f64, hi: f64) -> f64 {
    loop {
        let s = rng.random_range(lo..hi);
        if lines.iter().all(|l| (l.eigenvalue - s).abs() > 1e-3) {
            return s;
        }
    }
}

#[test]
fn bif_index_agrees_with_eigenspace_criterion() {
    let mut rng = StdRng::seed_from_u64(21);
    let mut nonzero = 0;
    for _ in 0..100 {
        let lines = random_custom(&mut rng);
        let top = lines.last().unwrap().eigenvalue + 2.0;
        let a = avoid(&mut rng, &lines, -2.0, top);
        let b = avoid(&mut rng, &lines, -2.0, top);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let between: Vec<&SpectralLine> = lines.iter().filter(|l| lo < l.eigenvalue && l.eigenvalue < hi).collect();
        let want = between.iter().any(|l| l.rep.is_nontrivial())
            || between.iter().map(|l| l.dimension()).sum::<u64>() % 2 == 1;
        let d = DomainSpec::Custom { lines: lines.clone() };
        let r = checker::bif_index_from_slopes(&d, lo, hi).unwrap();
        assert_eq!(r.nonzero, want, "slopes {lo}..{hi} over {lines:?}");
        nonzero += usize::from(r.nonzero);
    }
    assert!(nonzero > 10 && nonzero < 100);
}

#[test]
fn verdicts_do_not_depend_on_zero_order() {
    let mut rng = StdRng::seed_from_u64(22);
    for _ in 0..60 {
        let lines = random_custom(&mut rng);
        let top = lines.last().unwrap().eigenvalue + 3.0;
        let mut zeros: Vec<ZeroData> = (0..3)
            .map(|i| {
                let s = if i % 2 == 0 { avoid(&mut rng, &lines, 0.1, top) } else { avoid(&mut rng, &lines, -5.0, -0.1) };
                ZeroData::new(i as f64, s)
            })
            .collect();
        let d = DomainSpec::Custom { lines: lines.clone() };
        let slope_inf = avoid(&mut rng, &lines, 0.1, top);
        let a = checker::check_all(&ProblemSpec::new(d.clone(), zeros.clone(), slope_inf)).unwrap();
        zeros.shuffle(&mut rng);
        let b = checker::check_all(&ProblemSpec::new(d, zeros, slope_inf)).unwrap();
        let flags = |r: &checker::CheckReport| r.verdicts.iter().map(|v| (v.theorem, v.applies)).collect::<Vec<_>>();
        assert_eq!(flags(&a), flags(&b));
        let (ia, ib) = (a.index.unwrap(), b.index.unwrap());
        assert_eq!(ia.ls_total, ib.ls_total);
        assert_eq!(ia.grad_total, ib.grad_total);
    }
}

#[test]
fn non_alternating_slopes_are_flagged() {
    let d = DomainSpec::Disc;
    let p = ProblemSpec::new(d.clone(), vec![ZeroData::new(0.0, 5.0), ZeroData::new(1.0, 6.0)], -1.0);
    let r = checker::check_all(&p).unwrap();
    assert!(r.notes.iter().any(|n| n.contains("alternate")));
    let q = ProblemSpec::new(d, vec![ZeroData::new(-1.0, -1.0), ZeroData::new(0.0, 5.0), ZeroData::new(1.0, -1.0)], -1.0);
    assert!(checker::check_all(&q).unwrap().notes.is_empty());
}
