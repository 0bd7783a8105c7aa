//! Finite-dimensional orthogonal `SO(2)`-representations.
//!
//! Every such representation is a direct sum of blocks `R[j,k]`: `j` copies of
//! the plane on which `SO(2)` rotates at speed `k`, or the `j`-dimensional
//! trivial representation when `k = 0`. A representation is therefore stored as
//! its multiplicity vector.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse representation from {input:?}: {reason}")]
pub struct RepParseError {
    pub input: String,
    pub reason: String,
}

/// Isotypic multiplicities `k -> j` of an `SO(2)`-representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SO2Rep {
    mult: BTreeMap<u64, u64>,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl SO2Rep {
    /// The zero representation.
    pub fn zero() -> Self {
        Self::default()
    }

    /// A single block `R[j,k]`.
    pub fn block(j: u64, k: u64) -> Self {
        Self::from_pairs([(k, j)])
    }

    /// Builds a representation from `(mode, multiplicity)` pairs; repeated
    /// modes add up and zero multiplicities are dropped.
    pub fn from_pairs<I: IntoIterator<Item = (u64, u64)>>(pairs: I) -> Self {
        let mut mult = BTreeMap::new();
        for (k, j) in pairs {
            if j > 0 {
                *mult.entry(k).or_insert(0) += j;
            }
        }
        Self { mult }
    }

    /// Multiplicity of mode `k`.
    pub fn multiplicity(&self, k: u64) -> u64 {
        self.mult.get(&k).copied().unwrap_or(0)
    }

    /// `(mode, multiplicity)` pairs in ascending mode order.
    pub fn blocks(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.mult.iter().map(|(&k, &j)| (k, j))
    }

    /// Present modes `k >= 1`, ascending.
    pub fn nontrivial_modes(&self) -> impl Iterator<Item = u64> + '_ {
        self.mult.keys().copied().filter(|&k| k >= 1)
    }

    pub fn dimension(&self) -> u64 {
        self.blocks()
            .map(|(k, j)| if k == 0 { j } else { 2 * j })
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.mult.is_empty()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self::from_pairs(self.blocks().chain(other.blocks()))
    }

    /// The fixed-point subspace `V^{SO(2)}`.
    pub fn fixed_subspace(&self) -> Self {
        Self::from_pairs([(0, self.multiplicity(0))])
    }

    /// True when some block with `k >= 1` is present.
    pub fn is_nontrivial(&self) -> bool {
        self.nontrivial_modes().next().is_some()
    }

    /// True when `R[1,k] ⊂ V`.
    pub fn contains_mode(&self, k: u64) -> bool {
        assert!(k >= 1, "modes of nontrivial blocks start at 1");
        self.multiplicity(k) >= 1
    }

    /// True when some point of `V` has isotropy group exactly `Z_k`.
    ///
    /// A vector with components in the blocks of modes `k_1, ..., k_s` has
    /// isotropy `Z_gcd(k_1,...,k_s)`, so this asks whether `k` is the gcd of
    /// a nonempty subset of the modes present. Only modes divisible by `k`
    /// can take part, and adding more of them can only shrink the gcd towards
    /// `k`, so it suffices to take all of them at once.
    pub fn has_isotropy_exactly(&self, k: u64) -> bool {
        assert!(k >= 1, "isotropy Z_k requires k >= 1");
        self.nontrivial_modes()
            .filter(|m| m % k == 0)
            .fold(0, gcd)
            == k
    }
}

/// Renders as `R[j1,k1]+R[j2,k2]` in ascending mode order, `0` when empty.
impl fmt::Display for SO2Rep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (k, j)) in self.blocks().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            write!(f, "R[{j},{k}]")?;
        }
        Ok(())
    }
}

impl FromStr for SO2Rep {
    type Err = RepParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fail = |reason: &str| RepParseError {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let t = s.trim();
        if t == "0" {
            return Ok(Self::zero());
        }
        let mut pairs = Vec::new();
        for term in t.split('+').map(str::trim) {
            let inner = term
                .strip_prefix("R[")
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| fail("expected R[j,k]"))?;
            let (j, k) = inner.split_once(',').ok_or_else(|| fail("expected R[j,k]"))?;
            let j: u64 = j.trim().parse().map_err(|_| fail("bad multiplicity"))?;
            let k: u64 = k.trim().parse().map_err(|_| fail("bad mode"))?;
            pairs.push((k, j));
        }
        Ok(Self::from_pairs(pairs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> SO2Rep {
        s.parse().unwrap()
    }

    /// Enumerates every nonempty subset of the present modes.
    fn isotropy_oracle(v: &SO2Rep, k: u64) -> bool {
        let modes: Vec<u64> = v.nontrivial_modes().collect();
        (1u32..(1 << modes.len())).any(|mask| {
            let g = modes
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .fold(0, |g, (_, &m)| gcd(g, m));
            g == k
        })
    }

    #[test]
    fn direct_sum_examples() {
        let v = r("R[1,1]+R[1,3]");
        assert_eq!(SO2Rep::zero().direct_sum(&v), v);
        assert_eq!(r("R[1,0]").direct_sum(&r("R[1,0]")), r("R[2,0]"));
        let s = r("R[1,1]").direct_sum(&r("R[2,1]")).direct_sum(&r("R[1,3]"));
        assert_eq!(s, SO2Rep::from_pairs([(1, 3), (3, 1)]));
        assert_eq!(s.dimension(), 8);
    }

    #[test]
    fn fixed_and_nontrivial() {
        assert_eq!(r("R[3,0]").fixed_subspace(), r("R[3,0]"));
        assert_eq!(r("R[2,5]").fixed_subspace(), SO2Rep::zero());
        assert_eq!(r("R[1,0]+R[1,1]").fixed_subspace(), r("R[1,0]"));
        assert!(!r("R[4,0]").is_nontrivial());
        assert!(r("R[1,1]").is_nontrivial());
        assert!(r("R[1,0]+R[1,2]").is_nontrivial());
    }

    #[test]
    fn contains_mode_examples() {
        assert!(r("R[1,1]+R[1,0]").contains_mode(1));
        assert!(!r("R[2,0]").contains_mode(1));
        assert!(!SO2Rep::from_pairs([(1, 1), (3, 2)]).contains_mode(2));
    }

    #[test]
    fn isotropy_examples() {
        assert!(r("R[1,2]").has_isotropy_exactly(2));
        let v = r("R[1,4]+R[1,6]");
        assert!(v.has_isotropy_exactly(2));
        assert!(!v.has_isotropy_exactly(3));
        assert!(v.has_isotropy_exactly(4));
        assert!(!r("R[5,0]").has_isotropy_exactly(1));
    }

    #[test]
    fn isotropy_matches_subset_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..400 {
            let m = rng.random_range(0..=12);
            let v = SO2Rep::from_pairs((0..m).map(|_| (rng.random_range(1..=60), 1)));
            for k in 1..=60 {
                assert_eq!(v.has_isotropy_exactly(k), isotropy_oracle(&v, k), "{v} k={k}");
            }
        }
    }

    #[test]
    fn render_round_trip() {
        let v = SO2Rep::from_pairs([(3, 1), (0, 2), (1, 1)]);
        assert_eq!(v.to_string(), "R[2,0]+R[1,1]+R[1,3]");
        assert_eq!(r(&v.to_string()), v);
        assert_eq!(SO2Rep::zero().to_string(), "0");
        assert!("R[1]".parse::<SO2Rep>().is_err());
    }
}
