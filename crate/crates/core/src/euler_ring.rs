//! Exact arithmetic in the Euler ring `U(SO(2))`.
//!
//! An element has one integer coordinate at the subgroup `SO(2)` and one at
//! every cyclic subgroup `Z_k`, `k >= 1`. Every element that arises from the
//! degree computations has finite support, so the torus part is stored as a
//! sparse map with no explicit zeros.
//!
//! The ring operations are
//!
//! ```text
//! (a + b)_H   = a_H + b_H
//! (a * b)_SO2 = a_SO2 * b_SO2
//! (a * b)_Zk  = a_SO2 * b_Zk + b_SO2 * a_Zk
//! ```
//!
//! Coefficients are `i64`. Every operation has a `checked_*` form that reports
//! overflow; the operator impls panic on overflow instead of wrapping.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EulerError {
    #[error("integer overflow in Euler ring arithmetic")]
    Overflow,
    #[error("element {0} is not invertible (SO(2) coordinate must be +1 or -1)")]
    NotInvertible(EulerElement),
    #[error("cannot parse Euler ring element from {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// An element of `U(SO(2))` in canonical sparse form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct EulerElement {
    a0: i64,
    torus: BTreeMap<u64, i64>,
}

impl EulerElement {
    /// The additive identity `Θ`.
    pub fn zero() -> Self {
        Self::default()
    }

    /// The multiplicative unit `𝕀`.
    pub fn unit() -> Self {
        Self::from_parts(1, [])
    }

    /// Builds an element from its `SO(2)` coordinate and `(k, coefficient)`
    /// pairs. Repeated modes are summed. Mode 0 is not a torus coordinate and
    /// panics.
    pub fn from_parts<I>(a0: i64, torus: I) -> Self
    where
        I: IntoIterator<Item = (u64, i64)>,
    {
        let mut map = BTreeMap::new();
        for (k, c) in torus {
            assert!(k >= 1, "torus coordinates are indexed by k >= 1");
            let slot = map.entry(k).or_insert(0i64);
            *slot = slot.checked_add(c).expect("Euler ring coefficient overflow");
        }
        let mut e = Self { a0, torus: map };
        e.canonicalize();
        e
    }

    pub fn a0(&self) -> i64 {
        self.a0
    }

    /// Coordinate at `Z_k` (0 when absent).
    pub fn coeff(&self, k: u64) -> i64 {
        self.torus.get(&k).copied().unwrap_or(0)
    }

    /// Nonzero torus coordinates in ascending mode order.
    pub fn torus(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.torus.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.a0 == 0 && self.torus.is_empty()
    }

    /// Drops explicit zero coefficients.
    pub fn canonicalize(&mut self) {
        self.torus.retain(|_, c| *c != 0);
    }

    pub fn canonical(mut self) -> Self {
        self.canonicalize();
        self
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, EulerError> {
        let a0 = self.a0.checked_add(other.a0).ok_or(EulerError::Overflow)?;
        let mut torus = self.torus.clone();
        for (&k, &c) in &other.torus {
            let slot = torus.entry(k).or_insert(0);
            *slot = slot.checked_add(c).ok_or(EulerError::Overflow)?;
        }
        Ok(Self { a0, torus }.canonical())
    }

    pub fn checked_neg(&self) -> Result<Self, EulerError> {
        self.checked_scalar_mul(-1)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, EulerError> {
        self.checked_add(&other.checked_neg()?)
    }

    /// The `⋆` product.
    pub fn checked_star(&self, other: &Self) -> Result<Self, EulerError> {
        let a0 = self.a0.checked_mul(other.a0).ok_or(EulerError::Overflow)?;
        let mut torus = BTreeMap::new();
        let modes: BTreeSet<u64> = self.torus.keys().chain(other.torus.keys()).copied().collect();
        for k in modes {
            let left = self.a0.checked_mul(other.coeff(k)).ok_or(EulerError::Overflow)?;
            let right = other.a0.checked_mul(self.coeff(k)).ok_or(EulerError::Overflow)?;
            let c = left.checked_add(right).ok_or(EulerError::Overflow)?;
            if c != 0 {
                torus.insert(k, c);
            }
        }
        Ok(Self { a0, torus })
    }

    pub fn checked_scalar_mul(&self, g: i64) -> Result<Self, EulerError> {
        let a0 = self.a0.checked_mul(g).ok_or(EulerError::Overflow)?;
        let mut torus = BTreeMap::new();
        for (&k, &c) in &self.torus {
            let v = c.checked_mul(g).ok_or(EulerError::Overflow)?;
            if v != 0 {
                torus.insert(k, v);
            }
        }
        Ok(Self { a0, torus })
    }

    pub fn star(&self, other: &Self) -> Self {
        self.checked_star(other).expect("Euler ring coefficient overflow")
    }

    pub fn scalar_mul(&self, g: i64) -> Self {
        self.checked_scalar_mul(g).expect("Euler ring coefficient overflow")
    }

    pub fn is_invertible(&self) -> bool {
        self.a0 == 1 || self.a0 == -1
    }

    /// Multiplicative inverse; it is `(a0; -a_k)` whenever `a0 = ±1`.
    pub fn invert(&self) -> Result<Self, EulerError> {
        if !self.is_invertible() {
            return Err(EulerError::NotInvertible(self.clone()));
        }
        let torus = self.torus.iter().map(|(&k, &c)| (k, -c)).collect();
        Ok(Self { a0: self.a0, torus })
    }

    /// `⋆`-product of a sequence; the empty product is `𝕀`.
    pub fn product<'a, I>(items: I) -> Result<Self, EulerError>
    where
        I: IntoIterator<Item = &'a EulerElement>,
    {
        items
            .into_iter()
            .try_fold(Self::unit(), |acc, x| acc.checked_star(x))
    }
}

impl Add for &EulerElement {
    type Output = EulerElement;
    fn add(self, rhs: Self) -> EulerElement {
        self.checked_add(rhs).expect("Euler ring coefficient overflow")
    }
}

impl Add for EulerElement {
    type Output = EulerElement;
    fn add(self, rhs: Self) -> EulerElement {
        &self + &rhs
    }
}

impl Sub for &EulerElement {
    type Output = EulerElement;
    fn sub(self, rhs: Self) -> EulerElement {
        self.checked_sub(rhs).expect("Euler ring coefficient overflow")
    }
}

impl Sub for EulerElement {
    type Output = EulerElement;
    fn sub(self, rhs: Self) -> EulerElement {
        &self - &rhs
    }
}

impl Neg for &EulerElement {
    type Output = EulerElement;
    fn neg(self) -> EulerElement {
        self.scalar_mul(-1)
    }
}

impl Neg for EulerElement {
    type Output = EulerElement;
    fn neg(self) -> EulerElement {
        -&self
    }
}

/// `*` is the ring product `⋆`.
impl Mul for &EulerElement {
    type Output = EulerElement;
    fn mul(self, rhs: Self) -> EulerElement {
        self.star(rhs)
    }
}

impl Mul for EulerElement {
    type Output = EulerElement;
    fn mul(self, rhs: Self) -> EulerElement {
        self.star(&rhs)
    }
}

/// Renders as `(a0; k1:c1, k2:c2)` with modes ascending, `(a0;)` when the
/// torus part is empty.
impl fmt::Display for EulerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.a0)?;
        for (i, (k, c)) in self.torus().enumerate() {
            if i == 0 {
                write!(f, " {k}:{c}")?;
            } else {
                write!(f, ", {k}:{c}")?;
            }
        }
        write!(f, ")")
    }
}

impl FromStr for EulerElement {
    type Err = EulerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fail = |reason: &str| EulerError::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let body = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| fail("expected parentheses"))?;
        let (head, tail) = match body.split_once(';') {
            Some((h, t)) => (h, t),
            None => (body, ""),
        };
        let a0: i64 = head.trim().parse().map_err(|_| fail("bad SO(2) coordinate"))?;
        let tail = tail.trim().trim_start_matches('{').trim_end_matches('}');
        let mut pairs = Vec::new();
        for item in tail.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (k, c) = item.split_once(':').ok_or_else(|| fail("expected k:c"))?;
            let k: u64 = k.trim().parse().map_err(|_| fail("bad mode"))?;
            if k == 0 {
                return Err(fail("torus modes start at 1"));
            }
            let c: i64 = c.trim().parse().map_err(|_| fail("bad coefficient"))?;
            pairs.push((k, c));
        }
        Ok(Self::from_parts(a0, pairs))
    }
}

/// Index of a coordinate of `U(SO(2))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coordinate {
    So2,
    Torus(u64),
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coordinate::So2 => write!(f, "SO(2)"),
            Coordinate::Torus(k) => write!(f, "Z_{k}"),
        }
    }
}

/// A coordinate value that may be undetermined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coeff {
    Known(i64),
    Unknown,
}

impl Coeff {
    pub fn known(self) -> Option<i64> {
        match self {
            Coeff::Known(v) => Some(v),
            Coeff::Unknown => None,
        }
    }
}

/// Three-valued answer for questions about partially known elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tri {
    Yes,
    No,
    Undetermined,
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tri::Yes => "yes",
            Tri::No => "no",
            Tri::Undetermined => "undetermined",
        })
    }
}

/// An element of `U(SO(2))` of which only some coordinates are determined.
///
/// Coordinates not listed in `known` or `unknown` are `Known(0)` when
/// `tail_known_zero` holds and `Unknown` otherwise. In canonical form a
/// zero-tail element lists no known zeros, and an unknown-tail element lists
/// no unknowns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialEulerElement {
    known: BTreeMap<Coordinate, i64>,
    unknown: BTreeSet<Coordinate>,
    tail_known_zero: bool,
}

impl From<EulerElement> for PartialEulerElement {
    fn from(e: EulerElement) -> Self {
        Self::from(&e)
    }
}

impl From<&EulerElement> for PartialEulerElement {
    fn from(e: &EulerElement) -> Self {
        let mut known = BTreeMap::new();
        known.insert(Coordinate::So2, e.a0);
        for (k, c) in e.torus() {
            known.insert(Coordinate::Torus(k), c);
        }
        Self::new(known, BTreeSet::new(), true)
    }
}

impl PartialEulerElement {
    pub fn new(
        known: BTreeMap<Coordinate, i64>,
        unknown: BTreeSet<Coordinate>,
        tail_known_zero: bool,
    ) -> Self {
        let mut known = known;
        for c in &unknown {
            known.remove(c);
        }
        let mut out = Self {
            known,
            unknown,
            tail_known_zero,
        };
        out.canonicalize();
        out
    }

    /// Nothing is known.
    pub fn all_unknown() -> Self {
        Self::new(BTreeMap::new(), BTreeSet::new(), false)
    }

    fn canonicalize(&mut self) {
        if self.tail_known_zero {
            self.known.retain(|_, v| *v != 0);
        } else {
            self.unknown.clear();
        }
    }

    pub fn tail_known_zero(&self) -> bool {
        self.tail_known_zero
    }

    pub fn get(&self, c: Coordinate) -> Coeff {
        if let Some(&v) = self.known.get(&c) {
            Coeff::Known(v)
        } else if self.unknown.contains(&c) || !self.tail_known_zero {
            Coeff::Unknown
        } else {
            Coeff::Known(0)
        }
    }

    /// Every coordinate mentioned explicitly, in order.
    fn listed(&self) -> BTreeSet<Coordinate> {
        self.known.keys().chain(self.unknown.iter()).copied().collect()
    }

    /// Explicitly known coordinates.
    pub fn known_coords(&self) -> impl Iterator<Item = (Coordinate, i64)> + '_ {
        self.known.iter().map(|(&c, &v)| (c, v))
    }

    /// Explicitly unknown coordinates (only meaningful with a zero tail).
    pub fn unknown_coords(&self) -> impl Iterator<Item = Coordinate> + '_ {
        self.unknown.iter().copied()
    }

    /// The fully determined element, if every coordinate is known.
    pub fn to_known(&self) -> Option<EulerElement> {
        if !self.tail_known_zero || !self.unknown.is_empty() {
            return None;
        }
        let a0 = self.known.get(&Coordinate::So2).copied().unwrap_or(0);
        let torus = self.known.iter().filter_map(|(c, &v)| match c {
            Coordinate::Torus(k) => Some((*k, v)),
            Coordinate::So2 => None,
        });
        Some(EulerElement::from_parts(a0, torus))
    }

    pub fn is_fully_known(&self) -> bool {
        self.to_known().is_some()
    }

    fn combine(&self, other: &Self, op: impl Fn(i64, i64) -> Option<i64>) -> Result<Self, EulerError> {
        let tail = self.tail_known_zero && other.tail_known_zero;
        let mut known = BTreeMap::new();
        let mut unknown = BTreeSet::new();
        let coords: BTreeSet<Coordinate> = self.listed().union(&other.listed()).copied().collect();
        for c in coords {
            match (self.get(c), other.get(c)) {
                (Coeff::Known(a), Coeff::Known(b)) => {
                    known.insert(c, op(a, b).ok_or(EulerError::Overflow)?);
                }
                _ => {
                    unknown.insert(c);
                }
            }
        }
        Ok(Self::new(known, unknown, tail))
    }

    pub fn partial_add(&self, other: &Self) -> Result<Self, EulerError> {
        self.combine(other, i64::checked_add)
    }

    pub fn partial_sub(&self, other: &Self) -> Result<Self, EulerError> {
        self.combine(other, i64::checked_sub)
    }

    /// `Yes` if some known coordinate is nonzero, `No` if every coordinate is
    /// known to vanish, `Undetermined` otherwise.
    pub fn partial_is_nonzero(&self) -> Tri {
        if self.known.values().any(|&v| v != 0) {
            Tri::Yes
        } else if self.tail_known_zero && self.unknown.is_empty() {
            Tri::No
        } else {
            Tri::Undetermined
        }
    }
}

/// Renders as `(a0; k:c, k:?, ...)`; `?` marks unknown coordinates and a
/// trailing `...?` an unknown tail.
impl fmt::Display for PartialEulerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.get(Coordinate::So2) {
            Coeff::Known(v) => write!(f, "({v};")?,
            Coeff::Unknown => write!(f, "(?;")?,
        }
        let mut first = true;
        for c in self.listed() {
            let Coordinate::Torus(k) = c else { continue };
            let sep = if first { " " } else { ", " };
            first = false;
            match self.get(c) {
                Coeff::Known(v) => write!(f, "{sep}{k}:{v}")?,
                Coeff::Unknown => write!(f, "{sep}{k}:?")?,
            }
        }
        if !self.tail_known_zero {
            let sep = if first { " " } else { ", " };
            write!(f, "{sep}...?")?;
        }
        write!(f, ")")
    }
}
