//! Equivariant degree certificates for the Neumann problem `-Δu = f(u)`.
//!
//! The crate is layered bottom-up:
//!
//! * [`euler_ring`]: exact arithmetic in `U(SO(2))`;
//! * [`reps`]: finite-dimensional `SO(2)`-representations;
//! * [`spectra`]: Neumann spectra of the interval, disc and cylinder;
//! * [`degree`]: closed-form linear degrees and local/total indices;
//! * [`checker`]: existence, continuation and bifurcation criteria;
//! * [`expr`]: the nonlinearity expression language;
//! * [`galerkin`]: spectral-Galerkin solver and continuation.

pub mod checker;
pub mod degree;
pub mod euler_ring;
pub mod expr;
pub mod galerkin;
pub mod reps;
pub mod spectra;

pub use euler_ring::{Coeff, Coordinate, EulerElement, EulerError, PartialEulerElement, Tri};
pub use reps::SO2Rep;
