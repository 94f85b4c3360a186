//! Exact computations around the local delta invariant of a degree-2 del Pezzo
//! surface at a point lying on a unique (-1)-curve.
//!
//! The crate is organised bottom-up:
//!
//! - [`exactnum`]: rationals, real quadratic fields with exact ordering, and
//!   piecewise polynomials.
//! - [`lattice`]: intersection data of the `(a, b)` weighted blowup and blowdown
//!   bookkeeping.
//! - [`hjchain`]: Hirzebruch-Jung resolution of the two quotient singularities,
//!   contraction to the ordinary blowup, and the multiplicity of `D`.
//! - [`zariski`]: Zariski decomposition of `pi^*(-K_X) - tE`.
//! - [`svalues`]: volumes, `S(-K_X; E)` and the minimisation of `A/S`.
//! - [`azflag`]: refined S-values on `E` at its special points and their limits.

pub mod azflag;
pub mod error;
pub mod exactnum;
pub mod hjchain;
pub mod lattice;
pub mod svalues;
pub mod zariski;

pub use error::{Error, Result};
