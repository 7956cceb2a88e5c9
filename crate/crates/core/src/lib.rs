//! Casimir-Lifshitz free energy and entropy between two identical plates.
//!
//! The free energy is available on both frequency axes:
//!
//! * [`matsubara`]: imaginary-axis Matsubara sum, the T = 0 energy and a
//!   sum-minus-integral thermal correction;
//! * [`realaxis`]: real-frequency integrand φ(ω), the coth/Bose frequency
//!   integral, the entropy integrand and the explicit temperature term that
//!   appears when ε depends on T.
//!
//! [`thermo`] turns free energies into entropy scans and extrapolates them
//! to T → 0, and [`cli`] is the command-line front end.

// negated float comparisons are used throughout so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod constants;
pub mod dispersion;
pub mod error;
pub mod kernel;
pub mod matsubara;
pub mod quad;
pub mod realaxis;
pub mod special;
pub mod thermo;

pub use error::{Error, Result};
