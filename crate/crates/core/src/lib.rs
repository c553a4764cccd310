//! Pseudo-spectral laboratory for the one-fluid Euler-Maxwell system near
//! its constant equilibrium.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`] is the periodic-box Fourier engine (transforms, radial
//!   multipliers, Helmholtz projections, pseudo-products, discrete norms).
//! * [`model`] holds the physical state `(u, n, E, B)`, the dispersive
//!   variables `(A, B)` and both right-hand sides.
//! * [`integrator`] advances either formulation in time.
//! * [`resonance`] analyses the quadratic phases, their space-time resonant
//!   sets and the cutoff symbols built around them.
//! * [`diagnostics`] measures norms, decay rates and scattering on
//!   computed trajectories.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod integrator;
pub mod model;
pub mod resonance;
pub mod spectral;

pub use error::{Error, Result};
