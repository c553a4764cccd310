//! Physical and dispersive states of the Euler-Maxwell system, the maps
//! between them and their time derivatives.
//!
//! After reduction the unknowns are the electron velocity `u`, the density
//! perturbation `n = ρ - 1`, and the fields `E`, `B`, with the cubic
//! pressure law `p(ρ) = c_s² ρ³ / 3`.

mod data;
mod diagonal;
mod kernel;
mod rhs;
mod state;

pub use data::InitialData;
pub use diagonal::{diagonalize, diagonalize_unchecked, diagonalize_with_tolerance, reconstruct, velocity_density};
pub use rhs::{diagonal_linear_part, diagonal_nonlinearity, rhs_diagonal, rhs_linear, rhs_primitive};
pub use state::{constraint_residuals, ConstraintResiduals, DiagState, EMState, PhysicalParams, Profiles};

/// Relative residual below which a state counts as constraint-satisfying.
pub const DEFAULT_CONSTRAINT_TOLERANCE: f64 = 1e-9;
