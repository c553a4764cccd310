use super::state::{constraint_residuals, DiagState, EMState, PhysicalParams};
use super::DEFAULT_CONSTRAINT_TOLERANCE;
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// `(A, B)` from `(u, n, E, B)`:
/// `A = ½(⟨D⟩_{c_s}/|D| n + i ∇/|D|·u)` and `B = -∇/|D| × E + i ⟨D⟩/|D| B`.
pub fn diagonalize(s: &EMState, params: &PhysicalParams) -> Result<DiagState> {
    diagonalize_with_tolerance(s, params, DEFAULT_CONSTRAINT_TOLERANCE)
}

pub fn diagonalize_with_tolerance(s: &EMState, params: &PhysicalParams, tol: f64) -> Result<DiagState> {
    let r = constraint_residuals(s);
    if r.gauss > tol || r.div_b > tol {
        return Err(Error::ConstraintViolation {
            field: "state".into(),
            detail: format!(
                "relative residuals gauss = {:.3e}, div B = {:.3e} exceed {tol:.1e}",
                r.gauss, r.div_b
            ),
        });
    }
    for (name, f) in [("n", &s.n), ("B", &s.b)] {
        let scale = f.max_coefficient().max(f64::MIN_POSITIVE);
        if f.mean().iter().any(|m| (m * f.grid().volume()).norm() > tol * scale) {
            return Err(Error::ConstraintViolation {
                field: name.into(),
                detail: "mean must vanish".into(),
            });
        }
    }
    Ok(diagonalize_unchecked(s, params))
}

/// [`diagonalize`] without the constraint checks; used on numerically
/// integrated primitive states whose residuals are small but nonzero.
pub fn diagonalize_unchecked(s: &EMState, params: &PhysicalParams) -> DiagState {
    super::kernel::diagonalize(s, params)
}

/// `(u, n)` from `(A, B)`: `u = -2 ∇/|D| Im A + ∇/(|D|⟨D⟩) × Im B`,
/// `n = 2 |D|/⟨D⟩_{c_s} Re A`.
pub fn velocity_density(d: &DiagState, params: &PhysicalParams) -> (SpectralField, SpectralField) {
    super::kernel::velocity_density(d, params)
}

/// Inverse of [`diagonalize`]. `QE` comes from the Gauss law
/// `∇·E = -n`, so the output satisfies every constraint by construction.
pub fn reconstruct(d: &DiagState, params: &PhysicalParams) -> EMState {
    super::kernel::reconstruct(d, params)
}
