use num_complex::Complex64;

use super::state::{DiagState, EMState, PhysicalParams};
use crate::spectral::MultiplierSymbol;

/// Time derivative of `(u, n, E, B)` under the full system
///
/// ```text
/// ∂t u = -u·∇u - c_s² ρ∇ρ - E - u×B
/// ∂t n = -∇·(ρu)
/// ∂t B = -∇×E
/// ∂t E =  ∇×B + ρu
/// ```
///
/// with `ρ = 1 + n`. Quadratic terms are formed in real space and
/// dealiased.
pub fn rhs_primitive(s: &EMState, params: &PhysicalParams) -> EMState {
    super::kernel::rhs_primitive(s, params, true)
}

/// Linearisation of [`rhs_primitive`] about the equilibrium.
pub fn rhs_linear(s: &EMState, params: &PhysicalParams) -> EMState {
    super::kernel::rhs_primitive(s, params, false)
}

/// `(i⟨D⟩_{c_s} A, i⟨D⟩ B)`.
pub fn diagonal_linear_part(d: &DiagState, params: &PhysicalParams) -> DiagState {
    DiagState {
        a: MultiplierSymbol::bracket(params.c_s()).apply(&d.a).expect("scalar").times_i(),
        bc: MultiplierSymbol::bracket(1.0).apply(&d.bc).expect("vector").times_i(),
        time: d.time,
    }
}

/// Quadratic part of the diagonal system:
///
/// ```text
/// N_A = -½ ⟨D⟩_{c_s} ∇/|D|·(nu) + (i/4) |D| (|u|² + c_s² n²)
/// N_B = -∇/|D| × (nu)
/// ```
pub fn diagonal_nonlinearity(d: &DiagState, params: &PhysicalParams) -> DiagState {
    super::kernel::diagonal_nonlinearity(d, params)
}

/// Full time derivative of `(A, B)`.
pub fn rhs_diagonal(d: &DiagState, params: &PhysicalParams) -> DiagState {
    let mut out = diagonal_linear_part(d, params);
    out.axpy(Complex64::new(1.0, 0.0), &diagonal_nonlinearity(d, params));
    out
}
