//! Periodic-grid Fourier engine.

mod bilinear;
mod fft;
mod field;
mod grid;
mod multiplier;
mod norm;
mod packed;

pub use bilinear::{pseudo_product, pseudo_product_direct, BilinearSymbol, DIRECT_CONVOLUTION_LIMIT};
pub use field::SpectralField;
pub use grid::Grid3;
pub use multiplier::{
    apply_multiplier, bracket, curl, divergence, gradient, helmholtz_p, helmholtz_q, MultiplierSymbol,
    SymbolKind, ZeroModePolicy,
};
pub use norm::{discrete_norm, discrete_norm_many, l2_quadrature, NormSpec};

pub(crate) use multiplier::norm3;
pub(crate) use packed::{from_real_pair, to_real_pair};

/// Real-space product of two real scalar-or-vector fields (`a` scalar,
/// `b` any), dealiased.
pub fn product(a: &SpectralField, b: &SpectralField) -> crate::Result<SpectralField> {
    a.expect_components(1)?;
    a.grid().ensure_same(b.grid())?;
    let av = a.real_values().pop().expect("scalar");
    let vals = b
        .real_values()
        .into_iter()
        .map(|bc| bc.iter().zip(&av).map(|(x, y)| x * y).collect())
        .collect();
    Ok(SpectralField::from_real_values(*a.grid(), vals)?.dealiased())
}
