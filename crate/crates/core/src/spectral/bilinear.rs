use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::field::SpectralField;
use super::grid::Grid3;
use super::multiplier::{MultiplierSymbol, SymbolKind};
use crate::error::{Error, Result};

/// Largest points-per-axis accepted by the quadratic-cost direct path.
pub const DIRECT_CONVOLUTION_LIMIT: usize = 16;

type GeneralSymbol = Arc<dyn Fn([f64; 3], [f64; 3]) -> Complex64 + Send + Sync>;

/// Symbol `m(ξ, η)` of a bilinear pseudo-product
/// `F[T_m(f, g)](ξ) = L^{-3} Σ_η m(ξ, η) f̂(η) ĝ(ξ - η)`.
///
/// The `L^{-3}` weight is the discrete counterpart of `dη` under the field
/// normalisation, so that `T_1(f, g) = f g`.
#[derive(Clone)]
pub struct BilinearSymbol {
    form: Form,
    class_bounds: Vec<f64>,
}

#[derive(Clone)]
enum Form {
    /// `m₀(ξ) m₁(η) m₂(ξ - η)`
    Factored([MultiplierSymbol; 3]),
    General(GeneralSymbol),
}

impl fmt::Debug for BilinearSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.form {
            Form::Factored(m) => f.debug_tuple("Factored").field(m).finish(),
            Form::General(_) => f.write_str("General(..)"),
        }
    }
}

impl BilinearSymbol {
    pub fn factored(m0: MultiplierSymbol, m1: MultiplierSymbol, m2: MultiplierSymbol) -> Result<Self> {
        for m in [&m0, &m1, &m2] {
            if matches!(m.kind(), SymbolKind::Riesz | SymbolKind::RieszCurl) {
                return Err(Error::InvalidSymbol(
                    "pseudo-product factors must be scalar-valued".into(),
                ));
            }
        }
        Ok(Self {
            form: Form::Factored([m0, m1, m2]),
            class_bounds: Vec::new(),
        })
    }

    /// The identity symbol `m ≡ 1`.
    pub fn one() -> Self {
        let one = || MultiplierSymbol::bracket(0.0);
        Self::factored(one(), one(), one()).expect("scalar factors")
    }

    pub fn general(m: impl Fn([f64; 3], [f64; 3]) -> Complex64 + Send + Sync + 'static) -> Self {
        Self {
            form: Form::General(Arc::new(m)),
            class_bounds: Vec::new(),
        }
    }

    /// Records the constants of the derivative bounds the symbol satisfies.
    pub fn with_class_bounds(mut self, bounds: Vec<f64>) -> Self {
        self.class_bounds = bounds;
        self
    }

    pub fn class_bounds(&self) -> &[f64] {
        &self.class_bounds
    }

    pub fn is_factored(&self) -> bool {
        matches!(self.form, Form::Factored(_))
    }

    /// Value at lattice points of `grid`; `eta_idx` and `diff_idx` index
    /// `η` and `ξ - η`.
    pub fn value_at(&self, grid: &Grid3, xi_idx: usize, eta_idx: usize, diff_idx: usize) -> Complex64 {
        match &self.form {
            Form::Factored([m0, m1, m2]) => {
                m0.value_at(grid, xi_idx) * m1.value_at(grid, eta_idx) * m2.value_at(grid, diff_idx)
            }
            Form::General(m) => m(grid.wavevector(xi_idx), grid.wavevector(eta_idx)),
        }
    }
}

/// Bilinear pseudo-product `T_m(f, g)`, dealiased.
///
/// Factored symbols go through real space as `m₀(D)[(m₁(D) f)(m₂(D) g)]`.
/// General symbols are summed directly over lattice pairs, which costs
/// `O(n^6)` and is refused above [`DIRECT_CONVOLUTION_LIMIT`].
/// `f` must be scalar; `g` may be scalar or vector (componentwise).
pub fn pseudo_product(m: &BilinearSymbol, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.grid().ensure_same(g.grid())?;
    f.expect_components(1)?;
    match &m.form {
        Form::Factored([m0, m1, m2]) => {
            let grid = *f.grid();
            let fv = m1.apply(f)?.values().pop().expect("scalar");
            let gm = m2.apply(g)?;
            let real = f.is_real() && gm.is_real();
            let prods: Vec<Vec<Complex64>> = gm
                .values()
                .into_iter()
                .map(|gc| gc.par_iter().zip(fv.par_iter()).map(|(a, b)| a * b).collect())
                .collect();
            let mut p = SpectralField::from_complex_values(grid, prods)?;
            p.dealias();
            p.set_real(real);
            let mut out = m0.apply(&p)?;
            out.dealias();
            Ok(out)
        }
        Form::General(_) => pseudo_product_direct(m, f, g),
    }
}

/// Direct double-lattice sum for any symbol; `ξ - η` must be a lattice
/// point (no periodic wrap-around).
pub fn pseudo_product_direct(m: &BilinearSymbol, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.grid().ensure_same(g.grid())?;
    f.expect_components(1)?;
    let grid = *f.grid();
    let n = grid.points_per_axis();
    if n > DIRECT_CONVOLUTION_LIMIT {
        return Err(Error::CostGuard {
            points: n,
            limit: DIRECT_CONVOLUTION_LIMIT,
        });
    }
    let half = (n / 2) as i64;
    let in_range = |j: i64| (-half..half).contains(&j);
    let tables = match &m.form {
        Form::Factored(ms) => Some(
            ms.iter()
                .map(|s| (0..grid.len()).map(|i| s.value_at(&grid, i)).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        ),
        Form::General(_) => None,
    };
    let eval = |xi: usize, eta: usize, di: usize| match (&tables, &m.form) {
        (Some(t), _) => t[0][xi] * t[1][eta] * t[2][di],
        (None, Form::General(s)) => s(grid.wavevector(xi), grid.wavevector(eta)),
        _ => unreachable!(),
    };
    let fc = f.coefficients(0);
    let inv_vol = 1.0 / grid.volume();
    let coeffs = (0..g.n_components())
        .map(|c| {
            let gc = g.coefficients(c);
            (0..grid.len())
                .into_par_iter()
                .map(|xi| {
                    if !grid.dealias_keeps(xi) {
                        return Complex64::default();
                    }
                    let jx = grid.signed_indices(xi);
                    let mut acc = Complex64::default();
                    for (eta, f_eta) in fc.iter().enumerate() {
                        let je = grid.signed_indices(eta);
                        let d = [jx[0] - je[0], jx[1] - je[1], jx[2] - je[2]];
                        if !d.iter().all(|&x| in_range(x)) {
                            continue;
                        }
                        let di = grid.index(grid.wrap_index(d[0]), grid.wrap_index(d[1]), grid.wrap_index(d[2]));
                        acc += eval(xi, eta, di) * f_eta * gc[di];
                    }
                    acc * inv_vol
                })
                .collect()
        })
        .collect();
    SpectralField::from_coefficients(grid, coeffs, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_path_refuses_large_grids() {
        let g = Grid3::new(1.0, 32).unwrap();
        let f = SpectralField::zeros(g, 1);
        let m = BilinearSymbol::general(|_, _| Complex64::new(1.0, 0.0));
        assert!(matches!(
            pseudo_product(&m, &f, &f),
            Err(Error::CostGuard { .. })
        ));
    }

    #[test]
    fn factored_rejects_vector_factors() {
        let one = MultiplierSymbol::bracket(0.0);
        assert!(BilinearSymbol::factored(MultiplierSymbol::riesz(), one.clone(), one).is_err());
    }
}
