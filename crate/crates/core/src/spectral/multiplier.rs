use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::field::SpectralField;
use super::grid::Grid3;
use crate::error::{Error, Result};

/// `⟨x⟩_α = sqrt(1 + α² x²)`.
#[inline]
pub fn bracket(alpha: f64, x: f64) -> f64 {
    (1.0 + alpha * alpha * x * x).sqrt()
}

#[inline]
pub(crate) fn norm3(k: [f64; 3]) -> f64 {
    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt()
}

/// What happens to the `k = 0` lattice point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroModePolicy {
    /// The output mean is zero.
    Annihilate,
    /// The symbol is evaluated at `ξ = 0` like any other point. Only
    /// allowed for symbols that are regular there.
    Identity,
    /// A nonzero input mean is rejected.
    Error,
}

#[derive(Debug, Clone)]
pub enum SymbolKind {
    /// `⟨ξ⟩_α`
    Bracket { alpha: f64 },
    /// `⟨ξ⟩_α^s`
    BracketPower { alpha: f64, power: f64 },
    /// `|ξ|`
    Modulus,
    /// `1/|ξ|`
    InverseModulus,
    /// `iξ/|ξ|`: maps a scalar to a vector and a vector to a scalar
    /// (divergence form).
    Riesz,
    /// `⟨ξ⟩_α/|ξ|`; with `α = 1` this is the operator `A`.
    BracketOverModulus { alpha: f64 },
    /// `(iξ/|ξ|) ×`, vector to vector.
    RieszCurl,
    /// `exp(i t ⟨ξ⟩_α)`, the linear Klein-Gordon group.
    Propagator { alpha: f64, time: f64 },
    /// Complex table sampled on the lattice of a specific grid.
    Custom(Arc<Vec<Complex64>>),
}

#[derive(Debug, Clone)]
pub struct MultiplierSymbol {
    kind: SymbolKind,
    zero_mode: ZeroModePolicy,
}

impl MultiplierSymbol {
    pub fn new(kind: SymbolKind, zero_mode: ZeroModePolicy) -> Result<Self> {
        let s = Self { kind, zero_mode };
        if s.is_singular() && zero_mode == ZeroModePolicy::Identity {
            return Err(Error::InvalidSymbol(format!(
                "{:?} is singular at the origin and needs a non-identity zero-mode policy",
                s.kind
            )));
        }
        Ok(s)
    }

    pub fn bracket(alpha: f64) -> Self {
        Self::regular(SymbolKind::Bracket { alpha })
    }

    pub fn bracket_power(alpha: f64, power: f64) -> Self {
        Self::regular(SymbolKind::BracketPower { alpha, power })
    }

    pub fn modulus() -> Self {
        Self::regular(SymbolKind::Modulus)
    }

    pub fn inverse_modulus() -> Self {
        Self::annihilating(SymbolKind::InverseModulus)
    }

    pub fn riesz() -> Self {
        Self::annihilating(SymbolKind::Riesz)
    }

    pub fn bracket_over_modulus(alpha: f64) -> Self {
        Self::annihilating(SymbolKind::BracketOverModulus { alpha })
    }

    pub fn riesz_curl() -> Self {
        Self::annihilating(SymbolKind::RieszCurl)
    }

    pub fn propagator(alpha: f64, time: f64) -> Self {
        Self::regular(SymbolKind::Propagator { alpha, time })
    }

    pub fn custom(table: Vec<Complex64>, zero_mode: ZeroModePolicy) -> Self {
        Self {
            kind: SymbolKind::Custom(Arc::new(table)),
            zero_mode,
        }
    }

    /// Samples a real scalar symbol on the lattice of `grid`.
    pub fn sampled(grid: &Grid3, zero_mode: ZeroModePolicy, f: impl Fn([f64; 3]) -> f64 + Sync) -> Self {
        let table = (0..grid.len())
            .into_par_iter()
            .map(|i| Complex64::new(f(grid.wavevector(i)), 0.0))
            .collect();
        Self::custom(table, zero_mode)
    }

    fn regular(kind: SymbolKind) -> Self {
        Self {
            kind,
            zero_mode: ZeroModePolicy::Identity,
        }
    }

    fn annihilating(kind: SymbolKind) -> Self {
        Self {
            kind,
            zero_mode: ZeroModePolicy::Annihilate,
        }
    }

    pub fn with_zero_mode(self, zero_mode: ZeroModePolicy) -> Result<Self> {
        Self::new(self.kind, zero_mode)
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    pub fn zero_mode(&self) -> ZeroModePolicy {
        self.zero_mode
    }

    pub fn is_singular(&self) -> bool {
        matches!(
            self.kind,
            SymbolKind::InverseModulus
                | SymbolKind::Riesz
                | SymbolKind::BracketOverModulus { .. }
                | SymbolKind::RieszCurl
        )
    }

    /// Value of a scalar-valued symbol at a nonzero wavevector.
    fn scalar_value(&self, k: [f64; 3], idx: usize) -> Complex64 {
        let m = norm3(k);
        let re = |x: f64| Complex64::new(x, 0.0);
        match &self.kind {
            SymbolKind::Bracket { alpha } => re(bracket(*alpha, m)),
            SymbolKind::BracketPower { alpha, power } => re(bracket(*alpha, m).powf(*power)),
            SymbolKind::Modulus => re(m),
            SymbolKind::InverseModulus => re(1.0 / m),
            SymbolKind::BracketOverModulus { alpha } => re(bracket(*alpha, m) / m),
            SymbolKind::Propagator { alpha, time } => Complex64::from_polar(1.0, time * bracket(*alpha, m)),
            SymbolKind::Custom(t) => t[idx],
            SymbolKind::Riesz | SymbolKind::RieszCurl => unreachable!("vector symbol"),
        }
    }

    fn preserves_reality(&self) -> bool {
        match &self.kind {
            SymbolKind::Propagator { time, .. } => *time == 0.0,
            SymbolKind::Custom(_) => false,
            _ => true,
        }
    }

    /// `σ(D) f`. Scalar symbols act componentwise; see [`SymbolKind`] for
    /// the vector kinds.
    pub fn apply(&self, f: &SpectralField) -> Result<SpectralField> {
        self.apply_named(f, "input")
    }

    pub fn apply_named(&self, f: &SpectralField, name: &str) -> Result<SpectralField> {
        let g = *f.grid();
        if let SymbolKind::Custom(t) = &self.kind {
            if t.len() != g.len() {
                return Err(Error::GridMismatch(format!(
                    "symbol table has {} entries, grid has {}",
                    t.len(),
                    g.len()
                )));
            }
        }
        if self.zero_mode == ZeroModePolicy::Error {
            let scale = f.max_coefficient();
            for (c, v) in f.all_coefficients().iter().enumerate() {
                if v[0].norm() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
                    return Err(Error::ConstraintViolation {
                        field: name.to_string(),
                        detail: format!("component {c} has nonzero mean {}", v[0] / g.volume()),
                    });
                }
            }
        }
        let keep_zero = self.zero_mode == ZeroModePolicy::Identity;
        let mut out = match &self.kind {
            SymbolKind::Riesz => match f.n_components() {
                1 => {
                    let src = f.coefficients(0);
                    let coeffs = (0..3)
                        .map(|a| {
                            (0..g.len())
                                .into_par_iter()
                                .map(|i| {
                                    let k = g.wavevector(i);
                                    let m = norm3(k);
                                    if i == 0 || m == 0.0 {
                                        return Complex64::default();
                                    }
                                    Complex64::new(0.0, k[a] / m) * src[i]
                                })
                                .collect()
                        })
                        .collect();
                    SpectralField::from_coefficients(g, coeffs, f.is_real())?
                }
                _ => {
                    let c = f.all_coefficients();
                    let out = (0..g.len())
                        .into_par_iter()
                        .map(|i| {
                            let k = g.wavevector(i);
                            let m = norm3(k);
                            if i == 0 || m == 0.0 {
                                return Complex64::default();
                            }
                            let dot = c[0][i] * k[0] + c[1][i] * k[1] + c[2][i] * k[2];
                            Complex64::new(0.0, 1.0 / m) * dot
                        })
                        .collect();
                    SpectralField::from_coefficients(g, vec![out], f.is_real())?
                }
            },
            SymbolKind::RieszCurl => {
                f.expect_components(3)?;
                let c = f.all_coefficients();
                let coeffs = (0..3)
                    .map(|a| {
                        let (b, d) = ((a + 1) % 3, (a + 2) % 3);
                        (0..g.len())
                            .into_par_iter()
                            .map(|i| {
                                let k = g.wavevector(i);
                                let m = norm3(k);
                                if i == 0 || m == 0.0 {
                                    return Complex64::default();
                                }
                                let cross = c[d][i] * k[b] - c[b][i] * k[d];
                                Complex64::new(0.0, 1.0 / m) * cross
                            })
                            .collect()
                    })
                    .collect();
                SpectralField::from_coefficients(g, coeffs, f.is_real())?
            }
            _ => {
                let coeffs = f.map_modes(|_, i, z| {
                    if i == 0 {
                        if keep_zero {
                            return self.value_at_origin(i) * z;
                        }
                        return Complex64::default();
                    }
                    self.scalar_value(g.wavevector(i), i) * z
                });
                let mut out = SpectralField::from_coefficients(g, coeffs, f.is_real())?;
                out.set_real(f.is_real() && self.preserves_reality());
                out
            }
        };
        if matches!(self.kind, SymbolKind::Riesz | SymbolKind::RieszCurl) {
            out.zero_nyquist();
        }
        Ok(out)
    }

    /// Value of a scalar symbol at one lattice point of `grid`, with the
    /// zero-mode policy applied (`Error` reads as zero).
    pub fn value_at(&self, grid: &Grid3, idx: usize) -> Complex64 {
        if idx == 0 {
            return if self.zero_mode == ZeroModePolicy::Identity {
                self.value_at_origin(idx)
            } else {
                Complex64::default()
            };
        }
        self.scalar_value(grid.wavevector(idx), idx)
    }

    fn value_at_origin(&self, idx: usize) -> Complex64 {
        match &self.kind {
            SymbolKind::Custom(t) => t[idx],
            SymbolKind::Modulus => Complex64::default(),
            _ => self.scalar_value([0.0; 3], idx),
        }
    }
}

/// `σ(D) f`.
pub fn apply_multiplier(f: &SpectralField, symbol: &MultiplierSymbol) -> Result<SpectralField> {
    symbol.apply(f)
}

/// `∇f` of a scalar field (Nyquist planes zeroed).
pub fn gradient(f: &SpectralField) -> Result<SpectralField> {
    f.expect_components(1)?;
    let g = *f.grid();
    let src = f.coefficients(0);
    let coeffs = (0..3)
        .map(|a| {
            (0..g.len())
                .into_par_iter()
                .map(|i| {
                    if g.is_nyquist(i) {
                        return Complex64::default();
                    }
                    Complex64::new(0.0, g.wavevector(i)[a]) * src[i]
                })
                .collect()
        })
        .collect();
    SpectralField::from_coefficients(g, coeffs, f.is_real())
}

/// `∇·v` of a vector field.
pub fn divergence(v: &SpectralField) -> Result<SpectralField> {
    v.expect_components(3)?;
    let g = *v.grid();
    let c = v.all_coefficients();
    let out = (0..g.len())
        .into_par_iter()
        .map(|i| {
            if g.is_nyquist(i) {
                return Complex64::default();
            }
            let k = g.wavevector(i);
            Complex64::new(0.0, 1.0) * (c[0][i] * k[0] + c[1][i] * k[1] + c[2][i] * k[2])
        })
        .collect();
    SpectralField::from_coefficients(g, vec![out], v.is_real())
}

/// `∇×v` of a vector field.
pub fn curl(v: &SpectralField) -> Result<SpectralField> {
    v.expect_components(3)?;
    let g = *v.grid();
    let c = v.all_coefficients();
    let coeffs = (0..3)
        .map(|a| {
            let (b, d) = ((a + 1) % 3, (a + 2) % 3);
            (0..g.len())
                .into_par_iter()
                .map(|i| {
                    if g.is_nyquist(i) {
                        return Complex64::default();
                    }
                    let k = g.wavevector(i);
                    Complex64::new(0.0, 1.0) * (c[d][i] * k[b] - c[b][i] * k[d])
                })
                .collect()
        })
        .collect();
    SpectralField::from_coefficients(g, coeffs, v.is_real())
}

fn helmholtz(v: &SpectralField, keep_gradient: bool) -> Result<SpectralField> {
    v.expect_components(3)?;
    let g = *v.grid();
    let c = v.all_coefficients();
    let projected: Vec<[Complex64; 3]> = (0..g.len())
        .into_par_iter()
        .map(|i| {
            let k = g.wavevector(i);
            let m2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if i == 0 || m2 == 0.0 {
                return [Complex64::default(); 3];
            }
            let dot = (c[0][i] * k[0] + c[1][i] * k[1] + c[2][i] * k[2]) / m2;
            let mut out = [Complex64::default(); 3];
            for a in 0..3 {
                let q = dot * k[a];
                out[a] = if keep_gradient { q } else { c[a][i] - q };
            }
            out
        })
        .collect();
    let coeffs = (0..3)
        .map(|a| projected.iter().map(|p| p[a]).collect())
        .collect();
    SpectralField::from_coefficients(g, coeffs, v.is_real())
}

/// Divergence-free part `P v`, `(Id - kk^T/|k|^2) v̂`; the mean is annihilated.
pub fn helmholtz_p(v: &SpectralField) -> Result<SpectralField> {
    helmholtz(v, false)
}

/// Curl-free part `Q v`, `(kk^T/|k|^2) v̂`; the mean is annihilated.
pub fn helmholtz_q(v: &SpectralField) -> Result<SpectralField> {
    helmholtz(v, true)
}
