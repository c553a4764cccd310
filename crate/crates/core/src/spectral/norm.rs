use rayon::prelude::*;

use super::field::SpectralField;
use super::multiplier::{bracket, norm3, MultiplierSymbol};
use crate::error::{invalid_param, Result};

/// Which discrete norm to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormSpec {
    L2,
    /// `‖⟨D⟩^s f‖₂`
    Sobolev(f64),
    /// Riemann-cell quadrature of `|f|^p`.
    Lp(f64),
    /// `‖⟨D⟩^s f‖_p`
    W(f64, f64),
    /// Grid maximum of `|f|`.
    LInf,
}

/// Norm of one field; vector fields use the pointwise Euclidean modulus.
pub fn discrete_norm(f: &SpectralField, spec: NormSpec) -> Result<f64> {
    discrete_norm_many(&[f], spec)
}

/// Norm of a tuple of fields on one grid, treated as a single
/// vector-valued field (e.g. `(A, B)` has four complex components).
pub fn discrete_norm_many(fields: &[&SpectralField], spec: NormSpec) -> Result<f64> {
    let Some(first) = fields.first() else {
        return Ok(0.0);
    };
    for f in fields {
        first.grid().ensure_same(f.grid())?;
    }
    match spec {
        NormSpec::L2 => Ok(sobolev(fields, 0.0)),
        NormSpec::Sobolev(s) => Ok(sobolev(fields, s)),
        NormSpec::Lp(p) => lebesgue(fields, p),
        NormSpec::LInf => lebesgue(fields, f64::INFINITY),
        NormSpec::W(s, p) => {
            let sym = MultiplierSymbol::bracket_power(1.0, s);
            let lifted = fields
                .iter()
                .map(|f| sym.apply(f))
                .collect::<Result<Vec<_>>>()?;
            let refs: Vec<&SpectralField> = lifted.iter().collect();
            lebesgue(&refs, p)
        }
    }
}

fn sobolev(fields: &[&SpectralField], s: f64) -> f64 {
    let g = *fields[0].grid();
    let weights: Vec<f64> = (0..g.len())
        .into_par_iter()
        .map(|i| bracket(1.0, norm3(g.wavevector(i))).powf(2.0 * s))
        .collect();
    let sum: f64 = fields
        .iter()
        .flat_map(|f| f.all_coefficients().iter())
        .map(|c| {
            ordered_sum(c.len(), |i| c[i].norm_sqr() * weights[i])
        })
        .sum();
    (sum / g.volume()).sqrt()
}

/// Parallel sum with a fixed association order, so results do not depend
/// on the thread count.
fn ordered_sum(len: usize, term: impl Fn(usize) -> f64 + Sync) -> f64 {
    const CHUNK: usize = 4096;
    let partial: Vec<f64> = (0..len.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| (c * CHUNK..((c + 1) * CHUNK).min(len)).map(&term).sum())
        .collect();
    partial.iter().sum()
}

fn pointwise_modulus(fields: &[&SpectralField]) -> Vec<f64> {
    let g = *fields[0].grid();
    let mut sq = vec![0.0; g.len()];
    for f in fields {
        for v in f.values() {
            sq.par_iter_mut().zip(v.par_iter()).for_each(|(s, z)| *s += z.norm_sqr());
        }
    }
    sq.into_par_iter().map(f64::sqrt).collect()
}

fn lebesgue(fields: &[&SpectralField], p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(invalid_param("p", format!("Lebesgue exponent must exceed 1, got {p}")));
    }
    let modulus = pointwise_modulus(fields);
    if p.is_infinite() {
        return Ok(modulus.into_par_iter().reduce(|| 0.0, f64::max));
    }
    let w = fields[0].grid().cell_volume();
    let sum = ordered_sum(modulus.len(), |i| modulus[i].powf(p));
    Ok((sum * w).powf(1.0 / p))
}

/// `L²` norm by real-space quadrature (Parseval cross-check).
pub fn l2_quadrature(f: &SpectralField) -> f64 {
    let w = f.grid().cell_volume();
    let m = pointwise_modulus(&[f]);
    (m.iter().map(|x| x * x).sum::<f64>() * w).sqrt()
}
