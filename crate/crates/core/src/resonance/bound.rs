use rayon::prelude::*;

use super::phase::{PhaseSpec, Speed};
use crate::error::{invalid_param, Result};
use crate::spectral::bracket;

/// `(√(1 + (c_s C_R)²) − c_s C_R) / 2`.
pub fn phase_lower_bound(c_s: f64, c_r: f64) -> f64 {
    let x = c_s * c_r;
    0.5 * ((1.0 + x * x).sqrt() - x)
}

/// Phases with acoustic output: all signs and all input speeds (16 phases).
pub fn lower_bound_family(c_s: f64) -> Result<Vec<PhaseSpec>> {
    Ok(PhaseSpec::all(c_s)?.into_iter().filter(|p| p.k == Speed::Sound).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundCheck {
    pub min_phi: f64,
    pub bound: f64,
    pub pass: bool,
    /// Phase attaining the sampled minimum.
    pub argmin_phase: PhaseSpec,
    /// `(|ξ|, |η|, cos∠(ξ, η))` at the sampled minimum.
    pub argmin_point: [f64; 3],
    pub samples: usize,
}

/// Samples `|φ|` for every phase of [`lower_bound_family`] on
/// `C0 ≤ |ξ| ≤ 20 C0`, `|η| ≤ C_R`. The phase depends only on `|ξ|`, `|η|`
/// and the angle between them, so `|η|` and `cos∠` are sampled with spacing
/// `step` and `|ξ|` geometrically with ratio `1 + step`.
pub fn verify_phase_lower_bound(c_s: f64, c_r: f64, c0: f64, step: f64) -> Result<LowerBoundCheck> {
    if !(c0 > c_r && c_r > 0.0) {
        return Err(invalid_param("C0", format!("need C0 > C_R > 0, got C0 = {c0}, C_R = {c_r}")));
    }
    if !(step > 0.0 && step < 1.0) {
        return Err(invalid_param("step", format!("must lie in (0, 1), got {step}")));
    }
    let family = lower_bound_family(c_s)?;
    let mut radii = Vec::new();
    let mut x = c0;
    while x < 20.0 * c0 {
        radii.push(x);
        x *= 1.0 + step;
    }
    radii.push(20.0 * c0);
    let n_r = (c_r / step).ceil() as usize;
    let etas: Vec<f64> = (0..=n_r).map(|j| (j as f64 * step).min(c_r)).collect();
    let n_c = (2.0 / step).round() as usize;
    let cosines: Vec<f64> = (0..=n_c).map(|j| (-1.0 + j as f64 * 2.0 / n_c as f64).clamp(-1.0, 1.0)).collect();
    let speeds = [1.0, c_s];
    let speed_index = |s: Speed| match s {
        Speed::Light => 0,
        Speed::Sound => 1,
    };

    let (min_phi, which, point) = radii
        .par_iter()
        .map(|&x| {
            let bx = bracket(c_s, x);
            let mut best = (f64::INFINITY, 0usize, [x, 0.0, 0.0]);
            for &r in &etas {
                let br = speeds.map(|l| bracket(l, r));
                for &c in &cosines {
                    let d = (x * x + r * r - 2.0 * x * r * c).max(0.0).sqrt();
                    let bd = speeds.map(|m| bracket(m, d));
                    for (i, p) in family.iter().enumerate() {
                        let v = (bx + f64::from(p.eps1) * br[speed_index(p.l)] + f64::from(p.eps2) * bd[speed_index(p.m)])
                            .abs();
                        if v < best.0 {
                            best = (v, i, [x, r, c]);
                        }
                    }
                }
            }
            best
        })
        .reduce(
            || (f64::INFINITY, 0, [0.0; 3]),
            |a, b| if b.0 < a.0 { b } else { a },
        );
    let bound = phase_lower_bound(c_s, c_r);
    Ok(LowerBoundCheck {
        min_phi,
        bound,
        pass: min_phi >= bound,
        argmin_phase: family[which],
        argmin_point: point,
        samples: radii.len() * etas.len() * cosines.len() * family.len(),
    })
}
