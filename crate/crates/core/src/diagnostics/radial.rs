use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::fit::{fit_power_law, DecayFit};
use crate::error::{invalid_param, Error, Result};
use crate::spectral::bracket;

/// Radial datum with closed-form Fourier transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialDatum {
    /// `exp(−r² / (2 w²))`.
    Gaussian { width: f64 },
}

impl Default for RadialDatum {
    fn default() -> Self {
        RadialDatum::Gaussian { width: 1.0 }
    }
}

impl RadialDatum {
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            RadialDatum::Gaussian { width } => (-0.5 * (r / width).powi(2)).exp(),
        }
    }

    /// `∫ f(x) e^{−ik·x} dx` as a function of `|k|`.
    pub fn spectrum(&self, k: f64) -> f64 {
        match *self {
            RadialDatum::Gaussian { width } => (2.0 * PI).powf(1.5) * width.powi(3) * (-0.5 * (k * width).powi(2)).exp(),
        }
    }

    /// Wavenumber beyond which the spectrum is below `1e−17` of its peak.
    fn cutoff(&self) -> f64 {
        match *self {
            RadialDatum::Gaussian { width } => (2.0 * 17.0 * 10f64.ln()).sqrt() / width,
        }
    }

    /// Radius beyond which the datum is negligible.
    fn extent(&self) -> f64 {
        match *self {
            RadialDatum::Gaussian { width } => 12.0 * width,
        }
    }
}

/// `e^{it⟨D⟩_α} f` for a radial datum via
/// `u(r) = (2π² r)⁻¹ ∫₀^∞ k sin(kr) e^{it⟨k⟩_α} f̂(k) dk`.
///
/// The integrand is even in `k` and decays like the datum's spectrum, so
/// the trapezoid rule converges spectrally once the node spacing resolves
/// the largest phase rate `r + t`.
#[derive(Debug, Clone)]
pub struct RadialPropagator {
    pub speed: f64,
    pub datum: RadialDatum,
    /// Radial mesh spacing used for norms.
    pub mesh_step: f64,
}

/// Radial samples of a propagated datum.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub time: f64,
    pub radii: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl RadialSolution {
    /// `‖u‖_{L^p(R³)}` with `4π∫ r²|u|^p dr` by the trapezoid rule;
    /// `p = ∞` gives the mesh maximum.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        }
        let h = self.radii[1] - self.radii[0];
        let n = self.radii.len();
        let sum: f64 = (0..n)
            .map(|i| {
                let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                w * self.radii[i].powi(2) * self.values[i].norm().powf(p)
            })
            .sum();
        (4.0 * PI * h * sum).powf(1.0 / p)
    }
}

struct KNodes {
    weights: Vec<Complex64>,
    k: Vec<f64>,
}

impl RadialPropagator {
    pub fn new(speed: f64, datum: RadialDatum) -> Result<Self> {
        if !(speed > 0.0 && speed <= 1.0) {
            return Err(invalid_param("speed", format!("must lie in (0, 1], got {speed}")));
        }
        Ok(Self {
            speed,
            datum,
            mesh_step: 0.05,
        })
    }

    fn nodes(&self, t: f64, r_max: f64, refine: u32) -> KNodes {
        let kmax = self.datum.cutoff();
        let rate = r_max + t.abs() * self.speed + 40.0;
        let n = ((kmax * rate / (2.0 * PI)).ceil() as usize).max(64) << refine;
        let dk = kmax / n as f64;
        let (k, weights) = (0..=n)
            .map(|i| {
                let k = i as f64 * dk;
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                let phase = Complex64::from_polar(1.0, t * bracket(self.speed, k));
                (k, phase * (w * dk * k * self.datum.spectrum(k) / (2.0 * PI * PI)))
            })
            .unzip();
        KNodes { weights, k }
    }

    fn eval(nodes: &KNodes, r: f64) -> Complex64 {
        if r == 0.0 {
            nodes.k.iter().zip(&nodes.weights).map(|(k, w)| w * k).sum()
        } else {
            nodes.k.iter().zip(&nodes.weights).map(|(k, w)| w * (k * r).sin()).sum::<Complex64>() / r
        }
    }

    /// `u(r, t)` at arbitrary radii.
    pub fn values_at(&self, radii: &[f64], t: f64) -> Vec<Complex64> {
        let r_max = radii.iter().cloned().fold(0.0, f64::max);
        let nodes = self.nodes(t, r_max, 0);
        radii.par_iter().map(|&r| Self::eval(&nodes, r)).collect()
    }

    /// Solution on the mesh `0, h, …, ≥ t + extent`, with a refinement
    /// check on the node spacing.
    pub fn evaluate(&self, t: f64) -> Result<RadialSolution> {
        let r_max = self.speed * t.abs() + self.datum.extent() + 12.0;
        let m = (r_max / self.mesh_step).ceil() as usize;
        let radii: Vec<f64> = (0..=m).map(|i| i as f64 * self.mesh_step).collect();
        let coarse = self.nodes(t, r_max, 0);
        let fine = self.nodes(t, r_max, 1);
        let values: Vec<Complex64> = radii.par_iter().map(|&r| Self::eval(&fine, r)).collect();
        let check: f64 = radii
            .par_iter()
            .zip(&values)
            .map(|(&r, v)| (Self::eval(&coarse, r) - v).norm())
            .reduce(|| 0.0, f64::max);
        let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if check > 1e-10 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Quadrature(format!(
                "radial quadrature not converged at t = {t}: node refinement changed values by {check:.3e}"
            )));
        }
        Ok(RadialSolution { time: t, radii, values })
    }
}

/// `‖e^{it⟨D⟩_α} f‖_{L^p}` at each time.
pub fn linear_decay_series(p: f64, speed: f64, datum: RadialDatum, times: &[f64]) -> Result<Vec<f64>> {
    let prop = RadialPropagator::new(speed, datum)?;
    times.iter().map(|&t| Ok(prop.evaluate(t)?.lp_norm(p))).collect()
}

/// Power-law fit of `‖e^{it⟨D⟩_α} f‖_{L^p}` over `times`.
pub fn linear_decay_experiment(p: f64, speed: f64, datum: RadialDatum, times: &[f64]) -> Result<DecayFit> {
    if !(p >= 1.0) {
        return Err(invalid_param("p", format!("must be at least 1, got {p}")));
    }
    let norms = linear_decay_series(p, speed, datum, times)?;
    let name = if p.is_infinite() { "Linf".to_string() } else { format!("L{p}") };
    Ok(fit_power_law(times, &norms, None)?.named(name))
}

/// `n` geometrically spaced times covering `[t0, t1]`.
pub fn geometric_times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    let ratio = (t1 / t0).powf(1.0 / (n.max(2) - 1) as f64);
    (0..n.max(2)).map(|i| t0 * ratio.powi(i as i32)).collect()
}
