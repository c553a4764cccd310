use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::phase::{phase_eta_gradient, phase_value, PhaseSpec};
use super::scan::{IntervalSet, ResonanceReport};
use crate::diagnostics::{fit_power_law, DecayFit};
use crate::error::{invalid_param, Error, Result};
use crate::spectral::{norm3, BilinearSymbol, Grid3, MultiplierSymbol, ZeroModePolicy};

/// Quintic smoothstep: 0 for `x ≤ 0`, 1 for `x ≥ 1`, `C²` in between.
pub fn smoothstep(x: f64) -> f64 {
    let t = x.clamp(0.0, 1.0);
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

/// Radial bump equal to 1 on `[0, 1]` and 0 on `[2, ∞)`.
pub fn theta(x: f64) -> f64 {
    1.0 - smoothstep(x - 1.0)
}

#[derive(Debug, Clone)]
struct PhaseResonanceSet {
    spec: PhaseSpec,
    points: Vec<(f64, f64)>,
}

/// Smooth frequency cutoffs derived from a separated resonance report.
#[derive(Debug, Clone)]
pub struct CutoffSuite {
    pub m0: f64,
    pub delta0: f64,
    grid: Grid3,
    outcome: IntervalSet,
    phases: Vec<PhaseResonanceSet>,
    /// `θ(|ξ|)` on the grid.
    pub theta: Vec<f64>,
    /// `θ(|ξ| / M0)`.
    pub z_low: Vec<f64>,
    /// `1 − θ(|ξ| / M0)`.
    pub z_high: Vec<f64>,
    /// Equal to 1 within `δ0/2` of the outcome radii and 0 beyond `δ0`.
    pub chi_outcome: Vec<f64>,
    pub chi_outcome_complement: Vec<f64>,
}

/// Maximum of `|χ_S / φ|` per radial shell with its power-law fit.
#[derive(Debug, Clone)]
pub struct GrowthFit {
    pub radii: Vec<f64>,
    pub maxima: Vec<f64>,
    pub all_finite: bool,
    pub fit: Option<DecayFit>,
}

pub fn build_cutoff_suite(report: &ResonanceReport, m0: f64, grid: &Grid3) -> Result<CutoffSuite> {
    if !report.separated {
        return Err(Error::NotSeparated(format!(
            "outcome {} meets germ {} at c_s = {}",
            report.outcome, report.germ, report.c_s
        )));
    }
    if !(m0 >= report.c_r) {
        return Err(invalid_param("M0", format!("must be at least C_R = {}, got {m0}", report.c_r)));
    }
    let phases = report
        .phases
        .iter()
        .map(|p| PhaseResonanceSet {
            spec: p.spec,
            points: p.points.iter().map(|q| (q.s, q.r)).collect(),
        })
        .collect();
    let mut suite = CutoffSuite {
        m0,
        delta0: report.delta0,
        grid: *grid,
        outcome: report.outcome.clone(),
        phases,
        theta: Vec::new(),
        z_low: Vec::new(),
        z_high: Vec::new(),
        chi_outcome: Vec::new(),
        chi_outcome_complement: Vec::new(),
    };
    let radii: Vec<f64> = (0..grid.len()).map(|i| norm3(grid.wavevector(i))).collect();
    suite.theta = radii.iter().map(|&k| theta(k)).collect();
    suite.z_low = radii.iter().map(|&k| theta(k / m0)).collect();
    suite.z_high = radii.iter().map(|&k| 1.0 - theta(k / m0)).collect();
    suite.chi_outcome = radii.iter().map(|&k| suite.chi_o(k)).collect();
    suite.chi_outcome_complement = radii.iter().map(|&k| suite.chi_o_complement(k)).collect();
    Ok(suite)
}

fn table_symbol(table: &[f64]) -> MultiplierSymbol {
    MultiplierSymbol::custom(table.iter().map(|&v| Complex64::new(v, 0.0)).collect(), ZeroModePolicy::Identity)
}

impl CutoffSuite {
    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    /// `χ_O(|ξ|)`.
    pub fn chi_o(&self, k: f64) -> f64 {
        if self.outcome.is_empty() {
            return 0.0;
        }
        let d = self.outcome.distance_to(k);
        smoothstep((self.delta0 - d) / (0.5 * self.delta0))
    }

    pub fn chi_o_complement(&self, k: f64) -> f64 {
        1.0 - self.chi_o(k)
    }

    pub fn low_pass(&self) -> MultiplierSymbol {
        table_symbol(&self.z_low)
    }

    pub fn high_pass(&self) -> MultiplierSymbol {
        table_symbol(&self.z_high)
    }

    /// Multiplier removing a neighbourhood of the outcome radii.
    pub fn outcome_complement(&self) -> MultiplierSymbol {
        table_symbol(&self.chi_outcome_complement)
    }

    pub fn outcome_cutoff(&self) -> MultiplierSymbol {
        table_symbol(&self.chi_outcome)
    }

    fn phase_set(&self, spec: &PhaseSpec) -> Result<&PhaseResonanceSet> {
        self.phases
            .iter()
            .find(|p| p.spec == *spec)
            .ok_or_else(|| invalid_param("phase", format!("{spec} is not part of the report")))
    }

    /// Distance in `R⁶` from `(ξ, η)` to the resonant spheres of `spec`.
    pub fn resonance_distance(&self, spec: &PhaseSpec, xi: [f64; 3], eta: [f64; 3]) -> Result<f64> {
        let set = self.phase_set(spec)?;
        let base = norm3(xi).powi(2) + norm3(eta).powi(2);
        Ok(set
            .points
            .iter()
            .map(|&(s, r)| {
                let w = [0, 1, 2].map(|i| s * xi[i] + r * eta[i]);
                (base + s * s + r * r - 2.0 * norm3(w)).max(0.0).sqrt()
            })
            .fold(f64::INFINITY, f64::min))
    }

    /// Switches from 0 at distance `δ0/20` from the resonances to 1 at `δ0/10`.
    fn resonance_guard(&self, spec: &PhaseSpec, xi: [f64; 3], eta: [f64; 3]) -> Result<f64> {
        let d = self.resonance_distance(spec, xi, eta)?;
        if d.is_infinite() {
            return Ok(1.0);
        }
        let lo = self.delta0 / 20.0;
        Ok(smoothstep((d - lo) / lo))
    }

    /// `(χ_S, χ_T)`: `χ_S` vanishes on the time resonances, `χ_T` on the
    /// space resonances; they sum to 1 at distance `> δ0/10` from the
    /// resonant set.
    pub fn chi_time_space(&self, spec: &PhaseSpec, xi: [f64; 3], eta: [f64; 3]) -> Result<(f64, f64)> {
        let guard = self.resonance_guard(spec, xi, eta)?;
        let phi = phase_value(spec, xi, eta);
        let g = norm3(phase_eta_gradient(spec, xi, eta));
        let den = phi * phi + g * g;
        if den == 0.0 {
            return Ok((0.0, 0.0));
        }
        Ok((guard * phi * phi / den, guard * g * g / den))
    }

    pub fn chi_s(&self, spec: &PhaseSpec, xi: [f64; 3], eta: [f64; 3]) -> Result<f64> {
        Ok(self.chi_time_space(spec, xi, eta)?.0)
    }

    pub fn chi_t(&self, spec: &PhaseSpec, xi: [f64; 3], eta: [f64; 3]) -> Result<f64> {
        Ok(self.chi_time_space(spec, xi, eta)?.1)
    }

    /// `χ_S / φ`, finite wherever the guard is active.
    pub fn chi_s_over_phi(&self, spec: &PhaseSpec, xi: [f64; 3], eta: [f64; 3]) -> Result<f64> {
        let guard = self.resonance_guard(spec, xi, eta)?;
        let phi = phase_value(spec, xi, eta);
        let g = norm3(phase_eta_gradient(spec, xi, eta));
        let den = phi * phi + g * g;
        Ok(if guard == 0.0 { 0.0 } else { guard * phi / den })
    }

    /// Paraproduct cutoff supported where `|ξ−η| ≤ 2|η|` away from the origin.
    pub fn zeta1(&self, xi: [f64; 3], eta: [f64; 3]) -> f64 {
        let d = norm3([xi[0] - eta[0], xi[1] - eta[1], xi[2] - eta[2]]);
        let e = norm3(eta);
        let low = theta(2.0 * (norm3(xi).powi(2) + e * e).sqrt());
        let angular = if e + d == 0.0 { 0.5 } else { smoothstep(3.0 * (2.0 / 3.0 - d / (e + d))) };
        0.5 * low + (1.0 - low) * angular
    }

    pub fn zeta2(&self, xi: [f64; 3], eta: [f64; 3]) -> f64 {
        1.0 - self.zeta1(xi, eta)
    }

    pub fn chi_s_symbol(&self, spec: &PhaseSpec) -> Result<BilinearSymbol> {
        self.phase_set(spec)?;
        let (suite, spec) = (self.clone(), *spec);
        Ok(BilinearSymbol::general(move |xi, eta| {
            Complex64::new(suite.chi_s(&spec, xi, eta).expect("phase checked"), 0.0)
        }))
    }

    pub fn chi_t_symbol(&self, spec: &PhaseSpec) -> Result<BilinearSymbol> {
        self.phase_set(spec)?;
        let (suite, spec) = (self.clone(), *spec);
        Ok(BilinearSymbol::general(move |xi, eta| {
            Complex64::new(suite.chi_t(&spec, xi, eta).expect("phase checked"), 0.0)
        }))
    }

    pub fn zeta1_symbol(&self) -> BilinearSymbol {
        let suite = self.clone();
        BilinearSymbol::general(move |xi, eta| Complex64::new(suite.zeta1(xi, eta), 0.0))
    }

    pub fn zeta2_symbol(&self) -> BilinearSymbol {
        let suite = self.clone();
        BilinearSymbol::general(move |xi, eta| Complex64::new(suite.zeta2(xi, eta), 0.0))
    }

    /// Samples `|χ_S/φ|` on random points of the shells `|(ξ, η)| = ρ` and fits
    /// the growth of the per-shell maxima.
    pub fn chi_s_over_phi_growth(&self, spec: &PhaseSpec, radii: &[f64], per_shell: usize, seed: u64) -> Result<GrowthFit> {
        self.phase_set(spec)?;
        let maxima: Vec<f64> = radii
            .par_iter()
            .enumerate()
            .map(|(i, &rho)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
                (0..per_shell)
                    .map(|_| {
                        let v: [f64; 6] = std::array::from_fn(|_| rng.sample(StandardNormal));
                        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                        let xi = [v[0], v[1], v[2]].map(|x| rho * x / n);
                        let eta = [v[3], v[4], v[5]].map(|x| rho * x / n);
                        self.chi_s_over_phi(spec, xi, eta).expect("phase checked").abs()
                    })
                    .fold(0.0, f64::max)
            })
            .collect();
        let all_finite = maxima.iter().all(|m| m.is_finite());
        let fit = if all_finite && maxima.iter().all(|&m| m > 0.0) {
            fit_power_law(radii, &maxima, None).ok()
        } else {
            None
        };
        Ok(GrowthFit {
            radii: radii.to_vec(),
            maxima,
            all_finite,
            fit,
        })
    }
}
