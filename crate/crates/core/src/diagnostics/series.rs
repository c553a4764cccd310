use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::fit::{linear_fit, DecayFit};
use crate::error::{invalid_param, Error, Result};
use crate::model::{reconstruct, DiagState, PhysicalParams, Profiles};
use crate::resonance::CutoffSuite;
use crate::spectral::{discrete_norm_many, NormSpec, SpectralField};

pub const RECORD_SOBOLEV: &str = "H^N(A,B)";
pub const RECORD_W_P1: &str = "W^{N'',p1}(Zt A,B)";
pub const RECORD_W_P2: &str = "W^{N'',p2}(Zt A,B)";
pub const RECORD_LINF: &str = "Linf(Zt A,B,u,n)";
pub const RECORD_LINF_U: &str = "Linf(Zt u)";
pub const RECORD_PROFILE_INCREMENT: &str = "H^{N-2} profile increment";

/// Sobolev and integrability indices of the tracked norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XNormParams {
    pub n: f64,
    pub n_double_prime: f64,
    pub n_prime: f64,
    pub delta1: f64,
}

impl Default for XNormParams {
    fn default() -> Self {
        Self {
            n: 4.0,
            n_double_prime: 3.0,
            n_prime: 2.0,
            delta1: 0.01,
        }
    }
}

impl XNormParams {
    /// `(1/3 − δ1)⁻¹`.
    pub fn p1(&self) -> f64 {
        1.0 / (1.0 / 3.0 - self.delta1)
    }

    /// `(1/6 + δ1)⁻¹`.
    pub fn p2(&self) -> f64 {
        1.0 / (1.0 / 6.0 + self.delta1)
    }
}

/// Named norm records sampled at increasing times.
#[derive(Debug, Clone, Default)]
pub struct NormSeries {
    pub times: Vec<f64>,
    pub records: BTreeMap<String, Vec<f64>>,
    pub params: XNormParams,
}

impl NormSeries {
    pub fn record(&self, name: &str) -> Option<&[f64]> {
        self.records.get(name).map(Vec::as_slice)
    }

    fn push(&mut self, name: &str, v: f64) {
        self.records.entry(name.to_string()).or_default().push(v);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.records.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn norm(fields: &[&SpectralField], spec: NormSpec) -> f64 {
    discrete_norm_many(fields, spec).expect("fields share a grid")
}

/// Evaluates the tracked norm components at each snapshot. The filtered
/// records use the multiplier that removes a neighbourhood of the outcome
/// radii.
pub fn measure_x_components(
    snapshots: &[DiagState],
    suite: &CutoffSuite,
    params: &PhysicalParams,
    x: XNormParams,
) -> Result<NormSeries> {
    if snapshots.windows(2).any(|w| w[1].time <= w[0].time) {
        return Err(invalid_param("snapshots", "times must be strictly increasing"));
    }
    if let Some(s) = snapshots.first() {
        s.grid().ensure_same(suite.grid())?;
    }
    let filter = suite.outcome_complement();
    let rows: Vec<[f64; 5]> = snapshots
        .par_iter()
        .map(|d| {
            let phys = reconstruct(d, params);
            let fa = filter.apply(&d.a).expect("scalar");
            let fb = filter.apply(&d.bc).expect("vector");
            let fu = filter.apply(&phys.u).expect("vector");
            let fnn = filter.apply(&phys.n).expect("scalar");
            [
                d.sobolev_norm(x.n),
                norm(&[&fa, &fb], NormSpec::W(x.n_double_prime, x.p1())),
                norm(&[&fa, &fb], NormSpec::W(x.n_double_prime, x.p2())),
                norm(&[&fa, &fb, &fu, &fnn], NormSpec::LInf),
                norm(&[&fu], NormSpec::LInf),
            ]
        })
        .collect();
    let mut series = NormSeries {
        params: x,
        ..Default::default()
    };
    let mut previous: Option<Profiles> = None;
    for (d, row) in snapshots.iter().zip(rows) {
        series.times.push(d.time);
        for (name, v) in [RECORD_SOBOLEV, RECORD_W_P1, RECORD_W_P2, RECORD_LINF, RECORD_LINF_U].iter().zip(row) {
            series.push(name, v);
        }
        let profile = Profiles::from_diag(d, params);
        let inc = previous.as_ref().map_or(0.0, |p| profile.distance(p, x.n - 2.0));
        series.push(RECORD_PROFILE_INCREMENT, inc);
        previous = Some(profile);
    }
    Ok(series)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyGrowth {
    /// `max_t ‖·‖(t) / ‖·‖(0)`.
    pub growth_factor: f64,
    /// Slope of `log ‖·‖` against `log ⟨t⟩`.
    pub fitted_c0_eps: f64,
}

pub fn energy_growth_fit(times: &[f64], norms: &[f64]) -> Result<EnergyGrowth> {
    if times.len() != norms.len() || times.len() < 2 {
        return Err(Error::Fit(format!(
            "need matching series of at least 2 points, got {} and {}",
            times.len(),
            norms.len()
        )));
    }
    let n0 = norms[0];
    if !(n0 > 0.0) {
        return Err(Error::Fit("initial norm must be positive".into()));
    }
    let growth_factor = norms.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / n0;
    let lx: Vec<f64> = times.iter().map(|t| (1.0 + t * t).sqrt().ln()).collect();
    let ly: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let (slope, _, _) = linear_fit(&lx, &ly);
    Ok(EnergyGrowth {
        growth_factor,
        fitted_c0_eps: if slope.is_finite() { slope } else { 0.0 },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringCheck {
    pub times: Vec<f64>,
    pub increments: Vec<f64>,
    pub converging: bool,
}

/// Allowed relative growth between consecutive increments.
pub const INCREMENT_JITTER: f64 = 0.2;
/// Required ratio between the last and first increment.
pub const INCREMENT_DECAY: f64 = 0.1;

/// Cauchy test on profiles at increasing times: successive `H^s` increments
/// must not grow (up to jitter) and must shrink by a factor 10 overall.
pub fn scattering_check(profiles: &[Profiles], sobolev_index: f64) -> Result<ScatteringCheck> {
    if profiles.len() < 3 {
        return Err(invalid_param("profiles", "need at least three profile snapshots"));
    }
    let increments: Vec<f64> = profiles.windows(2).map(|w| w[1].distance(&w[0], sobolev_index)).collect();
    let scale = profiles.iter().map(|p| p.sobolev_norm(sobolev_index)).fold(0.0, f64::max);
    let first = increments[0];
    let last = *increments.last().expect("nonempty");
    let converging = if first <= 1e-14 * scale {
        increments.iter().all(|&i| i <= 1e-14 * scale)
    } else {
        let monotone = increments.windows(2).all(|w| w[1] <= (1.0 + INCREMENT_JITTER) * w[0]);
        monotone && last < INCREMENT_DECAY * first
    };
    Ok(ScatteringCheck {
        times: profiles.iter().map(|p| p.time).collect(),
        increments,
        converging,
    })
}

/// `H^s` norm of the fields multiplied by `|x − x_center|`. A box-centred
/// stand-in for the whole-space weight; only trends are meaningful.
pub fn windowed_weight_norm(fields: &[&SpectralField], sobolev_index: f64) -> Result<f64> {
    let Some(first) = fields.first() else {
        return Ok(0.0);
    };
    let grid = *first.grid();
    let weight: Vec<f64> = (0..grid.len())
        .map(|i| {
            let x = grid.position(i);
            let c = grid.center();
            ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) + (x[2] - c[2]).powi(2)).sqrt()
        })
        .collect();
    let weighted = fields
        .iter()
        .map(|f| {
            grid.ensure_same(f.grid())?;
            let vals = f
                .values()
                .into_iter()
                .map(|c| c.iter().zip(&weight).map(|(v, w)| v * Complex64::new(*w, 0.0)).collect())
                .collect();
            SpectralField::from_complex_values(grid, vals)
        })
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&SpectralField> = weighted.iter().collect();
    discrete_norm_many(&refs, NormSpec::Sobolev(sobolev_index))
}

/// Decay fit of one record over a time window.
pub fn fit_record(series: &NormSeries, name: &str, window: Option<(f64, f64)>) -> Result<DecayFit> {
    let values = series
        .record(name)
        .ok_or_else(|| invalid_param("record", format!("no record named {name}")))?;
    Ok(super::fit::fit_power_law(&series.times, values, window)?.named(name))
}
