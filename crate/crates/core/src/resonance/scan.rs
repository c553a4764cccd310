use std::fmt;

use rayon::prelude::*;

use super::phase::PhaseSpec;
use crate::error::{invalid_param, Result};

/// Seed-grid spacing of the dense scan in reduced coordinates.
pub const SEED_STEP: f64 = 0.01;
/// Residual tolerance on `|φ|` and `|∂_ηφ|` after polishing.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Default half-width of the reduced search square.
pub const DEFAULT_SEARCH_RADIUS: f64 = 10.0;

const MAX_NEWTON_ITERATIONS: usize = 60;
const DUPLICATE_DISTANCE: f64 = 1e-7;

/// A polished space-time resonance on the collinear slice `ξ = s e`,
/// `η = r e`. Stored with `s ≥ 0`; `(−s, −r)` is the same sphere family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonancePoint {
    pub s: f64,
    pub r: f64,
    pub phase_residual: f64,
    pub gradient_residual: f64,
}

impl ResonancePoint {
    pub fn xi_norm(&self) -> f64 {
        self.s.abs()
    }

    pub fn eta_norm(&self) -> f64 {
        self.r.abs()
    }

    pub fn difference_norm(&self) -> f64 {
        (self.s - self.r).abs()
    }

    /// `|(ξ, η)|`.
    pub fn norm(&self) -> f64 {
        self.s.hypot(self.r)
    }
}

/// Finite union of closed intervals on the half line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Merges `[v − pad, v + pad]` over all values (lower ends clipped at 0).
    pub fn from_radii(values: impl IntoIterator<Item = f64>, pad: f64) -> Self {
        let mut raw: Vec<(f64, f64)> = values.into_iter().map(|v| ((v - pad).max(0.0), v + pad)).collect();
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut intervals: Vec<(f64, f64)> = Vec::new();
        for (lo, hi) in raw {
            match intervals.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => intervals.push((lo, hi)),
            }
        }
        Self { intervals }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= x && x <= hi)
    }

    /// Distance from `x` to the set (`∞` when empty).
    pub fn distance_to(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(lo, hi)| if x < lo { lo - x } else if x > hi { x - hi } else { 0.0 })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn intersects(&self, other: &IntervalSet) -> bool {
        self.intervals
            .iter()
            .any(|&(a, b)| other.intervals.iter().any(|&(c, d)| a <= d && c <= b))
    }

    /// Smallest distance between points of the two sets (`∞` if either is empty).
    pub fn gap(&self, other: &IntervalSet) -> f64 {
        let mut best = f64::INFINITY;
        for &(a, b) in &self.intervals {
            for &(c, d) in &other.intervals {
                let g = if b < c { c - b } else if d < a { a - d } else { 0.0 };
                best = best.min(g);
            }
        }
        best
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.intervals.iter().map(|(a, b)| format!("[{a:.6},{b:.6}]")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Sampled resonant sets of one phase on the reduced slice.
#[derive(Debug, Clone)]
pub struct PhaseResonances {
    pub spec: PhaseSpec,
    /// Zero crossings of `φ` along `r` on every scan row.
    pub time_resonances: Vec<[f64; 2]>,
    /// Zero crossings of the reduced `∂_ηφ` along `r` on every scan row.
    pub space_resonances: Vec<[f64; 2]>,
    pub points: Vec<ResonancePoint>,
}

struct Scan {
    ns: usize,
    nr: usize,
    radius: f64,
    step: f64,
    phi: Vec<f64>,
    grad: Vec<f64>,
}

impl Scan {
    fn new(p: &PhaseSpec, radius: f64, step: f64) -> Self {
        let ns = (radius / step).round() as usize;
        let nr = 2 * ns;
        let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..=ns)
            .into_par_iter()
            .map(|i| {
                let s = i as f64 * step;
                (0..=nr)
                    .map(|j| {
                        let r = -radius + j as f64 * step;
                        (p.reduced_value(s, r), p.reduced_gradient(s, r))
                    })
                    .unzip()
            })
            .collect();
        let (phi, grad): (Vec<Vec<f64>>, Vec<Vec<f64>>) = rows.into_iter().unzip();
        Self {
            ns,
            nr,
            radius,
            step,
            phi: phi.concat(),
            grad: grad.concat(),
        }
    }

    fn at(&self, i: usize, j: usize) -> usize {
        i * (self.nr + 1) + j
    }

    fn coord(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.step, -self.radius + j as f64 * self.step)
    }

    fn changes_sign(values: [f64; 4]) -> bool {
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        lo <= 0.0 && hi >= 0.0
    }

    fn candidate_cells(&self) -> Vec<(usize, usize)> {
        (0..self.ns)
            .into_par_iter()
            .flat_map_iter(|i| {
                (0..self.nr).filter_map(move |j| {
                    let idx = [self.at(i, j), self.at(i + 1, j), self.at(i, j + 1), self.at(i + 1, j + 1)];
                    let phi = idx.map(|k| self.phi[k]);
                    let grad = idx.map(|k| self.grad[k]);
                    (Self::changes_sign(phi) && Self::changes_sign(grad)).then_some((i, j))
                })
            })
            .collect()
    }

    fn row_crossings(&self, values: &[f64]) -> Vec<[f64; 2]> {
        let mut out = Vec::new();
        for i in 0..=self.ns {
            for j in 0..self.nr {
                let (a, b) = (values[self.at(i, j)], values[self.at(i, j + 1)]);
                if a == 0.0 || a * b < 0.0 {
                    let (s, r) = self.coord(i, j);
                    let t = if a == 0.0 { 0.0 } else { a / (a - b) };
                    out.push([s, r + t * self.step]);
                }
            }
        }
        out
    }
}

/// Newton iteration on `(φ, ∂_ηφ) = 0` in reduced coordinates.
pub fn polish_root(p: &PhaseSpec, s0: f64, r0: f64, tol: f64) -> Option<ResonancePoint> {
    let (mut s, mut r) = (s0, r0);
    for _ in 0..MAX_NEWTON_ITERATIONS {
        let f = [p.reduced_value(s, r), p.reduced_gradient(s, r)];
        let j = p.reduced_jacobian(s, r);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let ds = (f[0] * j[1][1] - f[1] * j[0][1]) / det;
        let dr = (j[0][0] * f[1] - j[1][0] * f[0]) / det;
        s -= ds;
        r -= dr;
        if !(s.is_finite() && r.is_finite()) {
            return None;
        }
        if ds.abs().max(dr.abs()) < 1e-15 * (1.0 + s.abs().max(r.abs())) {
            break;
        }
    }
    let phase_residual = p.reduced_value(s, r).abs();
    let gradient_residual = p.reduced_gradient(s, r).abs();
    if phase_residual < tol && gradient_residual < tol {
        let (s, r) = if s < 0.0 { (-s, -r) } else { (s, r) };
        Some(ResonancePoint {
            s,
            r,
            phase_residual,
            gradient_residual,
        })
    } else {
        None
    }
}

fn dedup(mut points: Vec<ResonancePoint>) -> Vec<ResonancePoint> {
    points.sort_by(|a, b| a.s.total_cmp(&b.s).then(a.r.total_cmp(&b.r)));
    let mut out: Vec<ResonancePoint> = Vec::new();
    for p in points {
        if !out
            .iter()
            .any(|q| (q.s - p.s).abs() < DUPLICATE_DISTANCE && (q.r - p.r).abs() < DUPLICATE_DISTANCE)
        {
            out.push(p);
        }
    }
    out
}

fn validate(search_radius: f64, tol: f64, step: f64) -> Result<()> {
    if !(search_radius > 0.0 && search_radius.is_finite()) {
        return Err(invalid_param("search_radius", format!("must be positive, got {search_radius}")));
    }
    if !(tol > 0.0) {
        return Err(invalid_param("tol", format!("must be positive, got {tol}")));
    }
    if !(step > 0.0 && step < search_radius) {
        return Err(invalid_param("step", format!("must lie in (0, search_radius), got {step}")));
    }
    Ok(())
}

fn scan_phase(p: &PhaseSpec, search_radius: f64, tol: f64, step: f64) -> PhaseResonances {
    let scan = Scan::new(p, search_radius, step);
    let roots: Vec<ResonancePoint> = scan
        .candidate_cells()
        .into_par_iter()
        .filter_map(|(i, j)| {
            let (s, r) = scan.coord(i, j);
            let h = scan.step;
            [(0.5, 0.5), (0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
                .iter()
                .find_map(|&(a, b)| polish_root(p, s + a * h, r + b * h, tol))
        })
        .filter(|q| q.s <= search_radius && q.r.abs() <= search_radius)
        .collect();
    PhaseResonances {
        spec: *p,
        time_resonances: scan.row_crossings(&scan.phi),
        space_resonances: scan.row_crossings(&scan.grad),
        points: dedup(roots),
    }
}

/// Polished space-time resonances of one phase inside the reduced square
/// `0 ≤ s ≤ R`, `|r| ≤ R`.
pub fn find_resonances(p: &PhaseSpec, search_radius: f64, tol: f64) -> Result<Vec<ResonancePoint>> {
    find_resonances_with_step(p, search_radius, tol, SEED_STEP)
}

pub fn find_resonances_with_step(p: &PhaseSpec, search_radius: f64, tol: f64, step: f64) -> Result<Vec<ResonancePoint>> {
    validate(search_radius, tol, step)?;
    Ok(scan_phase(p, search_radius, tol, step).points)
}

#[derive(Debug, Clone)]
pub struct ResonanceReport {
    pub c_s: f64,
    pub search_radius: f64,
    pub tol: f64,
    pub phases: Vec<PhaseResonances>,
    /// One plus the largest `|(ξ, η)|` over all resonances.
    pub c_r: f64,
    /// Radii `|ξ|` of resonant outputs.
    pub outcome: IntervalSet,
    /// Radii `|η|` and `|ξ−η|` of resonant inputs.
    pub germ: IntervalSet,
    pub separated: bool,
    /// A tenth of the gap between outcome and germ radii (0 when they meet).
    pub delta0: f64,
}

impl ResonanceReport {
    pub fn points(&self) -> impl Iterator<Item = (&PhaseSpec, &ResonancePoint)> {
        self.phases.iter().flat_map(|ph| ph.points.iter().map(move |q| (&ph.spec, q)))
    }

    pub fn n_points(&self) -> usize {
        self.phases.iter().map(|p| p.points.len()).sum()
    }
}

/// Aggregates all 32 phases into outcome and germ sets and the separation verdict.
pub fn resonance_report(c_s: f64, search_radius: f64, tol: f64) -> Result<ResonanceReport> {
    resonance_report_with_step(c_s, search_radius, tol, SEED_STEP)
}

pub fn resonance_report_with_step(c_s: f64, search_radius: f64, tol: f64, step: f64) -> Result<ResonanceReport> {
    validate(search_radius, tol, step)?;
    let specs = PhaseSpec::all(c_s)?;
    let phases: Vec<PhaseResonances> = specs.iter().map(|p| scan_phase(p, search_radius, tol, step)).collect();
    let all: Vec<ResonancePoint> = phases.iter().flat_map(|p| p.points.iter().copied()).collect();
    let c_r = 1.0 + all.iter().map(ResonancePoint::norm).fold(0.0, f64::max);
    let pad = 2.0 * tol;
    let outcome = IntervalSet::from_radii(all.iter().map(ResonancePoint::xi_norm), pad);
    let germ = IntervalSet::from_radii(
        all.iter().flat_map(|q| [q.eta_norm(), q.difference_norm()]),
        pad,
    );
    let separated = !outcome.intersects(&germ);
    let delta0 = if separated { outcome.gap(&germ) / 10.0 } else { 0.0 };
    log::debug!(
        "c_s = {c_s}: {} resonance points, C_R = {c_r:.6}, separated = {separated}",
        all.len()
    );
    Ok(ResonanceReport {
        c_s,
        search_radius,
        tol,
        phases,
        c_r,
        outcome,
        germ,
        separated,
        delta0,
    })
}
