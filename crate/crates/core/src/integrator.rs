//! Time stepping: Lawson (integrating-factor) RK4 on the diagonal system,
//! with the linear Klein-Gordon groups applied exactly, and classical RK4 on
//! the primitive system as an independent reference.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid_param, Error, Result};
use crate::model::{
    constraint_residuals, diagonal_nonlinearity, diagonalize_unchecked, reconstruct, rhs_linear, rhs_primitive,
    ConstraintResiduals, DiagState, EMState, PhysicalParams,
};
use crate::spectral::{bracket, norm3, Grid3, MultiplierSymbol, SpectralField};

/// Largest `dt · max⟨k⟩` accepted for classical RK4 (its stability
/// interval on the imaginary axis is `2√2`).
pub const RK4_STABILITY_BUDGET: f64 = 2.8;

/// A run is declared diverged when the tracked norm exceeds this multiple
/// of its initial value.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Lawson RK4 on `(A, B)`.
    ExponentialRk4,
    /// Classical RK4 on `(u, n, E, B)`.
    ClassicalRk4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegratorConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_stride: usize,
    pub constraint_check_stride: usize,
}

impl IntegratorConfig {
    pub fn new(scheme: Scheme, dt: f64, t_end: f64) -> Self {
        Self {
            scheme,
            dt,
            t_end,
            snapshot_stride: 1,
            constraint_check_stride: 1,
        }
    }

    /// `0.5 / max⟨k⟩` for classical RK4, `0.05` for the exponential scheme.
    pub fn default_dt(scheme: Scheme, grid: &Grid3) -> f64 {
        match scheme {
            Scheme::ClassicalRk4 => 0.5 / bracket(1.0, grid.max_wavenumber()),
            Scheme::ExponentialRk4 => 0.05,
        }
    }

    pub fn validate(&self, grid: &Grid3) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(invalid_param("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(invalid_param("t_end", format!("must be nonnegative, got {}", self.t_end)));
        }
        if self.snapshot_stride == 0 {
            return Err(invalid_param("snapshot_stride", "must be positive"));
        }
        if self.constraint_check_stride == 0 {
            return Err(invalid_param("constraint_check_stride", "must be positive"));
        }
        if self.scheme == Scheme::ClassicalRk4 {
            let budget = self.dt * bracket(1.0, grid.max_wavenumber());
            if budget >= RK4_STABILITY_BUDGET {
                return Err(invalid_param(
                    "dt",
                    format!("dt·max⟨k⟩ = {budget:.3} exceeds the RK4 stability budget {RK4_STABILITY_BUDGET}"),
                ));
            }
        }
        Ok(())
    }
}

/// Right-hand side of the diagonal system as seen by the exponential
/// integrator: the quadratic terms (optionally switched off) plus an
/// optional forcing `exp(it⟨D⟩_{c_s}) F` on the acoustic equation.
#[derive(Debug, Clone)]
pub struct DiagonalSystem {
    pub params: PhysicalParams,
    pub nonlinear: bool,
    pub forcing: Option<SpectralField>,
}

impl DiagonalSystem {
    pub fn new(params: PhysicalParams) -> Self {
        Self {
            params,
            nonlinear: true,
            forcing: None,
        }
    }

    pub fn linear(params: PhysicalParams) -> Self {
        Self {
            nonlinear: false,
            ..Self::new(params)
        }
    }

    fn nonlinearity(&self, d: &DiagState, t: f64) -> DiagState {
        let mut out = if self.nonlinear {
            diagonal_nonlinearity(d, &self.params)
        } else {
            DiagState::zeros(*d.grid())
        };
        if let Some(f) = &self.forcing {
            let driven = MultiplierSymbol::propagator(self.params.c_s(), t).apply(f).expect("scalar");
            out.a = &out.a + &driven;
        }
        out
    }
}

fn propagator_table(grid: &Grid3, alpha: f64, t: f64) -> Vec<Complex64> {
    (0..grid.len())
        .into_par_iter()
        .map(|i| Complex64::from_polar(1.0, t * bracket(alpha, norm3(grid.wavevector(i)))))
        .collect()
}

/// Propagator tables `exp(it⟨ξ⟩_{c_s})` and `exp(it⟨ξ⟩)` for one time.
struct Propagator {
    acoustic: Vec<Complex64>,
    electromagnetic: Vec<Complex64>,
}

impl Propagator {
    fn new(grid: &Grid3, c_s: f64, t: f64) -> Self {
        Self {
            acoustic: propagator_table(grid, c_s, t),
            electromagnetic: propagator_table(grid, 1.0, t),
        }
    }

    fn apply_in_place(&self, d: &mut DiagState) {
        let mul = |c: &mut [Complex64], table: &[Complex64]| {
            c.par_iter_mut().zip(table).for_each(|(z, w)| *z *= w);
        };
        mul(d.a.coefficients_mut(0), &self.acoustic);
        for c in 0..3 {
            mul(d.bc.coefficients_mut(c), &self.electromagnetic);
        }
        d.a.set_real(false);
        d.bc.set_real(false);
    }

    fn apply(&self, d: &DiagState) -> DiagState {
        let mut out = d.clone();
        self.apply_in_place(&mut out);
        out
    }
}

/// Lawson RK4 with precomputed half- and full-step propagators.
pub struct LawsonStepper {
    system: DiagonalSystem,
    dt: f64,
    half: Propagator,
    full: Propagator,
}

impl LawsonStepper {
    pub fn new(system: DiagonalSystem, grid: &Grid3, dt: f64) -> Self {
        let c_s = system.params.c_s();
        Self {
            half: Propagator::new(grid, c_s, 0.5 * dt),
            full: Propagator::new(grid, c_s, dt),
            system,
            dt,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// One step of size `dt`. With the nonlinearity off this is the exact
    /// linear group up to rounding.
    pub fn step(&self, d: &DiagState) -> Result<DiagState> {
        let h = self.dt;
        let t = d.time;
        let c = |x: f64| Complex64::new(x, 0.0);
        let check = |s: &DiagState, time: f64| {
            if s.is_finite() {
                Ok(())
            } else {
                Err(Error::NonFinite { time })
            }
        };

        let k1 = self.system.nonlinearity(d, t);
        check(&k1, t)?;
        let mut y2 = d.clone();
        y2.axpy(c(0.5 * h), &k1);
        self.half.apply_in_place(&mut y2);
        let k2 = self.system.nonlinearity(&y2, t + 0.5 * h);
        check(&k2, t + 0.5 * h)?;

        let mut y3 = self.half.apply(d);
        y3.axpy(c(0.5 * h), &k2);
        let k3 = self.system.nonlinearity(&y3, t + 0.5 * h);
        check(&k3, t + 0.5 * h)?;

        let mut y4 = self.full.apply(d);
        y4.axpy(c(h), &self.half.apply(&k3));
        let k4 = self.system.nonlinearity(&y4, t + h);
        check(&k4, t + h)?;

        let mut out = d.clone();
        out.axpy(c(h / 6.0), &k1);
        self.full.apply_in_place(&mut out);
        let mut mid = k2;
        mid.axpy(c(1.0), &k3);
        self.half.apply_in_place(&mut mid);
        out.axpy(c(h / 3.0), &mid);
        out.axpy(c(h / 6.0), &k4);
        out.time = t + h;
        check(&out, t + h)?;
        Ok(out)
    }
}

/// One Lawson RK4 step of the full nonlinear diagonal system.
pub fn step_exponential(d: &DiagState, dt: f64, params: &PhysicalParams) -> Result<DiagState> {
    LawsonStepper::new(DiagonalSystem::new(*params), d.grid(), dt).step(d)
}

/// Classical RK4 on the primitive system (or its linearisation). The means
/// of `n` and `B`, conserved exactly by the equations, are reset to zero
/// after the step.
pub fn step_primitive_with(s: &EMState, dt: f64, params: &PhysicalParams, nonlinear: bool) -> Result<EMState> {
    let f = |x: &EMState| {
        if nonlinear {
            rhs_primitive(x, params)
        } else {
            rhs_linear(x, params)
        }
    };
    let stage = |base: &EMState, k: &EMState, h: f64| {
        let mut y = base.clone();
        y.axpy(h, k);
        y
    };
    let k1 = f(s);
    let k2 = f(&stage(s, &k1, 0.5 * dt));
    let k3 = f(&stage(s, &k2, 0.5 * dt));
    let k4 = f(&stage(s, &k3, dt));
    let mut out = s.clone();
    out.axpy(dt / 6.0, &k1);
    out.axpy(dt / 3.0, &k2);
    out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4);
    let drift = out.n.mean()[0].norm() + out.b.mean().iter().map(|m| m.norm()).sum::<f64>();
    if drift > 0.0 {
        log::trace!("re-zeroing means of n and B (drift {drift:.3e})");
    }
    out.n.remove_mean();
    out.b.remove_mean();
    out.time = s.time + dt;
    if !out.is_finite() {
        return Err(Error::NonFinite { time: out.time });
    }
    Ok(out)
}

pub fn step_primitive(s: &EMState, dt: f64, params: &PhysicalParams) -> Result<EMState> {
    IntegratorConfig::new(Scheme::ClassicalRk4, dt, dt).validate(s.grid())?;
    step_primitive_with(s, dt, params, true)
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Completed,
    Diverged { time: f64, reason: String },
}

impl RunStatus {
    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::Completed => "completed",
            RunStatus::Diverged { .. } => "diverged",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSample {
    pub time: f64,
    /// `‖(A, B)‖_{H^N}`
    pub sobolev: f64,
    /// `‖(A, B)‖_{L²}`
    pub l2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualSample {
    pub time: f64,
    pub residuals: ConstraintResiduals,
}

/// A state handed to the snapshot observer.
pub struct Snapshot<'a> {
    pub step: usize,
    pub time: f64,
    pub diag: &'a DiagState,
    pub physical: &'a EMState,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Sobolev index of the tracked norm.
    pub sobolev_index: f64,
    pub nonlinear: bool,
    pub forcing: Option<SpectralField>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            sobolev_index: 4.0,
            nonlinear: true,
            forcing: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub status: RunStatus,
    pub norms: Vec<NormSample>,
    pub residuals: Vec<ResidualSample>,
    pub final_state: DiagState,
    pub steps: usize,
}

impl Trajectory {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.residuals.max()).fold(0.0, f64::max)
    }
}

enum Current {
    Diag(DiagState),
    Physical(EMState),
}

/// Advances `initial` to `t_end`, reporting snapshots to `observer` at
/// step 0, every `snapshot_stride` steps and at the final step.
pub fn run(
    initial: &EMState,
    config: &IntegratorConfig,
    params: &PhysicalParams,
    options: &RunOptions,
    mut observer: impl FnMut(&Snapshot<'_>) -> Result<()>,
) -> Result<Trajectory> {
    let grid = *initial.grid();
    config.validate(&grid)?;
    let steps = if config.t_end == 0.0 {
        0
    } else {
        (config.t_end / config.dt - 1e-9).ceil() as usize
    };
    let last_dt = config.t_end - (steps.saturating_sub(1)) as f64 * config.dt;

    let system = DiagonalSystem {
        params: *params,
        nonlinear: options.nonlinear,
        forcing: options.forcing.clone(),
    };
    let (stepper, last_stepper) = match config.scheme {
        Scheme::ExponentialRk4 => {
            let main = LawsonStepper::new(system.clone(), &grid, config.dt);
            let last = ((last_dt - config.dt).abs() > 1e-12).then(|| LawsonStepper::new(system.clone(), &grid, last_dt));
            (Some(main), last)
        }
        Scheme::ClassicalRk4 => (None, None),
    };

    let t0 = initial.time;
    let mut current = match config.scheme {
        Scheme::ExponentialRk4 => Current::Diag(crate::model::diagonalize(initial, params)?),
        Scheme::ClassicalRk4 => Current::Physical(initial.clone()),
    };
    let mut norms = Vec::new();
    let mut residuals = Vec::new();
    let mut status = RunStatus::Completed;
    let mut initial_norm = None;

    for step in 0..=steps {
        let time = if step == steps { t0 + config.t_end } else { t0 + step as f64 * config.dt };
        let check_residual = step % config.constraint_check_stride == 0 || step == steps;
        let (diag, mut physical) = match &mut current {
            Current::Diag(d) => {
                d.time = time;
                (d.clone(), None)
            }
            Current::Physical(s) => {
                s.time = time;
                (diagonalize_unchecked(s, params), Some(s.clone()))
            }
        };
        let sobolev = diag.sobolev_norm(options.sobolev_index);
        let l2 = diag.sobolev_norm(0.0);
        norms.push(NormSample { time, sobolev, l2 });
        let reference = *initial_norm.get_or_insert(sobolev);
        let blown = !sobolev.is_finite() || (reference > 0.0 && sobolev > DIVERGENCE_FACTOR * reference);
        let emit = step % config.snapshot_stride == 0 || step == steps || blown;
        if (check_residual || emit) && physical.is_none() {
            physical = Some(reconstruct(&diag, params));
        }
        if check_residual {
            residuals.push(ResidualSample {
                time,
                residuals: constraint_residuals(physical.as_ref().expect("computed above")),
            });
        }
        if blown {
            status = RunStatus::Diverged {
                time,
                reason: format!("H^{} norm {sobolev:.3e} exceeds {DIVERGENCE_FACTOR:.0e} x initial", options.sobolev_index),
            };
        }
        if emit {
            observer(&Snapshot {
                step,
                time,
                diag: &diag,
                physical: physical.as_ref().expect("computed above"),
            })?;
        }
        if blown || step == steps {
            return Ok(Trajectory {
                status,
                norms,
                residuals,
                final_state: diag,
                steps: step,
            });
        }
        let dt = if step + 1 == steps { last_dt } else { config.dt };
        let advanced = match &current {
            Current::Diag(d) => {
                let s = match (&last_stepper, step + 1 == steps) {
                    (Some(l), true) => l,
                    _ => stepper.as_ref().expect("exponential stepper"),
                };
                s.step(d).map(Current::Diag)
            }
            Current::Physical(s) => step_primitive_with(s, dt, params, options.nonlinear).map(Current::Physical),
        };
        match advanced {
            Ok(next) => current = next,
            Err(Error::NonFinite { time }) => {
                status = RunStatus::Diverged {
                    time,
                    reason: "non-finite value in a stage".into(),
                };
                let physical = physical.unwrap_or_else(|| reconstruct(&diag, params));
                observer(&Snapshot {
                    step,
                    time: diag.time,
                    diag: &diag,
                    physical: &physical,
                })?;
                return Ok(Trajectory {
                    status,
                    norms,
                    residuals,
                    final_state: diag,
                    steps: step,
                });
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!("loop returns on the final step")
}

/// Collects every reported snapshot of [`run`] as `(A, B)`.
pub fn run_collect(
    initial: &EMState,
    config: &IntegratorConfig,
    params: &PhysicalParams,
    options: &RunOptions,
) -> Result<(Trajectory, Vec<DiagState>)> {
    let mut snaps = Vec::new();
    let traj = run(initial, config, params, options, |s| {
        snaps.push(s.diag.clone());
        Ok(())
    })?;
    Ok((traj, snaps))
}
