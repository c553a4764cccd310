//! The experiments behind the CLI subcommands.

use std::time::Instant;

use emlab::diagnostics::{
    energy_growth_fit, geometric_times, linear_decay_series, measure_x_components, scattering_check, fit_power_law,
    RadialDatum, XNormParams, RECORD_LINF, RECORD_LINF_U, RECORD_SOBOLEV, RECORD_W_P1, RECORD_W_P2,
};
use emlab::integrator::{run, RunOptions, RunStatus, Trajectory};
use emlab::model::{diagonalize, PhysicalParams, Profiles};
use emlab::resonance::{
    build_cutoff_suite, resonance_report_with_step, verify_phase_lower_bound, CutoffSuite, ResonanceReport,
};
use emlab::spectral::Grid3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::output::{num, version_string, Manifest, OutputDir};
use crate::snapshot::save_snapshot;

/// Result of a finished experiment.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub manifest: Manifest,
    pub output_dir: std::path::PathBuf,
}

struct Outcome {
    summary: serde_json::Value,
    diverged: Option<(f64, String)>,
}

impl Outcome {
    fn done(summary: serde_json::Value) -> Self {
        Self { summary, diverged: None }
    }
}

/// Runs the configured experiment and writes its artifacts and manifest.
/// A diverged run still writes everything, then reports
/// [`HarnessError::Diverged`].
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let start = Instant::now();
    let mut out = OutputDir::create(&cfg.resolved_output_dir())?;
    log::info!("{} -> {}", cfg.experiment.name(), out.root().display());
    let result = match cfg.experiment {
        Experiment::Simulate => simulate(cfg, &mut out),
        Experiment::LinearDecay => linear_decay(cfg, &mut out),
        Experiment::Resonances => resonances(cfg, &mut out),
        Experiment::PhaseBound => phase_bound(cfg, &mut out),
        Experiment::CsSweep => cs_sweep(cfg, &mut out),
        Experiment::Scattering => scattering(cfg, &mut out),
    };
    let (status, summary, diverged) = match &result {
        Ok(o) if o.diverged.is_some() => ("diverged", o.summary.clone(), o.diverged.clone()),
        Ok(o) => ("completed", o.summary.clone(), None),
        Err(e) => ("failed", e.to_json(), None),
    };
    let mut outputs = out.written().to_vec();
    outputs.push("manifest.json".into());
    let manifest = Manifest {
        experiment: cfg.experiment.name().into(),
        version: version_string(),
        status: status.into(),
        wall_time_s: start.elapsed().as_secs_f64(),
        config: cfg.to_toml(),
        outputs,
        summary,
    };
    out.write_json("manifest.json", &manifest)?;
    result?;
    if let Some((time, reason)) = diverged {
        return Err(HarnessError::Diverged { time, reason });
    }
    Ok(RunReport {
        manifest,
        output_dir: out.root().to_path_buf(),
    })
}

fn x_params(cfg: &ExperimentConfig) -> XNormParams {
    XNormParams {
        n: cfg.diagnostics.sobolev_index,
        n_double_prime: cfg.diagnostics.n_double_prime,
        n_prime: cfg.diagnostics.n_prime,
        delta1: cfg.diagnostics.delta1,
    }
}

fn report(cfg: &ExperimentConfig, c_s: f64) -> Result<ResonanceReport> {
    let r = &cfg.resonance;
    Ok(resonance_report_with_step(c_s, r.search_radius, r.tolerance, r.seed_step)?)
}

fn suite(cfg: &ExperimentConfig, grid: &Grid3) -> Result<CutoffSuite> {
    let rep = report(cfg, cfg.physical.c_s)?;
    Ok(build_cutoff_suite(&rep, 2.0 * rep.c_r, grid)?)
}

fn write_norms(out: &mut OutputDir, traj: &Trajectory) -> Result<()> {
    out.write_csv(
        "norms.csv",
        &["time", "sobolev", "l2"],
        traj.norms.iter().map(|n| vec![num(n.time), num(n.sobolev), num(n.l2)]),
    )?;
    out.write_csv(
        "residuals.csv",
        &["time", "gauss", "div_b", "curl"],
        traj.residuals.iter().map(|r| {
            let c = r.residuals;
            vec![num(r.time), num(c.gauss), num(c.div_b), num(c.curl_constraint)]
        }),
    )
}

fn trajectory_summary(traj: &Trajectory) -> Result<serde_json::Value> {
    let times: Vec<f64> = traj.norms.iter().map(|n| n.time).collect();
    let norms: Vec<f64> = traj.norms.iter().map(|n| n.sobolev).collect();
    let growth = if norms.len() >= 2 && norms[0] > 0.0 {
        let g = energy_growth_fit(&times, &norms)?;
        json!({ "growth_factor": g.growth_factor, "fitted_c0_eps": g.fitted_c0_eps })
    } else {
        json!(null)
    };
    Ok(json!({
        "status": traj.status.label(),
        "steps": traj.steps,
        "final_time": times.last(),
        "max_residual": traj.max_residual(),
        "energy_growth": growth,
    }))
}

fn diverged(traj: &Trajectory) -> Option<(f64, String)> {
    match &traj.status {
        RunStatus::Completed => None,
        RunStatus::Diverged { time, reason } => Some((*time, reason.clone())),
    }
}

fn simulate(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Outcome> {
    let grid = cfg.grid()?;
    let params = cfg.physical_params()?;
    let icfg = cfg.integrator_config(&grid);
    let initial = cfg.initial_data().generate(grid);
    let suite = suite(cfg, &grid)?;
    let x = x_params(cfg);
    let mut rows = Vec::new();
    let mut snapshots = Vec::new();
    let mut previous: Option<Profiles> = None;
    let opts = RunOptions {
        sobolev_index: cfg.diagnostics.sobolev_index,
        ..RunOptions::default()
    };
    let traj = run(&initial, &icfg, &params, &opts, |snap| {
        let name = format!("snapshots/step_{:06}.emlab", snap.step);
        let path = out.path(&name).map_err(core_io)?;
        save_snapshot(snap.physical, &path).map_err(core_io)?;
        snapshots.push(name);
        let series = measure_x_components(std::slice::from_ref(snap.diag), &suite, &params, x)?;
        let profile = Profiles::from_diag(snap.diag, &params);
        let inc = previous.as_ref().map_or(0.0, |p| profile.distance(p, x.n - 2.0));
        previous = Some(profile);
        let mut row = vec![num(snap.time)];
        for name in [RECORD_SOBOLEV, RECORD_W_P1, RECORD_W_P2, RECORD_LINF, RECORD_LINF_U] {
            row.push(num(series.record(name).expect("recorded")[0]));
        }
        row.push(num(inc));
        rows.push(row);
        Ok(())
    })?;
    for s in &snapshots {
        out.record(s);
    }
    write_norms(out, &traj)?;
    out.write_csv(
        "x_norms.csv",
        &["time", "h_n", "w_p1", "w_p2", "linf_filtered", "linf_u_filtered", "profile_increment"],
        rows,
    )?;
    let mut summary = trajectory_summary(&traj)?;
    summary["snapshots"] = json!(snapshots.len());
    Ok(Outcome {
        summary,
        diverged: diverged(&traj),
    })
}

/// Observer errors must be core errors; file problems are reported as an
/// invalid output path.
fn core_io(e: HarnessError) -> emlab::Error {
    emlab::Error::InvalidParameter {
        name: "output_dir".into(),
        detail: e.to_string(),
    }
}

fn linear_decay(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Outcome> {
    let d = &cfg.decay;
    let times = geometric_times(d.t_min, d.t_max, d.samples);
    let datum = RadialDatum::Gaussian { width: d.width };
    let mut series_rows = Vec::new();
    let mut fit_rows = Vec::new();
    let mut fits = Vec::new();
    for speed in [1.0, cfg.physical.c_s] {
        for &p in &d.exponents {
            let norms = linear_decay_series(p, speed, datum, &times)?;
            for (t, v) in times.iter().zip(&norms) {
                series_rows.push(vec![num(speed), num(p), num(*t), num(*v)]);
            }
            let fit = fit_power_law(&times, &norms, None)?;
            let predicted = 3.0 / p - 1.5;
            fit_rows.push(vec![
                num(speed),
                num(p),
                num(fit.exponent),
                num(predicted),
                num(fit.prefactor),
                num(fit.r_squared),
                fit.reliable.to_string(),
                num(d.t_min),
                num(d.t_max),
            ]);
            fits.push(json!({ "speed": speed, "p": if p.is_finite() { json!(p) } else { json!("inf") }, "exponent": fit.exponent }));
        }
    }
    out.write_csv("decay_series.csv", &["speed", "p", "time", "norm"], series_rows)?;
    out.write_csv(
        "decay_fits.csv",
        &["speed", "p", "exponent", "predicted", "prefactor", "r_squared", "reliable", "t_min", "t_max"],
        fit_rows,
    )?;
    Ok(Outcome::done(json!({ "fits": fits })))
}

fn summary_row(r: &ResonanceReport) -> Vec<String> {
    vec![
        num(r.c_s),
        num(r.c_r),
        r.n_points().to_string(),
        r.separated.to_string(),
        num(r.delta0),
        r.outcome.to_string(),
        r.germ.to_string(),
    ]
}

const SUMMARY_HEADER: [&str; 7] = ["c_s", "c_r", "n_points", "separated", "delta0", "outcome", "germ"];

fn resonances(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Outcome> {
    let rep = report(cfg, cfg.physical.c_s)?;
    out.write_csv(
        "resonance_points.csv",
        &["phase", "s", "r", "xi_norm", "eta_norm", "difference_norm", "phase_residual", "gradient_residual"],
        rep.points().map(|(spec, q)| {
            vec![
                spec.label(),
                num(q.s),
                num(q.r),
                num(q.xi_norm()),
                num(q.eta_norm()),
                num(q.difference_norm()),
                num(q.phase_residual),
                num(q.gradient_residual),
            ]
        }),
    )?;
    out.write_csv("resonance_summary.csv", &SUMMARY_HEADER, [summary_row(&rep)])?;
    Ok(Outcome::done(json!({
        "c_r": rep.c_r,
        "n_points": rep.n_points(),
        "separated": rep.separated,
        "delta0": rep.delta0,
        "outcome": rep.outcome.to_string(),
        "germ": rep.germ.to_string(),
    })))
}

fn phase_bound(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Outcome> {
    let c_s = cfg.physical.c_s;
    let c_r = match cfg.resonance.c_r {
        Some(c) => c,
        None => report(cfg, c_s)?.c_r,
    };
    let c0 = cfg.resonance.c0.unwrap_or(10.0 * c_r);
    let check = verify_phase_lower_bound(c_s, c_r, c0, cfg.resonance.bound_step)?;
    out.write_csv(
        "phase_bound.csv",
        &["c_s", "c_r", "c0", "min_phi", "bound", "pass"],
        [vec![num(c_s), num(c_r), num(c0), num(check.min_phi), num(check.bound), check.pass.to_string()]],
    )?;
    Ok(Outcome::done(json!({
        "c_r": c_r,
        "c0": c0,
        "min_phi": check.min_phi,
        "bound": check.bound,
        "pass": check.pass,
        "argmin_phase": check.argmin_phase.label(),
        "argmin_point": check.argmin_point,
        "samples": check.samples,
    })))
}

fn cs_sweep(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Outcome> {
    let mut values = cfg.sweep.c_s.clone();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let reports: Vec<ResonanceReport> = values.par_iter().map(|&c| report(cfg, c)).collect::<Result<_>>()?;
    out.write_csv("cs_sweep.csv", &SUMMARY_HEADER, reports.iter().map(summary_row))?;
    let separated: Vec<f64> = reports.iter().filter(|r| r.separated).map(|r| r.c_s).collect();
    Ok(Outcome::done(json!({ "c_s": values, "separated": separated })))
}

fn scattering(cfg: &ExperimentConfig, out: &mut OutputDir) -> Result<Outcome> {
    let grid = cfg.grid()?;
    let params: PhysicalParams = cfg.physical_params()?;
    let s = &cfg.scattering;
    let mut icfg = cfg.integrator_config(&grid);
    icfg.t_end = *s.times.last().expect("validated");
    icfg.snapshot_stride = 1;
    for &t in &s.times {
        let k = t / icfg.dt;
        if (k - k.round()).abs() > 1e-9 {
            return Err(HarnessError::schema(
                "scattering.times",
                format!("time {t} is not a multiple of the step {}", icfg.dt),
            ));
        }
    }
    let initial = cfg.initial_data().generate(grid);
    let forcing = (s.forcing_amplitude > 0.0).then(|| -> Result<_> {
        let a = diagonalize(&initial, &params)?.a;
        let peak = a.max_abs();
        Ok(a.scale_complex(Complex64::new(s.forcing_amplitude / peak.max(f64::MIN_POSITIVE), 0.0)))
    });
    let opts = RunOptions {
        sobolev_index: cfg.diagnostics.sobolev_index,
        forcing: forcing.transpose()?,
        ..RunOptions::default()
    };
    let mut profiles = Vec::new();
    let traj = run(&initial, &icfg, &params, &opts, |snap| {
        if s.times.iter().any(|t| (snap.time - t).abs() < 1e-9 * t.max(1.0)) {
            profiles.push(Profiles::from_diag(snap.diag, &params));
        }
        Ok(())
    })?;
    write_norms(out, &traj)?;
    let mut summary = trajectory_summary(&traj)?;
    if let Some(d) = diverged(&traj) {
        return Ok(Outcome { summary, diverged: Some(d) });
    }
    let check = scattering_check(&profiles, s.sobolev_index)?;
    out.write_csv(
        "scattering.csv",
        &["t_start", "t_end", "increment"],
        check
            .times
            .windows(2)
            .zip(&check.increments)
            .map(|(w, i)| vec![num(w[0]), num(w[1]), num(*i)]),
    )?;
    let first = check.increments[0];
    let last = *check.increments.last().expect("nonempty");
    summary["converging"] = json!(check.converging);
    summary["increments"] = json!(check.increments);
    summary["final_over_first"] = json!(if first > 0.0 { last / first } else { 0.0 });
    summary["forcing_amplitude"] = json!(s.forcing_amplitude);
    Ok(Outcome::done(summary))
}
