use emlab::integrator::*;
use emlab::model::*;
use emlab::spectral::{Grid3, SpectralField};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::time::Instant;

fn params() -> PhysicalParams {
    PhysicalParams::new(0.5).unwrap()
}

fn single_mode(g: Grid3, j: [i64; 3], components: usize) -> SpectralField {
    let mut f = SpectralField::zeros(g, components);
    let idx = g.index(g.wrap_index(j[0]), g.wrap_index(j[1]), g.wrap_index(j[2]));
    let amp = Complex64::new(g.volume(), 0.0);
    for c in 0..components {
        f.coefficients_mut(c)[idx] = amp * (c + 1) as f64;
    }
    f
}

#[test]
fn linear_step_is_exact_on_single_modes() {
    let g = Grid3::new(2.0 * PI, 16).unwrap();
    let p = params();
    let dt = 0.37;
    let j = [2, -1, 3];
    let k = ((4 + 1 + 9) as f64).sqrt();
    let d = DiagState {
        a: single_mode(g, j, 1),
        bc: single_mode(g, j, 3),
        time: 0.0,
    };
    let out = LawsonStepper::new(DiagonalSystem::linear(p), &g, dt).step(&d).unwrap();
    let wa = (1.0 + (p.c_s() * k).powi(2)).sqrt();
    let wb = (1.0 + k * k).sqrt();
    let expect = DiagState {
        a: d.a.scale_complex(Complex64::from_polar(1.0, dt * wa)),
        bc: d.bc.scale_complex(Complex64::from_polar(1.0, dt * wb)),
        time: dt,
    };
    let scale = g.volume();
    assert!(out.max_abs_diff(&expect) < 1e-14 * scale * 3.0);
    assert!((out.time - dt).abs() < 1e-15);
}

#[test]
fn linear_step_commutes_with_semigroup() {
    let g = Grid3::new(20.0, 16).unwrap();
    let p = params();
    let d = diagonalize(&InitialData::random(0.2, 5).generate(g), &p).unwrap();
    let out = LawsonStepper::new(DiagonalSystem::linear(p), &g, 0.1).step(&d).unwrap();
    let exact = d.propagate(&p, 0.1);
    assert!(out.max_abs_diff(&exact) < 1e-13 * d.a.max_abs().max(d.bc.max_abs()));
}

#[test]
fn linear_flow_is_reversible() {
    let g = Grid3::new(20.0, 16).unwrap();
    let p = params();
    let d = diagonalize(&InitialData::random(0.2, 6).generate(g), &p).unwrap();
    let fwd = LawsonStepper::new(DiagonalSystem::linear(p), &g, 0.05);
    let bwd = LawsonStepper::new(DiagonalSystem::linear(p), &g, -0.05);
    let back = bwd.step(&fwd.step(&d).unwrap()).unwrap();
    assert!(back.max_abs_diff(&d) < 1e-13);
}

fn integrate(d: &DiagState, p: &PhysicalParams, dt: f64, t: f64) -> DiagState {
    let stepper = LawsonStepper::new(DiagonalSystem::new(*p), d.grid(), dt);
    let mut s = d.clone();
    for _ in 0..(t / dt).round() as usize {
        s = stepper.step(&s).unwrap();
    }
    s
}

#[test]
fn exponential_scheme_is_fourth_order() {
    let g = Grid3::new(2.0 * PI, 16).unwrap();
    let p = params();
    let d = diagonalize(&InitialData::random(0.5, 7).generate(g), &p).unwrap();
    let (dt, t) = (0.1, 0.8);
    let reference = integrate(&d, &p, dt / 64.0, t);
    let e1 = integrate(&d, &p, dt, t).distance(&reference, 0.0);
    let e2 = integrate(&d, &p, dt / 2.0, t).distance(&reference, 0.0);
    let ratio = e1 / e2;
    assert!((ratio - 16.0).abs() < 0.2 * 16.0, "ratio {ratio}, errors {e1:e} {e2:e}");
}

#[test]
fn primitive_scheme_is_fourth_order() {
    let g = Grid3::new(2.0 * PI, 16).unwrap();
    let p = params();
    let s = InitialData::random(0.3, 8).generate(g);
    let run_with = |dt: f64| {
        let mut x = s.clone();
        for _ in 0..(0.4 / dt).round() as usize {
            x = step_primitive(&x, dt, &p).unwrap();
        }
        x
    };
    let dt = 0.04;
    let reference = run_with(dt / 64.0);
    let e1 = run_with(dt).max_abs_diff(&reference);
    let e2 = run_with(dt / 2.0).max_abs_diff(&reference);
    let ratio = e1 / e2;
    assert!((ratio - 16.0).abs() < 0.2 * 16.0, "ratio {ratio}, errors {e1:e} {e2:e}");
}

#[test]
fn linear_energy_is_conserved_by_primitive_rk4() {
    let g = Grid3::new(8.0 * PI, 16).unwrap();
    let p = params();
    let s = InitialData::random(0.1, 9).generate(g);
    let e0 = s.linear_energy(&p);
    let mut x = s;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        x = step_primitive_with(&x, 0.01, &p, false).unwrap();
        worst = worst.max((x.linear_energy(&p) - e0).abs() / e0);
    }
    assert!(worst < 1e-10, "relative drift {worst:e}");
}

#[test]
fn primitive_step_rejects_unstable_dt() {
    let g = Grid3::new(2.0 * PI, 16).unwrap();
    let s = EMState::zeros(g);
    assert!(step_primitive(&s, 1.0, &params()).is_err());
}

#[test]
fn curl_constraint_is_preserved() {
    let g = Grid3::new(20.0, 16).unwrap();
    let p = params();
    let s = InitialData::random(0.05, 10).generate(g);
    let mut cfg = IntegratorConfig::new(Scheme::ClassicalRk4, 0.05, 2.0);
    cfg.constraint_check_stride = 5;
    let traj = run(&s, &cfg, &p, &RunOptions::default(), |_| Ok(())).unwrap();
    assert_eq!(traj.status, RunStatus::Completed);
    assert!(traj.max_residual() < 1e-9, "{}", traj.max_residual());
    assert_eq!(traj.norms.len(), 41);
    assert_eq!(traj.residuals.len(), 9);
}

#[test]
fn snapshots_follow_stride_and_end_time() {
    let g = Grid3::new(10.0, 8).unwrap();
    let p = params();
    let s = InitialData::random(1e-2, 3).generate(g);
    let mut cfg = IntegratorConfig::new(Scheme::ExponentialRk4, 0.1, 1.05);
    cfg.snapshot_stride = 4;
    let mut times = Vec::new();
    let traj = run(&s, &cfg, &p, &RunOptions::default(), |snap| {
        times.push(snap.time);
        Ok(())
    })
    .unwrap();
    assert_eq!(traj.steps, 11);
    assert_eq!(times.len(), 4);
    assert!((times[3] - 1.05).abs() < 1e-12);
    assert!((traj.final_state.time - 1.05).abs() < 1e-12);
}

#[test]
fn profile_bookkeeping_agrees() {
    let g = Grid3::new(20.0, 16).unwrap();
    let p = params();
    let s = InitialData::random(0.05, 12).generate(g);
    let cfg = IntegratorConfig::new(Scheme::ExponentialRk4, 0.05, 1.0);
    let (traj, snaps) = run_collect(&s, &cfg, &p, &RunOptions::default()).unwrap();
    assert_eq!(snaps.len(), 21);
    let last = &traj.final_state;
    let again = Profiles::from_diag(last, &p).to_diag(&p);
    assert!(again.max_abs_diff(last) < 1e-12 * last.a.max_abs().max(last.bc.max_abs()));
}

#[test]
fn large_data_status_is_recorded() {
    let g = Grid3::new(10.0, 8).unwrap();
    let p = params();
    let s = InitialData::random(0.5, 13).generate(g);
    let cfg = IntegratorConfig::new(Scheme::ExponentialRk4, 0.05, 1.0);
    let traj = run(&s, &cfg, &p, &RunOptions::default(), |_| Ok(())).unwrap();
    assert!(matches!(traj.status, RunStatus::Completed | RunStatus::Diverged { .. }));
}

#[test]
fn cross_formulation_agreement() {
    let start = Instant::now();
    let g = Grid3::new(16.0 * PI, 48).unwrap();
    let p = params();
    let s = InitialData::random(1e-3, 14).generate(g);
    let exp_cfg = IntegratorConfig::new(Scheme::ExponentialRk4, 0.05, 1.0);
    let prim_cfg = IntegratorConfig::new(Scheme::ClassicalRk4, 0.01, 1.0);
    let a = run(&s, &exp_cfg, &p, &RunOptions::default(), |_| Ok(())).unwrap();
    let b = run(&s, &prim_cfg, &p, &RunOptions::default(), |_| Ok(())).unwrap();
    let rel = a.final_state.distance(&b.final_state, 2.0) / a.final_state.sobolev_norm(2.0);
    assert!(rel < 1e-6, "relative H2 gap {rel:e}");
    eprintln!("cross-formulation: {rel:e} in {:?}", start.elapsed());
}
