mod common;

use emlab::model::*;
use emlab::spectral::{
    curl, discrete_norm, discrete_norm_many, divergence, gradient, Grid3, MultiplierSymbol, NormSpec, SpectralField,
};
use num_complex::Complex64;
use std::f64::consts::PI;

fn params() -> PhysicalParams {
    PhysicalParams::new(0.5).unwrap()
}

fn diag_rel_diff(a: &DiagState, b: &DiagState) -> f64 {
    let da = &a.a - &b.a;
    let db = &a.bc - &b.bc;
    let num = discrete_norm_many(&[&da, &db], NormSpec::L2).unwrap();
    let den = discrete_norm_many(&[&b.a, &b.bc], NormSpec::L2).unwrap();
    num / den
}

#[test]
fn params_reject_out_of_range_sound_speed() {
    assert!(PhysicalParams::new(0.0).is_err());
    assert!(PhysicalParams::new(1.0).is_err());
    assert!(PhysicalParams::new(f64::NAN).is_err());
    assert!(PhysicalParams::new(0.3).is_ok());
}

#[test]
fn zero_state_maps_to_zero() {
    let g = Grid3::new(16.0, 16).unwrap();
    let p = params();
    let z = EMState::zeros(g);
    let d = diagonalize(&z, &p).unwrap();
    assert_eq!(d.a.max_abs(), 0.0);
    assert_eq!(d.bc.max_abs(), 0.0);
    let back = reconstruct(&DiagState::zeros(g), &p);
    assert_eq!(back.max_abs(), 0.0);
    let r = constraint_residuals(&z);
    assert_eq!((r.gauss, r.div_b, r.curl_constraint), (0.0, 0.0, 0.0));
    assert_eq!(rhs_primitive(&z, &p).max_abs(), 0.0);
    let dd = rhs_diagonal(&DiagState::zeros(g), &p);
    assert_eq!(dd.a.max_abs() + dd.bc.max_abs(), 0.0);
}

#[test]
fn gradient_velocity_gives_imaginary_acoustic_variable() {
    // u = ∇ cos(k·x) with k = (1, 0, 0) on L = 2π: (∇/|D|)·u = -|D| cos = -cos(x),
    // so A = (i/2)(-cos x) and B = 0.
    let g = Grid3::new(2.0 * PI, 16).unwrap();
    let phi = SpectralField::from_fn(g, |[x, _, _]| x.cos());
    let mut s = EMState::zeros(g);
    s.u = gradient(&phi).unwrap();
    let d = diagonalize(&s, &params()).unwrap();
    let expected = SpectralField::from_fn(g, |[x, _, _]| -0.5 * x.cos()).times_i();
    assert!(d.a.max_abs_diff(&expected) < 1e-13);
    assert!(d.bc.max_abs() < 1e-13);
}

#[test]
fn round_trips_on_random_states() {
    let p = params();
    for n in [16, 32] {
        let g = Grid3::new(20.0, n).unwrap();
        for seed in 0..3 {
            let s = InitialData::random(0.3, seed).generate(g);
            assert!(constraint_residuals(&s).max() < 1e-12);
            let d = diagonalize(&s, &p).unwrap();
            let back = reconstruct(&d, &p);
            assert!(back.max_abs_diff(&s) < 1e-11 * s.max_abs().max(1.0), "n = {n}");
            let again = diagonalize(&back, &p).unwrap();
            assert!(again.max_abs_diff(&d) < 1e-11);
        }
    }
}

#[test]
fn reconstruct_with_vanishing_electromagnetic_part() {
    let g = Grid3::new(10.0, 16).unwrap();
    let p = params();
    let s = InitialData::random(0.1, 4).generate(g);
    let mut d = diagonalize(&s, &p).unwrap();
    d.bc = SpectralField::zeros(g, 3);
    let back = reconstruct(&d, &p);
    assert!(back.b.max_abs() < 1e-15);
    let pu = emlab::spectral::helmholtz_p(&back.u).unwrap();
    let pe = emlab::spectral::helmholtz_p(&back.e).unwrap();
    assert!(pu.max_abs() < 1e-15);
    assert!(pe.max_abs() < 1e-15);
}

#[test]
fn gauss_violation_is_rejected() {
    let g = Grid3::new(10.0, 16).unwrap();
    let mut s = InitialData::random(0.1, 2).generate(g);
    s.e = SpectralField::zeros(g, 3);
    assert!(diagonalize(&s, &params()).is_err());
}

#[test]
fn curl_constraint_residual_detects_perturbation() {
    let g = Grid3::new(2.0 * PI, 16).unwrap();
    let mut s = InitialData::random(0.2, 9).generate(g);
    let b_norm = discrete_norm(&s.b, NormSpec::L2).unwrap();
    // add δ·(sin y, 0, 0) to B; its L² norm is δ (L^3/2)^{1/2}
    let delta = 1e-3;
    let bump = SpectralField::from_vector_fn(g, |[_, y, _]| [delta * y.sin(), 0.0, 0.0]);
    let bump_norm = discrete_norm(&bump, NormSpec::L2).unwrap();
    s.b = &s.b + &bump;
    let r = constraint_residuals(&s);
    let expected = bump_norm / discrete_norm(&s.b, NormSpec::L2).unwrap();
    assert!((r.curl_constraint - expected).abs() < 1e-6 * expected);
    assert!(expected > 0.5 * delta * (PI.powi(3) * 4.0).sqrt() / b_norm);
}

#[test]
fn gauss_law_is_propagated_algebraically() {
    let g = Grid3::new(12.0, 16).unwrap();
    let p = params();
    let s = InitialData::random(0.2, 3).generate(g);
    let ds = rhs_primitive(&s, &p);
    let rate = &divergence(&ds.e).unwrap() + &ds.n;
    let scale = discrete_norm(&ds.n, NormSpec::L2).unwrap();
    assert!(discrete_norm(&rate, NormSpec::L2).unwrap() < 1e-12 * scale);
}

#[test]
fn chain_rule_matches_diagonal_rhs() {
    let g = Grid3::new(20.0, 32).unwrap();
    let p = params();
    let s = InitialData::random(0.05, 11).generate(g);
    let via_primitive = diagonalize_unchecked(&rhs_primitive(&s, &p), &p);
    let direct = rhs_diagonal(&diagonalize(&s, &p).unwrap(), &p);
    let err = diag_rel_diff(&via_primitive, &direct);
    assert!(err < 1e-9, "relative mismatch {err:e}");
}

#[test]
fn quadratic_remainder_scales_with_amplitude_squared() {
    let g = Grid3::new(20.0, 16).unwrap();
    let p = params();
    let base = InitialData::random(1.0, 5).generate(g);
    let mut pts = Vec::new();
    for amp in [1e-2, 1e-3, 1e-4] {
        let s = EMState {
            u: &base.u * amp,
            n: &base.n * amp,
            e: &base.e * amp,
            b: &base.b * amp,
            time: 0.0,
        };
        let full = rhs_primitive(&s, &p);
        let lin = rhs_linear(&s, &p);
        let mut diff = full.clone();
        diff.axpy(-1.0, &lin);
        let r = diff
            .fields()
            .iter()
            .map(|f| discrete_norm(f, NormSpec::L2).unwrap().powi(2))
            .sum::<f64>()
            .sqrt();
        pts.push((amp.ln(), r.ln()));
        let nl = diagonal_nonlinearity(&diagonalize(&s, &p).unwrap(), &p);
        assert!(nl.sobolev_norm(0.0) < 1e3 * amp * amp);
    }
    let slope = (pts[2].1 - pts[0].1) / (pts[2].0 - pts[0].0);
    assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
}

#[test]
fn electromagnetic_forcing_is_divergence_free() {
    let g = Grid3::new(2.0 * PI, 16).unwrap();
    let p = params();
    // single acoustic mode in n, Gauss-consistent E, no EM part
    let mut s = EMState::zeros(g);
    s.n = SpectralField::from_fn(g, |[x, y, _]| 0.01 * (x + y).cos());
    s.u = SpectralField::from_vector_fn(g, |[x, y, _]| [0.01 * (x + y).sin(), 0.01 * (x + y).sin(), 0.0]);
    s.e = MultiplierSymbol::riesz()
        .apply(&MultiplierSymbol::inverse_modulus().apply(&s.n).unwrap())
        .unwrap();
    s.b = curl(&s.u).unwrap();
    let d = diagonalize(&s, &p).unwrap();
    assert!(d.bc.max_abs() < 1e-14);
    let nl = diagonal_nonlinearity(&d, &p);
    let div = divergence(&nl.bc).unwrap();
    assert!(div.max_abs() < 1e-12);
}

#[test]
fn linear_frequencies_match_brackets() {
    // one mode k = (1,0,0)·2π/L; the linear acoustic block rotates A at ⟨k⟩_{c_s},
    // the electromagnetic block rotates B at ⟨k⟩.
    let l = 2.0 * PI;
    let g = Grid3::new(l, 8).unwrap();
    let p = params();
    let mut s = EMState::zeros(g);
    s.n = SpectralField::from_fn(g, |[x, _, _]| x.cos());
    s.e = MultiplierSymbol::riesz()
        .apply(&MultiplierSymbol::inverse_modulus().apply(&s.n).unwrap())
        .unwrap();
    let w = SpectralField::from_vector_fn(g, |[x, _, _]| [0.0, x.sin(), 0.0]);
    s.u = w.clone();
    s.b = curl(&w).unwrap();
    let d = diagonalize(&s, &p).unwrap();
    let dd = diagonalize_unchecked(&rhs_linear(&s, &p), &p);
    let idx = g.index(1, 0, 0);
    let omega_a = dd.a.coefficients(0)[idx] / d.a.coefficients(0)[idx];
    let omega_b = dd.bc.coefficients(2)[idx] / d.bc.coefficients(2)[idx];
    let ka = (1.0f64 + 0.25).sqrt();
    let kb = 2.0f64.sqrt();
    assert!((omega_a - Complex64::new(0.0, ka)).norm() < 1e-6 * ka);
    assert!((omega_b - Complex64::new(0.0, kb)).norm() < 1e-6 * kb);
}

#[test]
fn profiles_round_trip() {
    let g = Grid3::new(20.0, 16).unwrap();
    let p = params();
    let mut d = diagonalize(&InitialData::random(0.1, 1).generate(g), &p).unwrap();
    d.time = 3.7;
    let prof = Profiles::from_diag(&d, &p);
    let back = prof.to_diag(&p);
    assert!(back.max_abs_diff(&d) < 1e-12);
    assert!((back.time - d.time).abs() < 1e-15);
}

#[test]
fn single_pass_kernels_match_operator_composition() {
    let p = params();
    for (n, seed) in [(16, 21), (24, 22)] {
        let g = Grid3::new(15.0, n).unwrap();
        let s = InitialData::random(0.2, seed).generate(g);
        let d = diagonalize(&s, &p).unwrap();
        let d_ref = common::diagonalize(&s, &p);
        assert!(d.max_abs_diff(&d_ref) < 1e-13 * d_ref.a.max_abs().max(d_ref.bc.max_abs()));

        let back = reconstruct(&d, &p);
        let back_ref = common::reconstruct(&d, &p);
        assert!(back.max_abs_diff(&back_ref) < 1e-13 * back_ref.max_abs());

        let nl = diagonal_nonlinearity(&d, &p);
        let nl_ref = common::diagonal_nonlinearity(&d, &p);
        assert!(diag_rel_diff(&nl, &nl_ref) < 1e-12);

        let lin = rhs_linear(&s, &p);
        let lin_ref = common::rhs_linear(&s, &p);
        assert!(lin.max_abs_diff(&lin_ref) < 1e-13 * lin_ref.max_abs());

        let full = rhs_primitive(&s, &p);
        let full_ref = common::rhs_primitive(&s, &p);
        assert!(full.max_abs_diff(&full_ref) < 1e-12 * full_ref.max_abs(), "n = {n}");
    }
}
