use emlab::resonance::*;
use emlab::spectral::Grid3;
use proptest::prelude::*;

const CS: f64 = 0.5;

fn spec(e1: i8, e2: i8, k: Speed, l: Speed, m: Speed) -> PhaseSpec {
    PhaseSpec::new(e1, e2, k, l, m, CS).unwrap()
}

fn bracket(a: f64, x: f64) -> f64 {
    (1.0 + a * a * x * x).sqrt()
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[test]
fn phase_values_at_known_points() {
    let all_plus = spec(1, 1, Speed::Light, Speed::Light, Speed::Light);
    assert_eq!(phase_value(&all_plus, [0.0; 3], [0.0; 3]), 3.0);

    let p = spec(-1, -1, Speed::Light, Speed::Sound, Speed::Sound);
    let v = phase_value(&p, [2.0, 0.0, 0.0], [1.0, 0.0, 0.0]);
    assert!(v.abs() < 1e-12);
    assert!((5f64.sqrt() - 2.0 * 1.25f64.sqrt()).abs() < 1e-15);

    for k in Speed::ALL {
        for l in Speed::ALL {
            let p = spec(1, -1, k, l, l);
            let xi = [0.3, -1.2, 2.0];
            let expect = bracket(k.value(CS), norm(xi)) + bracket(l.value(CS), norm(xi)) - 1.0;
            assert!((phase_value(&p, xi, xi) - expect).abs() < 1e-14);
        }
    }
}

#[test]
fn gradient_vanishes_at_known_points() {
    for p in PhaseSpec::all(CS).unwrap() {
        assert_eq!(phase_eta_gradient(&p, [0.0; 3], [0.0; 3]), [0.0; 3]);
    }
    let p = spec(-1, -1, Speed::Light, Speed::Sound, Speed::Sound);
    let g = phase_eta_gradient(&p, [2.0, 0.0, 0.0], [1.0, 0.0, 0.0]);
    assert!(norm(g) < 1e-15);
}

#[test]
fn spec_validation() {
    assert!(PhaseSpec::new(2, 1, Speed::Light, Speed::Light, Speed::Light, CS).is_err());
    assert!(PhaseSpec::new(1, 1, Speed::Light, Speed::Light, Speed::Light, 1.0).is_err());
    assert_eq!(PhaseSpec::all(CS).unwrap().len(), 32);
}

#[test]
fn all_plus_phase_has_no_resonances() {
    let p = spec(1, 1, Speed::Light, Speed::Light, Speed::Light);
    assert!(find_resonances(&p, 6.0, 1e-9).unwrap().is_empty());
}

#[test]
fn closed_form_resonance_is_found() {
    let p = spec(-1, -1, Speed::Light, Speed::Sound, Speed::Sound);
    let pts = find_resonances(&p, 6.0, 1e-9).unwrap();
    let hit = pts
        .iter()
        .find(|q| (q.s - 2.0).abs() < 1e-6 && (q.r - 1.0).abs() < 1e-6)
        .expect("resonance at (2, 1)");
    assert!(hit.phase_residual < 1e-9 && hit.gradient_residual < 1e-9);
    // s² = 3/(1 − c_s²) on the slice r = s/2
    assert!((hit.s - (3.0 / (1.0 - CS * CS)).sqrt()).abs() < 1e-9);
}

#[test]
fn tightening_tolerance_never_adds_points() {
    for p in PhaseSpec::all(CS).unwrap() {
        let loose = find_resonances(&p, 5.0, 1e-8).unwrap();
        let tight = find_resonances(&p, 5.0, 5e-9).unwrap();
        assert!(tight.len() <= loose.len());
        for q in &tight {
            assert!(loose.iter().any(|l| (l.s - q.s).abs() < 1e-7 && (l.r - q.r).abs() < 1e-7));
        }
    }
}

#[test]
fn roots_are_stable_under_repolishing() {
    for p in PhaseSpec::all(CS).unwrap() {
        for q in find_resonances(&p, 6.0, 1e-9).unwrap() {
            for (ds, dr) in [(1e-3, -1e-3), (-2e-3, 5e-4)] {
                let again = polish_root(&p, q.s + ds, q.r + dr, 1e-9).expect("converges");
                assert!((again.s - q.s).abs() < 1e-9 && (again.r - q.r).abs() < 1e-9);
            }
        }
    }
}

/// Newton on `∂_ηφ(ξ, ·) = 0` in full 3D with a finite-difference Hessian.
fn space_resonance_3d(p: &PhaseSpec, xi: [f64; 3], mut eta: [f64; 3]) -> Option<[f64; 3]> {
    let h = 1e-6;
    for _ in 0..60 {
        let g = phase_eta_gradient(p, xi, eta);
        if norm(g) < 1e-12 {
            return Some(eta);
        }
        let mut jac = [[0.0; 3]; 3];
        for j in 0..3 {
            let mut a = eta;
            let mut b = eta;
            a[j] += h;
            b[j] -= h;
            let (ga, gb) = (phase_eta_gradient(p, xi, a), phase_eta_gradient(p, xi, b));
            for i in 0..3 {
                jac[i][j] = (ga[i] - gb[i]) / (2.0 * h);
            }
        }
        let det = jac[0][0] * (jac[1][1] * jac[2][2] - jac[1][2] * jac[2][1])
            - jac[0][1] * (jac[1][0] * jac[2][2] - jac[1][2] * jac[2][0])
            + jac[0][2] * (jac[1][0] * jac[2][1] - jac[1][1] * jac[2][0]);
        if det.abs() < 1e-14 {
            return None;
        }
        let solve = |col: usize| {
            let mut m = jac;
            for i in 0..3 {
                m[i][col] = g[i];
            }
            (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
                / det
        };
        let step = [solve(0), solve(1), solve(2)];
        for i in 0..3 {
            eta[i] -= step[i];
        }
        if !eta.iter().all(|v| v.is_finite()) || norm(eta) > 1e3 {
            return None;
        }
    }
    (norm(phase_eta_gradient(p, xi, eta)) < 1e-8).then_some(eta)
}

#[test]
fn space_resonances_are_collinear() {
    let mut found = 0;
    for p in PhaseSpec::all(CS).unwrap() {
        for (xi, eta0) in [
            ([1.0, 0.5, -0.3], [0.2, 0.4, 0.1]),
            ([2.0, -1.0, 0.7], [1.5, -0.2, 0.3]),
            ([0.4, 0.1, 0.9], [-0.5, 0.3, 0.6]),
        ] {
            let Some(eta) = space_resonance_3d(&p, xi, eta0) else { continue };
            let d = [xi[0] - eta[0], xi[1] - eta[1], xi[2] - eta[2]];
            if norm(eta) < 1e-8 || norm(d) < 1e-8 {
                continue;
            }
            let c = [
                eta[1] * d[2] - eta[2] * d[1],
                eta[2] * d[0] - eta[0] * d[2],
                eta[0] * d[1] - eta[1] * d[0],
            ];
            let sine = norm(c) / (norm(eta) * norm(d));
            assert!(sine < 1e-6, "{p}: sine {sine}");
            found += 1;
        }
    }
    assert!(found > 0);
}

#[test]
fn report_at_half_sound_speed() {
    let rep = resonance_report(CS, 6.0, 1e-9).unwrap();
    assert_eq!(rep.phases.len(), 32);
    assert!(rep.outcome.contains(2.0));
    assert!(rep.germ.contains(1.0));
    for (p, q) in rep.points() {
        assert!(q.phase_residual < 1e-9 && q.gradient_residual < 1e-9, "{p}");
        assert!(p.reduced_value(q.s, q.r).abs() < 1e-9);
    }
    let max_norm = rep.points().map(|(_, q)| q.norm()).fold(0.0, f64::max);
    assert!((rep.c_r - 1.0 - max_norm).abs() < 1e-15);
    assert!(rep.separated);
    assert!(!rep.outcome.intersects(&rep.germ));
    assert!((rep.delta0 - rep.outcome.gap(&rep.germ) / 10.0).abs() < 1e-15);
    assert!(rep.delta0 > 0.0);
    // swapping the inputs maps resonances of one phase onto its mirror
    for ph in &rep.phases {
        let mirror = rep.phases.iter().find(|o| o.spec == ph.spec.swapped()).unwrap();
        for q in &ph.points {
            assert!(mirror
                .points
                .iter()
                .any(|m| (m.s - q.s).abs() < 1e-8 && (m.r - (q.s - q.r)).abs() < 1e-8));
        }
    }
    for ph in &rep.phases {
        for &[s, r] in ph.time_resonances.iter().take(50) {
            assert!(ph.spec.reduced_value(s, r).abs() < 1e-3);
        }
    }
}

#[test]
fn interval_endpoints_nest_as_tolerance_shrinks() {
    let mut previous: Option<ResonanceReport> = None;
    for tol in [1e-6, 1e-7, 1e-8, 1e-9] {
        let rep = resonance_report(CS, 4.0, tol).unwrap();
        if let Some(prev) = &previous {
            for (set, prev_set) in [(&rep.outcome, &prev.outcome), (&rep.germ, &prev.germ)] {
                assert_eq!(set.intervals().len(), prev_set.intervals().len());
                for (a, b) in set.intervals().iter().zip(prev_set.intervals()) {
                    assert!(a.0 >= b.0 && a.1 <= b.1);
                }
            }
        }
        previous = Some(rep);
    }
}

#[test]
fn interval_set_algebra() {
    let a = IntervalSet::from_radii([1.0, 1.05, 3.0], 0.05);
    assert_eq!(a.intervals().len(), 2);
    assert!((a.intervals()[0].0 - 0.95).abs() < 1e-15 && (a.intervals()[0].1 - 1.1).abs() < 1e-15);
    let b = IntervalSet::from_radii([2.0], 0.1);
    assert!(!a.intersects(&b));
    assert!((a.gap(&b) - 0.8).abs() < 1e-12);
    assert!(a.intersects(&IntervalSet::from_radii([3.04], 0.0)));
    assert!(IntervalSet::empty().gap(&a).is_infinite());
    assert!((a.distance_to(2.0) - 0.9).abs() < 1e-15);
    assert_eq!(IntervalSet::from_radii([0.01], 0.1).intervals()[0].0, 0.0);
}

#[test]
fn lower_bound_closed_form_and_check() {
    let bound = phase_lower_bound(CS, 3.0);
    assert!((bound - (3.25f64.sqrt() - 1.5) / 2.0).abs() < 1e-15);
    assert!((bound - 0.151387).abs() < 1e-6);
    assert_eq!(lower_bound_family(CS).unwrap().len(), 16);
    let check = verify_phase_lower_bound(CS, 3.0, 100.0, 0.01).unwrap();
    assert!(check.pass);
    assert!(check.min_phi >= check.bound);
}

#[test]
fn lower_bound_fails_for_small_c0() {
    let check = verify_phase_lower_bound(CS, 3.0, 3.5, 0.02).unwrap();
    assert!(!check.pass);
    assert!(verify_phase_lower_bound(CS, 3.0, 2.0, 0.01).is_err());
}

#[test]
fn eta_zero_slice_is_one() {
    let p = spec(1, -1, Speed::Sound, Speed::Sound, Speed::Sound);
    for x in [0.0, 0.7, 10.0, 1234.5] {
        assert!((phase_value(&p, [x, 0.0, 0.0], [0.0; 3]) - 1.0).abs() < 1e-12);
    }
}

fn suite() -> (ResonanceReport, CutoffSuite) {
    let rep = resonance_report(CS, 6.0, 1e-9).unwrap();
    let grid = Grid3::new(20.0, 16).unwrap();
    let suite = build_cutoff_suite(&rep, 2.0 * rep.c_r, &grid).unwrap();
    (rep, suite)
}

#[test]
fn cutoff_suite_construction() {
    let (rep, suite) = suite();
    assert_eq!(suite.delta0, rep.delta0);
    assert_eq!(suite.chi_o(2.0), 1.0);
    assert_eq!(suite.chi_o(2.0 + 1.01 * rep.delta0), 0.0);
    assert_eq!(suite.chi_o(2.0 + 0.49 * rep.delta0), 1.0);
    for i in 0..suite.theta.len() {
        assert!((suite.z_low[i] + suite.z_high[i] - 1.0).abs() < 1e-15);
        assert!((suite.chi_outcome[i] + suite.chi_outcome_complement[i] - 1.0).abs() < 1e-15);
    }
    assert_eq!(theta(0.5), 1.0);
    assert_eq!(theta(2.5), 0.0);
    assert_eq!(smoothstep(0.5), 0.5);

    let mut bad = rep.clone();
    bad.separated = false;
    assert!(build_cutoff_suite(&bad, 10.0, suite.grid()).is_err());
    assert!(build_cutoff_suite(&rep, 0.5 * rep.c_r, suite.grid()).is_err());
}

#[test]
fn chi_s_over_phi_stays_finite() {
    let (_, suite) = suite();
    let radii: Vec<f64> = (0..8).map(|i| 2f64.powi(i)).collect();
    for p in PhaseSpec::all(CS).unwrap() {
        let growth = suite.chi_s_over_phi_growth(&p, &radii, 400, 7).unwrap();
        assert!(growth.all_finite, "{p}");
    }
    let p = spec(-1, -1, Speed::Light, Speed::Sound, Speed::Sound);
    // at the resonance the guard switches the symbol off
    assert_eq!(suite.chi_s_over_phi(&p, [2.0, 0.0, 0.0], [1.0, 0.0, 0.0]).unwrap(), 0.0);
    let growth = suite.chi_s_over_phi_growth(&p, &radii, 400, 7).unwrap();
    assert!(growth.fit.is_some());
}

fn rotation(axis: [f64; 3], angle: f64) -> [[f64; 3]; 3] {
    let n = norm(axis);
    let [x, y, z] = axis.map(|a| a / n);
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ]
}

fn rotate(r: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2])
}

fn vec3() -> impl Strategy<Value = [f64; 3]> {
    [-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64]
}

proptest! {
    #[test]
    fn phase_is_rotation_invariant(xi in vec3(), eta in vec3(), axis in vec3(), angle in 0.0..6.3f64, idx in 0usize..32) {
        prop_assume!(norm(axis) > 1e-3);
        let p = PhaseSpec::all(CS).unwrap()[idx];
        let r = rotation(axis, angle);
        let a = phase_value(&p, xi, eta);
        let b = phase_value(&p, rotate(&r, xi), rotate(&r, eta));
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn phase_symmetry_under_input_swap(xi in vec3(), eta in vec3(), idx in 0usize..32) {
        let p = PhaseSpec::all(CS).unwrap()[idx];
        let d = [xi[0] - eta[0], xi[1] - eta[1], xi[2] - eta[2]];
        let a = phase_value(&p, xi, eta);
        let b = phase_value(&p.swapped(), xi, d);
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn all_plus_phases_are_bounded_below(xi in vec3(), eta in vec3(), idx in 0usize..8) {
        let specs: Vec<PhaseSpec> = PhaseSpec::all(CS).unwrap().into_iter().filter(|p| p.eps1 > 0 && p.eps2 > 0).collect();
        let p = specs[idx];
        prop_assert!(phase_value(&p, xi, eta) >= 1.0 + CS);
    }

    #[test]
    fn gradient_matches_finite_differences(xi in vec3(), eta in vec3(), idx in 0usize..32) {
        let p = PhaseSpec::all(CS).unwrap()[idx];
        let g = phase_eta_gradient(&p, xi, eta);
        let h = 1e-5;
        for i in 0..3 {
            let mut a = eta;
            let mut b = eta;
            a[i] += h;
            b[i] -= h;
            let fd = (phase_value(&p, xi, a) - phase_value(&p, xi, b)) / (2.0 * h);
            prop_assert!((fd - g[i]).abs() < 1e-8, "component {} fd {} analytic {}", i, fd, g[i]);
        }
    }

    #[test]
    fn reduced_gradient_matches_vector_gradient(s in -5.0..5.0f64, r in -5.0..5.0f64, idx in 0usize..32) {
        let p = PhaseSpec::all(CS).unwrap()[idx];
        let g = phase_eta_gradient(&p, [s, 0.0, 0.0], [r, 0.0, 0.0]);
        prop_assert!((g[0] - p.reduced_gradient(s, r)).abs() < 1e-14);
        prop_assert!((p.reduced_value(s, r) - phase_value(&p, [s, 0.0, 0.0], [r, 0.0, 0.0])).abs() < 1e-14);
    }

    #[test]
    fn cutoff_partitions(xi in vec3(), eta in vec3()) {
        let (_, suite) = suite_cached();
        prop_assert!((suite.chi_o(norm(xi)) + suite.chi_o_complement(norm(xi)) - 1.0).abs() < 1e-12);
        prop_assert!((suite.zeta1(xi, eta) + suite.zeta2(xi, eta) - 1.0).abs() < 1e-12);
        let d = norm([xi[0] - eta[0], xi[1] - eta[1], xi[2] - eta[2]]);
        if (norm(xi).powi(2) + norm(eta).powi(2)).sqrt() >= 1.0 {
            if suite.zeta1(xi, eta) > 0.0 {
                prop_assert!(d <= 2.0 * norm(eta));
            }
            if suite.zeta2(xi, eta) > 0.0 {
                prop_assert!(norm(eta) <= 2.0 * d);
            }
        }
        for p in PhaseSpec::all(CS).unwrap() {
            let dist = suite.resonance_distance(&p, xi, eta).unwrap();
            if dist > suite.delta0 / 10.0 {
                let (s, t) = suite.chi_time_space(&p, xi, eta).unwrap();
                prop_assert!((s + t - 1.0).abs() < 1e-10);
            }
        }
    }
}

fn suite_cached() -> &'static (ResonanceReport, CutoffSuite) {
    static SUITE: std::sync::OnceLock<(ResonanceReport, CutoffSuite)> = std::sync::OnceLock::new();
    SUITE.get_or_init(suite)
}
