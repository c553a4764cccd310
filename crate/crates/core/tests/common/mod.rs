//! Operator-level reference implementations, composed from the public
//! multiplier API, used as oracles for the single-pass kernels.
#![allow(dead_code)]

use emlab::model::{DiagState, EMState, PhysicalParams};
use emlab::spectral::{curl, divergence, gradient, product, MultiplierSymbol, SpectralField};
use num_complex::Complex64;

pub fn diagonalize(s: &EMState, params: &PhysicalParams) -> DiagState {
    let i = Complex64::new(0.0, 1.0);
    let mut a = MultiplierSymbol::bracket_over_modulus(params.c_s()).apply(&s.n).unwrap();
    a.axpy(i, &MultiplierSymbol::riesz().apply(&s.u).unwrap());
    let mut bc = -&MultiplierSymbol::riesz_curl().apply(&s.e).unwrap();
    bc.axpy(i, &MultiplierSymbol::bracket_over_modulus(1.0).apply(&s.b).unwrap());
    DiagState {
        a: &a * 0.5,
        bc,
        time: s.time,
    }
}

pub fn velocity_density(d: &DiagState, params: &PhysicalParams) -> (SpectralField, SpectralField) {
    let m = MultiplierSymbol::modulus().apply(&d.a.re()).unwrap();
    let n = &MultiplierSymbol::bracket_power(params.c_s(), -1.0).apply(&m).unwrap() * 2.0;
    let qu = &MultiplierSymbol::riesz().apply(&d.a.im()).unwrap() * -2.0;
    let pu = MultiplierSymbol::riesz_curl()
        .apply(&MultiplierSymbol::bracket_power(1.0, -1.0).apply(&d.bc.im()).unwrap())
        .unwrap();
    (&qu + &pu, n)
}

pub fn reconstruct(d: &DiagState, params: &PhysicalParams) -> EMState {
    let (u, n) = velocity_density(d, params);
    let pe = -&MultiplierSymbol::riesz_curl().apply(&d.bc.re()).unwrap();
    let b = MultiplierSymbol::bracket_power(1.0, -1.0)
        .apply(&MultiplierSymbol::modulus().apply(&d.bc.im()).unwrap())
        .unwrap();
    let qe = MultiplierSymbol::riesz()
        .apply(&MultiplierSymbol::inverse_modulus().apply(&n).unwrap())
        .unwrap();
    EMState {
        u,
        n,
        e: &qe + &pe,
        b,
        time: d.time,
    }
}

pub fn diagonal_nonlinearity(d: &DiagState, params: &PhysicalParams) -> DiagState {
    let (u, n) = velocity_density(d, params);
    let grid = *d.grid();
    let c2 = params.c_s().powi(2);
    let nu = product(&n, &u).unwrap();
    let uv = u.real_values();
    let nv = n.real_values().pop().unwrap();
    let q: Vec<f64> = (0..grid.len())
        .map(|x| uv[0][x] * uv[0][x] + uv[1][x] * uv[1][x] + uv[2][x] * uv[2][x] + c2 * nv[x] * nv[x])
        .collect();
    let q = SpectralField::from_real_values(grid, vec![q]).unwrap().dealiased();
    let div_nu = MultiplierSymbol::riesz().apply(&nu).unwrap();
    let mut na = &MultiplierSymbol::bracket(params.c_s()).apply(&div_nu).unwrap() * -0.5;
    na.axpy(Complex64::new(0.0, 0.25), &MultiplierSymbol::modulus().apply(&q).unwrap());
    DiagState {
        a: na,
        bc: -&MultiplierSymbol::riesz_curl().apply(&nu).unwrap(),
        time: d.time,
    }
}

pub fn rhs_linear(s: &EMState, params: &PhysicalParams) -> EMState {
    let c2 = params.c_s().powi(2);
    EMState {
        u: &(&gradient(&s.n).unwrap() * -c2) - &s.e,
        n: -&divergence(&s.u).unwrap(),
        e: &curl(&s.b).unwrap() + &s.u,
        b: -&curl(&s.e).unwrap(),
        time: s.time,
    }
}

/// Advection written as `u_j ∂_j u_i` with all nine derivatives.
pub fn rhs_primitive(s: &EMState, params: &PhysicalParams) -> EMState {
    let mut out = rhs_linear(s, params);
    let grid = *s.grid();
    let c2 = params.c_s().powi(2);
    let u = s.u.real_values();
    let n = s.n.real_values().pop().unwrap();
    let b = s.b.real_values();
    let grad_n = gradient(&s.n).unwrap().real_values();
    let grad_u: Vec<Vec<Vec<f64>>> = (0..3).map(|i| gradient(&s.u.component(i)).unwrap().real_values()).collect();
    let mut quad = vec![vec![0.0; grid.len()]; 3];
    for (i, q) in quad.iter_mut().enumerate() {
        let (j1, j2) = ((i + 1) % 3, (i + 2) % 3);
        for x in 0..grid.len() {
            let advect = u[0][x] * grad_u[i][0][x] + u[1][x] * grad_u[i][1][x] + u[2][x] * grad_u[i][2][x];
            let lorentz = u[j1][x] * b[j2][x] - u[j2][x] * b[j1][x];
            q[x] = -advect - c2 * n[x] * grad_n[i][x] - lorentz;
        }
    }
    let quad = SpectralField::from_real_values(grid, quad).unwrap().dealiased();
    let nu = product(&s.n, &s.u).unwrap();
    out.u = &out.u + &quad;
    out.n = &out.n - &divergence(&nu).unwrap();
    out.e = &out.e + &nu;
    out
}
