//! Single-pass evaluation of the maps and right-hand sides on raw
//! coefficient arrays. Each operator is a per-mode formula, so composing
//! them mode by mode avoids the intermediate fields of the operator-level
//! expressions in `diagonal.rs` and `rhs.rs`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;

use super::state::{DiagState, EMState, PhysicalParams};
use crate::spectral::{bracket, from_real_pair, to_real_pair, Grid3, SpectralField};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub(crate) struct ModeTable {
    /// `|ξ|`.
    pub kappa: Vec<f64>,
    /// `ξ`, zero on Nyquist modes (odd symbols vanish there).
    pub xi: Vec<[f64; 3]>,
    /// `ξ/|ξ|`, zero on Nyquist modes and at the origin.
    pub unit: Vec<[f64; 3]>,
    pub keep: Vec<bool>,
    pub neg: Vec<usize>,
}

/// `(|k|, k without Nyquist axes, unit vector, dealias keep, index of -k)`
type ModeRow = (f64, [f64; 3], [f64; 3], bool, usize);
type ModeCache = Mutex<HashMap<(usize, u64), Arc<ModeTable>>>;

pub(crate) fn mode_table(grid: &Grid3) -> Arc<ModeTable> {
    static CACHE: OnceLock<ModeCache> = OnceLock::new();
    let key = (grid.points_per_axis(), grid.box_length().to_bits());
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().expect("mode cache").get(&key) {
        return t.clone();
    }
    let rows: Vec<ModeRow> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let k = grid.wavevector(i);
            let kappa = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
            let odd = if grid.is_nyquist(i) { [0.0; 3] } else { k };
            let unit = if kappa > 0.0 { odd.map(|x| x / kappa) } else { [0.0; 3] };
            (kappa, odd, unit, grid.dealias_keeps(i), grid.negated(i))
        })
        .collect();
    let mut t = ModeTable {
        kappa: Vec::with_capacity(rows.len()),
        xi: Vec::with_capacity(rows.len()),
        unit: Vec::with_capacity(rows.len()),
        keep: Vec::with_capacity(rows.len()),
        neg: Vec::with_capacity(rows.len()),
    };
    for (a, b, c, d, e) in rows {
        t.kappa.push(a);
        t.xi.push(b);
        t.unit.push(c);
        t.keep.push(d);
        t.neg.push(e);
    }
    let t = Arc::new(t);
    cache.lock().expect("mode cache").insert(key, t.clone());
    t
}

type C3 = [Complex64; 3];

fn dot(a: [f64; 3], v: C3) -> Complex64 {
    v[0] * a[0] + v[1] * a[1] + v[2] * a[2]
}

fn cross(a: [f64; 3], v: C3) -> C3 {
    [
        v[2] * a[1] - v[1] * a[2],
        v[0] * a[2] - v[2] * a[0],
        v[1] * a[0] - v[0] * a[1],
    ]
}

fn at3(f: &SpectralField, i: usize) -> C3 {
    [f.coefficients(0)[i], f.coefficients(1)[i], f.coefficients(2)[i]]
}

fn split3(rows: Vec<C3>) -> Vec<Vec<Complex64>> {
    let mut out: Vec<Vec<Complex64>> = (0..3).map(|_| Vec::with_capacity(rows.len())).collect();
    for r in rows {
        for c in 0..3 {
            out[c].push(r[c]);
        }
    }
    out
}

fn field(grid: Grid3, coeffs: Vec<Vec<Complex64>>, real: bool) -> SpectralField {
    SpectralField::from_coefficients(grid, coeffs, real).expect("layout")
}

/// Hermitian parts `(Re f)^`, `(Im f)^` of a coefficient array at mode `i`.
fn hermitian(c: &[Complex64], i: usize, j: usize) -> (Complex64, Complex64) {
    let p = c[i];
    let q = c[j].conj();
    let im = 0.5 * (p - q);
    (0.5 * (p + q), Complex64::new(im.im, -im.re))
}

pub(crate) fn diagonalize(s: &EMState, params: &PhysicalParams) -> DiagState {
    let grid = *s.grid();
    let t = mode_table(&grid);
    let c_s = params.c_s();
    let rows: Vec<(Complex64, C3)> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let kappa = t.kappa[i];
            if kappa == 0.0 {
                return (Complex64::default(), [Complex64::default(); 3]);
            }
            let u = at3(&s.u, i);
            let a = 0.5 * (s.n.coefficients(0)[i] * (bracket(c_s, kappa) / kappa) + I * (I * dot(t.unit[i], u)));
            let rc = cross(t.unit[i], at3(&s.e, i));
            let b = at3(&s.b, i);
            let w = bracket(1.0, kappa) / kappa;
            (a, [0, 1, 2].map(|c| -(I * rc[c]) + I * (b[c] * w)))
        })
        .collect();
    let (a, bc): (Vec<Complex64>, Vec<C3>) = rows.into_iter().unzip();
    DiagState {
        a: field(grid, vec![a], false),
        bc: field(grid, split3(bc), false),
        time: s.time,
    }
}

/// Coefficients of `u` and `n` at mode `i`.
fn velocity_density_at(d: &DiagState, t: &ModeTable, c_s: f64, i: usize) -> (C3, Complex64) {
    let kappa = t.kappa[i];
    if kappa == 0.0 {
        return ([Complex64::default(); 3], Complex64::default());
    }
    let j = t.neg[i];
    let (re_a, im_a) = hermitian(d.a.coefficients(0), i, j);
    let im_b: C3 = [0, 1, 2].map(|c| hermitian(d.bc.coefficients(c), i, j).1);
    let e = t.unit[i];
    let inv = 1.0 / bracket(1.0, kappa);
    let pu = cross(e, im_b.map(|z| I * z * inv));
    let u = [0, 1, 2].map(|c| -2.0 * I * im_a * e[c] + pu[c]);
    (u, 2.0 * kappa / bracket(c_s, kappa) * re_a)
}

pub(crate) fn velocity_density(d: &DiagState, params: &PhysicalParams) -> (SpectralField, SpectralField) {
    let grid = *d.grid();
    let t = mode_table(&grid);
    let (u, n): (Vec<C3>, Vec<Complex64>) = (0..grid.len())
        .into_par_iter()
        .map(|i| velocity_density_at(d, &t, params.c_s(), i))
        .unzip();
    (field(grid, split3(u), true), field(grid, vec![n], true))
}

pub(crate) fn reconstruct(d: &DiagState, params: &PhysicalParams) -> EMState {
    let grid = *d.grid();
    let t = mode_table(&grid);
    let c_s = params.c_s();
    let rows: Vec<(C3, Complex64, C3, C3)> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let (u, n) = velocity_density_at(d, &t, c_s, i);
            let kappa = t.kappa[i];
            if kappa == 0.0 {
                let z = [Complex64::default(); 3];
                return (u, n, z, z);
            }
            let j = t.neg[i];
            let (re_b, im_b): (Vec<Complex64>, Vec<Complex64>) =
                (0..3).map(|c| hermitian(d.bc.coefficients(c), i, j)).unzip();
            let e = t.unit[i];
            let pe = cross(e, [re_b[0], re_b[1], re_b[2]].map(|z| -I * z));
            let qe = e.map(|x| I * x * n / kappa);
            let w = kappa / bracket(1.0, kappa);
            let b = [0, 1, 2].map(|c| im_b[c] * w);
            (u, n, [0, 1, 2].map(|c| pe[c] + qe[c]), b)
        })
        .collect();
    let mut u = Vec::with_capacity(rows.len());
    let mut n = Vec::with_capacity(rows.len());
    let mut e = Vec::with_capacity(rows.len());
    let mut b = Vec::with_capacity(rows.len());
    for (a, c, x, y) in rows {
        u.push(a);
        n.push(c);
        e.push(x);
        b.push(y);
    }
    EMState {
        u: field(grid, split3(u), true),
        n: field(grid, vec![n], true),
        e: field(grid, split3(e), true),
        b: field(grid, split3(b), true),
        time: d.time,
    }
}

pub(crate) fn diagonal_nonlinearity(d: &DiagState, params: &PhysicalParams) -> DiagState {
    let grid = *d.grid();
    let t = mode_table(&grid);
    let c_s = params.c_s();
    let (u, n) = velocity_density(d, params);
    let (u0, u1) = to_real_pair(&grid, u.coefficients(0), u.coefficients(1));
    let (u2, nv) = to_real_pair(&grid, u.coefficients(2), n.coefficients(0));
    let c2 = c_s * c_s;
    let (p0, p1): (Vec<f64>, Vec<f64>) = (0..grid.len())
        .into_par_iter()
        .map(|x| (nv[x] * u0[x], nv[x] * u1[x]))
        .unzip();
    let (p2, q): (Vec<f64>, Vec<f64>) = (0..grid.len())
        .into_par_iter()
        .map(|x| {
            let q = u0[x] * u0[x] + u1[x] * u1[x] + u2[x] * u2[x] + c2 * nv[x] * nv[x];
            (nv[x] * u2[x], q)
        })
        .unzip();
    let (h0, h1) = from_real_pair(&grid, &p0, &p1);
    let (h2, hq) = from_real_pair(&grid, &p2, &q);
    let rows: Vec<(Complex64, C3)> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            if !t.keep[i] {
                return (Complex64::default(), [Complex64::default(); 3]);
            }
            let kappa = t.kappa[i];
            let e = t.unit[i];
            let nu = [h0[i], h1[i], h2[i]];
            let div = I * dot(e, nu);
            let a = -0.5 * bracket(c_s, kappa) * div + 0.25 * I * kappa * hq[i];
            let b = cross(e, nu).map(|z| -I * z);
            (a, b)
        })
        .collect();
    let (a, bc): (Vec<Complex64>, Vec<C3>) = rows.into_iter().unzip();
    DiagState {
        a: field(grid, vec![a], false),
        bc: field(grid, split3(bc), false),
        time: d.time,
    }
}

/// Right-hand side of the primitive system, with or without its quadratic
/// terms. The advection term is evaluated as `∇(|u|²/2) − u×(∇×u)`, which
/// agrees with `u·∇u` on the retained modes for band-limited input.
pub(crate) fn rhs_primitive(s: &EMState, params: &PhysicalParams, nonlinear: bool) -> EMState {
    let grid = *s.grid();
    let t = mode_table(&grid);
    let c2 = params.c_s().powi(2);
    let len = grid.len();

    let zero = vec![Complex64::default(); len];
    let (mut hp, mut hv, mut hnu) = (zero.clone(), vec![zero.clone(); 3], vec![zero; 3]);
    if nonlinear {
        // w = ∇×u − B
        let w: Vec<C3> = (0..len)
            .into_par_iter()
            .map(|i| {
                let c = cross(t.xi[i], at3(&s.u, i)).map(|z| I * z);
                let b = at3(&s.b, i);
                [0, 1, 2].map(|k| c[k] - b[k])
            })
            .collect();
        let w = split3(w);
        let (u0, u1) = to_real_pair(&grid, s.u.coefficients(0), s.u.coefficients(1));
        let (u2, n) = to_real_pair(&grid, s.u.coefficients(2), s.n.coefficients(0));
        let (w0, w1) = to_real_pair(&grid, &w[0], &w[1]);
        let (w2, _) = to_real_pair(&grid, &w[2], &vec![Complex64::default(); len]);
        let (v0, v1): (Vec<f64>, Vec<f64>) = (0..len)
            .into_par_iter()
            .map(|x| (u1[x] * w2[x] - u2[x] * w1[x], u2[x] * w0[x] - u0[x] * w2[x]))
            .unzip();
        let (v2, p): (Vec<f64>, Vec<f64>) = (0..len)
            .into_par_iter()
            .map(|x| {
                let p = 0.5 * (u0[x] * u0[x] + u1[x] * u1[x] + u2[x] * u2[x]) + 0.5 * c2 * n[x] * n[x];
                (u0[x] * w1[x] - u1[x] * w0[x], p)
            })
            .unzip();
        let (nu0, nu1): (Vec<f64>, Vec<f64>) = (0..len).into_par_iter().map(|x| (n[x] * u0[x], n[x] * u1[x])).unzip();
        let nu2: Vec<f64> = (0..len).into_par_iter().map(|x| n[x] * u2[x]).collect();
        let (a, b) = from_real_pair(&grid, &v0, &v1);
        let (c, d) = from_real_pair(&grid, &v2, &p);
        let (e, f) = from_real_pair(&grid, &nu0, &nu1);
        let (g, _) = from_real_pair(&grid, &nu2, &vec![0.0; len]);
        hv = vec![a, b, c];
        hp = d;
        hnu = vec![e, f, g];
    }

    let rows: Vec<(C3, Complex64, C3, C3)> = (0..len)
        .into_par_iter()
        .map(|i| {
            let k = t.xi[i];
            let u = at3(&s.u, i);
            let e = at3(&s.e, i);
            let b = at3(&s.b, i);
            let n = s.n.coefficients(0)[i];
            let mut du = [0, 1, 2].map(|c| -c2 * I * k[c] * n - e[c]);
            let mut dn = -I * dot(k, u);
            let db = cross(k, e).map(|z| -I * z);
            let curl_b = cross(k, b).map(|z| I * z);
            let mut de = [0, 1, 2].map(|c| curl_b[c] + u[c]);
            if nonlinear && t.keep[i] {
                let nu = [hnu[0][i], hnu[1][i], hnu[2][i]];
                for c in 0..3 {
                    du[c] += -I * k[c] * hp[i] + hv[c][i];
                    de[c] += nu[c];
                }
                dn -= I * dot(k, nu);
            }
            (du, dn, de, db)
        })
        .collect();
    let mut du = Vec::with_capacity(len);
    let mut dn = Vec::with_capacity(len);
    let mut de = Vec::with_capacity(len);
    let mut db = Vec::with_capacity(len);
    for (a, b, c, d) in rows {
        du.push(a);
        dn.push(b);
        de.push(c);
        db.push(d);
    }
    EMState {
        u: field(grid, split3(du), true),
        n: field(grid, vec![dn], true),
        e: field(grid, split3(de), true),
        b: field(grid, split3(db), true),
        time: s.time,
    }
}
