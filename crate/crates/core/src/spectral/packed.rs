//! Two real fields per complex transform.

use num_complex::Complex64;
use rayon::prelude::*;

use super::fft::{Direction, Fft3};
use super::grid::Grid3;

/// Real-space values of two real fields given by Hermitian coefficient
/// arrays, computed with one inverse transform of `a + i b`.
pub(crate) fn to_real_pair(grid: &Grid3, a: &[Complex64], b: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    let fft = Fft3::for_size(grid.points_per_axis());
    let w = 1.0 / grid.volume();
    let mut z: Vec<Complex64> = a
        .par_iter()
        .zip(b)
        .map(|(x, y)| (x + Complex64::new(-y.im, y.re)) * w)
        .collect();
    fft.process(&mut z, Direction::Inverse);
    z.into_par_iter().map(|v| (v.re, v.im)).unzip()
}

/// Coefficients of two real fields with one forward transform of `f + i g`.
pub(crate) fn from_real_pair(grid: &Grid3, f: &[f64], g: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let fft = Fft3::for_size(grid.points_per_axis());
    let w = grid.cell_volume();
    let mut z: Vec<Complex64> = f.par_iter().zip(g).map(|(x, y)| Complex64::new(*x, *y) * w).collect();
    fft.process(&mut z, Direction::Forward);
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let p = z[i];
            let q = z[grid.negated(i)].conj();
            let fa = 0.5 * (p + q);
            let d = 0.5 * (p - q);
            (fa, Complex64::new(d.im, -d.re))
        })
        .unzip()
}
