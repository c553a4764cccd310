use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Periodic cube `[0, L)^3` sampled with `n` points per axis.
///
/// Lattice index `i ∈ 0..n` stands for the signed wavenumber index
/// `j = i` for `i < n/2` and `j = i - n` otherwise, so that
/// `j ∈ {-n/2, …, n/2 - 1}` and `k_j = 2π j / L`. Storage order is
/// x-fastest: `idx = ix + n * (iy + n * iz)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid3 {
    box_length: f64,
    n: usize,
}

impl Grid3 {
    pub fn new(box_length: f64, points_per_axis: usize) -> Result<Self> {
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive, got {box_length}"
            )));
        }
        if points_per_axis < 8 || !points_per_axis.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and >= 8, got {points_per_axis}"
            )));
        }
        Ok(Self {
            box_length,
            n: points_per_axis,
        })
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    /// Total number of lattice points `n^3`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume of one quadrature cell, `(L/n)^3`.
    pub fn cell_volume(&self) -> f64 {
        (self.box_length / self.n as f64).powi(3)
    }

    pub fn volume(&self) -> f64 {
        self.box_length.powi(3)
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        ix + self.n * (iy + self.n * iz)
    }

    #[inline]
    pub fn split(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx % n, (idx / n) % n, idx / (n * n)]
    }

    /// Signed wavenumber index of lattice position `i` along one axis.
    #[inline]
    pub fn signed_index(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Inverse of [`Grid3::signed_index`], wrapping periodically.
    #[inline]
    pub fn wrap_index(&self, j: i64) -> usize {
        j.rem_euclid(self.n as i64) as usize
    }

    pub fn signed_indices(&self, idx: usize) -> [i64; 3] {
        let [ix, iy, iz] = self.split(idx);
        [
            self.signed_index(ix),
            self.signed_index(iy),
            self.signed_index(iz),
        ]
    }

    #[inline]
    pub fn wavenumber_1d(&self, i: usize) -> f64 {
        2.0 * PI * self.signed_index(i) as f64 / self.box_length
    }

    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let [ix, iy, iz] = self.split(idx);
        [
            self.wavenumber_1d(ix),
            self.wavenumber_1d(iy),
            self.wavenumber_1d(iz),
        ]
    }

    /// Lattice position of `-k` (periodic negation).
    pub fn negated(&self, idx: usize) -> usize {
        let n = self.n;
        let [ix, iy, iz] = self.split(idx);
        self.index((n - ix) % n, (n - iy) % n, (n - iz) % n)
    }

    /// True when any axis sits on the Nyquist index `-n/2`.
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let h = self.n / 2;
        self.split(idx).contains(&h)
    }

    /// 2/3-rule mask: a mode survives when `3|j| < n` on every axis.
    /// Products of two surviving fields are then alias-free on the
    /// surviving modes.
    pub fn dealias_keeps(&self, idx: usize) -> bool {
        let n = self.n as i64;
        self.signed_indices(idx).iter().all(|&j| 3 * j.abs() < n)
    }

    /// Largest `|k|` on the lattice.
    pub fn max_wavenumber(&self) -> f64 {
        let kmax = PI * self.n as f64 / self.box_length;
        (3.0f64).sqrt() * kmax
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        let [ix, iy, iz] = self.split(idx);
        [self.coordinate(ix), self.coordinate(iy), self.coordinate(iz)]
    }

    pub fn center(&self) -> [f64; 3] {
        let c = 0.5 * self.box_length;
        [c, c, c]
    }

    pub(crate) fn ensure_same(&self, other: &Grid3) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "(L = {}, n = {}) vs (L = {}, n = {})",
                self.box_length, self.n, other.box_length, other.n
            )))
        }
    }
}
