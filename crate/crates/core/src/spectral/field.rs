use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rayon::prelude::*;

use super::fft::{Direction, Fft3};
use super::grid::Grid3;
use crate::error::{Error, Result};

/// Scalar (1 component) or vector (3 components) field on a periodic grid,
/// stored by its Fourier coefficients.
///
/// Normalisation: `f̂(k) = (L/n)^3 Σ_x f(x) e^{-ik·x}` and
/// `f(x) = L^{-3} Σ_k f̂(k) e^{ik·x}`, so that
/// `Σ_x |f|^2 (L/n)^3 = L^{-3} Σ_k |f̂|^2` holds exactly.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Grid3,
    coeffs: Vec<Vec<Complex64>>,
    real: bool,
}

impl SpectralField {
    pub fn zeros(grid: Grid3, components: usize) -> Self {
        assert!(components == 1 || components == 3);
        Self {
            grid,
            coeffs: vec![vec![Complex64::default(); grid.len()]; components],
            real: true,
        }
    }

    pub fn from_coefficients(grid: Grid3, coeffs: Vec<Vec<Complex64>>, real: bool) -> Result<Self> {
        check_layout(&grid, coeffs.len(), coeffs.iter().map(Vec::len))?;
        Ok(Self { grid, coeffs, real })
    }

    pub fn from_real_values(grid: Grid3, values: Vec<Vec<f64>>) -> Result<Self> {
        check_layout(&grid, values.len(), values.iter().map(Vec::len))?;
        let fft = Fft3::for_size(grid.points_per_axis());
        let w = grid.cell_volume();
        let coeffs = values
            .into_iter()
            .map(|v| {
                let mut c: Vec<Complex64> = v.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
                fft.process(&mut c, Direction::Forward);
                c.iter_mut().for_each(|z| *z *= w);
                c
            })
            .collect();
        Ok(Self {
            grid,
            coeffs,
            real: true,
        })
    }

    pub fn from_complex_values(grid: Grid3, values: Vec<Vec<Complex64>>) -> Result<Self> {
        check_layout(&grid, values.len(), values.iter().map(Vec::len))?;
        let fft = Fft3::for_size(grid.points_per_axis());
        let w = grid.cell_volume();
        let coeffs = values
            .into_iter()
            .map(|mut c| {
                fft.process(&mut c, Direction::Forward);
                c.iter_mut().for_each(|z| *z *= w);
                c
            })
            .collect();
        Ok(Self {
            grid,
            coeffs,
            real: false,
        })
    }

    /// Samples a real scalar function at the grid points.
    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> f64 + Sync) -> Self {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|i| f(grid.position(i)))
            .collect();
        Self::from_real_values(grid, vec![values]).expect("layout is consistent")
    }

    /// Samples a real vector function at the grid points.
    pub fn from_vector_fn(grid: Grid3, f: impl Fn([f64; 3]) -> [f64; 3] + Sync) -> Self {
        let pts: Vec<[f64; 3]> = (0..grid.len())
            .into_par_iter()
            .map(|i| f(grid.position(i)))
            .collect();
        let values = (0..3)
            .map(|c| pts.iter().map(|p| p[c]).collect())
            .collect();
        Self::from_real_values(grid, values).expect("layout is consistent")
    }

    /// Builds coefficients from a function of the lattice wavevector.
    pub fn from_spectrum(
        grid: Grid3,
        components: usize,
        real: bool,
        f: impl Fn(usize, [f64; 3]) -> Complex64 + Sync,
    ) -> Self {
        assert!(components == 1 || components == 3);
        let coeffs = (0..components)
            .map(|c| {
                (0..grid.len())
                    .into_par_iter()
                    .map(|i| f(c, grid.wavevector(i)))
                    .collect()
            })
            .collect();
        Self { grid, coeffs, real }
    }

    pub fn from_components(parts: Vec<SpectralField>) -> Result<Self> {
        if parts.len() != 3 {
            return Err(Error::ComponentMismatch {
                expected: 3,
                found: parts.len(),
            });
        }
        let grid = parts[0].grid;
        let mut real = true;
        let mut coeffs = Vec::with_capacity(3);
        for p in parts {
            grid.ensure_same(&p.grid)?;
            p.expect_components(1)?;
            real &= p.real;
            coeffs.push(p.coeffs.into_iter().next().expect("one component"));
        }
        Ok(Self { grid, coeffs, real })
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn n_components(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_vector(&self) -> bool {
        self.coeffs.len() == 3
    }

    /// True when the represented real-space field is real-valued.
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub(crate) fn set_real(&mut self, real: bool) {
        self.real = real;
    }

    pub fn coefficients(&self, component: usize) -> &[Complex64] {
        &self.coeffs[component]
    }

    /// Raw coefficient access; the reality flag is left as is.
    pub fn coefficients_mut(&mut self, component: usize) -> &mut [Complex64] {
        &mut self.coeffs[component]
    }

    pub(crate) fn all_coefficients(&self) -> &[Vec<Complex64>] {
        &self.coeffs
    }

    pub fn component(&self, c: usize) -> SpectralField {
        Self {
            grid: self.grid,
            coeffs: vec![self.coeffs[c].clone()],
            real: self.real,
        }
    }

    pub fn expect_components(&self, n: usize) -> Result<()> {
        if self.coeffs.len() == n {
            Ok(())
        } else {
            Err(Error::ComponentMismatch {
                expected: n,
                found: self.coeffs.len(),
            })
        }
    }

    /// Complex real-space values, one vector per component.
    pub fn values(&self) -> Vec<Vec<Complex64>> {
        let fft = Fft3::for_size(self.grid.points_per_axis());
        let w = 1.0 / self.grid.volume();
        self.coeffs
            .iter()
            .map(|c| {
                let mut v = c.clone();
                fft.process(&mut v, Direction::Inverse);
                v.iter_mut().for_each(|z| *z *= w);
                v
            })
            .collect()
    }

    /// Real parts of the real-space values.
    pub fn real_values(&self) -> Vec<Vec<f64>> {
        self.values()
            .into_iter()
            .map(|v| v.into_iter().map(|z| z.re).collect())
            .collect()
    }

    /// Coefficients of `Re f` where `f` is the (complex) real-space field.
    pub fn re(&self) -> SpectralField {
        self.hermitian_part(false)
    }

    /// Coefficients of `Im f`.
    pub fn im(&self) -> SpectralField {
        self.hermitian_part(true)
    }

    fn hermitian_part(&self, imaginary: bool) -> SpectralField {
        let g = self.grid;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                (0..g.len())
                    .into_par_iter()
                    .map(|i| {
                        let a = c[i];
                        let b = c[g.negated(i)].conj();
                        if imaginary {
                            (a - b) * Complex64::new(0.0, -0.5)
                        } else {
                            (a + b) * 0.5
                        }
                    })
                    .collect()
            })
            .collect();
        SpectralField {
            grid: g,
            coeffs,
            real: true,
        }
    }

    /// Largest `|ĉ(k) - conj(ĉ(-k))|` relative to the largest coefficient,
    /// ignoring Nyquist planes.
    pub fn hermitian_defect(&self) -> f64 {
        let g = self.grid;
        let mut defect: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for c in &self.coeffs {
            for i in 0..g.len() {
                scale = scale.max(c[i].norm());
                if g.is_nyquist(i) {
                    continue;
                }
                defect = defect.max((c[i] - c[g.negated(i)].conj()).norm());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            defect / scale
        }
    }

    /// Spatial mean of each component.
    pub fn mean(&self) -> Vec<Complex64> {
        let v = self.grid.volume();
        self.coeffs.iter().map(|c| c[0] / v).collect()
    }

    pub fn remove_mean(&mut self) {
        for c in &mut self.coeffs {
            c[0] = Complex64::default();
        }
    }

    /// Applies the 2/3-rule mask and zeroes the Nyquist planes.
    pub fn dealias(&mut self) {
        let g = self.grid;
        for c in &mut self.coeffs {
            c.par_iter_mut().enumerate().for_each(|(i, z)| {
                if !g.dealias_keeps(i) {
                    *z = Complex64::default();
                }
            });
        }
    }

    pub fn dealiased(mut self) -> Self {
        self.dealias();
        self
    }

    pub fn zero_nyquist(&mut self) {
        let g = self.grid;
        for c in &mut self.coeffs {
            c.par_iter_mut().enumerate().for_each(|(i, z)| {
                if g.is_nyquist(i) {
                    *z = Complex64::default();
                }
            });
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    /// Largest coefficient magnitude over all components.
    pub fn max_coefficient(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Maximum real-space distance `max_x |f(x) - g(x)|`.
    pub fn max_abs_diff(&self, other: &SpectralField) -> f64 {
        (self - other).max_abs()
    }

    /// Maximum of `|f(x)|` over grid points and components.
    pub fn max_abs(&self) -> f64 {
        self.values()
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn scale_complex(&self, s: Complex64) -> SpectralField {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.iter().map(|z| z * s).collect())
            .collect();
        SpectralField {
            grid: self.grid,
            coeffs,
            real: self.real && s.im == 0.0,
        }
    }

    /// Multiplies by `i`.
    pub fn times_i(&self) -> SpectralField {
        self.scale_complex(Complex64::new(0.0, 1.0))
    }

    /// `self + s * other`, in place.
    pub fn axpy(&mut self, s: Complex64, other: &SpectralField) {
        self.grid.ensure_same(&other.grid).expect("axpy grid mismatch");
        assert_eq!(self.coeffs.len(), other.coeffs.len(), "axpy component mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.par_iter_mut().zip(b.par_iter()).for_each(|(x, y)| *x += s * y);
        }
        self.real = self.real && other.real && s.im == 0.0;
    }

    /// Componentwise map of coefficients with access to the lattice index.
    pub(crate) fn map_modes(&self, f: impl Fn(usize, usize, Complex64) -> Complex64 + Sync) -> Vec<Vec<Complex64>> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(c, v)| {
                v.par_iter()
                    .enumerate()
                    .map(|(i, z)| f(c, i, *z))
                    .collect()
            })
            .collect()
    }

    fn zip_with(&self, other: &SpectralField, f: impl Fn(Complex64, Complex64) -> Complex64 + Sync) -> SpectralField {
        self.grid.ensure_same(&other.grid).expect("field grid mismatch");
        assert_eq!(
            self.coeffs.len(),
            other.coeffs.len(),
            "field component mismatch"
        );
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.par_iter().zip(b.par_iter()).map(|(x, y)| f(*x, *y)).collect())
            .collect();
        SpectralField {
            grid: self.grid,
            coeffs,
            real: self.real && other.real,
        }
    }
}

fn check_layout(grid: &Grid3, components: usize, lens: impl Iterator<Item = usize>) -> Result<()> {
    if components != 1 && components != 3 {
        return Err(Error::ComponentMismatch {
            expected: 3,
            found: components,
        });
    }
    for len in lens {
        if len != grid.len() {
            return Err(Error::GridMismatch(format!(
                "component has {len} values, grid has {}",
                grid.len()
            )));
        }
    }
    Ok(())
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Add for SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: SpectralField) -> SpectralField {
        &self + &rhs
    }
}

impl Sub for SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: SpectralField) -> SpectralField {
        &self - &rhs
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, s: f64) -> SpectralField {
        self.scale_complex(Complex64::new(s, 0.0))
    }
}

impl Mul<f64> for SpectralField {
    type Output = SpectralField;
    fn mul(self, s: f64) -> SpectralField {
        &self * s
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self * -1.0
    }
}

impl Neg for SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        &self * -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn round_trip_real_space() {
        let g = Grid3::new(2.0 * PI, 16).unwrap();
        let f = SpectralField::from_fn(g, |[x, y, z]| (x + 2.0 * y).sin() * z.cos() + 0.3);
        let back = f.real_values();
        let mut worst: f64 = 0.0;
        for (i, v) in back[0].iter().enumerate() {
            let [x, y, z] = g.position(i);
            let exact = (x + 2.0 * y).sin() * z.cos() + 0.3;
            worst = worst.max((v - exact).abs());
        }
        assert!(worst < 1e-12, "{worst}");
        assert!(f.hermitian_defect() < 1e-12);
    }

    #[test]
    fn single_mode_coefficient_is_volume() {
        let l = 3.0;
        let g = Grid3::new(l, 8).unwrap();
        let k = 2.0 * PI / l;
        let vals: Vec<Complex64> = (0..g.len())
            .map(|i| Complex64::from_polar(1.0, k * g.position(i)[1]))
            .collect();
        let f = SpectralField::from_complex_values(g, vec![vals]).unwrap();
        let idx = g.index(0, 1, 0);
        assert!((f.coefficients(0)[idx] - Complex64::new(l * l * l, 0.0)).norm() < 1e-11);
    }

    #[test]
    fn re_im_split_complex_field() {
        let g = Grid3::new(5.0, 8).unwrap();
        let a = SpectralField::from_fn(g, |[x, _, _]| x.sin());
        let b = SpectralField::from_fn(g, |[_, y, z]| (y - z).cos());
        let c = &a + &b.times_i();
        assert!(c.re().max_abs_diff(&a) < 1e-13);
        assert!(c.im().max_abs_diff(&b) < 1e-13);
    }
}
