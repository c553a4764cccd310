use num_complex::Complex64;

use crate::error::{invalid_param, Result};
use crate::spectral::{curl, discrete_norm, divergence, Grid3, MultiplierSymbol, NormSpec, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    c_s: f64,
}

impl PhysicalParams {
    /// Sound speed must lie in `(0, 1)`.
    pub fn new(c_s: f64) -> Result<Self> {
        if !(c_s > 0.0 && c_s < 1.0) {
            return Err(invalid_param("c_s", format!("sound speed must lie in (0, 1), got {c_s}")));
        }
        Ok(Self { c_s })
    }

    pub fn c_s(&self) -> f64 {
        self.c_s
    }
}

/// Physical unknowns `(u, n, E, B)` at one time.
#[derive(Debug, Clone)]
pub struct EMState {
    pub u: SpectralField,
    pub n: SpectralField,
    pub e: SpectralField,
    pub b: SpectralField,
    pub time: f64,
}

impl EMState {
    pub fn zeros(grid: Grid3) -> Self {
        Self {
            u: SpectralField::zeros(grid, 3),
            n: SpectralField::zeros(grid, 1),
            e: SpectralField::zeros(grid, 3),
            b: SpectralField::zeros(grid, 3),
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid3 {
        self.n.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.fields().iter().all(|f| f.is_finite())
    }

    pub fn fields(&self) -> [&SpectralField; 4] {
        [&self.u, &self.n, &self.e, &self.b]
    }

    /// `self += s * other` on every field (time untouched).
    pub fn axpy(&mut self, s: f64, other: &EMState) {
        let s = Complex64::new(s, 0.0);
        self.u.axpy(s, &other.u);
        self.n.axpy(s, &other.n);
        self.e.axpy(s, &other.e);
        self.b.axpy(s, &other.b);
    }

    /// Largest real-space difference over all fields.
    pub fn max_abs_diff(&self, other: &EMState) -> f64 {
        self.fields()
            .iter()
            .zip(other.fields())
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.fields().iter().map(|f| f.max_abs()).fold(0.0, f64::max)
    }

    /// Quadratic energy of the linearised flow,
    /// `½ ∫ |u|² + c_s² n² + |E|² + |B|²`.
    pub fn linear_energy(&self, params: &PhysicalParams) -> f64 {
        let sq = |f: &SpectralField| discrete_norm(f, NormSpec::L2).expect("norm").powi(2);
        0.5 * (sq(&self.u) + params.c_s().powi(2) * sq(&self.n) + sq(&self.e) + sq(&self.b))
    }
}

/// Dispersive variables `A` (acoustic, scalar) and `B` (electromagnetic,
/// vector), both complex.
#[derive(Debug, Clone)]
pub struct DiagState {
    pub a: SpectralField,
    pub bc: SpectralField,
    pub time: f64,
}

impl DiagState {
    pub fn zeros(grid: Grid3) -> Self {
        Self {
            a: SpectralField::zeros(grid, 1),
            bc: SpectralField::zeros(grid, 3),
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid3 {
        self.a.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.bc.is_finite()
    }

    pub fn axpy(&mut self, s: Complex64, other: &DiagState) {
        self.a.axpy(s, &other.a);
        self.bc.axpy(s, &other.bc);
    }

    pub fn max_abs_diff(&self, other: &DiagState) -> f64 {
        self.a.max_abs_diff(&other.a).max(self.bc.max_abs_diff(&other.bc))
    }

    /// `‖(A, B)‖_{H^s}`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        crate::spectral::discrete_norm_many(&[&self.a, &self.bc], NormSpec::Sobolev(s)).expect("same grid")
    }

    /// `‖(A, B) - (A', B')‖_{H^s}`.
    pub fn distance(&self, other: &DiagState, s: f64) -> f64 {
        let da = &self.a - &other.a;
        let db = &self.bc - &other.bc;
        crate::spectral::discrete_norm_many(&[&da, &db], NormSpec::Sobolev(s)).expect("same grid")
    }

    /// Applies `exp(i t ⟨D⟩_{c_s})` to `A` and `exp(i t ⟨D⟩)` to `B`.
    pub fn propagate(&self, params: &PhysicalParams, t: f64) -> DiagState {
        DiagState {
            a: MultiplierSymbol::propagator(params.c_s(), t).apply(&self.a).expect("scalar"),
            bc: MultiplierSymbol::propagator(1.0, t).apply(&self.bc).expect("vector"),
            time: self.time + t,
        }
    }
}

/// Profiles `a(t) = e^{-it⟨D⟩_{c_s}} A(t)`, `b(t) = e^{-it⟨D⟩} B(t)`.
#[derive(Debug, Clone)]
pub struct Profiles {
    pub a: SpectralField,
    pub b: SpectralField,
    pub time: f64,
}

impl Profiles {
    pub fn from_diag(d: &DiagState, params: &PhysicalParams) -> Self {
        let back = d.propagate(params, -d.time);
        Profiles {
            a: back.a,
            b: back.bc,
            time: d.time,
        }
    }

    pub fn to_diag(&self, params: &PhysicalParams) -> DiagState {
        DiagState {
            a: self.a.clone(),
            bc: self.b.clone(),
            time: 0.0,
        }
        .propagate(params, self.time)
    }

    /// `‖(a, b)‖_{H^s}`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        crate::spectral::discrete_norm_many(&[&self.a, &self.b], NormSpec::Sobolev(s)).expect("same grid")
    }

    /// `‖(a, b) - (a', b')‖_{H^s}`.
    pub fn distance(&self, other: &Profiles, s: f64) -> f64 {
        let da = &self.a - &other.a;
        let db = &self.b - &other.b;
        crate::spectral::discrete_norm_many(&[&da, &db], NormSpec::Sobolev(s)).expect("same grid")
    }
}

/// Relative `L²` residuals of the three constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintResiduals {
    /// `‖∇·E + n‖ / max(‖∇·E‖, ‖n‖)`
    pub gauss: f64,
    /// `‖∇·B‖ / ‖|D| B‖`
    pub div_b: f64,
    /// `‖B - ∇×u‖ / ‖B‖`
    pub curl_constraint: f64,
}

impl ConstraintResiduals {
    pub fn max(&self) -> f64 {
        self.gauss.max(self.div_b).max(self.curl_constraint)
    }
}

fn relative(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

pub fn constraint_residuals(s: &EMState) -> ConstraintResiduals {
    let l2 = |f: &SpectralField| discrete_norm(f, NormSpec::L2).expect("norm");
    let div_e = divergence(&s.e).expect("vector");
    let gauss = relative(l2(&(&div_e + &s.n)), l2(&div_e).max(l2(&s.n)));
    let div_b = relative(
        l2(&divergence(&s.b).expect("vector")),
        l2(&MultiplierSymbol::modulus().apply(&s.b).expect("vector")),
    );
    let curl_u = curl(&s.u).expect("vector");
    let curl_constraint = relative(l2(&(&s.b - &curl_u)), l2(&s.b));
    ConstraintResiduals {
        gauss,
        div_b,
        curl_constraint,
    }
}
