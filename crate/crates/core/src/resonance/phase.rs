use std::fmt;

use crate::error::{invalid_param, Result};
use crate::spectral::bracket;

/// Propagation speed of one wave in a quadratic interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Speed {
    /// Electromagnetic branch, speed 1.
    Light,
    /// Acoustic branch, speed `c_s`.
    Sound,
}

impl Speed {
    pub const ALL: [Speed; 2] = [Speed::Light, Speed::Sound];

    pub fn value(self, c_s: f64) -> f64 {
        match self {
            Speed::Light => 1.0,
            Speed::Sound => c_s,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Speed::Light => "1",
            Speed::Sound => "cs",
        }
    }
}

/// Selects `φ(ξ, η) = ⟨ξ⟩_k + ε1⟨η⟩_ℓ + ε2⟨ξ−η⟩_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpec {
    pub eps1: i8,
    pub eps2: i8,
    pub k: Speed,
    pub l: Speed,
    pub m: Speed,
    pub c_s: f64,
}

impl PhaseSpec {
    pub fn new(eps1: i8, eps2: i8, k: Speed, l: Speed, m: Speed, c_s: f64) -> Result<Self> {
        if eps1.abs() != 1 || eps2.abs() != 1 {
            return Err(invalid_param("eps", format!("signs must be ±1, got ({eps1}, {eps2})")));
        }
        if !(c_s > 0.0 && c_s < 1.0) {
            return Err(invalid_param("c_s", format!("must lie in (0, 1), got {c_s}")));
        }
        Ok(Self { eps1, eps2, k, l, m, c_s })
    }

    /// All 32 combinations of output speed, signs and input speeds.
    pub fn all(c_s: f64) -> Result<Vec<Self>> {
        let mut out = Vec::with_capacity(32);
        for k in Speed::ALL {
            for eps1 in [1, -1] {
                for eps2 in [1, -1] {
                    for l in Speed::ALL {
                        for m in Speed::ALL {
                            out.push(Self::new(eps1, eps2, k, l, m, c_s)?);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// The phase with the roles of `η` and `ξ−η` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            eps1: self.eps2,
            eps2: self.eps1,
            l: self.m,
            m: self.l,
            ..*self
        }
    }

    pub fn speeds(&self) -> (f64, f64, f64) {
        (self.k.value(self.c_s), self.l.value(self.c_s), self.m.value(self.c_s))
    }

    pub fn label(&self) -> String {
        format!("{self}")
    }

    /// `φ` on the collinear slice `ξ = s e`, `η = r e`.
    pub fn reduced_value(&self, s: f64, r: f64) -> f64 {
        let (k, l, m) = self.speeds();
        bracket(k, s) + f64::from(self.eps1) * bracket(l, r) + f64::from(self.eps2) * bracket(m, s - r)
    }

    /// The component of `∂_ηφ` along `e` on the collinear slice.
    pub fn reduced_gradient(&self, s: f64, r: f64) -> f64 {
        let (_, l, m) = self.speeds();
        f64::from(self.eps1) * l * l * r / bracket(l, r) - f64::from(self.eps2) * m * m * (s - r) / bracket(m, s - r)
    }

    /// Jacobian of `(φ, ∂_ηφ)` with respect to `(s, r)`.
    pub fn reduced_jacobian(&self, s: f64, r: f64) -> [[f64; 2]; 2] {
        let (k, l, m) = self.speeds();
        let (e1, e2) = (f64::from(self.eps1), f64::from(self.eps2));
        let d = s - r;
        let bm = bracket(m, d);
        let bl = bracket(l, r);
        let phi_s = k * k * s / bracket(k, s) + e2 * m * m * d / bm;
        let phi_r = self.reduced_gradient(s, r);
        let g_s = -e2 * m * m / bm.powi(3);
        let g_r = e1 * l * l / bl.powi(3) + e2 * m * m / bm.powi(3);
        [[phi_s, phi_r], [g_s, g_r]]
    }
}

impl fmt::Display for PhaseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = |e: i8| if e > 0 { '+' } else { '-' };
        write!(
            f,
            "phi[{}{}]_({},{},{})",
            sign(self.eps1),
            sign(self.eps2),
            self.k.label(),
            self.l.label(),
            self.m.label()
        )
    }
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// `⟨ξ⟩_k + ε1⟨η⟩_ℓ + ε2⟨ξ−η⟩_m`.
pub fn phase_value(p: &PhaseSpec, xi: [f64; 3], eta: [f64; 3]) -> f64 {
    let (k, l, m) = p.speeds();
    bracket(k, norm(xi)) + f64::from(p.eps1) * bracket(l, norm(eta)) + f64::from(p.eps2) * bracket(m, norm(sub(xi, eta)))
}

/// `∂_ηφ = ε1 ℓ² η/⟨η⟩_ℓ − ε2 m² (ξ−η)/⟨ξ−η⟩_m`.
pub fn phase_eta_gradient(p: &PhaseSpec, xi: [f64; 3], eta: [f64; 3]) -> [f64; 3] {
    let (_, l, m) = p.speeds();
    let d = sub(xi, eta);
    let a = f64::from(p.eps1) * l * l / bracket(l, norm(eta));
    let b = f64::from(p.eps2) * m * m / bracket(m, norm(d));
    [0, 1, 2].map(|i| a * eta[i] - b * d[i])
}
