use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::state::EMState;
use crate::spectral::{curl, helmholtz_p, helmholtz_q, Grid3, MultiplierSymbol, SpectralField};

/// Band-limited random initial data projected onto the constraint
/// manifold: zero means, `∇·E = -n`, `B = ∇×u`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    /// Largest real-space magnitude over all components of `(u, n, E, B)`.
    pub amplitude: f64,
    /// Modes with `|j| <= band * n` are populated.
    pub band: f64,
    /// Width of a Gaussian envelope centred in the box; `None` fills the box.
    pub envelope_width: Option<f64>,
    /// Curl-free velocity with no transverse field, so the data is purely acoustic.
    pub irrotational: bool,
    pub seed: u64,
}

impl InitialData {
    pub fn random(amplitude: f64, seed: u64) -> Self {
        Self {
            amplitude,
            band: 0.25,
            envelope_width: None,
            irrotational: false,
            seed,
        }
    }

    pub fn localized(amplitude: f64, width: f64, seed: u64) -> Self {
        Self {
            envelope_width: Some(width),
            ..Self::random(amplitude, seed)
        }
    }

    pub fn generate(&self, grid: Grid3) -> EMState {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut u = self.random_field(grid, 3, &mut rng);
        let mut n = self.random_field(grid, 1, &mut rng);
        let mut w = self.random_field(grid, 3, &mut rng);
        if self.irrotational {
            u = helmholtz_q(&u).expect("vector");
            w = &w * 0.0;
        }
        u.remove_mean();
        n.remove_mean();

        let b = if self.irrotational {
            &u * 0.0
        } else {
            curl(&u).expect("vector")
        };
        let qe = MultiplierSymbol::riesz()
            .apply(&MultiplierSymbol::inverse_modulus().apply(&n).expect("scalar"))
            .expect("scalar");
        let e = &qe + &helmholtz_p(&w).expect("vector");
        let mut state = EMState {
            u,
            n,
            e,
            b,
            time: 0.0,
        };
        let peak = state.max_abs();
        if peak > 0.0 {
            let s = self.amplitude / peak;
            state = EMState {
                u: &state.u * s,
                n: &state.n * s,
                e: &state.e * s,
                b: &state.b * s,
                time: 0.0,
            };
        }
        state
    }

    fn random_field(&self, grid: Grid3, components: usize, rng: &mut ChaCha8Rng) -> SpectralField {
        let values: Vec<Vec<f64>> = (0..components)
            .map(|_| (0..grid.len()).map(|_| StandardNormal.sample(rng)).collect())
            .collect();
        let mut f = SpectralField::from_real_values(grid, values).expect("layout");
        self.band_limit(&mut f);
        if let Some(width) = self.envelope_width {
            let c = grid.center();
            let vals = f
                .real_values()
                .into_iter()
                .map(|v| {
                    v.into_iter()
                        .enumerate()
                        .map(|(i, x)| {
                            let p = grid.position(i);
                            let r2: f64 = (0..3).map(|a| (p[a] - c[a]).powi(2)).sum();
                            x * (-0.5 * r2 / (width * width)).exp()
                        })
                        .collect()
                })
                .collect();
            f = SpectralField::from_real_values(grid, vals).expect("layout");
            self.band_limit(&mut f);
        }
        f
    }

    fn band_limit(&self, f: &mut SpectralField) {
        let grid = *f.grid();
        let cut = self.band * grid.points_per_axis() as f64;
        for c in 0..f.n_components() {
            for (i, z) in f.coefficients_mut(c).iter_mut().enumerate() {
                let j = grid.signed_indices(i);
                let r = ((j[0] * j[0] + j[1] * j[1] + j[2] * j[2]) as f64).sqrt();
                if r > cut || grid.is_nyquist(i) {
                    *z = Complex64::default();
                }
            }
        }
    }
}
