use crate::error::{Error, Result};

/// Fits below this coefficient of determination are flagged unreliable.
pub const RELIABLE_R_SQUARED: f64 = 0.95;

/// Log-log least-squares fit `value ≈ prefactor · t^exponent`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub window: (f64, f64),
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
    pub reliable: bool,
    pub points: usize,
    pub norm_name: String,
}

impl DecayFit {
    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.norm_name = name.into();
        self
    }
}

/// Ordinary least squares `y ≈ a + b x`, returning `(b, a, r²)`.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r2 = if syy <= f64::EPSILON * f64::EPSILON * n * my * my { 1.0 } else { 1.0 - ss_res / syy };
    (slope, intercept, r2)
}

/// Fits `values ≈ C t^p` on the points with `t` inside `window` (all points
/// when `None`).
pub fn fit_power_law(times: &[f64], values: &[f64], window: Option<(f64, f64)>) -> Result<DecayFit> {
    if times.len() != values.len() {
        return Err(Error::Fit(format!("{} times but {} values", times.len(), values.len())));
    }
    let (lo, hi) = window.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let (x, y): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= lo && **t <= hi)
        .map(|(&t, &v)| (t, v))
        .unzip();
    if x.len() < 4 {
        return Err(Error::Fit(format!("need at least 4 points in the window, got {}", x.len())));
    }
    if let Some((t, v)) = x.iter().zip(&y).find(|(t, v)| !(**t > 0.0 && **v > 0.0)) {
        return Err(Error::Fit(format!("log-log fit needs positive data, got ({t}, {v})")));
    }
    let lx: Vec<f64> = x.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (exponent, intercept, r_squared) = linear_fit(&lx, &ly);
    Ok(DecayFit {
        window: (x[0], x[x.len() - 1]),
        exponent,
        prefactor: intercept.exp(),
        r_squared,
        reliable: r_squared >= RELIABLE_R_SQUARED,
        points: x.len(),
        norm_name: String::new(),
    })
}
