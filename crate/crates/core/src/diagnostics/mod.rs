//! Norms, decay fits and convergence checks on computed trajectories, and
//! the radial quadrature propagator for linear Klein-Gordon decay.

mod fit;
mod radial;
mod series;

pub use fit::{fit_power_law, DecayFit, RELIABLE_R_SQUARED};
pub use radial::{geometric_times, linear_decay_experiment, linear_decay_series, RadialDatum, RadialPropagator, RadialSolution};
pub use series::{
    energy_growth_fit, fit_record, measure_x_components, scattering_check, windowed_weight_norm, EnergyGrowth,
    NormSeries, ScatteringCheck, XNormParams, INCREMENT_DECAY, INCREMENT_JITTER, RECORD_LINF, RECORD_LINF_U,
    RECORD_PROFILE_INCREMENT, RECORD_SOBOLEV, RECORD_W_P1, RECORD_W_P2,
};
