//! Space-time resonance analysis of the quadratic phases, the large-frequency
//! lower bound, and the smooth cutoff symbols built from the resonant sets.

mod bound;
mod cutoff;
mod phase;
mod scan;

pub use bound::{lower_bound_family, phase_lower_bound, verify_phase_lower_bound, LowerBoundCheck};
pub use cutoff::{build_cutoff_suite, smoothstep, theta, CutoffSuite, GrowthFit};
pub use phase::{phase_eta_gradient, phase_value, PhaseSpec, Speed};
pub use scan::{
    find_resonances, find_resonances_with_step, polish_root, resonance_report, resonance_report_with_step,
    IntervalSet, PhaseResonances, ResonancePoint, ResonanceReport, DEFAULT_SEARCH_RADIUS, DEFAULT_TOLERANCE,
    SEED_STEP,
};
