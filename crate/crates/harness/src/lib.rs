//! Operational layer over `emlab`: strict TOML configuration, the
//! experiments behind the `emlab` command, CSV and manifest output, and the
//! binary snapshot format.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod snapshot;

pub use config::{Experiment, ExperimentConfig};
pub use error::{HarnessError, Result};
pub use experiments::{run_experiment, RunReport};
pub use snapshot::{load_snapshot, read_snapshot, save_snapshot, SnapshotFile};
