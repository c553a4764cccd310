use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// The configuration does not match the schema; `key` is the dotted
    /// path of the offending entry when known.
    #[error("config error at `{key}`: {detail}")]
    Schema { key: String, detail: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("snapshot {path}: {detail}")]
    Snapshot { path: PathBuf, detail: String },

    #[error(transparent)]
    Core(#[from] emlab::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("run diverged at t = {time}: {reason}")]
    Diverged { time: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, HarnessError>;

impl HarnessError {
    pub fn schema(key: impl Into<String>, detail: impl Into<String>) -> Self {
        HarnessError::Schema {
            key: key.into(),
            detail: detail.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Schema { .. } => "schema",
            HarnessError::Io { .. } => "io",
            HarnessError::Snapshot { .. } => "snapshot",
            HarnessError::Core(emlab::Error::InvalidParameter { .. }) => "validation",
            HarnessError::Core(_) => "numerical",
            HarnessError::Csv(_) => "io",
            HarnessError::Diverged { .. } => "diverged",
        }
    }

    /// Process exit status: 2 for configuration problems, 3 for divergence,
    /// 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "schema" | "validation" => 2,
            "diverged" => 3,
            _ => 1,
        }
    }

    /// One-line machine-readable report for stderr.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({ "error": self.kind(), "message": self.to_string() });
        match self {
            HarnessError::Schema { key, .. } => v["key"] = json!(key),
            HarnessError::Core(emlab::Error::InvalidParameter { name, .. }) => v["key"] = json!(name),
            HarnessError::Diverged { time, .. } => v["time"] = json!(time),
            _ => {}
        }
        v
    }
}
