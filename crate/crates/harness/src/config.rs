//! Experiment configuration: a TOML document with a strict schema.
//!
//! Every key has a default, so an empty file is a valid configuration.
//! Unknown keys are rejected. Overrides of the form `section.key=value`
//! are applied to the parsed document before validation; values are read
//! as TOML literals and fall back to plain strings.

use std::path::{Path, PathBuf};

use emlab::integrator::{IntegratorConfig, Scheme};
use emlab::model::{InitialData, PhysicalParams};
use emlab::spectral::Grid3;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Fallback for `output_dir` when the config leaves it unset.
pub const OUTPUT_DIR_ENV: &str = "EMLAB_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "emlab-output";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    #[default]
    Simulate,
    LinearDecay,
    Resonances,
    PhaseBound,
    CsSweep,
    Scattering,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Simulate,
        Experiment::LinearDecay,
        Experiment::Resonances,
        Experiment::PhaseBound,
        Experiment::CsSweep,
        Experiment::Scattering,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Simulate => "simulate",
            Experiment::LinearDecay => "linear-decay",
            Experiment::Resonances => "resonances",
            Experiment::PhaseBound => "phase-bound",
            Experiment::CsSweep => "cs-sweep",
            Experiment::Scattering => "scattering",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeName {
    #[default]
    ExponentialRk4,
    ClassicalRk4,
}

impl From<SchemeName> for Scheme {
    fn from(s: SchemeName) -> Self {
        match s {
            SchemeName::ExponentialRk4 => Scheme::ExponentialRk4,
            SchemeName::ClassicalRk4 => Scheme::ClassicalRk4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Seed of the random initial data.
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub physical: PhysicalSection,
    pub grid: GridSection,
    pub integrator: IntegratorSection,
    pub data: DataSection,
    pub diagnostics: DiagnosticsSection,
    pub resonance: ResonanceSection,
    pub decay: DecaySection,
    pub scattering: ScatteringSection,
    pub sweep: SweepSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::default(),
            seed: 1,
            output_dir: None,
            physical: PhysicalSection::default(),
            grid: GridSection::default(),
            integrator: IntegratorSection::default(),
            data: DataSection::default(),
            diagnostics: DiagnosticsSection::default(),
            resonance: ResonanceSection::default(),
            decay: DecaySection::default(),
            scattering: ScatteringSection::default(),
            sweep: SweepSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicalSection {
    pub c_s: f64,
}

impl Default for PhysicalSection {
    fn default() -> Self {
        Self { c_s: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub box_length: f64,
    pub points: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            box_length: 64.0,
            points: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSection {
    pub scheme: SchemeName,
    /// Unset means the scheme's default step.
    pub dt: Option<f64>,
    pub t_end: f64,
    pub snapshot_stride: usize,
    pub constraint_check_stride: usize,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        Self {
            scheme: SchemeName::default(),
            dt: None,
            t_end: 10.0,
            snapshot_stride: 50,
            constraint_check_stride: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    pub amplitude: f64,
    pub band: f64,
    pub envelope_width: Option<f64>,
    pub irrotational: bool,
}

impl Default for DataSection {
    fn default() -> Self {
        Self {
            amplitude: 1e-3,
            band: 0.25,
            envelope_width: None,
            irrotational: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsSection {
    pub sobolev_index: f64,
    pub n_double_prime: f64,
    pub n_prime: f64,
    pub delta1: f64,
}

impl Default for DiagnosticsSection {
    fn default() -> Self {
        Self {
            sobolev_index: 4.0,
            n_double_prime: 3.0,
            n_prime: 2.0,
            delta1: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResonanceSection {
    pub search_radius: f64,
    pub tolerance: f64,
    pub seed_step: f64,
    /// Overrides the computed `C_R` in the phase bound check.
    pub c_r: Option<f64>,
    /// Lower edge of the high-frequency region; unset means `10 C_R`.
    pub c0: Option<f64>,
    pub bound_step: f64,
}

impl Default for ResonanceSection {
    fn default() -> Self {
        Self {
            search_radius: emlab::resonance::DEFAULT_SEARCH_RADIUS,
            tolerance: emlab::resonance::DEFAULT_TOLERANCE,
            seed_step: emlab::resonance::SEED_STEP,
            c_r: None,
            c0: None,
            bound_step: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecaySection {
    /// Lebesgue exponents; `inf` is the grid maximum.
    pub exponents: Vec<f64>,
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
    /// Width of the Gaussian datum.
    pub width: f64,
}

impl Default for DecaySection {
    fn default() -> Self {
        Self {
            exponents: vec![f64::INFINITY, 6.0, 2.0],
            t_min: 5.0,
            t_max: 40.0,
            samples: 12,
            width: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScatteringSection {
    pub times: Vec<f64>,
    pub sobolev_index: f64,
    /// Amplitude of a constant profile-space forcing; nonzero values make
    /// the run a negative control.
    pub forcing_amplitude: f64,
}

impl Default for ScatteringSection {
    fn default() -> Self {
        Self {
            times: vec![5.0, 10.0, 20.0, 40.0],
            sobolev_index: 2.0,
            forcing_amplitude: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub c_s: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            c_s: (1..=9).map(|i| i as f64 / 10.0).collect(),
        }
    }
}

impl ExperimentConfig {
    /// Parses a TOML document, applies `key=value` overrides and validates.
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Self> {
        Self::parse(text, overrides, None)
    }

    /// As [`from_toml`](Self::from_toml) for a given experiment; a
    /// document that names a different experiment is rejected.
    pub fn for_experiment(text: &str, overrides: &[String], experiment: Experiment) -> Result<Self> {
        Self::parse(text, overrides, Some(experiment))
    }

    pub fn load(path: &Path, overrides: &[String], experiment: Option<Experiment>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(&text, overrides, experiment)
    }

    fn parse(text: &str, overrides: &[String], experiment: Option<Experiment>) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| HarnessError::schema("<document>", e.message().to_string()))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        if let Some(exp) = experiment {
            match table.get("experiment").map(|v| v.as_str()) {
                None => {
                    table.insert("experiment".into(), toml::Value::String(exp.name().into()));
                }
                Some(Some(name)) if name == exp.name() => {}
                Some(declared) => {
                    return Err(HarnessError::schema(
                        "experiment",
                        format!("config declares {} but the subcommand is `{}`", declared.unwrap_or("a non-string"), exp.name()),
                    ))
                }
            }
        }
        let canonical = table.to_string();
        let cfg: ExperimentConfig = toml::from_str(&canonical).map_err(|e| schema_error(&table, &canonical, e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Config dir, else the environment fallback, else the default.
    pub fn resolved_output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(HarnessError::schema(key, format!("must be positive and finite, got {v}")))
            }
        };
        if !(self.physical.c_s > 0.0 && self.physical.c_s < 1.0) {
            return Err(HarnessError::schema("physical.c_s", format!("must lie in (0, 1), got {}", self.physical.c_s)));
        }
        positive("grid.box_length", self.grid.box_length)?;
        if self.grid.points < 8 || !self.grid.points.is_multiple_of(2) {
            return Err(HarnessError::schema("grid.points", format!("must be even and at least 8, got {}", self.grid.points)));
        }
        if let Some(dt) = self.integrator.dt {
            positive("integrator.dt", dt)?;
        }
        if !(self.integrator.t_end >= 0.0 && self.integrator.t_end.is_finite()) {
            return Err(HarnessError::schema("integrator.t_end", "must be nonnegative"));
        }
        if self.integrator.snapshot_stride == 0 {
            return Err(HarnessError::schema("integrator.snapshot_stride", "must be positive"));
        }
        if self.integrator.constraint_check_stride == 0 {
            return Err(HarnessError::schema("integrator.constraint_check_stride", "must be positive"));
        }
        positive("data.amplitude", self.data.amplitude)?;
        if !(self.data.band > 0.0 && self.data.band <= 0.5) {
            return Err(HarnessError::schema("data.band", format!("must lie in (0, 0.5], got {}", self.data.band)));
        }
        if let Some(w) = self.data.envelope_width {
            positive("data.envelope_width", w)?;
        }
        positive("resonance.search_radius", self.resonance.search_radius)?;
        positive("resonance.tolerance", self.resonance.tolerance)?;
        positive("resonance.seed_step", self.resonance.seed_step)?;
        positive("resonance.bound_step", self.resonance.bound_step)?;
        if self.decay.exponents.iter().any(|p| !(*p >= 1.0)) {
            return Err(HarnessError::schema("decay.exponents", "exponents must be at least 1"));
        }
        positive("decay.t_min", self.decay.t_min)?;
        if !(self.decay.t_max > self.decay.t_min) {
            return Err(HarnessError::schema("decay.t_max", "must exceed decay.t_min"));
        }
        if self.decay.samples < 4 {
            return Err(HarnessError::schema("decay.samples", "need at least 4 samples for a fit"));
        }
        positive("decay.width", self.decay.width)?;
        let times = &self.scattering.times;
        if times.len() < 3 || times.windows(2).any(|w| !(w[1] > w[0])) || !(times[0] >= 0.0) {
            return Err(HarnessError::schema(
                "scattering.times",
                "need at least three strictly increasing nonnegative times",
            ));
        }
        if !(self.scattering.forcing_amplitude >= 0.0) {
            return Err(HarnessError::schema("scattering.forcing_amplitude", "must be nonnegative"));
        }
        if self.sweep.c_s.is_empty() || self.sweep.c_s.iter().any(|c| !(*c > 0.0 && *c < 1.0)) {
            return Err(HarnessError::schema("sweep.c_s", "values must lie in (0, 1)"));
        }
        Ok(())
    }

    pub fn physical_params(&self) -> Result<PhysicalParams> {
        Ok(PhysicalParams::new(self.physical.c_s)?)
    }

    pub fn grid(&self) -> Result<Grid3> {
        Ok(Grid3::new(self.grid.box_length, self.grid.points)?)
    }

    pub fn integrator_config(&self, grid: &Grid3) -> IntegratorConfig {
        let scheme = Scheme::from(self.integrator.scheme);
        IntegratorConfig {
            scheme,
            dt: self.integrator.dt.unwrap_or_else(|| IntegratorConfig::default_dt(scheme, grid)),
            t_end: self.integrator.t_end,
            snapshot_stride: self.integrator.snapshot_stride,
            constraint_check_stride: self.integrator.constraint_check_stride,
        }
    }

    pub fn initial_data(&self) -> InitialData {
        let mut d = InitialData::random(self.data.amplitude, self.seed);
        d.band = self.data.band;
        d.envelope_width = self.data.envelope_width;
        d.irrotational = self.data.irrotational;
        d
    }
}

fn apply_override(table: &mut toml::Table, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| HarnessError::schema(spec, "override must look like key=value"))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(HarnessError::schema(key, "empty key segment"));
    }
    let mut cursor = table;
    for part in &parts[..parts.len() - 1] {
        let entry = cursor
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cursor = entry
            .as_table_mut()
            .ok_or_else(|| HarnessError::schema(key, format!("`{part}` is not a section")))?;
    }
    cursor.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

/// Names the offending key of a deserialization error, from the error
/// span in the canonical document or else the field quoted in the message.
fn schema_error(table: &toml::Table, canonical: &str, e: toml::de::Error) -> HarnessError {
    let message = e.message().to_string();
    let from_span = e.span().and_then(|span| key_at(canonical, span.start));
    let key = from_span
        .or_else(|| message.split('`').nth(1).and_then(|name| find_key(table, name, "")))
        .unwrap_or_else(|| "<document>".to_string());
    HarnessError::schema(key, message)
}

/// Dotted key of the `key = value` line containing byte `offset`.
fn key_at(text: &str, offset: usize) -> Option<String> {
    let mut section = String::new();
    let mut start = 0;
    for line in text.lines() {
        let end = start + line.len();
        let t = line.trim();
        if t.starts_with('[') {
            section = t.trim_matches(|c| c == '[' || c == ']').to_string();
        } else if (start..=end).contains(&offset) {
            let name = t.split('=').next()?.trim();
            if name.is_empty() {
                return None;
            }
            return Some(if section.is_empty() { name.to_string() } else { format!("{section}.{name}") });
        }
        start = end + 1;
    }
    None
}

fn find_key(table: &toml::Table, name: &str, prefix: &str) -> Option<String> {
    for (k, v) in table {
        let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        if k == name {
            return Some(path);
        }
        if let Some(t) = v.as_table() {
            if let Some(p) = find_key(t, name, &path) {
                return Some(p);
            }
        }
    }
    None
}
