//! Scenario configuration in TOML.
//!
//! ```toml
//! drive = "cos"        # shorthand, or a [drive] table with `kind`
//!
//! [model]
//! omega0 = 1.0
//! chi = 0.25
//! alpha = 3.0          # or [re, im]
//! ```
//!
//! Every other section is optional; [`parse_config`] fills the defaults in so
//! that the emitted configuration is complete.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::driven::{DriveSpec, FrequencySpec};
use crate::evolution::{ModelParams, SAMPLES_PER_PERIOD};
use crate::numerics::MonotoneCubic;
use crate::reparam::MassSpec;

/// Keys without defaults.
pub const REQUIRED_KEYS: [&str; 4] = ["model.omega0", "model.chi", "model.alpha", "drive"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("missing required keys: {}", .0.join(", "))]
    Missing(Vec<String>),
    #[error("malformed configuration: {0}")]
    Parse(String),
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
}

fn invalid(key: &str, reason: impl ToString) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        reason: reason.to_string(),
    }
}

/// Complex number written either as a real scalar or as `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "ComplexRepr", into = "[f64; 2]")]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ComplexRepr {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexRepr> for ComplexValue {
    fn from(r: ComplexRepr) -> Self {
        match r {
            ComplexRepr::Real(re) => Self { re, im: 0.0 },
            ComplexRepr::Pair([re, im]) => Self { re, im },
        }
    }
}

impl From<ComplexValue> for [f64; 2] {
    fn from(c: ComplexValue) -> Self {
        [c.re, c.im]
    }
}

impl From<ComplexValue> for C64 {
    fn from(c: ComplexValue) -> Self {
        C64::new(c.re, c.im)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub omega0: f64,
    pub chi: f64,
    #[serde(default)]
    pub k: f64,
    pub alpha: ComplexValue,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DriveSection {
    Zero,
    Constant {
        value: f64,
    },
    /// `amplitude cos(frequency t)`; frequency defaults to `omega0`.
    Cos {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        frequency: Option<f64>,
    },
    Tabulated {
        times: Vec<f64>,
        values: Vec<f64>,
    },
}

fn drive_from_repr<'de, D: Deserializer<'de>>(d: D) -> Result<DriveSection, D::Error> {
    let value = toml::Value::deserialize(d)?;
    match value {
        toml::Value::String(name) => match name.as_str() {
            "zero" => Ok(DriveSection::Zero),
            "cos" => Ok(DriveSection::Cos {
                amplitude: 1.0,
                frequency: None,
            }),
            other => Err(serde::de::Error::custom(format!(
                "unknown drive shorthand `{other}` (expected \"zero\" or \"cos\")"
            ))),
        },
        table => DriveSection::deserialize(table).map_err(serde::de::Error::custom),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MassSection {
    Constant { value: f64 },
    Exponential { m0: f64, gamma: f64 },
    Tabulated { times: Vec<f64>, masses: Vec<f64> },
}

impl Default for MassSection {
    fn default() -> Self {
        MassSection::Constant { value: 1.0 }
    }
}

fn default_samples_per_period() -> usize {
    SAMPLES_PER_PERIOD
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    /// End of the window in raw time; defaults to `8 pi / omega0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    /// End of the window in scaled time `omega0 t`; alternative to `t_end`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_end: Option<f64>,
    #[serde(default = "default_samples_per_period")]
    pub samples_per_period: usize,
}

impl Default for TimeSection {
    fn default() -> Self {
        Self {
            t_end: None,
            tau_end: None,
            samples_per_period: SAMPLES_PER_PERIOD,
        }
    }
}

fn default_resolution() -> usize {
    201
}

fn default_taus() -> Vec<f64> {
    vec![0.0, PI / 4.0, PI, 2.0 * PI, 4.0 * PI, 8.0 * PI]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Half-width of the square window; defaults to `|alpha| + 5`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    /// Snapshot times in scaled units `omega0 t`.
    #[serde(default = "default_taus")]
    pub taus: Vec<f64>,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            half_width: None,
            resolution: default_resolution(),
            taus: default_taus(),
        }
    }
}

fn default_xi_max() -> f64 {
    PI
}

fn default_xi_samples() -> usize {
    1001
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KerrSection {
    /// Defaults to `model.alpha`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<ComplexValue>,
    #[serde(default)]
    pub xi_min: f64,
    #[serde(default = "default_xi_max")]
    pub xi_max: f64,
    #[serde(default = "default_xi_samples")]
    pub samples: usize,
}

impl Default for KerrSection {
    fn default() -> Self {
        Self {
            beta: None,
            xi_min: 0.0,
            xi_max: default_xi_max(),
            samples: default_xi_samples(),
        }
    }
}

fn default_threshold() -> f64 {
    0.9
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutocorrSection {
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// Kerr constants to scan; empty means `model.chi` only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub chi_values: Vec<f64>,
}

impl Default for AutocorrSection {
    fn default() -> Self {
        Self {
            threshold: default_threshold(),
            chi_values: Vec::new(),
        }
    }
}

fn default_levels() -> usize {
    6
}

fn default_coarse_samples() -> usize {
    101
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default = "default_coarse_samples")]
    pub samples: usize,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self {
            levels: default_levels(),
            samples: default_coarse_samples(),
        }
    }
}

fn default_timemap_end() -> f64 {
    5.0
}

fn default_timemap_samples() -> usize {
    51
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimemapSection {
    #[serde(default = "default_timemap_end")]
    pub t_end: f64,
    #[serde(default = "default_timemap_samples")]
    pub samples: usize,
    /// Initial coherent amplitude; defaults to `model.alpha`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<ComplexValue>,
}

impl Default for TimemapSection {
    fn default() -> Self {
        Self {
            t_end: default_timemap_end(),
            samples: default_timemap_samples(),
            alpha: None,
        }
    }
}

fn default_tol() -> f64 {
    1e-10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Fixed truncation; chosen from the trajectory when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_trunc: Option<usize>,
}

impl Default for NumericsSection {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            n_trunc: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

fn default_dir() -> String {
    ".".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: String,
    #[serde(default = "default_format")]
    pub format: Format,
}

fn default_format() -> Format {
    Format::Csv
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            format: Format::Csv,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelSection,
    #[serde(deserialize_with = "drive_from_repr")]
    pub drive: DriveSection,
    #[serde(default)]
    pub mass: MassSection,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub kerr: KerrSection,
    #[serde(default)]
    pub autocorr: AutocorrSection,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    #[serde(default)]
    pub timemap: TimemapSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Parses, validates and completes a configuration.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
    let model = table.get("model").and_then(|v| v.as_table());
    let missing: Vec<String> = REQUIRED_KEYS
        .iter()
        .filter(|key| match key.split_once('.') {
            Some((_, field)) => model.is_none_or(|m| !m.contains_key(field)),
            None => !table.contains_key(**key),
        })
        .map(|k| k.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(ConfigError::Missing(missing));
    }
    let mut cfg: ScenarioConfig =
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    cfg.complete();
    cfg.validate()?;
    Ok(cfg)
}

/// Serializes a configuration; `parse_config(&emit_config(c)) == c` for
/// completed configurations.
pub fn emit_config(cfg: &ScenarioConfig) -> String {
    toml::to_string(cfg).expect("configuration is always serializable")
}

impl ScenarioConfig {
    /// Replaces every derived default by its value.
    fn complete(&mut self) {
        let omega0 = self.model.omega0;
        if let DriveSection::Cos { frequency, .. } = &mut self.drive {
            frequency.get_or_insert(omega0);
        }
        match (self.time.t_end, self.time.tau_end.take()) {
            (None, Some(tau)) => self.time.t_end = Some(tau / omega0),
            (None, None) => self.time.t_end = Some(8.0 * PI / omega0),
            (Some(t), Some(tau)) if (t * omega0 - tau).abs() > 1e-12 * tau.abs().max(1.0) => {
                // conflict reported by validate
                self.time.tau_end = Some(tau);
            }
            _ => {}
        }
        let alpha = self.model.alpha;
        let abs_alpha = C64::from(alpha).norm();
        self.grid.half_width.get_or_insert(abs_alpha + 5.0);
        self.kerr.beta.get_or_insert(alpha);
        self.timemap.alpha.get_or_insert(alpha);
    }

    fn validate(&self) -> Result<(), ConfigError> {
        FrequencySpec::new(self.model.omega0, self.model.k).map_err(|e| match e {
            crate::Error::InvalidParameter { name, reason } => {
                invalid(&format!("model.{name}"), reason)
            }
            other => invalid("model", other),
        })?;
        ModelParams::new(
            self.model.omega0,
            self.model.chi,
            DriveSpec::Zero,
            self.model.alpha.into(),
        )
        .map_err(|e| match e {
            crate::Error::InvalidParameter { name, reason } => {
                invalid(&format!("model.{name}"), reason)
            }
            other => invalid("model", other),
        })?;
        self.drive_spec()?;
        self.mass_spec()?;
        if self.time.tau_end.is_some() {
            return Err(invalid("time.tau_end", "conflicts with time.t_end"));
        }
        let t_end = self.t_end();
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(invalid(
                "time.t_end",
                format!("must be non-negative, got {t_end}"),
            ));
        }
        if self.time.samples_per_period < 2 {
            return Err(invalid("time.samples_per_period", "must be at least 2"));
        }
        if self.grid.resolution < 2 {
            return Err(invalid("grid.resolution", "must be at least 2"));
        }
        if !(self.grid.half_width.unwrap_or(1.0) > 0.0) {
            return Err(invalid("grid.half_width", "must be positive"));
        }
        if self.grid.taus.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(invalid("grid.taus", "snapshot times must be non-negative"));
        }
        if !(self.kerr.xi_max > self.kerr.xi_min) || self.kerr.samples < 2 {
            return Err(invalid(
                "kerr",
                "need xi_max > xi_min and at least 2 samples",
            ));
        }
        if !(self.autocorr.threshold > 0.0) {
            return Err(invalid("autocorr.threshold", "must be positive"));
        }
        if self
            .autocorr
            .chi_values
            .iter()
            .any(|c| !(*c >= 0.0 && c.is_finite()))
        {
            return Err(invalid(
                "autocorr.chi_values",
                "Kerr constants must be non-negative",
            ));
        }
        if self.spectrum.samples < 1 {
            return Err(invalid("spectrum.samples", "must be at least 1"));
        }
        if !(self.timemap.t_end >= 0.0) || self.timemap.samples < 1 {
            return Err(invalid("timemap", "need t_end >= 0 and at least 1 sample"));
        }
        if !(self.numerics.tol > 0.0 && self.numerics.tol.is_finite()) {
            return Err(invalid("numerics.tol", "must be positive"));
        }
        if self.numerics.n_trunc == Some(0) {
            return Err(invalid("numerics.n_trunc", "must be at least 1"));
        }
        Ok(())
    }

    pub fn t_end(&self) -> f64 {
        self.time.t_end.unwrap_or(8.0 * PI / self.model.omega0)
    }

    pub fn alpha(&self) -> C64 {
        self.model.alpha.into()
    }

    pub fn frequency(&self) -> FrequencySpec {
        FrequencySpec::new(self.model.omega0, self.model.k).expect("validated")
    }

    pub fn drive_spec(&self) -> Result<DriveSpec, ConfigError> {
        Ok(match &self.drive {
            DriveSection::Zero => DriveSpec::Zero,
            DriveSection::Constant { value } => DriveSpec::Constant(*value),
            DriveSection::Cos {
                amplitude,
                frequency,
            } => DriveSpec::Cosine {
                amplitude: *amplitude,
                frequency: frequency.unwrap_or(self.model.omega0),
            },
            DriveSection::Tabulated { times, values } => DriveSpec::Tabulated(
                MonotoneCubic::new(times.clone(), values.clone())
                    .map_err(|e| invalid("drive", e))?,
            ),
        })
    }

    pub fn mass_spec(&self) -> Result<MassSpec, ConfigError> {
        match &self.mass {
            MassSection::Constant { value } => MassSpec::constant(*value),
            MassSection::Exponential { m0, gamma } => MassSpec::exponential(*m0, *gamma),
            MassSection::Tabulated { times, masses } => {
                MassSpec::tabulated(times.clone(), masses.clone())
            }
        }
        .map_err(|e| invalid("mass", e))
    }

    /// Model parameters with the Kerr constant replaced by `chi`.
    pub fn model_params_with_chi(&self, chi: f64) -> Result<ModelParams, ConfigError> {
        ModelParams::new(self.model.omega0, chi, self.drive_spec()?, self.alpha())
            .map_err(|e| invalid("model", e))
    }

    pub fn model_params(&self) -> Result<ModelParams, ConfigError> {
        self.model_params_with_chi(self.model.chi)
    }
}
