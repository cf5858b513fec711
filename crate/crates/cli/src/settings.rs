//! `--set key=value` overrides: engine settings plus region config fields.

use serde::{Deserialize, Serialize};

use epipolicy::estimation::{GridMode, DEFAULT_GRID_FACTORS, DEFAULT_K_ITERS, DEFAULT_N_RUNS};
use epipolicy::io::RegionConfig;
use epipolicy::policy::{DEFAULT_REPLICATES, DEFAULT_THETAS, DEFAULT_THRESHOLD_LEVELS};
use epipolicy::sensitivity::{DEFAULT_INNER, DEFAULT_NOISE_SCALE, DEFAULT_OUTER};

use crate::CliError;

/// Engine settings not stored in the region config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub k_iters: usize,
    pub n_runs: usize,
    pub grid_mode: GridMode,
    pub param_factors: Vec<f64>,
    /// Policy-evaluation replicates per grid member.
    pub replicates: usize,
    pub outer: usize,
    pub inner: usize,
    pub noise_scale: f64,
    pub policy_levels: Vec<f64>,
    pub policy_thetas: Vec<f64>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            k_iters: DEFAULT_K_ITERS,
            n_runs: DEFAULT_N_RUNS,
            grid_mode: GridMode::Coordinate,
            param_factors: DEFAULT_GRID_FACTORS.to_vec(),
            replicates: DEFAULT_REPLICATES,
            outer: DEFAULT_OUTER,
            inner: DEFAULT_INNER,
            noise_scale: DEFAULT_NOISE_SCALE,
            policy_levels: DEFAULT_THRESHOLD_LEVELS.to_vec(),
            policy_thetas: DEFAULT_THETAS.to_vec(),
        }
    }
}

fn bad(key: &str, value: &str, why: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("--set {key}={value}: {why}"))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    let list = value
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| bad(key, value, e)))
        .collect::<Result<Vec<_>, _>>()?;
    if list.iter().any(|v| !v.is_finite()) {
        return Err(bad(key, value, "values must be finite"));
    }
    Ok(list)
}

fn parse_count(key: &str, value: &str) -> Result<usize, CliError> {
    value.trim().parse().map_err(|e| bad(key, value, e))
}

/// Splits `key=value`.
pub fn split_pair(pair: &str) -> Result<(&str, &str), CliError> {
    pair.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .filter(|(k, _)| !k.is_empty())
        .ok_or_else(|| CliError::Validation(format!("override `{pair}` is not of the form key=value")))
}

impl Settings {
    /// Applies `key=value` if it names an engine setting; returns false for
    /// keys it does not know.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<bool, CliError> {
        match key {
            "k_iters" => self.k_iters = parse_count(key, value)?,
            "n_runs" => self.n_runs = parse_count(key, value)?,
            "replicates" => self.replicates = parse_count(key, value)?,
            "outer" => self.outer = parse_count(key, value)?,
            "inner" => self.inner = parse_count(key, value)?,
            "grid_mode" => {
                self.grid_mode = match value {
                    "coordinate" => GridMode::Coordinate,
                    "cartesian" => GridMode::Cartesian,
                    _ => return Err(bad(key, value, "expected `coordinate` or `cartesian`")),
                }
            }
            "noise_scale" => {
                let v: f64 = value.parse().map_err(|e| bad(key, value, e))?;
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(bad(key, value, "must be finite and >= 0"));
                }
                self.noise_scale = v;
            }
            "param_factors" => self.param_factors = parse_list(key, value)?,
            "policy_levels" => self.policy_levels = parse_list(key, value)?,
            "policy_thetas" => self.policy_thetas = parse_list(key, value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }
}

/// Resolves overrides against `config`: engine keys update the settings,
/// every other key must be a region config field.
pub fn apply_overrides(config: &RegionConfig, pairs: &[String]) -> Result<(RegionConfig, Settings), CliError> {
    let mut settings = Settings::default();
    let mut value = serde_json::to_value(config).expect("config serializes");
    let fields = value.as_object_mut().expect("config is an object");
    for pair in pairs {
        let (key, raw) = split_pair(pair)?;
        if settings.apply(key, raw)? {
            continue;
        }
        if !fields.contains_key(key) {
            return Err(CliError::Validation(format!("unknown override key `{key}`")));
        }
        let parsed = serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
        fields.insert(key.to_string(), parsed);
    }
    let config: RegionConfig =
        serde_json::from_value(value).map_err(|e| CliError::Validation(format!("overridden config: {e}")))?;
    config.validate().map_err(|e| CliError::Validation(format!("overridden config: {e}")))?;
    Ok((config, settings))
}
