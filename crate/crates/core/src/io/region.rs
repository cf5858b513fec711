use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use std::path::Path;

use super::IoError;
use crate::estimation::{InitializationSpec, RealDataSeries, DEFAULT_LATENT_FRACTION};
use crate::params::{ModelParams, Reproduction, TransitionProbs};
use crate::policy::CostConfig;
use crate::state::Action;

pub const DEFAULT_TRAINING_DAYS: u32 = 40;
pub const DEFAULT_HORIZON_DAYS: u32 = 90;

fn default_latent_fraction() -> f64 {
    DEFAULT_LATENT_FRACTION
}

fn default_training_days() -> u32 {
    DEFAULT_TRAINING_DAYS
}

fn default_horizon_days() -> u32 {
    DEFAULT_HORIZON_DAYS
}

/// Everything region-specific: population, costs, capacity and the
/// training/test protocol. Currency fields are whole dollars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub name: String,
    pub population: u64,
    /// Beds available for epidemic patients.
    pub cap: u64,
    /// Daily cost of full lockdown.
    pub c_e: u64,
    /// Cost per death.
    pub c_l: u64,
    pub rho: f64,
    /// Share of active cases that are severe.
    pub p_severe: f64,
    /// Hidden-to-documented inflation factor.
    pub inflation: f64,
    #[serde(default = "default_latent_fraction")]
    pub latent_fraction: f64,
    pub r0_base: f64,
    pub r1: f64,
    pub r2: f64,
    pub death_multiplier: f64,
    pub training_action: Action,
    #[serde(default = "default_training_days")]
    pub training_days: u32,
    #[serde(default = "default_horizon_days")]
    pub horizon_days: u32,
    pub start_date: NaiveDate,
}

impl RegionConfig {
    /// Checks every cross-field constraint; the message names the offender.
    pub fn validate(&self) -> Result<(), String> {
        if self.population == 0 {
            return Err("population must be positive".into());
        }
        if self.training_days < 2 {
            return Err(format!("training_days = {} must be at least 2", self.training_days));
        }
        if self.training_days >= self.horizon_days {
            return Err(format!(
                "training_days ({}) must be less than horizon_days ({})",
                self.training_days, self.horizon_days
            ));
        }
        if !(0.0..=1.0).contains(&self.p_severe) {
            return Err(format!("p_severe = {} is not in [0, 1]", self.p_severe));
        }
        if !(self.inflation >= 1.0 && self.inflation.is_finite()) {
            return Err(format!("inflation = {} must be finite and >= 1", self.inflation));
        }
        if !(self.latent_fraction >= 0.0 && self.latent_fraction.is_finite()) {
            return Err(format!("latent_fraction = {} must be finite and >= 0", self.latent_fraction));
        }
        self.model_params(TransitionProbs::initial_estimate()).map_err(|e| e.to_string())?;
        self.cost_config().map_err(|e| e.to_string())?;
        Ok(())
    }

    pub fn reproduction(&self) -> Reproduction {
        Reproduction { r0_base: self.r0_base, r1: self.r1, r2: self.r2 }
    }

    pub fn model_params(&self, transitions: TransitionProbs) -> Result<ModelParams, crate::params::ParamError> {
        ModelParams::new(transitions, self.reproduction(), self.death_multiplier, self.cap)
    }

    pub fn cost_config(&self) -> Result<CostConfig, crate::policy::PolicyError> {
        CostConfig::new(self.c_e as f64, self.c_l as f64, self.rho, self.cap)
    }

    pub fn initialization(&self, data: &RealDataSeries) -> InitializationSpec {
        InitializationSpec::from_data(self.p_severe, self.inflation, self.latent_fraction, data)
    }
}

/// Reads and validates a JSON region file; unknown keys are rejected.
pub fn load_region_config(path: &Path) -> Result<RegionConfig, IoError> {
    let text = std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    let config: RegionConfig = serde_json::from_str(&text)
        .map_err(|e| IoError::Config { path: path.to_path_buf(), message: e.to_string() })?;
    config.validate().map_err(|message| IoError::Config { path: path.to_path_buf(), message })?;
    Ok(config)
}
