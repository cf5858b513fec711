use serde::{Deserialize, Serialize};

use super::data::RealDataSeries;
use super::EstimationError;
use crate::state::{ObservedState, PopulationState};

pub const DEFAULT_LATENT_FRACTION: f64 = 0.5;

/// How the day-1 hidden and documented states are built from day-1 data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitializationSpec {
    /// Share of active cases that are severe, `p_S`.
    pub p_severe: f64,
    /// Hidden-to-documented inflation factor `phi >= 1`.
    pub inflation: f64,
    /// Latent count as a fraction of the hidden mild count.
    pub latent_fraction: f64,
    pub active: u64,
    pub deaths: u64,
    pub recoveries: u64,
}

impl InitializationSpec {
    pub fn from_data(p_severe: f64, inflation: f64, latent_fraction: f64, data: &RealDataSeries) -> Self {
        let first = data.day(1);
        InitializationSpec {
            p_severe,
            inflation,
            latent_fraction,
            active: first.active_cases,
            deaths: first.cumulative_deaths,
            recoveries: first.cumulative_recoveries.unwrap_or(0),
        }
    }
}

pub(crate) fn round_half_up(x: f64) -> u64 {
    debug_assert!(x >= 0.0);
    (x + 0.5).floor() as u64
}

/// Splits a day's reported cases into `(mild, severe)`; severe is
/// `p_severe * total` rounded half up and mild takes the remainder.
pub fn split_new_cases(total: u64, p_severe: f64) -> (u64, u64) {
    let severe = round_half_up(p_severe * total as f64).min(total);
    (total - severe, severe)
}

/// Day-1 hidden and documented states for a closed population of size `n`.
pub fn initialize_states(
    spec: &InitializationSpec,
    n: u64,
) -> Result<(PopulationState, ObservedState), EstimationError> {
    if !(0.0..=1.0).contains(&spec.p_severe) {
        return Err(EstimationError::Config(format!("p_severe = {} is not in [0, 1]", spec.p_severe)));
    }
    if !(spec.inflation >= 1.0) {
        return Err(EstimationError::Config(format!("inflation = {} must be >= 1", spec.inflation)));
    }
    if !(spec.latent_fraction >= 0.0) {
        return Err(EstimationError::Config(format!(
            "latent_fraction = {} must be >= 0",
            spec.latent_fraction
        )));
    }
    let (obs_m, obs_s) = split_new_cases(spec.active, spec.p_severe);
    let obs = ObservedState { day: 1, i_m: obs_m, i_s: obs_s, r: spec.recoveries, d: spec.deaths };

    let inflate = |x: u64| round_half_up(spec.inflation * x as f64);
    let i_m = inflate(obs_m);
    let i_s = inflate(obs_s);
    let r = inflate(obs.r);
    let d = inflate(obs.d);
    let l = round_half_up(spec.latent_fraction * i_m as f64);
    let occupied = l + i_m + i_s + r + d;
    let s = n.checked_sub(occupied).ok_or_else(|| {
        EstimationError::Config(format!(
            "inflated initial compartments ({occupied}) exceed the population ({n})"
        ))
    })?;
    Ok((PopulationState { day: 1, s, l, i_m, i_s, r, d }, obs))
}
