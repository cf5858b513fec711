use serde::{Deserialize, Serialize};

use super::PolicyError;
use crate::estimation::round_half_up;
use crate::state::{Action, PopulationState};

/// US-wide daily cost of a full lockdown, in dollars.
pub const US_DAILY_LOCKDOWN_COST: f64 = 20e9;
/// Value of a statistical life year, in dollars.
pub const VALUE_OF_LIFE: f64 = 4.7e6;
pub const DEFAULT_RHO: f64 = 0.25;
/// Share of hospital beds available to epidemic patients.
pub const COVID_BED_SHARE: f64 = 0.40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostConfig {
    /// Daily cost of full lockdown.
    pub c_e: f64,
    /// Cost per death.
    pub c_l: f64,
    /// Daily penalty per over-capacity severe case, as a fraction of `c_l`.
    pub rho: f64,
    pub cap: u64,
}

impl CostConfig {
    pub fn new(c_e: f64, c_l: f64, rho: f64, cap: u64) -> Result<Self, PolicyError> {
        if !(c_e >= 0.0 && c_l >= 0.0) || !c_e.is_finite() || !c_l.is_finite() {
            return Err(PolicyError::Costs(format!("costs must be finite and >= 0 (c_e={c_e}, c_l={c_l})")));
        }
        if !(0.0..1.0).contains(&rho) {
            return Err(PolicyError::Costs(format!("rho = {rho} must lie in [0, 1)")));
        }
        Ok(CostConfig { c_e, c_l, rho, cap })
    }

    /// Both costs multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        CostConfig { c_e: self.c_e * factor, c_l: self.c_l * factor, ..*self }
    }
}

/// Hospital capacity figure supplied to [`state_cost_config`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Beds {
    /// All hospital beds; capacity is [`COVID_BED_SHARE`] of them.
    Total(u64),
    /// Beds already restricted to epidemic patients.
    Covid(u64),
}

/// Cost configuration for a region whose GDP is `gdp_fraction` of the
/// national GDP.
pub fn state_cost_config(
    gdp_fraction: f64,
    us_daily_cost: f64,
    c_l: f64,
    rho: f64,
    beds: Beds,
) -> Result<CostConfig, PolicyError> {
    let cap = match beds {
        Beds::Total(n) => round_half_up(COVID_BED_SHARE * n as f64),
        Beds::Covid(n) => n,
    };
    CostConfig::new(gdp_fraction * us_daily_cost, c_l, rho, cap)
}

/// Reward (negative cost) of the transition `prev -> next` under `action`:
/// deaths, the lockdown's economic cost (half for partial) and a penalty for
/// severe cases above capacity.
pub fn immediate_reward(prev: &PopulationState, next: &PopulationState, action: Action, cost: &CostConfig) -> f64 {
    debug_assert!(next.d >= prev.d);
    let new_deaths = (next.d - prev.d) as f64;
    let over_cap = next.i_s.saturating_sub(cost.cap) as f64;
    -(cost.c_l * new_deaths + (action.level() as f64 / 2.0) * cost.c_e + cost.rho * cost.c_l * over_cap)
}
