//! Threshold lockdown policies: signal, action rule, reward and grid-search
//! optimization over the test horizon.

mod evaluate;
mod extrapolate;
mod reward;
mod thresholds;

pub use evaluate::{
    evaluate_policy, mean_trajectory, optimize_policy, simulate_policy_path, ForecastSetup, MeanPoint, OptimizedPolicy,
    PathPoint, PolicyEvaluation, PolicyPath, DEFAULT_REPLICATES,
};
pub use extrapolate::{carry_forward_level, extrapolate_testing_probs, TREND_T_STAT};
pub use reward::{
    immediate_reward, state_cost_config, Beds, CostConfig, COVID_BED_SHARE, DEFAULT_RHO, US_DAILY_LOCKDOWN_COST,
    VALUE_OF_LIFE,
};
pub use thresholds::{
    policy_action, policy_signal, PolicyGrid, PolicyThresholds, DECISION_PERIOD, DEFAULT_THETAS,
    DEFAULT_THRESHOLD_LEVELS,
};

use thiserror::Error;

use crate::estimation::EstimationError;
use crate::kernel::CouplingError;
use crate::params::ParamError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("invalid thresholds: {0}")]
    Thresholds(String),
    #[error("policy grid has no members")]
    EmptyGrid,
    #[error("invalid costs: {0}")]
    Costs(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
}
