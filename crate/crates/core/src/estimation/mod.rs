//! Calibration of transition and testing probabilities to reported data.

mod data;
mod fit;
mod init;
mod loss;
mod schedule;
mod smoothing;
mod synthetic;
mod testing;

pub use data::{DailyRecord, RealDataSeries, SeriesError};
pub use fit::{
    fit, grid_search, FitConfig, FitResult, GridMode, IterationRecord, ParamGrid, DEFAULT_GRID_FACTORS,
    DEFAULT_K_ITERS, DEFAULT_N_RUNS,
};
pub(crate) use init::round_half_up;
pub use init::{initialize_states, split_new_cases, InitializationSpec, DEFAULT_LATENT_FRACTION};
pub use loss::{simulate_training, simulation_loss, trajectory_loss, LossEstimate, SeedSet};
pub use schedule::TestingSchedule;
pub use smoothing::{smooth_daily_deaths, FIRST_SMOOTHED_DAY};
pub use synthetic::simulate_case_series;
pub use testing::{estimate_testing_probs, testing_ratio};

use thiserror::Error;

use crate::kernel::CouplingError;
use crate::params::ParamError;
use crate::state::{Action, ObservedState, PopulationState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimationError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error("series too short: need at least {needed} days, found {found}")]
    SeriesTooShort { needed: usize, found: usize },
    #[error("testing schedule ends at day {found} but day {needed} is required")]
    ScheduleTooShort { needed: u32, found: u32 },
    #[error("no grid point satisfies the parameter constraints")]
    NoValidGridPoint,
}

/// Everything that fixes the training window apart from the parameters.
#[derive(Debug, Clone, Copy)]
pub struct Training<'a> {
    pub data: &'a RealDataSeries,
    pub init: InitializationSpec,
    pub population: u64,
    pub action: Action,
}

impl Training<'_> {
    pub fn days(&self) -> u32 {
        self.data.len() as u32
    }

    pub fn initial_states(&self) -> Result<(PopulationState, ObservedState), EstimationError> {
        initialize_states(&self.init, self.population)
    }
}
