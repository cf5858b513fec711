//! Stochastic simulation and decision optimization for a discrete-time,
//! partially observed SEIRD epidemic model.
//!
//! The hidden population process moves individuals through susceptible,
//! latent, mildly infected, severely infected, recovered and deceased
//! compartments; a documented process tracks the tested subset. The crate
//! calibrates transition and testing probabilities to case/death series,
//! forecasts under threshold lockdown policies, picks the reward-optimal
//! policy by grid search and produces sensitivity bands.

pub mod estimation;
pub mod io;
pub mod kernel;
pub mod params;
pub mod policy;
pub mod rng;
pub mod sensitivity;
pub mod state;

pub use kernel::{
    effective_r0, is_to_d_prob, s_to_l_prob, step_observed, step_observed_anchored, step_pair,
    step_pair_with_flows, step_population, CouplingError, ObservedFlows, PopulationFlows,
};
pub use params::{default_initial_params, ModelParams, ParamError, Reproduction, Transition, TransitionProbs};
pub use rng::{Purpose, RngStream};
pub use state::{Action, ObservedState, PopulationState};
