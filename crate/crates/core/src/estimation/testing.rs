use rand::Rng;

use super::init::split_new_cases;
use super::schedule::TestingSchedule;
use super::{EstimationError, Training};
use crate::kernel::{step_observed_anchored, step_population};
use crate::params::ModelParams;

/// Share of an undocumented pool that must have been tested to produce
/// `reported` new cases. No reports gives 0; an empty or negative pool, or a
/// ratio above 1, gives 1.
pub fn testing_ratio(reported: u64, pool: i64) -> f64 {
    if reported == 0 {
        0.0
    } else if pool <= 0 {
        1.0
    } else {
        (reported as f64 / pool as f64).min(1.0)
    }
}

/// Testing probabilities for days `2..=T`: the hidden process is simulated
/// under `params`, the documented process is driven by the reported cases,
/// and each day's probability is reported cases over the previous day's
/// undocumented pool.
pub fn estimate_testing_probs<R: Rng + ?Sized>(
    params: &ModelParams,
    training: &Training<'_>,
    rng: &mut R,
) -> Result<TestingSchedule, EstimationError> {
    let days = training.days();
    let (mut pop, mut obs) = training.initial_states()?;
    let mut mild = Vec::with_capacity(days.saturating_sub(1) as usize);
    let mut severe = Vec::with_capacity(days.saturating_sub(1) as usize);

    for t in 2..=days {
        let (new_mild, new_severe) = split_new_cases(training.data.day(t as usize).new_cases, training.init.p_severe);
        let pool_m = pop.i_m as i64 - obs.i_m as i64;
        let pool_s = pop.i_s as i64 - obs.i_s as i64;
        mild.push(testing_ratio(new_mild, pool_m));
        severe.push(testing_ratio(new_severe, pool_s));

        let next_obs = step_observed_anchored(&obs, params, pop.i_s, new_mild, new_severe, rng);
        pop = step_population(&pop, params, training.action, rng);
        obs = next_obs;
    }
    Ok(TestingSchedule::new(2, mild, severe))
}
