use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::data::RealDataSeries;
use super::schedule::TestingSchedule;
use super::smoothing::{smooth_daily_deaths, FIRST_SMOOTHED_DAY};
use super::{EstimationError, Training};
use crate::kernel::step_pair;
use crate::params::ModelParams;
use crate::rng::{Purpose, RngStream};
use crate::state::{ObservedState, PopulationState};

/// A fixed set of Monte-Carlo streams. Reusing one set across candidates
/// gives common random numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSet {
    pub seed: u64,
    pub runs: usize,
}

impl SeedSet {
    pub fn new(seed: u64, runs: usize) -> Self {
        SeedSet { seed, runs }
    }

    pub fn stream(&self, purpose: Purpose, run: usize) -> RngStream {
        RngStream::for_purpose(self.seed, purpose, 0, run as u32)
    }
}

/// Monte-Carlo estimate of the calibration loss.
#[derive(Debug, Clone, PartialEq)]
pub struct LossEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub per_run: Vec<f64>,
}

impl LossEstimate {
    pub fn from_runs(per_run: Vec<f64>) -> Self {
        let n = per_run.len() as f64;
        let mean = per_run.iter().sum::<f64>() / n;
        let std_error = if per_run.len() > 1 {
            let var = per_run.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        LossEstimate { mean, std_error, per_run }
    }
}

/// Simulates the coupled hidden and documented processes over the training
/// window; element `t - 1` holds the end-of-day states of day `t`.
pub fn simulate_training<R: Rng + ?Sized>(
    params: &ModelParams,
    training: &Training<'_>,
    schedule: &TestingSchedule,
    rng: &mut R,
) -> Result<Vec<(PopulationState, ObservedState)>, EstimationError> {
    let days = training.days();
    if days >= 2 && (schedule.first_day() > 2 || schedule.last_day() < days) {
        return Err(EstimationError::ScheduleTooShort { needed: days, found: schedule.last_day() });
    }
    let (mut pop, mut obs) = training.initial_states()?;
    let mut path = Vec::with_capacity(days as usize);
    path.push((pop, obs));
    for t in 2..=days {
        let (mild, severe) = schedule.get(t).expect("coverage checked");
        (pop, obs) = step_pair(&pop, &obs, params, training.action, mild, severe, rng)?;
        path.push((pop, obs));
    }
    Ok(path)
}

/// Squared relative error of simulated documented deaths (7-day smoothed)
/// and active cases against the reported series, summed over days
/// `5..=T-3`. A day whose reported smoothed deaths or active count is zero
/// contributes only its other term.
pub fn trajectory_loss(
    sim_active: &[u64],
    sim_cumulative_deaths: &[u64],
    data: &RealDataSeries,
) -> Result<f64, EstimationError> {
    let real_deaths: Vec<f64> = data.records().iter().map(|r| r.cumulative_deaths as f64).collect();
    let sim_deaths: Vec<f64> = sim_cumulative_deaths.iter().map(|&d| d as f64).collect();
    let real_smooth = smooth_daily_deaths(&real_deaths)?;
    let sim_smooth = smooth_daily_deaths(&sim_deaths)?;
    debug_assert_eq!(sim_active.len(), data.len());

    let mut loss = 0.0;
    for (k, (&sim_d, &real_d)) in sim_smooth.iter().zip(&real_smooth).enumerate() {
        let day = k + FIRST_SMOOTHED_DAY;
        if real_d > 0.0 {
            loss += (sim_d / real_d - 1.0).powi(2);
        }
        let real_active = data.day(day).active_cases;
        if real_active > 0 {
            loss += (sim_active[day - 1] as f64 / real_active as f64 - 1.0).powi(2);
        }
    }
    Ok(loss)
}

/// Calibration loss of `params` averaged over the runs of `seeds`.
pub fn simulation_loss(
    params: &ModelParams,
    training: &Training<'_>,
    schedule: &TestingSchedule,
    seeds: &SeedSet,
) -> Result<LossEstimate, EstimationError> {
    if seeds.runs == 0 {
        return Err(EstimationError::Config("n_runs must be at least 1".into()));
    }
    let per_run = (0..seeds.runs)
        .into_par_iter()
        .map(|run| {
            let mut rng = seeds.stream(Purpose::Loss, run);
            let path = simulate_training(params, training, schedule, &mut rng)?;
            let active: Vec<u64> = path.iter().map(|(_, o)| o.active()).collect();
            let deaths: Vec<u64> = path.iter().map(|(_, o)| o.d).collect();
            trajectory_loss(&active, &deaths, training.data)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LossEstimate::from_runs(per_run))
}
