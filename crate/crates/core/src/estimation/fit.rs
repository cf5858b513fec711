//! Joint calibration of transition and testing probabilities.
//!
//! Each round re-estimates the testing schedule from the current transition
//! probabilities, then minimizes the simulation loss over a parameter grid
//! with that schedule held fixed. The round with the smallest minimized loss
//! wins.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::loss::{simulation_loss, LossEstimate, SeedSet};
use super::schedule::TestingSchedule;
use super::testing::estimate_testing_probs;
use super::{EstimationError, Training};
use crate::params::{ModelParams, Transition, TransitionProbs};
use crate::rng::{Purpose, RngStream};

pub const DEFAULT_GRID_FACTORS: [f64; 5] = [0.5, 0.75, 1.0, 1.5, 2.0];
pub const DEFAULT_K_ITERS: usize = 5;
pub const DEFAULT_N_RUNS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridMode {
    /// Vary one coordinate at a time, holding the others at the current best.
    Coordinate,
    /// Evaluate the full Cartesian product.
    Cartesian,
}

/// Candidate values for each transition probability.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrid {
    values: [Vec<f64>; 5],
    mode: GridMode,
}

impl ParamGrid {
    pub fn new(values: [Vec<f64>; 5], mode: GridMode) -> Result<Self, EstimationError> {
        if values.iter().any(Vec::is_empty) {
            return Err(EstimationError::Config("every grid coordinate needs at least one value".into()));
        }
        Ok(ParamGrid { values, mode })
    }

    /// `center[j] * factor` for every factor, per coordinate.
    pub fn multiplicative(center: &TransitionProbs, factors: &[f64], mode: GridMode) -> Result<Self, EstimationError> {
        let values = Transition::ALL.map(|t| factors.iter().map(|f| center.get(t) * f).collect());
        ParamGrid::new(values, mode)
    }

    pub fn singleton(p: &TransitionProbs) -> Self {
        ParamGrid { values: p.to_array().map(|v| vec![v]), mode: GridMode::Coordinate }
    }

    pub fn values(&self, t: Transition) -> &[f64] {
        let idx = Transition::ALL.iter().position(|&x| x == t).expect("known coordinate");
        &self.values[idx]
    }

    pub fn mode(&self) -> GridMode {
        self.mode
    }

    pub fn with_mode(mut self, mode: GridMode) -> Self {
        self.mode = mode;
        self
    }

    /// Every point of the Cartesian product, first coordinate slowest.
    pub fn points(&self) -> Vec<TransitionProbs> {
        let mut out = vec![[0.0; 5]];
        for (j, vals) in self.values.iter().enumerate() {
            out = out
                .into_iter()
                .flat_map(|p| {
                    vals.iter().map(move |&v| {
                        let mut q = p;
                        q[j] = v;
                        q
                    })
                })
                .collect();
        }
        out.into_iter().map(TransitionProbs::from_array).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitConfig {
    pub k_iters: usize,
    pub n_runs: usize,
    pub seed: u64,
}

impl FitConfig {
    pub fn new(seed: u64) -> Self {
        FitConfig { k_iters: DEFAULT_K_ITERS, n_runs: DEFAULT_N_RUNS, seed }
    }

    /// Streams shared by every loss evaluation of the fit.
    pub fn seed_set(&self) -> SeedSet {
        SeedSet::new(self.seed, self.n_runs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub params: TransitionProbs,
    pub loss: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: ModelParams,
    pub schedule: TestingSchedule,
    pub iterations: Vec<IterationRecord>,
    /// 1-based index of the selected round.
    pub k_min: usize,
}

impl FitResult {
    pub fn selected(&self) -> &IterationRecord {
        &self.iterations[self.k_min - 1]
    }
}

/// Index of the smallest value; ties go to the earliest.
fn argmin(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some(b) if !(v < values[b]) => {}
            _ => best = Some(i),
        }
    }
    best
}

fn evaluate(
    base: &ModelParams,
    candidates: &[TransitionProbs],
    training: &Training<'_>,
    schedule: &TestingSchedule,
    seeds: &SeedSet,
) -> Result<Option<(TransitionProbs, LossEstimate)>, EstimationError> {
    let scored: Vec<Option<(TransitionProbs, LossEstimate)>> = candidates
        .par_iter()
        .map(|cand| match base.with_transitions(*cand) {
            Ok(params) => simulation_loss(&params, training, schedule, seeds).map(|l| Some((*cand, l))),
            Err(_) => Ok(None),
        })
        .collect::<Result<_, _>>()?;
    let valid: Vec<(TransitionProbs, LossEstimate)> = scored.into_iter().flatten().collect();
    let means: Vec<f64> = valid.iter().map(|(_, l)| l.mean).collect();
    Ok(argmin(&means).map(|i| valid[i].clone()))
}

/// Minimizes the loss over `grid` with the schedule fixed, starting from
/// `start` in coordinate mode.
pub fn grid_search(
    base: &ModelParams,
    start: &TransitionProbs,
    grid: &ParamGrid,
    training: &Training<'_>,
    schedule: &TestingSchedule,
    seeds: &SeedSet,
) -> Result<(TransitionProbs, LossEstimate), EstimationError> {
    match grid.mode {
        GridMode::Cartesian => evaluate(base, &grid.points(), training, schedule, seeds)?
            .ok_or(EstimationError::NoValidGridPoint),
        GridMode::Coordinate => {
            let mut current = *start;
            let mut best = None;
            for (j, t) in Transition::ALL.into_iter().enumerate() {
                let candidates: Vec<TransitionProbs> =
                    grid.values[j].iter().map(|&v| current.with(t, v)).collect();
                let (p, loss) =
                    evaluate(base, &candidates, training, schedule, seeds)?.ok_or(EstimationError::NoValidGridPoint)?;
                current = p;
                best = Some(loss);
            }
            Ok((current, best.expect("five coordinates searched")))
        }
    }
}

/// Alternates testing-probability estimation and grid minimization for
/// `k_iters` rounds starting from `base.transitions()`.
pub fn fit(
    base: &ModelParams,
    training: &Training<'_>,
    grid: &ParamGrid,
    config: &FitConfig,
) -> Result<FitResult, EstimationError> {
    if config.k_iters == 0 {
        return Err(EstimationError::Config("k_iters must be at least 1".into()));
    }
    let seeds = config.seed_set();
    let mut current = *base.transitions();
    let mut iterations = Vec::with_capacity(config.k_iters);
    let mut schedules = Vec::with_capacity(config.k_iters);

    for k in 1..=config.k_iters {
        let params = base.with_transitions(current)?;
        let mut rng = RngStream::for_purpose(config.seed, Purpose::TestingProbs, k as u32, 0);
        let schedule = estimate_testing_probs(&params, training, &mut rng)?;
        let (next, loss) = grid_search(base, &current, grid, training, &schedule, &seeds)?;
        iterations.push(IterationRecord { params: next, loss: loss.mean, std_error: loss.std_error });
        schedules.push(schedule);
        current = next;
    }

    let losses: Vec<f64> = iterations.iter().map(|r| r.loss).collect();
    let k_min = argmin(&losses).expect("at least one round") + 1;
    let params = base.with_transitions(iterations[k_min - 1].params)?;
    Ok(FitResult { params, schedule: schedules.swap_remove(k_min - 1), iterations, k_min })
}
