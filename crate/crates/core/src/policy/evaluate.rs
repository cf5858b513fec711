use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::reward::{immediate_reward, CostConfig};
use super::thresholds::{policy_action, policy_signal, PolicyGrid, PolicyThresholds};
use super::PolicyError;
use crate::estimation::{LossEstimate, SeedSet, TestingSchedule};
use crate::kernel::step_pair;
use crate::params::ModelParams;
use crate::rng::Purpose;
use crate::state::{Action, ObservedState, PopulationState};

pub const DEFAULT_REPLICATES: usize = 50;

/// Fixed inputs of a forecast: parameters, testing schedule, starting
/// states and the training/test split.
#[derive(Debug, Clone, Copy)]
pub struct ForecastSetup<'a> {
    pub params: &'a ModelParams,
    /// Must cover every day from `start.0.day + 1` through `horizon`.
    pub schedule: &'a TestingSchedule,
    pub start: (PopulationState, ObservedState),
    /// Last training day `T`; the policy takes over on this day.
    pub training_end: u32,
    /// Last simulated day.
    pub horizon: u32,
    pub training_action: Action,
}

impl ForecastSetup<'_> {
    fn validate(&self) -> Result<(), PolicyError> {
        let start_day = self.start.0.day;
        if self.horizon <= self.training_end {
            return Err(PolicyError::Config(format!(
                "horizon {} must exceed the training length {}",
                self.horizon, self.training_end
            )));
        }
        if start_day > self.training_end || start_day != self.start.1.day {
            return Err(PolicyError::Config(format!(
                "forecast must start on or before day {} (population day {}, observed day {})",
                self.training_end, start_day, self.start.1.day
            )));
        }
        if self.start.0.total() == 0 {
            return Err(PolicyError::Config("population is empty".into()));
        }
        if self.schedule.first_day() > start_day + 1 || self.schedule.last_day() < self.horizon {
            return Err(PolicyError::Config(format!(
                "testing schedule covers days {}..={} but {}..={} are needed",
                self.schedule.first_day(),
                self.schedule.last_day(),
                start_day + 1,
                self.horizon
            )));
        }
        Ok(())
    }
}

/// One simulated day: end-of-day states and the action in force that day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathPoint {
    pub pop: PopulationState,
    pub obs: ObservedState,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyPath {
    pub points: Vec<PathPoint>,
    /// Reward summed over the test-period transitions.
    pub reward: f64,
}

/// Simulates one trajectory under `thr`. Before the training end the
/// training action applies; from then on the action rule runs on the
/// documented counts, first deciding on the training end itself.
pub fn simulate_policy_path<R: Rng + ?Sized>(
    setup: &ForecastSetup<'_>,
    thr: &PolicyThresholds,
    cost: &CostConfig,
    rng: &mut R,
) -> Result<PolicyPath, PolicyError> {
    setup.validate()?;
    let n = setup.start.0.total();
    let (mut pop, mut obs) = setup.start;
    let mut action = setup.training_action;
    let mut reward = 0.0;
    let mut points = Vec::with_capacity((setup.horizon - pop.day + 1) as usize);

    for t in pop.day..setup.horizon {
        if t >= setup.training_end {
            let w = policy_signal(&obs, thr.theta(), n);
            action = policy_action(t - setup.training_end, w, action, thr);
        }
        points.push(PathPoint { pop, obs, action });
        let (mild, severe) = setup.schedule.get(t + 1).expect("coverage validated");
        let (next_pop, next_obs) = step_pair(&pop, &obs, setup.params, action, mild, severe, rng)?;
        if t >= setup.training_end {
            reward += immediate_reward(&pop, &next_pop, action, cost);
        }
        pop = next_pop;
        obs = next_obs;
    }
    points.push(PathPoint { pop, obs, action });
    Ok(PolicyPath { points, reward })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyEvaluation {
    pub thresholds: PolicyThresholds,
    pub mean: f64,
    pub std_error: f64,
    pub per_replicate: Vec<f64>,
}

/// Monte-Carlo expected reward of `thr` over the runs of `seeds`.
pub fn evaluate_policy(
    setup: &ForecastSetup<'_>,
    thr: &PolicyThresholds,
    cost: &CostConfig,
    seeds: &SeedSet,
) -> Result<PolicyEvaluation, PolicyError> {
    if seeds.runs == 0 {
        return Err(PolicyError::Config("need at least one replicate".into()));
    }
    let per_replicate = (0..seeds.runs)
        .into_par_iter()
        .map(|j| {
            let mut rng = seeds.stream(Purpose::Policy, j);
            simulate_policy_path(setup, thr, cost, &mut rng).map(|p| p.reward)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let est = LossEstimate::from_runs(per_replicate);
    Ok(PolicyEvaluation { thresholds: *thr, mean: est.mean, std_error: est.std_error, per_replicate: est.per_run })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizedPolicy {
    pub best: PolicyEvaluation,
    /// Every grid member, in grid order.
    pub evaluations: Vec<PolicyEvaluation>,
}

/// Evaluates every grid member on the same streams and returns the highest
/// expected reward; ties go to the lexicographically smallest thresholds.
pub fn optimize_policy(
    grid: &PolicyGrid,
    setup: &ForecastSetup<'_>,
    cost: &CostConfig,
    seeds: &SeedSet,
) -> Result<OptimizedPolicy, PolicyError> {
    setup.validate()?;
    let evaluations = grid
        .members()
        .par_iter()
        .map(|thr| evaluate_policy(setup, thr, cost, seeds))
        .collect::<Result<Vec<_>, _>>()?;
    let best = evaluations
        .iter()
        .reduce(|a, b| {
            if b.mean > a.mean || (b.mean == a.mean && b.thresholds.lex_cmp(&a.thresholds).is_lt()) {
                b
            } else {
                a
            }
        })
        .ok_or(PolicyError::EmptyGrid)?
        .clone();
    Ok(OptimizedPolicy { best, evaluations })
}

/// Per-day average over replicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanPoint {
    pub day: u32,
    /// Most frequent action; ties go to the lower level.
    pub action: Action,
    pub s: f64,
    pub l: f64,
    pub i_m: f64,
    pub i_s: f64,
    pub r: f64,
    pub d: f64,
    pub i_m_o: f64,
    pub i_s_o: f64,
    pub r_o: f64,
    pub d_o: f64,
}

/// Averages replicate paths day by day. All paths must span the same days.
pub fn mean_trajectory(paths: &[PolicyPath]) -> Vec<MeanPoint> {
    let Some(first) = paths.first() else {
        return Vec::new();
    };
    let j = paths.len() as f64;
    (0..first.points.len())
        .map(|k| {
            let mut sums = [0u64; 10];
            let mut votes = [0usize; 3];
            for path in paths {
                let p = &path.points[k];
                debug_assert_eq!(p.pop.day, first.points[k].pop.day);
                let vals = [p.pop.s, p.pop.l, p.pop.i_m, p.pop.i_s, p.pop.r, p.pop.d, p.obs.i_m, p.obs.i_s, p.obs.r, p.obs.d];
                for (s, v) in sums.iter_mut().zip(vals) {
                    *s += v;
                }
                votes[p.action.level() as usize] += 1;
            }
            let top = *votes.iter().max().expect("three levels");
            let level = votes.iter().position(|&v| v == top).expect("max exists");
            let m = sums.map(|s| s as f64 / j);
            MeanPoint {
                day: first.points[k].pop.day,
                action: Action::from_level(level as u8).expect("valid level"),
                s: m[0],
                l: m[1],
                i_m: m[2],
                i_s: m[3],
                r: m[4],
                d: m[5],
                i_m_o: m[6],
                i_s_o: m[7],
                r_o: m[8],
                d_o: m[9],
            }
        })
        .collect()
}
