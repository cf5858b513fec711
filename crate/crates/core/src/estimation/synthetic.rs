use chrono::{Days, NaiveDate};
use rand::Rng;

use super::data::{DailyRecord, RealDataSeries};
use super::schedule::TestingSchedule;
use super::EstimationError;
use crate::kernel::step_pair_with_flows;
use crate::params::ModelParams;
use crate::state::{Action, ObservedState, PopulationState};

/// Simulates a reported series from the model itself: the documented process
/// supplies active cases, cumulative deaths and recoveries, and each day's
/// new cases are that day's testing imports. Day 1 reports no new cases.
pub fn simulate_case_series<R: Rng + ?Sized>(
    params: &ModelParams,
    start: (PopulationState, ObservedState),
    schedule: &TestingSchedule,
    action: Action,
    days: u32,
    start_date: NaiveDate,
    rng: &mut R,
) -> Result<RealDataSeries, EstimationError> {
    let (mut pop, mut obs) = start;
    let record = |k: u32, o: &ObservedState, new_cases: u64| DailyRecord {
        date: start_date + Days::new(k as u64),
        new_cases,
        active_cases: o.active(),
        cumulative_deaths: o.d,
        cumulative_recoveries: Some(o.r),
    };
    let mut records = vec![record(0, &obs, 0)];
    for k in 1..days {
        let day = pop.day + 1;
        let (mild, severe) = schedule
            .get(day)
            .ok_or(EstimationError::ScheduleTooShort { needed: day, found: schedule.last_day() })?;
        let (p, o, flows) = step_pair_with_flows(&pop, &obs, params, action, mild, severe, rng)?;
        records.push(record(k, &o, flows.new_mild + flows.new_severe));
        pop = p;
        obs = o;
    }
    Ok(RealDataSeries::new(records).expect("simulated series is contiguous and monotone"))
}
