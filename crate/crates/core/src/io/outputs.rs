//! CSV outputs. Floats are written with six significant digits; integer
//! counts and dates round-trip exactly.

use chrono::{Days, NaiveDate};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::Path;

use super::{fmt_sig, IoError};
use crate::estimation::{FitResult, TestingSchedule};
use crate::params::TransitionProbs;
use crate::policy::{MeanPoint, PolicyEvaluation, PolicyPath, PolicyThresholds};
use crate::sensitivity::Band;
use crate::state::{Action, ObservedState, PopulationState};

pub const FIT_COLUMNS: [&str; 9] =
    ["iteration", "loss", "std_error", "selected", "p_l_im", "p_im_is", "p_im_r", "p_is_r", "p_is_d1"];
pub const TESTING_COLUMNS: [&str; 4] = ["day", "date", "test_mild", "test_severe"];
pub const TRAJECTORY_COLUMNS: [&str; 14] =
    ["replicate", "day", "date", "action", "s", "l", "i_m", "i_s", "r", "d", "i_m_o", "i_s_o", "r_o", "d_o"];
pub const MEAN_TRAJECTORY_COLUMNS: [&str; 13] =
    ["day", "date", "action", "s", "l", "i_m", "i_s", "r", "d", "i_m_o", "i_s_o", "r_o", "d_o"];
pub const POLICY_COLUMNS: [&str; 7] = ["l", "u1", "u2", "theta", "expected_reward", "std_error", "replicates"];
pub const BAND_COLUMNS: [&str; 5] = ["day", "date", "lower", "mean", "upper"];
pub const SUMMARY_COLUMNS: [&str; 13] = [
    "region",
    "day",
    "date",
    "severe",
    "severe_observed",
    "deaths",
    "deaths_observed",
    "cap",
    "l",
    "u1",
    "u2",
    "theta",
    "expected_reward",
];

/// Calendar date of 1-based model day `day`.
pub fn day_date(start: NaiveDate, day: u32) -> NaiveDate {
    start + Days::new(u64::from(day.saturating_sub(1)))
}

fn iso(date: NaiveDate) -> String {
    date.format("%Y-%m-%d").to_string()
}

fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<(), IoError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path).map_err(|e| IoError::csv(path, e))?;
    w.write_record(header).map_err(|e| IoError::csv(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| IoError::csv(path, e))?;
    }
    w.flush().map_err(|e| IoError::io(path, e))
}

fn read_rows<T: DeserializeOwned>(path: &Path, header: &[&str]) -> Result<Vec<T>, IoError> {
    let file = std::fs::File::open(path).map_err(|e| IoError::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let found = reader.headers().map_err(|e| IoError::csv(path, e))?;
    if found.iter().ne(header.iter().copied()) {
        return Err(IoError::format(
            path,
            format!("expected header `{}`, found `{}`", header.join(","), found.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    reader
        .deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| IoError::format(path, format!("row {}: {e}", i + 1))))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub iteration: usize,
    pub loss: f64,
    pub std_error: f64,
    pub selected: bool,
    pub p_l_im: f64,
    pub p_im_is: f64,
    pub p_im_r: f64,
    pub p_is_r: f64,
    pub p_is_d1: f64,
}

impl FitRow {
    pub fn transitions(&self) -> TransitionProbs {
        TransitionProbs {
            p_l_im: self.p_l_im,
            p_im_is: self.p_im_is,
            p_im_r: self.p_im_r,
            p_is_r: self.p_is_r,
            p_is_d1: self.p_is_d1,
        }
    }
}

/// One row per round; `selected` marks the returned round.
pub fn write_fit(path: &Path, fit: &FitResult) -> Result<(), IoError> {
    let rows = fit.iterations.iter().enumerate().map(|(i, it)| {
        let mut row = vec![
            (i + 1).to_string(),
            fmt_sig(it.loss),
            fmt_sig(it.std_error),
            (i + 1 == fit.k_min).to_string(),
        ];
        row.extend(it.params.to_array().map(fmt_sig));
        row
    });
    write_rows(path, &FIT_COLUMNS, rows)
}

pub fn read_fit(path: &Path) -> Result<Vec<FitRow>, IoError> {
    read_rows(path, &FIT_COLUMNS)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TestingRow {
    day: u32,
    date: NaiveDate,
    test_mild: f64,
    test_severe: f64,
}

pub fn write_testing_probs(path: &Path, schedule: &TestingSchedule, start: NaiveDate) -> Result<(), IoError> {
    let rows = schedule.days().map(|day| {
        let (m, s) = schedule.get(day).expect("day within schedule");
        vec![day.to_string(), iso(day_date(start, day)), fmt_sig(m), fmt_sig(s)]
    });
    write_rows(path, &TESTING_COLUMNS, rows)
}

/// Reads a schedule back; days must be contiguous.
pub fn read_testing_probs(path: &Path) -> Result<TestingSchedule, IoError> {
    let rows: Vec<TestingRow> = read_rows(path, &TESTING_COLUMNS)?;
    let first = rows.first().map_or(1, |r| r.day);
    for (k, r) in rows.iter().enumerate() {
        if r.day != first + k as u32 {
            return Err(IoError::format(path, format!("row {}: expected day {}, found {}", k + 1, first + k as u32, r.day)));
        }
        for p in [r.test_mild, r.test_severe] {
            if !(0.0..=1.0).contains(&p) {
                return Err(IoError::format(path, format!("row {}: testing probability {p} is not in [0, 1]", k + 1)));
            }
        }
    }
    Ok(TestingSchedule::new(
        first,
        rows.iter().map(|r| r.test_mild).collect(),
        rows.iter().map(|r| r.test_severe).collect(),
    ))
}

/// One day of one replicate, hidden counts followed by documented counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub replicate: u32,
    pub day: u32,
    pub date: NaiveDate,
    pub action: Action,
    pub s: u64,
    pub l: u64,
    pub i_m: u64,
    pub i_s: u64,
    pub r: u64,
    pub d: u64,
    pub i_m_o: u64,
    pub i_s_o: u64,
    pub r_o: u64,
    pub d_o: u64,
}

impl TrajectoryRecord {
    pub fn new(replicate: u32, start: NaiveDate, action: Action, pop: &PopulationState, obs: &ObservedState) -> Self {
        TrajectoryRecord {
            replicate,
            day: pop.day,
            date: day_date(start, pop.day),
            action,
            s: pop.s,
            l: pop.l,
            i_m: pop.i_m,
            i_s: pop.i_s,
            r: pop.r,
            d: pop.d,
            i_m_o: obs.i_m,
            i_s_o: obs.i_s,
            r_o: obs.r,
            d_o: obs.d,
        }
    }

    pub fn states(&self) -> (PopulationState, ObservedState) {
        (
            PopulationState { day: self.day, s: self.s, l: self.l, i_m: self.i_m, i_s: self.i_s, r: self.r, d: self.d },
            ObservedState { day: self.day, i_m: self.i_m_o, i_s: self.i_s_o, r: self.r_o, d: self.d_o },
        )
    }

    fn fields(&self) -> Vec<String> {
        let mut row = vec![self.replicate.to_string(), self.day.to_string(), iso(self.date), self.action.to_string()];
        row.extend(
            [self.s, self.l, self.i_m, self.i_s, self.r, self.d, self.i_m_o, self.i_s_o, self.r_o, self.d_o]
                .map(|v| v.to_string()),
        );
        row
    }
}

/// Flattens replicate paths into records, replicate-major.
pub fn trajectory_records(paths: &[PolicyPath], start: NaiveDate) -> Vec<TrajectoryRecord> {
    paths
        .iter()
        .enumerate()
        .flat_map(|(j, path)| {
            path.points.iter().map(move |p| TrajectoryRecord::new(j as u32, start, p.action, &p.pop, &p.obs))
        })
        .collect()
}

pub fn write_trajectories(path: &Path, records: &[TrajectoryRecord]) -> Result<(), IoError> {
    write_rows(path, &TRAJECTORY_COLUMNS, records.iter().map(TrajectoryRecord::fields))
}

pub fn read_trajectories(path: &Path) -> Result<Vec<TrajectoryRecord>, IoError> {
    read_rows(path, &TRAJECTORY_COLUMNS)
}

/// Day-1 states in the trajectory schema.
pub fn write_initial_state(path: &Path, record: &TrajectoryRecord) -> Result<(), IoError> {
    write_trajectories(path, std::slice::from_ref(record))
}

pub fn read_initial_state(path: &Path) -> Result<TrajectoryRecord, IoError> {
    let mut rows = read_trajectories(path)?;
    if rows.len() != 1 {
        return Err(IoError::format(path, format!("expected exactly one state row, found {}", rows.len())));
    }
    Ok(rows.remove(0))
}

pub fn write_mean_trajectory(path: &Path, points: &[MeanPoint], start: NaiveDate) -> Result<(), IoError> {
    let rows = points.iter().map(|p| {
        let mut row = vec![p.day.to_string(), iso(day_date(start, p.day)), p.action.to_string()];
        row.extend([p.s, p.l, p.i_m, p.i_s, p.r, p.d, p.i_m_o, p.i_s_o, p.r_o, p.d_o].map(fmt_sig));
        row
    });
    write_rows(path, &MEAN_TRAJECTORY_COLUMNS, rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyRow {
    pub l: f64,
    pub u1: f64,
    pub u2: f64,
    pub theta: f64,
    pub expected_reward: f64,
    pub std_error: f64,
    pub replicates: usize,
}

pub fn write_policy(path: &Path, eval: &PolicyEvaluation) -> Result<(), IoError> {
    let t = &eval.thresholds;
    let mut row: Vec<String> = [t.l(), t.u1(), t.u2(), t.theta(), eval.mean, eval.std_error].map(fmt_sig).to_vec();
    row.push(eval.per_replicate.len().to_string());
    write_rows(path, &POLICY_COLUMNS, [row])
}

/// Thresholds of the first row, validated.
pub fn read_policy(path: &Path) -> Result<(PolicyThresholds, PolicyRow), IoError> {
    let rows: Vec<PolicyRow> = read_rows(path, &POLICY_COLUMNS)?;
    let row = rows.into_iter().next().ok_or_else(|| IoError::format(path, "no policy row"))?;
    let thr = PolicyThresholds::new(row.l, row.u1, row.u2, row.theta).map_err(|e| IoError::format(path, e.to_string()))?;
    Ok((thr, row))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandRow {
    pub day: u32,
    pub date: NaiveDate,
    pub lower: f64,
    pub mean: f64,
    pub upper: f64,
}

pub fn write_band(path: &Path, days: &[u32], band: &Band, start: NaiveDate) -> Result<(), IoError> {
    let rows = days.iter().enumerate().map(|(k, &day)| {
        vec![
            day.to_string(),
            iso(day_date(start, day)),
            fmt_sig(band.lower[k]),
            fmt_sig(band.mean[k]),
            fmt_sig(band.upper[k]),
        ]
    });
    write_rows(path, &BAND_COLUMNS, rows)
}

pub fn read_band(path: &Path) -> Result<Vec<BandRow>, IoError> {
    read_rows(path, &BAND_COLUMNS)
}

/// End-of-horizon projections for one region under the chosen policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub region: String,
    pub day: u32,
    pub date: NaiveDate,
    /// Mean hidden severe count.
    pub severe: f64,
    pub severe_observed: f64,
    /// Mean hidden cumulative deaths.
    pub deaths: f64,
    pub deaths_observed: f64,
    pub cap: u64,
    pub l: f64,
    pub u1: f64,
    pub u2: f64,
    pub theta: f64,
    pub expected_reward: f64,
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<(), IoError> {
    let rows = rows.iter().map(|s| {
        let mut row = vec![s.region.clone(), s.day.to_string(), iso(s.date)];
        row.extend([s.severe, s.severe_observed, s.deaths, s.deaths_observed].map(fmt_sig));
        row.push(s.cap.to_string());
        row.extend([s.l, s.u1, s.u2, s.theta, s.expected_reward].map(fmt_sig));
        row
    });
    write_rows(path, &SUMMARY_COLUMNS, rows)
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>, IoError> {
    read_rows(path, &SUMMARY_COLUMNS)
}
