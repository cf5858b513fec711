use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One day of reported data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DailyRecord {
    pub date: NaiveDate,
    pub new_cases: u64,
    pub active_cases: u64,
    pub cumulative_deaths: u64,
    pub cumulative_recoveries: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("series is empty")]
    Empty,
    #[error("row {row}: date {found} does not follow {previous}")]
    NonContiguousDate { row: usize, previous: NaiveDate, found: NaiveDate },
    #[error("row {row}: cumulative deaths decrease from {previous} to {found}")]
    DecreasingDeaths { row: usize, previous: u64, found: u64 },
}

/// Reported series for days `1..=T`. Row numbers in errors are 1-based data
/// rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RealDataSeries {
    records: Vec<DailyRecord>,
}

impl RealDataSeries {
    pub fn new(records: Vec<DailyRecord>) -> Result<Self, SeriesError> {
        if records.is_empty() {
            return Err(SeriesError::Empty);
        }
        for (i, pair) in records.windows(2).enumerate() {
            let row = i + 2;
            let (prev, cur) = (&pair[0], &pair[1]);
            if prev.date.succ_opt() != Some(cur.date) {
                return Err(SeriesError::NonContiguousDate { row, previous: prev.date, found: cur.date });
            }
            if cur.cumulative_deaths < prev.cumulative_deaths {
                return Err(SeriesError::DecreasingDeaths {
                    row,
                    previous: prev.cumulative_deaths,
                    found: cur.cumulative_deaths,
                });
            }
        }
        Ok(RealDataSeries { records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[DailyRecord] {
        &self.records
    }

    /// Record for 1-based `day`.
    pub fn day(&self, day: usize) -> &DailyRecord {
        &self.records[day - 1]
    }

    pub fn start_date(&self) -> NaiveDate {
        self.records[0].date
    }

    pub fn has_recoveries(&self) -> bool {
        self.records.iter().all(|r| r.cumulative_recoveries.is_some())
    }

    /// First `days` records, used to cut a training window from a longer file.
    pub fn truncated(&self, days: usize) -> RealDataSeries {
        RealDataSeries { records: self.records[..days.min(self.records.len())].to_vec() }
    }
}
