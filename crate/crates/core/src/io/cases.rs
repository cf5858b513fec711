use chrono::NaiveDate;
use std::path::Path;

use super::IoError;
use crate::estimation::{DailyRecord, RealDataSeries};

pub const CASE_COLUMNS: [&str; 5] = ["date", "new_cases", "active_cases", "cumulative_deaths", "cumulative_recoveries"];

fn column(headers: &csv::StringRecord, path: &Path, name: &'static str) -> Result<usize, IoError> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| IoError::MissingColumn { path: path.to_path_buf(), column: name })
}

fn count(path: &Path, row: usize, column: &'static str, raw: &str) -> Result<u64, IoError> {
    let raw = raw.trim();
    let value: i64 = raw.parse().map_err(|e: std::num::ParseIntError| IoError::Parse {
        path: path.to_path_buf(),
        row,
        column: column.to_string(),
        value: raw.to_string(),
        message: e.to_string(),
    })?;
    if value < 0 {
        return Err(IoError::NegativeCount { path: path.to_path_buf(), row, column, value });
    }
    Ok(value as u64)
}

/// Reads a daily case series. Columns are located by name; the recoveries
/// column may be absent or left blank. Row numbers in errors count data rows
/// from 1.
pub fn load_case_csv(path: &Path) -> Result<RealDataSeries, IoError> {
    let file = std::fs::File::open(path).map_err(|e| IoError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers = reader.headers().map_err(|e| IoError::csv(path, e))?.clone();
    let date_col = column(&headers, path, "date")?;
    let new_col = column(&headers, path, "new_cases")?;
    let active_col = column(&headers, path, "active_cases")?;
    let deaths_col = column(&headers, path, "cumulative_deaths")?;
    let rec_col = column(&headers, path, "cumulative_recoveries").ok();

    let mut records = Vec::new();
    for (i, result) in reader.records().enumerate() {
        let row = i + 1;
        let rec = result.map_err(|e| IoError::csv(path, e))?;
        let field = |idx: usize| rec.get(idx).unwrap_or("");
        let raw_date = field(date_col);
        let date = NaiveDate::parse_from_str(raw_date, "%Y-%m-%d").map_err(|e| IoError::Parse {
            path: path.to_path_buf(),
            row,
            column: "date".into(),
            value: raw_date.to_string(),
            message: e.to_string(),
        })?;
        let recoveries = match rec_col.map(field) {
            None | Some("") => None,
            Some(raw) => Some(count(path, row, "cumulative_recoveries", raw)?),
        };
        records.push(DailyRecord {
            date,
            new_cases: count(path, row, "new_cases", field(new_col))?,
            active_cases: count(path, row, "active_cases", field(active_col))?,
            cumulative_deaths: count(path, row, "cumulative_deaths", field(deaths_col))?,
            cumulative_recoveries: recoveries,
        });
    }
    RealDataSeries::new(records).map_err(|source| IoError::Series { path: path.to_path_buf(), source })
}

pub fn write_case_csv(path: &Path, series: &RealDataSeries) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| IoError::csv(path, e))?;
    w.write_record(CASE_COLUMNS).map_err(|e| IoError::csv(path, e))?;
    for r in series.records() {
        w.write_record([
            r.date.format("%Y-%m-%d").to_string(),
            r.new_cases.to_string(),
            r.active_cases.to_string(),
            r.cumulative_deaths.to_string(),
            r.cumulative_recoveries.map(|v| v.to_string()).unwrap_or_default(),
        ])
        .map_err(|e| IoError::csv(path, e))?;
    }
    w.flush().map_err(|e| IoError::io(path, e))
}
