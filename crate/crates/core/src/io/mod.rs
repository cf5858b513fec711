//! File formats: reported case series, region configurations and the CSV
//! outputs of each pipeline stage.

mod cases;
mod outputs;
mod region;

pub use cases::{load_case_csv, write_case_csv, CASE_COLUMNS};
pub use outputs::{
    day_date, read_band, read_fit, read_initial_state, read_summary, read_policy, read_testing_probs, read_trajectories,
    trajectory_records, write_band, write_fit, write_initial_state, write_mean_trajectory, write_policy,
    write_summary, write_testing_probs, write_trajectories, BandRow, FitRow, PolicyRow, SummaryRow, TrajectoryRecord,
    BAND_COLUMNS, FIT_COLUMNS, MEAN_TRAJECTORY_COLUMNS, POLICY_COLUMNS, SUMMARY_COLUMNS, TESTING_COLUMNS,
    TRAJECTORY_COLUMNS,
};
pub use region::{load_region_config, RegionConfig, DEFAULT_HORIZON_DAYS, DEFAULT_TRAINING_DAYS};

use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::estimation::SeriesError;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: missing column `{column}`", path.display())]
    MissingColumn { path: PathBuf, column: &'static str },
    #[error("{}: row {row}, column `{column}`: cannot parse {value:?}: {message}", path.display())]
    Parse { path: PathBuf, row: usize, column: String, value: String, message: String },
    #[error("{}: row {row}, column `{column}`: negative count {value}", path.display())]
    NegativeCount { path: PathBuf, row: usize, column: &'static str, value: i64 },
    #[error("{}: {source}", path.display())]
    Series { path: PathBuf, source: SeriesError },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error("{}: invalid configuration: {message}", path.display())]
    Config { path: PathBuf, message: String },
}

impl IoError {
    /// True for failures to read or write the file itself, as opposed to
    /// malformed contents.
    pub fn is_io(&self) -> bool {
        matches!(self, IoError::Io { .. })
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io { path: path.to_path_buf(), source }
    }

    pub(crate) fn format(path: &Path, message: impl Into<String>) -> Self {
        IoError::Format { path: path.to_path_buf(), message: message.into() }
    }

    pub(crate) fn csv(path: &Path, err: csv::Error) -> Self {
        if err.is_io_error() {
            match err.into_kind() {
                csv::ErrorKind::Io(e) => IoError::io(path, e),
                _ => unreachable!("checked io kind"),
            }
        } else {
            IoError::format(path, err.to_string())
        }
    }
}

/// Renders `x` with six significant digits, in plain decimal notation for
/// moderate magnitudes and scientific notation otherwise. Trailing zeros are
/// dropped so that short decimals print as written.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}
