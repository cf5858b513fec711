use super::EstimationError;

/// First 1-based day with a full centred 7-day window.
pub const FIRST_SMOOTHED_DAY: usize = 5;

/// Centred 7-day moving average of daily deaths from a cumulative series,
/// `(X[t+3] - X[t-4]) / 7` with 1-based `t`. Element `k` of the result is
/// day `k + 5`; the last defined day is `len - 3`.
pub fn smooth_daily_deaths(cumulative: &[f64]) -> Result<Vec<f64>, EstimationError> {
    if cumulative.len() < 8 {
        return Err(EstimationError::SeriesTooShort { needed: 8, found: cumulative.len() });
    }
    // 0-based: day t lives at t-1, so X[t+3] - X[t-4] is c[t+2] - c[t-5].
    Ok(cumulative.windows(8).map(|w| (w[7] - w[0]) / 7.0).collect())
}
