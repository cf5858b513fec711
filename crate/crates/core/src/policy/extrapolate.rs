use crate::estimation::TestingSchedule;

/// |t| above which an OLS slope counts as a monotone trend.
pub const TREND_T_STAT: f64 = 2.0;

/// Level to carry forward for one series: the last value if the least-squares
/// slope is significant, the mean otherwise.
pub fn carry_forward_level(values: &[f64]) -> f64 {
    let n = values.len();
    assert!(n > 0, "cannot extrapolate an empty series");
    let last = values[n - 1];
    if values.iter().all(|&v| v == last) {
        return last;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 3 {
        return mean;
    }
    let x_mean = (n - 1) as f64 / 2.0;
    let sxx: f64 = (0..n).map(|i| (i as f64 - x_mean).powi(2)).sum();
    let sxy: f64 = values.iter().enumerate().map(|(i, &y)| (i as f64 - x_mean) * (y - mean)).sum();
    let slope = sxy / sxx;
    let sse: f64 = values
        .iter()
        .enumerate()
        .map(|(i, &y)| (y - mean - slope * (i as f64 - x_mean)).powi(2))
        .sum();
    let se = (sse / (n - 2) as f64 / sxx).sqrt();
    let trending = if se > 0.0 { (slope / se).abs() > TREND_T_STAT } else { slope != 0.0 };
    if trending {
        last
    } else {
        mean
    }
}

/// Extends a fitted schedule through `horizon` with a constant level per
/// series (see [`carry_forward_level`]), clamped to `[0, 1]`.
pub fn extrapolate_testing_probs(schedule: &TestingSchedule, horizon: u32) -> TestingSchedule {
    let extend = |values: &[f64]| {
        let level = carry_forward_level(values).clamp(0.0, 1.0);
        let mut out = values.to_vec();
        let extra = horizon.saturating_sub(schedule.last_day()) as usize;
        out.extend(std::iter::repeat_n(level, extra));
        out
    };
    TestingSchedule::new(schedule.first_day(), extend(schedule.mild()), extend(schedule.severe()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_carries_forward() {
        let s = TestingSchedule::new(2, vec![0.013; 39], vec![0.2; 39]);
        let e = extrapolate_testing_probs(&s, 90);
        assert_eq!(e.last_day(), 90);
        for day in 41..=90 {
            assert_eq!(e.get(day), Some((0.013, 0.2)));
        }
        assert_eq!(e.get(10), s.get(10));
    }

    #[test]
    fn trending_series_uses_last_value() {
        let up: Vec<f64> = (0..39).map(|k| 0.01 + 0.001 * k as f64).collect();
        assert_eq!(carry_forward_level(&up), *up.last().unwrap());
        let noisy_up: Vec<f64> = (0..39).map(|k| 0.01 + 0.001 * k as f64 + if k % 2 == 0 { 2e-4 } else { -2e-4 }).collect();
        assert_eq!(carry_forward_level(&noisy_up), *noisy_up.last().unwrap());
    }

    #[test]
    fn trendless_series_uses_mean() {
        // Alternating noise around 0.05 with no drift.
        let flat: Vec<f64> = (0..40).map(|k| 0.05 + if k % 2 == 0 { 0.01 } else { -0.01 }).collect();
        let mean = flat.iter().sum::<f64>() / 40.0;
        assert_eq!(carry_forward_level(&flat), mean);
    }

    #[test]
    fn short_series() {
        assert_eq!(carry_forward_level(&[0.3]), 0.3);
        assert_eq!(carry_forward_level(&[0.2, 0.4]), (0.2 + 0.4) / 2.0);
    }
}
