use serde::{Deserialize, Serialize};

/// Daily testing probabilities for the undocumented mild and severe pools.
/// Entry `k` applies to the transition into day `first_day + k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestingSchedule {
    first_day: u32,
    mild: Vec<f64>,
    severe: Vec<f64>,
}

impl TestingSchedule {
    /// Panics if the two series differ in length or a value leaves `[0, 1]`.
    pub fn new(first_day: u32, mild: Vec<f64>, severe: Vec<f64>) -> Self {
        assert_eq!(mild.len(), severe.len(), "mild and severe series differ in length");
        assert!(
            mild.iter().chain(&severe).all(|p| (0.0..=1.0).contains(p)),
            "testing probabilities must lie in [0, 1]"
        );
        TestingSchedule { first_day, mild, severe }
    }

    /// Same probabilities for every day in `first_day..=last_day`.
    pub fn constant(first_day: u32, last_day: u32, mild: f64, severe: f64) -> Self {
        let n = (last_day + 1).saturating_sub(first_day) as usize;
        TestingSchedule::new(first_day, vec![mild; n], vec![severe; n])
    }

    pub fn first_day(&self) -> u32 {
        self.first_day
    }

    /// Last covered day, or `first_day - 1` when empty.
    pub fn last_day(&self) -> u32 {
        self.first_day + self.mild.len() as u32 - 1
    }

    pub fn len(&self) -> usize {
        self.mild.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mild.is_empty()
    }

    pub fn mild(&self) -> &[f64] {
        &self.mild
    }

    pub fn severe(&self) -> &[f64] {
        &self.severe
    }

    /// `(mild, severe)` for the transition into `day`.
    pub fn get(&self, day: u32) -> Option<(f64, f64)> {
        let k = day.checked_sub(self.first_day)? as usize;
        Some((*self.mild.get(k)?, *self.severe.get(k)?))
    }

    pub fn days(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.mild.len() as u32).map(move |k| self.first_day + k)
    }
}
