use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use super::PolicyError;
use crate::state::{Action, ObservedState};

/// Days a decision stays in force.
pub const DECISION_PERIOD: u32 = 14;

pub const DEFAULT_THRESHOLD_LEVELS: [f64; 6] = [1e-5, 1e-4, 5e-4, 1e-3, 5e-3, 1e-2];
pub const DEFAULT_THETAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Bang-bang policy: release at or below `l`, partial lockdown from `u1`,
/// full lockdown from `u2`, on the signal mixed by `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawThresholds")]
pub struct PolicyThresholds {
    l: f64,
    u1: f64,
    u2: f64,
    theta: f64,
}

#[derive(Deserialize)]
struct RawThresholds {
    l: f64,
    u1: f64,
    u2: f64,
    theta: f64,
}

impl TryFrom<RawThresholds> for PolicyThresholds {
    type Error = PolicyError;

    fn try_from(r: RawThresholds) -> Result<Self, Self::Error> {
        PolicyThresholds::new(r.l, r.u1, r.u2, r.theta)
    }
}

impl PolicyThresholds {
    pub fn new(l: f64, u1: f64, u2: f64, theta: f64) -> Result<Self, PolicyError> {
        if !(0.0 < l && l < u1 && u1 < u2 && u2 < 1.0) {
            return Err(PolicyError::Thresholds(format!(
                "need 0 < l < u1 < u2 < 1, got l={l}, u1={u1}, u2={u2}"
            )));
        }
        if !(0.0..=1.0).contains(&theta) {
            return Err(PolicyError::Thresholds(format!("theta = {theta} is not in [0, 1]")));
        }
        Ok(PolicyThresholds { l, u1, u2, theta })
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn u1(&self) -> f64 {
        self.u1
    }

    pub fn u2(&self) -> f64 {
        self.u2
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    fn key(&self) -> [f64; 4] {
        [self.l, self.u1, self.u2, self.theta]
    }

    /// Lexicographic order on `(l, u1, u2, theta)`.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.key()
            .iter()
            .zip(other.key().iter())
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }
}

/// Per-capita signal `(theta * i_m_o + (1 - theta) * i_s_o) / n`.
pub fn policy_signal(obs: &ObservedState, theta: f64, n: u64) -> f64 {
    debug_assert!(n > 0);
    (theta * obs.i_m as f64 + (1.0 - theta) * obs.i_s as f64) / n as f64
}

/// Action for the day `elapsed` days into the test period. Decisions are
/// taken every [`DECISION_PERIOD`] days starting at `elapsed = 0`; between
/// decisions, and when `l < w < u1`, the previous action carries over.
pub fn policy_action(elapsed: u32, w: f64, prev: Action, thr: &PolicyThresholds) -> Action {
    if !elapsed.is_multiple_of(DECISION_PERIOD) {
        prev
    } else if w >= thr.u2 {
        Action::Full
    } else if w >= thr.u1 {
        Action::Partial
    } else if w <= thr.l {
        Action::NoLockdown
    } else {
        prev
    }
}

/// The discretized policy class: an explicit list of members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyGrid {
    members: Vec<PolicyThresholds>,
}

impl PolicyGrid {
    pub fn from_members(members: Vec<PolicyThresholds>) -> Result<Self, PolicyError> {
        if members.is_empty() {
            return Err(PolicyError::EmptyGrid);
        }
        Ok(PolicyGrid { members })
    }

    /// Every ordered combination of the candidate values.
    pub fn cartesian(ls: &[f64], u1s: &[f64], u2s: &[f64], thetas: &[f64]) -> Result<Self, PolicyError> {
        let mut members = Vec::new();
        for &l in ls {
            for &u1 in u1s {
                for &u2 in u2s {
                    for &theta in thetas {
                        if let Ok(thr) = PolicyThresholds::new(l, u1, u2, theta) {
                            members.push(thr);
                        }
                    }
                }
            }
        }
        members.sort_by(|a, b| a.lex_cmp(b));
        members.dedup();
        PolicyGrid::from_members(members)
    }

    /// Same candidate levels for all three thresholds.
    pub fn from_levels(levels: &[f64], thetas: &[f64]) -> Result<Self, PolicyError> {
        PolicyGrid::cartesian(levels, levels, levels, thetas)
    }

    pub fn default_grid() -> Self {
        PolicyGrid::from_levels(&DEFAULT_THRESHOLD_LEVELS, &DEFAULT_THETAS).expect("default grid is non-empty")
    }

    pub fn members(&self) -> &[PolicyThresholds] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thr() -> PolicyThresholds {
        PolicyThresholds::new(1e-4, 1e-3, 1e-2, 0.5).unwrap()
    }

    #[test]
    fn threshold_ordering_enforced() {
        assert!(PolicyThresholds::new(0.1, 0.1, 0.2, 0.5).is_err());
        assert!(PolicyThresholds::new(0.0, 0.1, 0.2, 0.5).is_err());
        assert!(PolicyThresholds::new(0.1, 0.2, 1.0, 0.5).is_err());
        assert!(PolicyThresholds::new(0.1, 0.2, 0.3, 1.5).is_err());
        assert!(serde_json::from_str::<PolicyThresholds>(r#"{"l":0.3,"u1":0.2,"u2":0.4,"theta":0}"#).is_err());
    }

    #[test]
    fn signal_examples() {
        let obs = |i_m, i_s| ObservedState { day: 1, i_m, i_s, r: 0, d: 0 };
        assert_eq!(policy_signal(&obs(0, 40), 1.0, 1000), 0.0);
        assert_eq!(policy_signal(&obs(25, 25), 0.5, 1000), 0.025);
        let w = policy_signal(&obs(100, 50), 0.3, 1_000_000);
        assert!((w - 6.5e-5).abs() < 1e-18);
    }

    #[test]
    fn action_rule_examples() {
        let t = thr();
        assert_eq!(policy_action(14, 0.02, Action::NoLockdown, &t), Action::Full);
        assert_eq!(policy_action(13, 0.02, Action::Partial, &t), Action::Partial);
        assert_eq!(policy_action(28, 5e-4, Action::NoLockdown, &t), Action::NoLockdown);
        assert_eq!(policy_action(0, 1e-3, Action::Full, &t), Action::Partial);
        assert_eq!(policy_action(0, 1e-4, Action::Full, &t), Action::NoLockdown);
    }

    #[test]
    fn action_rule_all_branches() {
        let t = thr();
        let signals = [0.0, 1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 0.5];
        for elapsed in 0..(3 * DECISION_PERIOD) {
            for &w in &signals {
                for prev in Action::ALL {
                    let got = policy_action(elapsed, w, prev, &t);
                    let expected = if !elapsed.is_multiple_of(DECISION_PERIOD) {
                        prev
                    } else if w >= t.u2() {
                        Action::Full
                    } else if w >= t.u1() {
                        Action::Partial
                    } else if w <= t.l() {
                        Action::NoLockdown
                    } else {
                        prev
                    };
                    assert_eq!(got, expected, "elapsed={elapsed} w={w} prev={prev}");
                }
            }
        }
    }

    #[test]
    fn default_grid_members() {
        let g = PolicyGrid::default_grid();
        // C(6, 3) ordered triples times five mixing weights.
        assert_eq!(g.len(), 20 * 5);
        assert!(g.members().windows(2).all(|w| w[0].lex_cmp(&w[1]).is_lt()));
    }

    #[test]
    fn empty_grid_rejected() {
        assert!(matches!(PolicyGrid::from_members(vec![]), Err(PolicyError::EmptyGrid)));
        assert!(PolicyGrid::cartesian(&[0.5], &[0.1], &[0.2], &[0.0]).is_err());
    }
}
