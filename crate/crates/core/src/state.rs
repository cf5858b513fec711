//! Compartment counts for the hidden population process and the documented
//! (observed) process, plus the lockdown action space.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Lockdown level applied to one day's transmission dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Action {
    NoLockdown = 0,
    Partial = 1,
    Full = 2,
}

impl Action {
    pub const ALL: [Action; 3] = [Action::NoLockdown, Action::Partial, Action::Full];

    pub fn level(self) -> u8 {
        self as u8
    }

    pub fn from_level(level: u8) -> Option<Action> {
        match level {
            0 => Some(Action::NoLockdown),
            1 => Some(Action::Partial),
            2 => Some(Action::Full),
            _ => None,
        }
    }
}

impl TryFrom<u8> for Action {
    type Error = String;

    fn try_from(level: u8) -> Result<Self, Self::Error> {
        Action::from_level(level).ok_or_else(|| format!("action level must be 0, 1 or 2, got {level}"))
    }
}

impl From<Action> for u8 {
    fn from(action: Action) -> u8 {
        action.level()
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.level())
    }
}

/// End-of-day counts of the hidden process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PopulationState {
    pub day: u32,
    pub s: u64,
    pub l: u64,
    pub i_m: u64,
    pub i_s: u64,
    pub r: u64,
    pub d: u64,
}

impl PopulationState {
    pub fn total(&self) -> u64 {
        self.s + self.l + self.i_m + self.i_s + self.r + self.d
    }

    pub fn infected(&self) -> u64 {
        self.i_m + self.i_s
    }
}

/// End-of-day counts of the documented process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ObservedState {
    pub day: u32,
    pub i_m: u64,
    pub i_s: u64,
    pub r: u64,
    pub d: u64,
}

impl ObservedState {
    pub fn active(&self) -> u64 {
        self.i_m + self.i_s
    }

    /// True when every documented compartment fits inside its hidden counterpart.
    pub fn fits_within(&self, pop: &PopulationState) -> bool {
        self.i_m <= pop.i_m && self.i_s <= pop.i_s && self.r <= pop.r && self.d <= pop.d
    }
}
