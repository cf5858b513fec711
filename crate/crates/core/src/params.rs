//! Transition probabilities and the validated parameter set of the model.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("{name} = {value} is not a probability in [0, 1]")]
    NotAProbability { name: &'static str, value: f64 },
    #[error("mild outflow p_im_is + p_im_r = {0} exceeds 1")]
    MildOutflow(f64),
    #[error("severe outflow p_is_r + death_multiplier * p_is_d1 = {0} exceeds 1")]
    SevereOutflow(f64),
    #[error("reproduction numbers must satisfy r0_base >= 0 and 0 < r1 < r2 (got r0_base={r0_base}, r1={r1}, r2={r2})")]
    Reproduction { r0_base: f64, r1: f64, r2: f64 },
    #[error("death multiplier must be >= 1, got {0}")]
    DeathMultiplier(f64),
}

/// One coordinate of the transition-probability vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transition {
    LatentToMild,
    MildToSevere,
    MildToRecovered,
    SevereToRecovered,
    SevereToDeath,
}

impl Transition {
    pub const ALL: [Transition; 5] = [
        Transition::LatentToMild,
        Transition::MildToSevere,
        Transition::MildToRecovered,
        Transition::SevereToRecovered,
        Transition::SevereToDeath,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Transition::LatentToMild => "p_l_im",
            Transition::MildToSevere => "p_im_is",
            Transition::MildToRecovered => "p_im_r",
            Transition::SevereToRecovered => "p_is_r",
            Transition::SevereToDeath => "p_is_d1",
        }
    }
}

/// Daily per-individual transition probabilities. `p_is_d1` is the
/// within-capacity death probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionProbs {
    pub p_l_im: f64,
    pub p_im_is: f64,
    pub p_im_r: f64,
    pub p_is_r: f64,
    pub p_is_d1: f64,
}

impl TransitionProbs {
    /// Starting point for calibration: 5-day mean incubation and the matching
    /// dwell-time estimates for the infected compartments.
    pub fn initial_estimate() -> Self {
        TransitionProbs {
            p_l_im: 0.2,
            p_im_is: 0.017,
            p_im_r: 0.024,
            p_is_r: 0.012,
            p_is_d1: 0.009,
        }
    }

    pub fn get(&self, t: Transition) -> f64 {
        match t {
            Transition::LatentToMild => self.p_l_im,
            Transition::MildToSevere => self.p_im_is,
            Transition::MildToRecovered => self.p_im_r,
            Transition::SevereToRecovered => self.p_is_r,
            Transition::SevereToDeath => self.p_is_d1,
        }
    }

    pub fn with(mut self, t: Transition, value: f64) -> Self {
        match t {
            Transition::LatentToMild => self.p_l_im = value,
            Transition::MildToSevere => self.p_im_is = value,
            Transition::MildToRecovered => self.p_im_r = value,
            Transition::SevereToRecovered => self.p_is_r = value,
            Transition::SevereToDeath => self.p_is_d1 = value,
        }
        self
    }

    pub fn to_array(&self) -> [f64; 5] {
        Transition::ALL.map(|t| self.get(t))
    }

    pub fn from_array(values: [f64; 5]) -> Self {
        Transition::ALL
            .iter()
            .zip(values)
            .fold(TransitionProbs::zero(), |acc, (&t, v)| acc.with(t, v))
    }

    pub fn zero() -> Self {
        TransitionProbs { p_l_im: 0.0, p_im_is: 0.0, p_im_r: 0.0, p_is_r: 0.0, p_is_d1: 0.0 }
    }

    /// Total daily exit probability from the mild compartment.
    pub fn mild_exit(&self) -> f64 {
        self.p_im_is + self.p_im_r
    }
}

/// Reproduction number under full lockdown and the increments for the
/// partial and no-lockdown levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reproduction {
    pub r0_base: f64,
    pub r1: f64,
    pub r2: f64,
}

impl Default for Reproduction {
    fn default() -> Self {
        Reproduction { r0_base: 0.8, r1: 0.5, r2: 1.0 }
    }
}

pub const DEFAULT_DEATH_MULTIPLIER: f64 = 3.0;

/// Validated model parameters. Every multinomial draw the kernels make is
/// well defined for any instance, including the over-capacity regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    transitions: TransitionProbs,
    reproduction: Reproduction,
    death_multiplier: f64,
    cap: u64,
}

impl ModelParams {
    pub fn new(
        transitions: TransitionProbs,
        reproduction: Reproduction,
        death_multiplier: f64,
        cap: u64,
    ) -> Result<Self, ParamError> {
        for t in Transition::ALL {
            let v = transitions.get(t);
            if !(0.0..=1.0).contains(&v) {
                return Err(ParamError::NotAProbability { name: t.name(), value: v });
            }
        }
        if !(death_multiplier >= 1.0) || !death_multiplier.is_finite() {
            return Err(ParamError::DeathMultiplier(death_multiplier));
        }
        let mild = transitions.mild_exit();
        if mild > 1.0 {
            return Err(ParamError::MildOutflow(mild));
        }
        let severe = transitions.p_is_r + death_multiplier * transitions.p_is_d1;
        if severe > 1.0 {
            return Err(ParamError::SevereOutflow(severe));
        }
        let Reproduction { r0_base, r1, r2 } = reproduction;
        if !(r0_base >= 0.0 && r1 > 0.0 && r2 > r1 && r2.is_finite()) {
            return Err(ParamError::Reproduction { r0_base, r1, r2 });
        }
        Ok(ModelParams { transitions, reproduction, death_multiplier, cap })
    }

    /// Initial estimates with the default reproduction numbers and multiplier.
    pub fn default_initial(cap: u64) -> Self {
        ModelParams::new(
            TransitionProbs::initial_estimate(),
            Reproduction::default(),
            DEFAULT_DEATH_MULTIPLIER,
            cap,
        )
        .expect("initial estimates are valid")
    }

    pub fn with_transitions(&self, transitions: TransitionProbs) -> Result<Self, ParamError> {
        ModelParams::new(transitions, self.reproduction, self.death_multiplier, self.cap)
    }

    pub fn transitions(&self) -> &TransitionProbs {
        &self.transitions
    }

    pub fn reproduction(&self) -> &Reproduction {
        &self.reproduction
    }

    pub fn death_multiplier(&self) -> f64 {
        self.death_multiplier
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }
}

/// The calibration starting point `P_init`.
pub fn default_initial_params() -> TransitionProbs {
    TransitionProbs::initial_estimate()
}
