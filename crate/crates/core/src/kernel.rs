//! One-day stochastic transition kernels.
//!
//! Counts are end-of-day totals. The action decided at the end of day `t`
//! governs the transition from day `t` to day `t + 1`, and the
//! capacity-dependent death probability of that transition is fixed by the
//! hidden severe count at the end of day `t`.

use rand::Rng;
use thiserror::Error;

use crate::params::ModelParams;
use crate::rng::{binomial, multinomial2};
use crate::state::{Action, ObservedState, PopulationState};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("day {day}: observed {compartment} = {observed} exceeds population {compartment} = {population}")]
pub struct CouplingError {
    pub day: u32,
    pub compartment: &'static str,
    pub population: u64,
    pub observed: u64,
}

pub fn effective_r0(params: &ModelParams, action: Action) -> f64 {
    let r = params.reproduction();
    match action {
        Action::Full => r.r0_base,
        Action::Partial => r.r0_base + r.r1,
        Action::NoLockdown => r.r0_base + r.r2,
    }
}

/// Daily infection probability of a susceptible:
/// `1 - exp(-R(a) * (p_im_is + p_im_r) * i_m / n)`.
pub fn s_to_l_prob(params: &ModelParams, action: Action, i_m: u64, n: u64) -> f64 {
    debug_assert!(n > 0 && i_m <= n);
    let rate = effective_r0(params, action) * params.transitions().mild_exit() * (i_m as f64 / n as f64);
    -(-rate).exp_m1()
}

/// Severe-to-death probability for the next day given today's hidden severe
/// count. Capacity is inclusive.
pub fn is_to_d_prob(params: &ModelParams, prev_i_s: u64) -> f64 {
    let p = params.transitions().p_is_d1;
    if prev_i_s <= params.cap() {
        p
    } else {
        params.death_multiplier() * p
    }
}

/// The six daily flows of the hidden process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PopulationFlows {
    pub s_to_l: u64,
    pub l_to_im: u64,
    pub im_to_is: u64,
    pub im_to_r: u64,
    pub is_to_r: u64,
    pub is_to_d: u64,
}

impl PopulationFlows {
    pub fn apply(&self, x: &PopulationState) -> PopulationState {
        PopulationState {
            day: x.day + 1,
            s: x.s - self.s_to_l,
            l: x.l + self.s_to_l - self.l_to_im,
            i_m: x.i_m + self.l_to_im - self.im_to_is - self.im_to_r,
            i_s: x.i_s + self.im_to_is - self.is_to_r - self.is_to_d,
            r: x.r + self.im_to_r + self.is_to_r,
            d: x.d + self.is_to_d,
        }
    }
}

pub fn draw_population_flows<R: Rng + ?Sized>(
    x: &PopulationState,
    params: &ModelParams,
    action: Action,
    rng: &mut R,
) -> PopulationFlows {
    let p = params.transitions();
    let n = x.total();
    let p_sl = if n == 0 { 0.0 } else { s_to_l_prob(params, action, x.i_m, n) };
    let p_death = is_to_d_prob(params, x.i_s);

    let s_to_l = binomial(rng, x.s, p_sl);
    let l_to_im = binomial(rng, x.l, p.p_l_im);
    let (im_to_is, im_to_r) = multinomial2(rng, x.i_m, p.p_im_is, p.p_im_r);
    let (is_to_r, is_to_d) = multinomial2(rng, x.i_s, p.p_is_r, p_death);
    PopulationFlows { s_to_l, l_to_im, im_to_is, im_to_r, is_to_r, is_to_d }
}

/// Advances the hidden process by one day.
pub fn step_population<R: Rng + ?Sized>(
    x: &PopulationState,
    params: &ModelParams,
    action: Action,
    rng: &mut R,
) -> PopulationState {
    draw_population_flows(x, params, action, rng).apply(x)
}

/// Daily flows of the documented process: internal transitions of already
/// documented cases plus the testing imports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ObservedFlows {
    pub im_to_is: u64,
    pub im_to_r: u64,
    pub is_to_r: u64,
    pub is_to_d: u64,
    pub new_mild: u64,
    pub new_severe: u64,
}

impl ObservedFlows {
    pub fn apply(&self, o: &ObservedState) -> ObservedState {
        ObservedState {
            day: o.day + 1,
            i_m: o.i_m - self.im_to_is - self.im_to_r + self.new_mild,
            i_s: o.i_s + self.im_to_is - self.is_to_r - self.is_to_d + self.new_severe,
            r: o.r + self.im_to_r + self.is_to_r,
            d: o.d + self.is_to_d,
        }
    }
}

fn unobserved_pools(pop: &PopulationState, obs: &ObservedState) -> Result<(u64, u64), CouplingError> {
    let check = |compartment, population: u64, observed: u64| {
        population.checked_sub(observed).ok_or(CouplingError {
            day: pop.day,
            compartment,
            population,
            observed,
        })
    };
    Ok((check("i_m", pop.i_m, obs.i_m)?, check("i_s", pop.i_s, obs.i_s)?))
}

fn draw_internal<R: Rng + ?Sized>(
    obs: &ObservedState,
    params: &ModelParams,
    p_death: f64,
    rng: &mut R,
) -> ObservedFlows {
    let p = params.transitions();
    let (im_to_is, im_to_r) = multinomial2(rng, obs.i_m, p.p_im_is, p.p_im_r);
    let (is_to_r, is_to_d) = multinomial2(rng, obs.i_s, p.p_is_r, p_death);
    ObservedFlows { im_to_is, im_to_r, is_to_r, is_to_d, new_mild: 0, new_severe: 0 }
}

/// Advances the documented process by one day given the hidden state at the
/// end of the previous day. New documented cases are binomial draws from the
/// undocumented pools `pop_prev - obs`.
pub fn step_observed<R: Rng + ?Sized>(
    pop_prev: &PopulationState,
    obs: &ObservedState,
    params: &ModelParams,
    test_mild: f64,
    test_severe: f64,
    rng: &mut R,
) -> Result<ObservedState, CouplingError> {
    let (pool_m, pool_s) = unobserved_pools(pop_prev, obs)?;
    let mut flows = draw_internal(obs, params, is_to_d_prob(params, pop_prev.i_s), rng);
    flows.new_mild = binomial(rng, pool_m, test_mild);
    flows.new_severe = binomial(rng, pool_s, test_severe);
    Ok(flows.apply(obs))
}

/// Advances the documented process with the imports replaced by reported
/// case counts. Internal transitions are drawn from the documented
/// compartments; `prev_pop_severe` selects the capacity regime.
pub fn step_observed_anchored<R: Rng + ?Sized>(
    obs: &ObservedState,
    params: &ModelParams,
    prev_pop_severe: u64,
    new_mild: u64,
    new_severe: u64,
    rng: &mut R,
) -> ObservedState {
    let mut flows = draw_internal(obs, params, is_to_d_prob(params, prev_pop_severe), rng);
    flows.new_mild = new_mild;
    flows.new_severe = new_severe;
    flows.apply(obs)
}

/// Advances the hidden and documented processes together so that every
/// documented compartment stays inside its hidden counterpart.
///
/// The documented side has exactly the distribution of [`step_observed`].
/// Hidden flows out of the infected compartments are the documented flows
/// plus flows drawn from the undocumented individuals not tested that day;
/// an individual documented today makes no transition until tomorrow.
pub fn step_pair<R: Rng + ?Sized>(
    pop: &PopulationState,
    obs: &ObservedState,
    params: &ModelParams,
    action: Action,
    test_mild: f64,
    test_severe: f64,
    rng: &mut R,
) -> Result<(PopulationState, ObservedState), CouplingError> {
    step_pair_with_flows(pop, obs, params, action, test_mild, test_severe, rng)
        .map(|(x, o, _)| (x, o))
}

/// [`step_pair`] that also reports the documented flows, whose
/// `new_mild + new_severe` is the day's count of newly reported cases.
pub fn step_pair_with_flows<R: Rng + ?Sized>(
    pop: &PopulationState,
    obs: &ObservedState,
    params: &ModelParams,
    action: Action,
    test_mild: f64,
    test_severe: f64,
    rng: &mut R,
) -> Result<(PopulationState, ObservedState, ObservedFlows), CouplingError> {
    let (pool_m, pool_s) = unobserved_pools(pop, obs)?;
    if obs.r > pop.r || obs.d > pop.d {
        let (compartment, population, observed) =
            if obs.r > pop.r { ("r", pop.r, obs.r) } else { ("d", pop.d, obs.d) };
        return Err(CouplingError { day: pop.day, compartment, population, observed });
    }
    let p = params.transitions();
    let p_death = is_to_d_prob(params, pop.i_s);

    let mut documented = draw_internal(obs, params, p_death, rng);
    documented.new_mild = binomial(rng, pool_m, test_mild);
    documented.new_severe = binomial(rng, pool_s, test_severe);

    let n = pop.total();
    let p_sl = if n == 0 { 0.0 } else { s_to_l_prob(params, action, pop.i_m, n) };
    let s_to_l = binomial(rng, pop.s, p_sl);
    let l_to_im = binomial(rng, pop.l, p.p_l_im);
    let (u_is, u_r) = multinomial2(rng, pool_m - documented.new_mild, p.p_im_is, p.p_im_r);
    let (v_r, v_d) = multinomial2(rng, pool_s - documented.new_severe, p.p_is_r, p_death);

    let hidden = PopulationFlows {
        s_to_l,
        l_to_im,
        im_to_is: documented.im_to_is + u_is,
        im_to_r: documented.im_to_r + u_r,
        is_to_r: documented.is_to_r + v_r,
        is_to_d: documented.is_to_d + v_d,
    };
    Ok((hidden.apply(pop), documented.apply(obs), documented))
}
