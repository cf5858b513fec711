//! Sensitivity bands: forecast under log-odds perturbations of the fitted
//! transition probabilities with the chosen policy held fixed.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::{ModelParams, ParamError, Transition, TransitionProbs};
use crate::policy::{simulate_policy_path, CostConfig, ForecastSetup, PolicyError, PolicyThresholds};
use crate::rng::{Purpose, RngStream};

pub const DEFAULT_OUTER: usize = 100;
pub const DEFAULT_INNER: usize = 20;
/// Standard deviation of a perturbed logit, as a fraction of its magnitude.
pub const DEFAULT_NOISE_SCALE: f64 = 1.0 / 3.0;
pub const MAX_PERTURB_ATTEMPTS: usize = 1000;
pub const LOWER_PERCENTILE: u32 = 5;
pub const UPPER_PERCENTILE: u32 = 95;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensitivityError {
    #[error("{name} = {value} has no finite log-odds")]
    DegenerateProbability { name: &'static str, value: f64 },
    #[error("no valid perturbation after {0} attempts")]
    RejectionLimit(usize),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Draws each transition probability from a normal on the log-odds scale
/// centred at its current logit with standard deviation
/// `noise_scale * |logit|`, redrawing the whole set until it is valid.
/// Coordinates with zero spread are returned unchanged.
pub fn perturb_params<R: Rng + ?Sized>(
    p_hat: &ModelParams,
    noise_scale: f64,
    rng: &mut R,
) -> Result<ModelParams, SensitivityError> {
    if !(noise_scale >= 0.0 && noise_scale.is_finite()) {
        return Err(SensitivityError::Config(format!("noise scale {noise_scale} must be finite and >= 0")));
    }
    let probs = p_hat.transitions();
    let mut centres = [0.0; 5];
    for (c, t) in centres.iter_mut().zip(Transition::ALL) {
        let p = probs.get(t);
        if !(p > 0.0 && p < 1.0) {
            return Err(SensitivityError::DegenerateProbability { name: t.name(), value: p });
        }
        *c = logit(p);
    }
    let original = probs.to_array();
    for _ in 0..MAX_PERTURB_ATTEMPTS {
        let mut draw = original;
        for (j, &l) in centres.iter().enumerate() {
            let sigma = noise_scale * l.abs();
            if sigma > 0.0 {
                let normal = Normal::new(l, sigma).expect("finite positive spread");
                draw[j] = logistic(normal.sample(rng));
            }
        }
        if let Ok(p) = p_hat.with_transitions(TransitionProbs::from_array(draw)) {
            return Ok(p);
        }
    }
    Err(SensitivityError::RejectionLimit(MAX_PERTURB_ATTEMPTS))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandConfig {
    pub outer: usize,
    pub inner: usize,
    pub noise_scale: f64,
    pub seed: u64,
}

impl BandConfig {
    pub fn new(seed: u64) -> Self {
        BandConfig { outer: DEFAULT_OUTER, inner: DEFAULT_INNER, noise_scale: DEFAULT_NOISE_SCALE, seed }
    }
}

/// Pointwise summary of one tracked series over the O per-set mean curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lower: Vec<f64>,
    pub mean: Vec<f64>,
    pub upper: Vec<f64>,
    /// `curves[o][k]`: mean over inner replicates for perturbed set `o`,
    /// day index `k`.
    pub curves: Vec<Vec<f64>>,
}

impl Band {
    fn from_curves(curves: Vec<Vec<f64>>) -> Self {
        let days = curves.first().map_or(0, Vec::len);
        let mut lower = Vec::with_capacity(days);
        let mut upper = Vec::with_capacity(days);
        let mut mean = Vec::with_capacity(days);
        for k in 0..days {
            let mut column: Vec<f64> = curves.iter().map(|c| c[k]).collect();
            let mut running = 0.0;
            for (i, &v) in column.iter().enumerate() {
                running += (v - running) / (i + 1) as f64;
            }
            mean.push(running);
            column.sort_by(f64::total_cmp);
            lower.push(nearest_rank(&column, LOWER_PERCENTILE));
            upper.push(nearest_rank(&column, UPPER_PERCENTILE));
        }
        Band { lower, mean, upper, curves }
    }
}

/// Nearest-rank percentile of an ascending, non-empty slice.
pub fn nearest_rank(sorted: &[f64], pct: u32) -> f64 {
    let n = sorted.len();
    let rank = ((pct as usize * n).div_ceil(100)).clamp(1, n);
    sorted[rank - 1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandResult {
    pub days: Vec<u32>,
    /// Documented and undocumented mild plus severe cases.
    pub infected: Band,
    pub deaths: Band,
    pub severe: Band,
}

/// Forecasts from `setup.start` under `thr` for `config.outer` perturbed
/// copies of `setup.params` and summarizes the per-copy mean curves.
///
/// Inner replicate `i` uses the same stream for every perturbed copy, so
/// with zero noise all curves coincide.
pub fn sensitivity_band(
    setup: &ForecastSetup<'_>,
    thr: &PolicyThresholds,
    cost: &CostConfig,
    config: &BandConfig,
) -> Result<BandResult, SensitivityError> {
    if config.outer < 2 || config.inner < 1 {
        return Err(SensitivityError::Config(format!(
            "need outer >= 2 and inner >= 1, got {} and {}",
            config.outer, config.inner
        )));
    }
    let per_set = (0..config.outer)
        .into_par_iter()
        .map(|o| {
            let mut rng = RngStream::for_purpose(config.seed, Purpose::Perturbation, o as u32, 0);
            let params = perturb_params(setup.params, config.noise_scale, &mut rng)?;
            let perturbed = ForecastSetup { params: &params, ..*setup };
            let mut sums: Option<[Vec<u64>; 3]> = None;
            for i in 0..config.inner {
                let mut rng = RngStream::for_purpose(config.seed, Purpose::BandInner, 0, i as u32);
                let path = simulate_policy_path(&perturbed, thr, cost, &mut rng)?;
                let acc = sums.get_or_insert_with(|| std::array::from_fn(|_| vec![0; path.points.len()]));
                for (k, p) in path.points.iter().enumerate() {
                    acc[0][k] += p.pop.i_m + p.pop.i_s;
                    acc[1][k] += p.pop.d;
                    acc[2][k] += p.pop.i_s;
                }
            }
            let sums = sums.expect("inner >= 1");
            Ok(sums.map(|s| s.into_iter().map(|v| v as f64 / config.inner as f64).collect::<Vec<f64>>()))
        })
        .collect::<Result<Vec<[Vec<f64>; 3]>, SensitivityError>>()?;

    let start = setup.start.0.day;
    let days = (start..=setup.horizon).collect();
    let mut infected = Vec::with_capacity(config.outer);
    let mut deaths = Vec::with_capacity(config.outer);
    let mut severe = Vec::with_capacity(config.outer);
    for [a, b, c] in per_set {
        infected.push(a);
        deaths.push(b);
        severe.push(c);
    }
    Ok(BandResult {
        days,
        infected: Band::from_curves(infected),
        deaths: Band::from_curves(deaths),
        severe: Band::from_curves(severe),
    })
}
