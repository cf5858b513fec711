//! Command-line pipeline: `fit`, `optimize`, `band` and the end-to-end
//! `analyze`. Every command writes its outputs plus a `manifest.json` into
//! `--out`, and its outputs depend only on the inputs, seed and overrides.

pub mod settings;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use epipolicy::estimation::{fit, FitConfig, ParamGrid, SeedSet, TestingSchedule, Training};
use epipolicy::io::{
    day_date, load_case_csv, load_region_config, read_fit, read_initial_state, read_policy, read_testing_probs,
    trajectory_records, write_band, write_fit, write_initial_state, write_mean_trajectory, write_policy,
    write_summary, write_testing_probs, write_trajectories, IoError, RegionConfig, SummaryRow, TrajectoryRecord,
};
use epipolicy::policy::{
    extrapolate_testing_probs, mean_trajectory, optimize_policy, simulate_policy_path, ForecastSetup, MeanPoint,
    PolicyEvaluation, PolicyGrid,
};
use epipolicy::sensitivity::{sensitivity_band, BandConfig};
use epipolicy::{step_pair, ModelParams, ObservedState, PopulationState, Purpose, RngStream, TransitionProbs};

pub use settings::{apply_overrides, Settings};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const FIT_FILE: &str = "fit.csv";
pub const TESTING_FILE: &str = "testing_probs.csv";
pub const INITIAL_STATE_FILE: &str = "initial_state.csv";
pub const POLICY_FILE: &str = "policy.csv";
pub const TRAJECTORIES_FILE: &str = "trajectories.csv";
pub const MEAN_TRAJECTORY_FILE: &str = "mean_trajectory.csv";
pub const BAND_FILES: [&str; 3] = ["band_infected.csv", "band_deaths.csv", "band_severe.csv"];
pub const SUMMARY_FILE: &str = "summary.csv";
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

macro_rules! validation_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Validation(e.to_string())
            }
        }
    )*};
}

validation_from!(
    epipolicy::estimation::EstimationError,
    epipolicy::policy::PolicyError,
    epipolicy::sensitivity::SensitivityError,
    epipolicy::ParamError,
    epipolicy::CouplingError
);

#[derive(Debug, Parser)]
#[command(name = "epipolicy", version, about = "Epidemic calibration, lockdown policy optimization and sensitivity bands")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Calibrate transition and testing probabilities to a case series.
    Fit(FitArgs),
    /// Pick the best threshold policy for the test period.
    Optimize(OptimizeArgs),
    /// Sensitivity bands under the chosen policy.
    Band(BandArgs),
    /// fit, optimize and band in one output directory, plus a summary.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Region config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Override a setting or config field, `key=value`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Daily case series (CSV).
    #[arg(long)]
    pub data: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Output directory of a previous `fit`.
    #[arg(long)]
    pub fit: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct BandArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Output directory of a previous `fit`.
    #[arg(long)]
    pub fit: PathBuf,
    /// Policy file from `optimize`; defaults to `policy.csv` in the fit directory.
    #[arg(long)]
    pub policy: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub data: PathBuf,
}

/// Record of how an output directory was produced.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: String,
    pub data: Option<String>,
    pub fit: Option<String>,
    pub policy: Option<String>,
    pub seed: u64,
    pub overrides: Vec<String>,
    pub settings: Settings,
    pub region: RegionConfig,
    pub output: String,
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn write_manifest(out: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    let path = out.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn prepare_out(out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))
}

fn load_config(common: &CommonArgs) -> Result<(RegionConfig, Settings), CliError> {
    let config = load_region_config(&common.config)?;
    apply_overrides(&config, &common.set)
}

fn manifest(command: &str, common: &CommonArgs, config: &RegionConfig, settings: &Settings) -> RunManifest {
    RunManifest {
        command: command.to_string(),
        config: display(&common.config),
        data: None,
        fit: None,
        policy: None,
        seed: common.seed,
        overrides: common.set.clone(),
        settings: settings.clone(),
        region: config.clone(),
        output: display(&common.out),
    }
}

/// Calibrated model read back from a fit directory.
pub struct FittedModel {
    pub params: ModelParams,
    pub schedule: TestingSchedule,
    pub start: (PopulationState, ObservedState),
}

pub fn load_fit_dir(dir: &Path, config: &RegionConfig) -> Result<FittedModel, CliError> {
    let fit_path = dir.join(FIT_FILE);
    let rows = read_fit(&fit_path)?;
    let selected = rows
        .iter()
        .find(|r| r.selected)
        .ok_or_else(|| CliError::Validation(format!("{}: no selected iteration", fit_path.display())))?;
    let params = config.model_params(selected.transitions())?;
    let schedule = read_testing_probs(&dir.join(TESTING_FILE))?;
    let start = read_initial_state(&dir.join(INITIAL_STATE_FILE))?.states();
    if start.0.day != 1 {
        return Err(CliError::Validation(format!("initial state is for day {}, expected day 1", start.0.day)));
    }
    if start.0.total() != config.population {
        return Err(CliError::Validation(format!(
            "initial state holds {} people but the config population is {}",
            start.0.total(),
            config.population
        )));
    }
    if schedule.first_day() != 2 || schedule.last_day() != config.training_days {
        return Err(CliError::Validation(format!(
            "testing schedule covers days {}..={}, expected 2..={}",
            schedule.first_day(),
            schedule.last_day(),
            config.training_days
        )));
    }
    Ok(FittedModel { params, schedule, start })
}

pub fn cmd_fit(args: &FitArgs) -> Result<(), CliError> {
    let (config, settings) = load_config(&args.common)?;
    let full = load_case_csv(&args.data)?;
    let days = config.training_days as usize;
    if full.len() < days {
        return Err(CliError::Validation(format!(
            "{}: {} rows but training_days is {days}",
            args.data.display(),
            full.len()
        )));
    }
    if full.start_date() != config.start_date {
        return Err(CliError::Validation(format!(
            "{}: series starts {} but the config start_date is {}",
            args.data.display(),
            full.start_date(),
            config.start_date
        )));
    }
    let data = full.truncated(days);
    let training = Training {
        data: &data,
        init: config.initialization(&data),
        population: config.population,
        action: config.training_action,
    };
    let initial = TransitionProbs::initial_estimate();
    let base = config.model_params(initial)?;
    let grid = ParamGrid::multiplicative(&initial, &settings.param_factors, settings.grid_mode)?;
    let fit_config = FitConfig { k_iters: settings.k_iters, n_runs: settings.n_runs, seed: args.common.seed };
    let result = fit(&base, &training, &grid, &fit_config)?;
    let (pop, obs) = training.initial_states()?;

    let out = &args.common.out;
    prepare_out(out)?;
    write_fit(&out.join(FIT_FILE), &result)?;
    write_testing_probs(&out.join(TESTING_FILE), &result.schedule, config.start_date)?;
    let record = TrajectoryRecord::new(0, config.start_date, config.training_action, &pop, &obs);
    write_initial_state(&out.join(INITIAL_STATE_FILE), &record)?;
    let mut m = manifest("fit", &args.common, &config, &settings);
    m.data = Some(display(&args.data));
    write_manifest(out, &m)
}

/// Result of `optimize` kept in memory for `analyze`.
pub struct OptimizeOutcome {
    pub best: PolicyEvaluation,
    pub mean: Vec<MeanPoint>,
}

pub fn cmd_optimize(args: &OptimizeArgs) -> Result<OptimizeOutcome, CliError> {
    let (config, settings) = load_config(&args.common)?;
    let model = load_fit_dir(&args.fit, &config)?;
    let schedule = extrapolate_testing_probs(&model.schedule, config.horizon_days);
    let setup = ForecastSetup {
        params: &model.params,
        schedule: &schedule,
        start: model.start,
        training_end: config.training_days,
        horizon: config.horizon_days,
        training_action: config.training_action,
    };
    let cost = config.cost_config()?;
    let grid = PolicyGrid::from_levels(&settings.policy_levels, &settings.policy_thetas)?;
    let seeds = SeedSet::new(args.common.seed, settings.replicates);
    let optimized = optimize_policy(&grid, &setup, &cost, &seeds)?;
    let best = optimized.best;
    let paths = (0..seeds.runs)
        .map(|j| {
            let mut rng = seeds.stream(Purpose::Policy, j);
            simulate_policy_path(&setup, &best.thresholds, &cost, &mut rng)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mean = mean_trajectory(&paths);

    let out = &args.common.out;
    prepare_out(out)?;
    write_policy(&out.join(POLICY_FILE), &best)?;
    write_trajectories(&out.join(TRAJECTORIES_FILE), &trajectory_records(&paths, config.start_date))?;
    write_mean_trajectory(&out.join(MEAN_TRAJECTORY_FILE), &mean, config.start_date)?;
    let mut m = manifest("optimize", &args.common, &config, &settings);
    m.fit = Some(display(&args.fit));
    write_manifest(out, &m)?;
    Ok(OptimizeOutcome { best, mean })
}

/// Simulated end-of-training states under the fitted model.
pub fn end_of_training(
    model: &FittedModel,
    config: &RegionConfig,
    seed: u64,
) -> Result<(PopulationState, ObservedState), CliError> {
    let mut rng = RngStream::for_purpose(seed, Purpose::EndOfTraining, 0, 0);
    let (mut pop, mut obs) = model.start;
    for t in 2..=config.training_days {
        let (mild, severe) = model.schedule.get(t).expect("schedule covers training");
        (pop, obs) = step_pair(&pop, &obs, &model.params, config.training_action, mild, severe, &mut rng)?;
    }
    Ok((pop, obs))
}

pub fn cmd_band(args: &BandArgs) -> Result<(), CliError> {
    let (config, settings) = load_config(&args.common)?;
    let model = load_fit_dir(&args.fit, &config)?;
    let policy_path = args.policy.clone().unwrap_or_else(|| args.fit.join(POLICY_FILE));
    let (thr, _) = read_policy(&policy_path)?;
    let schedule = extrapolate_testing_probs(&model.schedule, config.horizon_days);
    let start = end_of_training(&model, &config, args.common.seed)?;
    let setup = ForecastSetup {
        params: &model.params,
        schedule: &schedule,
        start,
        training_end: config.training_days,
        horizon: config.horizon_days,
        training_action: config.training_action,
    };
    let band_config = BandConfig {
        outer: settings.outer,
        inner: settings.inner,
        noise_scale: settings.noise_scale,
        seed: args.common.seed,
    };
    let band = sensitivity_band(&setup, &thr, &config.cost_config()?, &band_config)?;

    let out = &args.common.out;
    prepare_out(out)?;
    for (file, series) in BAND_FILES.iter().zip([&band.infected, &band.deaths, &band.severe]) {
        write_band(&out.join(file), &band.days, series, config.start_date)?;
    }
    let mut m = manifest("band", &args.common, &config, &settings);
    m.fit = Some(display(&args.fit));
    m.policy = Some(display(&policy_path));
    write_manifest(out, &m)
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<SummaryRow, CliError> {
    let common = &args.common;
    cmd_fit(&FitArgs { common: common.clone(), data: args.data.clone() })?;
    let outcome = cmd_optimize(&OptimizeArgs { common: common.clone(), fit: common.out.clone() })?;
    cmd_band(&BandArgs { common: common.clone(), fit: common.out.clone(), policy: None })?;

    let (config, settings) = load_config(common)?;
    let last = outcome.mean.last().expect("non-empty mean trajectory");
    let thr = &outcome.best.thresholds;
    let summary = SummaryRow {
        region: config.name.clone(),
        day: last.day,
        date: day_date(config.start_date, last.day),
        severe: last.i_s,
        severe_observed: last.i_s_o,
        deaths: last.d,
        deaths_observed: last.d_o,
        cap: config.cap,
        l: thr.l(),
        u1: thr.u1(),
        u2: thr.u2(),
        theta: thr.theta(),
        expected_reward: outcome.best.mean,
    };
    write_summary(&common.out.join(SUMMARY_FILE), std::slice::from_ref(&summary))?;
    let mut m = manifest("analyze", common, &config, &settings);
    m.data = Some(display(&args.data));
    m.fit = Some(display(&common.out));
    m.policy = Some(display(&common.out.join(POLICY_FILE)));
    write_manifest(&common.out, &m)?;
    Ok(summary)
}

pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Optimize(a) => cmd_optimize(a).map(|_| ()),
        Command::Band(a) => cmd_band(a),
        Command::Analyze(a) => cmd_analyze(a).map(|_| ()),
    }
}

/// Parses `args` (including the program name) and runs the command;
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
