//! Writes a model-generated 40-day case series shaped like the MI fixture.
//!
//! Usage: cargo run -p epipolicy --example synthetic_cases -- <region.json> <out.csv> [seed]

use std::path::PathBuf;

use epipolicy::estimation::{initialize_states, simulate_case_series, InitializationSpec, TestingSchedule};
use epipolicy::io::{load_region_config, write_case_csv};
use epipolicy::{Purpose, RngStream, TransitionProbs};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let config_path: PathBuf = args.next().ok_or("missing region config path")?.into();
    let out: PathBuf = args.next().ok_or("missing output path")?.into();
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2020);

    let config = load_region_config(&config_path)?;
    let params = config.model_params(TransitionProbs::initial_estimate())?;
    let init = InitializationSpec {
        p_severe: config.p_severe,
        inflation: config.inflation,
        latent_fraction: config.latent_fraction,
        active: 600,
        deaths: 40,
        recoveries: 300,
    };
    let start = initialize_states(&init, config.population)?;
    let schedule = TestingSchedule::constant(2, config.training_days, 0.004, 0.03);
    let mut rng = RngStream::for_purpose(seed, Purpose::Synthetic, 0, 0);
    let series = simulate_case_series(
        &params,
        start,
        &schedule,
        config.training_action,
        config.training_days,
        config.start_date,
        &mut rng,
    )?;
    write_case_csv(&out, &series)?;
    Ok(())
}
