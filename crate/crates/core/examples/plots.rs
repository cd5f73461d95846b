//! Runs a scenario and writes the log, trajectory table and SVG figures.
//!
//! cargo run --release --example plots -- scenarios/downleg_short.json out/plots

use lowthrust_mpc::analysis::{run_scenario, PlotOutcome, ScenarioFile};
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let scenario = args
        .next()
        .unwrap_or_else(|| "scenarios/downleg_short.json".into());
    let out: PathBuf = args.next().unwrap_or_else(|| "out/plots".into()).into();
    let sc = ScenarioFile::load(scenario.as_ref())?;
    let run = run_scenario(&sc, &out)?;
    println!("log        {}", run.log_json.display());
    println!("trajectory {}", run.trajectory_csv.display());
    match run.plots {
        PlotOutcome::Written(files) => {
            for f in files {
                println!("figure     {}", f.display());
            }
        }
        PlotOutcome::Skipped(why) => println!("no figures: {why}"),
    }
    Ok(())
}
