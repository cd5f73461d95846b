//! Sweeps the reference duty cycle and prints the table.
//!
//! cargo run --release --example dc_sweep -- scenarios/upleg_ci.json

use lowthrust_mpc::analysis::{dcprime_sweep, write_sweep_csv, ScenarioFile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "scenarios/upleg_ci.json".into());
    let sc = ScenarioFile::load(path.as_ref())?;
    let rows = dcprime_sweep(&sc, &[0.3, 0.35, 0.4, 0.45, 0.5])?;
    write_sweep_csv(&rows, std::io::stdout())?;
    Ok(())
}
