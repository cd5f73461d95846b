//! Runs a scenario file and prints the terminal summary.
//!
//! cargo run --example run_scenario -- scenarios/upleg_ci.json

use lowthrust_mpc::analysis::ScenarioFile;
use lowthrust_mpc::guidance::{initial_reference, run_guidance_with};
use std::time::Instant;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "scenarios/upleg_ci.json".into());
    let scenario = ScenarioFile::load(path.as_ref())?;
    let mission = scenario.mission()?;
    let start = Instant::now();
    let reference = initial_reference(&mission)?;
    println!(
        "reference: {:?}, dv {:.3} m/s, tof {:.3} d, {} nodes, adjustment {:?} ({:.1} s)",
        reference.schedule.kind,
        reference.dv_total,
        reference.tof / 86400.0,
        reference.grid.len(),
        reference.adjustment,
        start.elapsed().as_secs_f64()
    );
    let log = run_guidance_with(&mission, reference)?;
    let s = &log.summary;
    println!("segments            {}", s.segments);
    println!("recomputations      {}", s.recomputations);
    println!("delta a (km)        {:.5}", s.da_km);
    if let Some(di) = s.di_deg {
        println!("delta i (deg)       {di:.6}");
    }
    if let Some(dr) = s.draan_deg {
        println!("delta raan (deg)    {dr:.6}");
    }
    println!("tof (d)             {:.4}", s.tof_days);
    println!("dv (m/s)            {:.4}", s.dv_ms);
    println!("dv prime (m/s)      {:.5}", s.dv_prime_ms);
    println!("elapsed             {:.1} s", start.elapsed().as_secs_f64());
    Ok(())
}
