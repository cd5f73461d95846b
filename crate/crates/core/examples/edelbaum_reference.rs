//! Closed-form Edelbaum estimate, then the drift-matched reference for a
//! scenario.
//!
//! cargo run --example edelbaum_reference -- scenarios/upleg_ci.json

use lowthrust_mpc::analysis::ScenarioFile;
use lowthrust_mpc::constants::MU_EARTH;
use lowthrust_mpc::guidance::initial_reference;
use lowthrust_mpc::reference::EdelbaumLeg;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "scenarios/upleg_ci.json".into());
    let sc = ScenarioFile::load(path.as_ref())?;
    let target_i = sc.target.i_deg.unwrap_or(sc.initial.i_deg);
    let leg = EdelbaumLeg::new(
        sc.initial.a_km,
        sc.initial.i_deg.to_radians(),
        sc.target.a_km,
        target_i.to_radians(),
        MU_EARTH,
    )?;
    println!("Edelbaum dv without node matching: {:.3} m/s", leg.dv * 1e3);

    let mission = sc.mission()?;
    let r = initial_reference(&mission)?;
    let s = &r.schedule;
    println!("schedule {:?}", s.kind);
    println!(
        "drift orbit a {:.2} km, i {:.4} deg, wait {:.2} d",
        s.a_d,
        s.i_d.to_degrees(),
        s.wait / 86400.0
    );
    println!("schedule dv {:.3} m/s, tof {:.2} d", s.dv, s.tof / 86400.0);
    println!(
        "propagated reference: {} nodes, dv {:.3} m/s",
        r.grid.len(),
        r.dv_total
    );
    Ok(())
}
