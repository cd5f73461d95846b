//! Builds and solves the first tracking segment of a scenario.
//!
//! cargo run --example track_segment -- scenarios/upleg_ci.json

use lowthrust_mpc::analysis::ScenarioFile;
use lowthrust_mpc::guidance::initial_reference;
use lowthrust_mpc::tracker::{build_segment_problem, initial_guess_segment, solve_segment};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "scenarios/upleg_ci.json".into());
    let sc = ScenarioFile::load(path.as_ref())?;
    let mission = sc.mission()?;
    let reference = initial_reference(&mission)?;

    // Skip the initial coast so the segment has thrust to shape.
    let start = reference
        .grid
        .iter()
        .position(|&t| reference.f_at(t) > 0.0)
        .unwrap_or(0);
    let steps = mission.config.segment.steps();
    let times = &reference.grid[start..=(start + steps).min(reference.grid.len() - 1)];
    let (x, m) = if start == 0 {
        (mission.x0, mission.m0)
    } else {
        mission
            .prop
            .coast(&mission.x0, mission.m0, times[0])
            .map(|(mut x, m)| {
                x.epoch = times[0];
                (x, m)
            })?
    };

    let guess = initial_guess_segment(&x, m, &reference, times, &mission.prop, &mission.solar)?;
    let target = reference.target_at(times[times.len() - 1]);
    let mut problem = build_segment_problem(&guess, target, mission.target.mode(), &mission.prop)?;
    problem.dv_prime_weight = mission.config.segment.dv_prime_weight;
    let sol = solve_segment(&problem, &mission.config.solver);

    println!(
        "segment of {} steps from t = {:.0} s",
        problem.steps(),
        times[0]
    );
    println!(
        "status {:?} after {} iterations",
        sol.status, sol.iterations
    );
    println!(
        "objective {:.6} (guess {:.6})",
        sol.objective, sol.guess_objective
    );
    println!(
        "planned dv {:.4} m/s, predicted dv' {:.5} m/s",
        sol.dv_segment, sol.dv_prime
    );
    for (k, a) in sol.accels.iter().enumerate().take(12) {
        println!(
            "  step {k:>3}: |a| {:.3e} km/s^2 (bound {:.3e})",
            a.norm(),
            problem.bounds[k]
        );
    }
    Ok(())
}
