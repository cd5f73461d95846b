//! Samples the thrust-error model on a constant planned profile.
//!
//! cargo run --example thrust_errors

use lowthrust_mpc::guidance::{apply_thrust_errors, ThrustErrorModel};
use nalgebra::Vector3;

fn main() {
    let model = ThrustErrorModel {
        p_misthrust: 0.2,
        sigma_t: 0.07,
        sigma_beta: 7f64.to_radians(),
        seed: 7,
        forced_off_segments: 1,
    };
    let planned = vec![Vector3::new(0.0, 7.5e-8, 1.0e-8); 6];
    for segment in 0..8 {
        let c = apply_thrust_errors(&planned, &model, segment);
        let mags: Vec<String> = c
            .accels
            .iter()
            .map(|a| format!("{:.3}", a.norm() / planned[0].norm()))
            .collect();
        println!(
            "segment {segment}: misthrust {:5}, |a|/|a_plan| [{}]",
            c.misthrust,
            mags.join(", ")
        );
    }
}
