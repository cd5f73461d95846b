//! Nonlinearity index of the five element sets on the reference orbit.
//!
//! cargo run --release --example nonlinearity

use lowthrust_mpc::analysis::nonlinearity::reference_orbit;
use lowthrust_mpc::analysis::{nonlinearity_index, NonlinearityConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = NonlinearityConfig {
        orbits: 10,
        ..NonlinearityConfig::default()
    };
    let report = nonlinearity_index(&reference_orbit(), &cfg)?;
    println!("norm: {}", report.norm);
    for c in &report.curves {
        let at = |n: usize| c.index[n - 1];
        println!(
            "{:>12}: 1 orbit {:.3e}, 5 orbits {:.3e}, 10 orbits {:.3e}",
            c.system.name(),
            at(1),
            at(5),
            at(10)
        );
    }
    Ok(())
}
