//! Converts one LEO state through every element set and back.
//!
//! cargo run --example coordinates

use lowthrust_mpc::coords::*;
use lowthrust_mpc::Body;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let body = Body::EARTH;
    let kep = KeplerianElements::osculating(6878.137, 0.002, 97.4f64.to_radians(), 0.6, 1.1, 0.4);
    let x = kep_to_cart(&kep, body.mu, 0.0);
    println!("r  = {:?} km", x.r.as_slice());
    println!("v  = {:?} km/s", x.v.as_slice());

    let eq = cart_to_equinoctial(&x, body.mu)?;
    println!(
        "equinoctial  p {:.4} f {:.6} g {:.6} h {:.6} k {:.6} L {:.6}",
        eq.p, eq.f, eq.g, eq.h, eq.k, eq.l
    );

    let g = cart_to_geqoe(&x, &body)?;
    println!("GEqOE        {:?}", g.to_scaled(&body).as_slice());

    let mean = osc_to_mean(&kep, &body)?;
    println!(
        "mean         a {:.4} km (osculating {:.4}), i {:.6} deg",
        mean.a,
        kep.a,
        mean.i.to_degrees()
    );

    let back = geqoe_to_cart(&g, &body, 0.0)?;
    println!(
        "GEqOE round trip error: {:.2e} km, {:.2e} km/s",
        (back.r - x.r).norm(),
        (back.v - x.v).norm()
    );
    Ok(())
}
