use nalgebra::Vector6;
use serde::{Deserialize, Serialize};

use super::equinoctial::{
    eccentric_longitude, equinoctial_frame, in_plane_position, inclination_vector,
    solve_generalized_kepler,
};
use super::CartesianState;
use crate::constants::{normalize_angle, Body};
use crate::error::{Error, Result};

/// Generalized equinoctial orbital elements with the J2 zonal term absorbed
/// into the generalized energy.
///
/// `nu` is the generalized mean motion (rad/s), `(p1, p2)` the generalized
/// eccentricity vector, `l` the generalized mean longitude and
/// `(q1, q2) = tan(i/2)·(sin Ω, cos Ω)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeqoeState {
    pub nu: f64,
    pub p1: f64,
    pub p2: f64,
    pub l: f64,
    pub q1: f64,
    pub q2: f64,
}

impl GeqoeState {
    /// Generalized semi-major axis `(μ/ν²)^(1/3)`, km.
    pub fn semi_major_axis(&self, mu: f64) -> f64 {
        (mu / (self.nu * self.nu)).cbrt()
    }

    /// Nondimensional vector `[ν·TU, p1, p2, 𝓛, q1, q2]`.
    pub fn to_scaled(&self, body: &Body) -> Vector6<f64> {
        Vector6::new(
            self.nu * body.time_unit(),
            self.p1,
            self.p2,
            self.l,
            self.q1,
            self.q2,
        )
    }

    pub fn from_scaled(x: &Vector6<f64>, body: &Body) -> Self {
        GeqoeState {
            nu: x[0] / body.time_unit(),
            p1: x[1],
            p2: x[2],
            l: x[3],
            q1: x[4],
            q2: x[5],
        }
    }
}

pub fn cart_to_geqoe(x: &CartesianState, body: &Body) -> Result<GeqoeState> {
    let mu = body.mu;
    let r = x.r;
    let v = x.v;
    let rn = r.norm();
    let hv = r.cross(&v);
    let hn = hv.norm();
    if hn == 0.0 || hn <= 1e-10 * rn * v.norm() {
        return Err(Error::Rectilinear);
    }
    let u = body.j2_potential(&r);
    let energy = 0.5 * v.norm_squared() - mu / rn + u;
    if energy >= 0.0 {
        return Err(Error::Unbound(energy));
    }
    let nu = (-2.0 * energy).powf(1.5) / mu;
    let (q1, q2) = inclination_vector(&(hv / hn))?;
    let (ex, ey) = equinoctial_frame(q1, q2);
    let true_long = r.dot(&ey).atan2(r.dot(&ex));
    let rdot = r.dot(&v) / rn;
    let c2 = hn * hn + 2.0 * rn * rn * u;
    if c2 <= 0.0 {
        return Err(Error::InvalidElements(
            "generalized angular momentum undefined".into(),
        ));
    }
    let c = c2.sqrt();
    let rho = c2 / mu;
    let (sl, cl) = true_long.sin_cos();
    let p1 = (rho / rn - 1.0) * sl - c * rdot / mu * cl;
    let p2 = (rho / rn - 1.0) * cl + c * rdot / mu * sl;
    if p1 * p1 + p2 * p2 >= 1.0 {
        return Err(Error::Unbound((p1 * p1 + p2 * p2).sqrt()));
    }
    let a = (mu / (nu * nu)).cbrt();
    let k = eccentric_longitude(a, p1, p2, rn * cl, rn * sl);
    Ok(GeqoeState {
        nu,
        p1,
        p2,
        l: normalize_angle(k + p1 * k.cos() - p2 * k.sin()),
        q1,
        q2,
    })
}

pub fn geqoe_to_cart(g: &GeqoeState, body: &Body, epoch: f64) -> Result<CartesianState> {
    let mu = body.mu;
    if !(g.nu > 0.0) {
        return Err(Error::InvalidElements(format!(
            "generalized mean motion {}",
            g.nu
        )));
    }
    let e2 = g.p1 * g.p1 + g.p2 * g.p2;
    if e2 >= 1.0 {
        return Err(Error::Unbound(e2.sqrt()));
    }
    let a = (mu / (g.nu * g.nu)).cbrt();
    let k = solve_generalized_kepler(g.l, g.p1, g.p2);
    let (xp, yp, rn) = in_plane_position(a, g.p1, g.p2, k);
    let (s, c) = k.sin_cos();
    let rdot = (mu * a).sqrt() / rn * (g.p2 * s - g.p1 * c);
    let (ex, ey) = equinoctial_frame(g.q1, g.q2);
    let r = xp * ex + yp * ey;
    let u = body.j2_potential(&r);
    let c2 = mu * a * (1.0 - e2);
    let h2 = c2 - 2.0 * rn * rn * u;
    if h2 <= 0.0 {
        return Err(Error::InvalidElements("angular momentum undefined".into()));
    }
    let e_r = r / rn;
    let e_f = ex.cross(&ey).cross(&e_r);
    let v = rdot * e_r + (h2.sqrt() / rn) * e_f;
    Ok(CartesianState::new(r, v, epoch))
}
