//! Physical constants and the central-body description shared by every module.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

/// Earth gravitational parameter, km³/s².
pub const MU_EARTH: f64 = 398_600.4418;
/// Earth equatorial radius, km.
pub const R_EARTH: f64 = 6378.1363;
/// Second zonal harmonic.
pub const J2_EARTH: f64 = 1.082_626_68e-3;
/// Earth rotation rate, rad/s.
pub const OMEGA_EARTH: f64 = 7.292_115_9e-5;
/// Standard gravity, m/s².
pub const G0: f64 = 9.80665;
/// Seconds per day.
pub const DAY: f64 = 86_400.0;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Gravity field of the central body: point mass plus an optional J2 zonal term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Body {
    /// Gravitational parameter, km³/s².
    pub mu: f64,
    /// Equatorial radius, km.
    pub radius: f64,
    /// J2 coefficient. Zero switches the perturbing potential off.
    pub j2: f64,
    /// Rotation rate, rad/s (used for the co-rotating atmosphere).
    pub rotation_rate: f64,
}

impl Body {
    pub const EARTH: Body = Body {
        mu: MU_EARTH,
        radius: R_EARTH,
        j2: J2_EARTH,
        rotation_rate: OMEGA_EARTH,
    };

    /// Same body with the J2 term removed.
    pub fn keplerian(self) -> Self {
        Body { j2: 0.0, ..self }
    }

    /// J2 perturbing potential energy per unit mass, km²/s².
    ///
    /// Sign convention: the total energy is `v²/2 − μ/r + U`, so that the J2
    /// acceleration is `−∇U`.
    pub fn j2_potential(&self, r: &Vector3<f64>) -> f64 {
        if self.j2 == 0.0 {
            return 0.0;
        }
        let rn = r.norm();
        let sin_lat = r.z / rn;
        0.5 * self.mu * self.j2 * self.radius * self.radius / (rn * rn * rn)
            * (3.0 * sin_lat * sin_lat - 1.0)
    }

    /// Canonical length unit (the equatorial radius), km.
    pub fn distance_unit(&self) -> f64 {
        self.radius
    }

    /// Canonical time unit `sqrt(R³/μ)`, s.
    pub fn time_unit(&self) -> f64 {
        (self.radius.powi(3) / self.mu).sqrt()
    }

    /// Circular speed at radius `a`, km/s.
    pub fn circular_speed(&self, a: f64) -> f64 {
        (self.mu / a).sqrt()
    }

    /// Keplerian period for semi-major axis `a`, s.
    pub fn period(&self, a: f64) -> f64 {
        TWO_PI * (a.powi(3) / self.mu).sqrt()
    }
}

impl Default for Body {
    fn default() -> Self {
        Body::EARTH
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn normalize_angle(x: f64) -> f64 {
    let y = x.rem_euclid(TWO_PI);
    // rem_euclid can return exactly 2π for tiny negative inputs.
    if y >= TWO_PI {
        0.0
    } else {
        y
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_pi(x: f64) -> f64 {
    let y = normalize_angle(x);
    if y > std::f64::consts::PI {
        y - TWO_PI
    } else {
        y
    }
}
