//! Duty-cycle gate centred on the eclipse, and the low-precision solar
//! ephemeris used to place it.

use chrono::{DateTime, Utc};
use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::constants::{normalize_angle, DAY};
use std::f64::consts::{FRAC_PI_2, PI};

/// Julian date of a UTC instant.
pub fn julian_date(t: &DateTime<Utc>) -> f64 {
    2_440_587.5 + (t.timestamp() as f64 + f64::from(t.timestamp_subsec_nanos()) * 1e-9) / DAY
}

/// Unit vector from the Earth to the Sun in the inertial equatorial frame,
/// from the low-precision almanac series (accurate to about 0.01°).
pub fn sun_direction(jd: f64) -> Vector3<f64> {
    let t = (jd - 2_451_545.0) / 36_525.0;
    let lambda_m = (280.460 + 36_000.771 * t).to_radians();
    let m = (357.529_109_2 + 35_999.050_34 * t).to_radians();
    let lambda = lambda_m
        + (1.914_666_471f64.to_radians()) * m.sin()
        + (0.019_994_643f64.to_radians()) * (2.0 * m).sin();
    let eps = (23.439_291 - 0.013_004_2 * t).to_radians();
    Vector3::new(
        lambda.cos(),
        eps.cos() * lambda.sin(),
        eps.sin() * lambda.sin(),
    )
}

/// Argument of latitude, in the orbit plane defined by `raan` and `inc`,
/// of the direction most opposed to the Sun.
pub fn eclipse_center(sun: &Vector3<f64>, raan: f64, inc: f64) -> f64 {
    let (so, co) = raan.sin_cos();
    let (si, ci) = inc.sin_cos();
    let p_hat = Vector3::new(co, so, 0.0);
    let q_hat = Vector3::new(-ci * so, ci * co, si);
    normalize_angle((-sun.dot(&q_hat)).atan2(-sun.dot(&p_hat)))
}

/// Signed distance of the mean argument of latitude from the nearest edge of
/// the two thrust-off arcs. Non-negative means thrust is allowed.
pub fn gate_margin(mean_arg_lat: f64, l_c: f64, dc_ref: f64) -> f64 {
    let q1 = (mean_arg_lat - l_c).cos().clamp(-1.0, 1.0).acos();
    let q2 = (mean_arg_lat - l_c - PI).cos().clamp(-1.0, 1.0).acos();
    q1.min(q2) - FRAC_PI_2 * (1.0 - dc_ref)
}

/// Thrust gate η ∈ {0, 1}: zero on the arcs of half-width `(π/2)(1 − DC′)`
/// centred at `l_c` and `l_c + π`.
pub fn eclipse_indicator(mean_arg_lat: f64, l_c: f64, dc_ref: f64) -> f64 {
    if gate_margin(mean_arg_lat, l_c, dc_ref) < 0.0 {
        0.0
    } else {
        1.0
    }
}

/// Gate parameters at one instant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EclipseModel {
    pub l_c: f64,
    pub dc_ref: f64,
}

impl EclipseModel {
    pub fn indicator(&self, mean_arg_lat: f64) -> f64 {
        eclipse_indicator(mean_arg_lat, self.l_c, self.dc_ref)
    }

    pub fn margin(&self, mean_arg_lat: f64) -> f64 {
        gate_margin(mean_arg_lat, self.l_c, self.dc_ref)
    }
}

/// Solar geometry anchored at the scenario epoch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolarGeometry {
    /// Julian date of scenario time zero.
    pub epoch_jd: f64,
}

impl SolarGeometry {
    pub fn new(epoch: &DateTime<Utc>) -> Self {
        SolarGeometry {
            epoch_jd: julian_date(epoch),
        }
    }

    pub fn sun_direction(&self, t: f64) -> Vector3<f64> {
        sun_direction(self.epoch_jd + t / DAY)
    }

    pub fn model(&self, t: f64, raan: f64, inc: f64, dc_ref: f64) -> EclipseModel {
        EclipseModel {
            l_c: eclipse_center(&self.sun_direction(t), raan, inc),
            dc_ref,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    #[test]
    fn full_duty_cycle_never_gates() {
        for j in 0..1000 {
            assert_eq!(eclipse_indicator(j as f64 * 0.0063, 1.3, 1.0), 1.0);
        }
    }

    #[test]
    fn arc_centre_is_off() {
        assert_eq!(eclipse_indicator(2.0, 2.0, 0.5), 0.0);
        assert_eq!(eclipse_indicator(2.0 + PI, 2.0, 0.5), 0.0);
        assert_eq!(eclipse_indicator(2.0 + FRAC_PI_2, 2.0, 0.5), 1.0);
    }

    #[test]
    fn equinox_sun_lies_near_x_axis() {
        let t = Utc.with_ymd_and_hms(2024, 3, 20, 3, 6, 0).unwrap();
        let s = sun_direction(julian_date(&t));
        assert!(s.x > 0.9999);
        let t = Utc.with_ymd_and_hms(2024, 6, 20, 20, 51, 0).unwrap();
        let s = sun_direction(julian_date(&t));
        assert!((s.z - 23.44f64.to_radians().sin()).abs() < 1e-3);
    }

    #[test]
    fn eclipse_centre_opposes_sun() {
        let sun = Vector3::new(0.3, -0.8, 0.4).normalize();
        let (raan, inc) = (0.4, 1.7);
        let lc = eclipse_center(&sun, raan, inc);
        let (so, co) = raan.sin_cos();
        let (si, ci) = inc.sin_cos();
        let dir = |u: f64| {
            Vector3::new(
                co * u.cos() - so * ci * u.sin(),
                so * u.cos() + co * ci * u.sin(),
                si * u.sin(),
            )
        };
        let best = (0..200_000)
            .map(|j| j as f64 * 1e-5 * PI)
            .min_by(|a, b| dir(*a).dot(&sun).partial_cmp(&dir(*b).dot(&sun)).unwrap())
            .unwrap();
        let d = crate::constants::wrap_pi(best - lc).abs();
        assert!(d < 1e-4, "{d}");
    }
}
