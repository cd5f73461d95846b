use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::atmosphere::atmospheric_density;
use crate::constants::{Body, G0};
use crate::coords::{rtn_to_inertial, CartesianState};
use crate::error::{Error, Result};

/// Spacecraft and propulsion parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacecraftConfig {
    /// Wet mass, kg.
    pub m0: f64,
    /// Maximum thrust, N.
    pub t_max: f64,
    /// Specific impulse, s.
    pub isp: f64,
    /// Standard gravity, m/s².
    #[serde(default = "default_g0")]
    pub g0: f64,
    /// Real engine duty cycle DC ∈ (0, 1].
    pub duty_cycle: f64,
    /// Drag coefficient.
    pub cd: f64,
    /// Frontal area, m².
    pub area: f64,
}

fn default_g0() -> f64 {
    G0
}

impl SpacecraftConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("m0", self.m0),
            ("t_max", self.t_max),
            ("isp", self.isp),
            ("g0", self.g0),
            ("duty_cycle", self.duty_cycle),
            ("cd", self.cd),
            ("area", self.area),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::Config(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if self.duty_cycle > 1.0 {
            return Err(Error::Config(format!(
                "duty_cycle must not exceed 1, got {}",
                self.duty_cycle
            )));
        }
        Ok(())
    }

    /// Effective exhaust velocity, km/s.
    pub fn exhaust_velocity(&self) -> f64 {
        self.isp * self.g0 * 1e-3
    }

    /// Maximum thrust acceleration at mass `m`, km/s².
    pub fn max_accel(&self, m: f64) -> f64 {
        self.t_max / m * 1e-3
    }
}

/// Which forces act on the spacecraft besides point-mass gravity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForceModel {
    pub body: Body,
    pub j2: bool,
    pub drag: bool,
    /// Drag coefficient times frontal area, m².
    pub cd_area: f64,
}

impl ForceModel {
    /// Two-body + J2 + drag for the given spacecraft.
    pub fn low_fidelity(cfg: &SpacecraftConfig) -> Self {
        ForceModel {
            body: Body::EARTH,
            j2: true,
            drag: true,
            cd_area: cfg.cd * cfg.area,
        }
    }

    pub fn two_body() -> Self {
        ForceModel {
            body: Body::EARTH,
            j2: false,
            drag: false,
            cd_area: 0.0,
        }
    }

    pub fn j2_only() -> Self {
        ForceModel {
            j2: true,
            ..ForceModel::two_body()
        }
    }

    /// Body used for element conversions: J2 only when it acts in the dynamics.
    pub fn conversion_body(&self) -> Body {
        if self.j2 {
            self.body
        } else {
            self.body.keplerian()
        }
    }

    pub fn gravity(&self, r: &Vector3<f64>) -> Vector3<f64> {
        let rn = r.norm();
        let mut acc = -self.body.mu / (rn * rn * rn) * r;
        if self.j2 {
            acc += j2_acceleration(&self.body, r);
        }
        acc
    }

    /// Drag acceleration, km/s², for mass `m` kg.
    pub fn drag_acceleration(&self, r: &Vector3<f64>, v: &Vector3<f64>, m: f64) -> Vector3<f64> {
        if !self.drag || self.cd_area == 0.0 {
            return Vector3::zeros();
        }
        let omega = Vector3::new(0.0, 0.0, self.body.rotation_rate);
        let v_rel = v - omega.cross(r);
        let rho = atmospheric_density(r.norm() - self.body.radius);
        // ρ [kg/m³]·(CdA/m) [m²/kg]·|v|v [km²/s²] gives 1/m·km²/s² = 1e3 km/s².
        -0.5 * rho * self.cd_area / m * v_rel.norm() * v_rel * 1e3
    }

    /// Total inertial acceleration, km/s², for thrust acceleration `a_rtn`
    /// (km/s²) expressed in the RTN frame of the current state.
    pub fn total_acceleration(
        &self,
        x: &CartesianState,
        m: f64,
        a_rtn: &Vector3<f64>,
    ) -> Vector3<f64> {
        let mut acc = self.gravity(&x.r) + self.drag_acceleration(&x.r, &x.v, m);
        if a_rtn.x != 0.0 || a_rtn.y != 0.0 || a_rtn.z != 0.0 {
            acc += rtn_to_inertial(&x.r, &x.v, a_rtn);
        }
        acc
    }
}

pub fn j2_acceleration(body: &Body, r: &Vector3<f64>) -> Vector3<f64> {
    let r2 = r.norm_squared();
    let rn = r2.sqrt();
    let z2 = r.z * r.z / r2;
    let f = -1.5 * body.j2 * body.mu * body.radius * body.radius / (r2 * r2 * rn);
    Vector3::new(
        f * r.x * (1.0 - 5.0 * z2),
        f * r.y * (1.0 - 5.0 * z2),
        f * r.z * (3.0 - 5.0 * z2),
    )
}

/// Inertial acceleration for the given spacecraft with the low-fidelity force
/// model (two-body, J2, drag, thrust).
pub fn total_acceleration(
    x: &CartesianState,
    m: f64,
    a_thrust_rtn: &Vector3<f64>,
    cfg: &SpacecraftConfig,
) -> Vector3<f64> {
    ForceModel::low_fidelity(cfg).total_acceleration(x, m, a_thrust_rtn)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> SpacecraftConfig {
        SpacecraftConfig {
            m0: 643.0,
            t_max: 0.06,
            isp: 1300.0,
            g0: G0,
            duty_cycle: 0.5,
            cd: 2.2,
            area: 2.0,
        }
    }

    #[test]
    fn kepler_limit() {
        let x = CartesianState::new(
            Vector3::new(7000.0, 100.0, -50.0),
            Vector3::new(0.0, 7.5, 0.1),
            0.0,
        );
        let acc = ForceModel::two_body().total_acceleration(&x, 600.0, &Vector3::zeros());
        let expect = -crate::constants::MU_EARTH / x.r.norm().powi(3) * x.r;
        assert_relative_eq!(acc, expect, max_relative = 1e-15);
    }

    #[test]
    fn j2_matches_gradient_of_potential() {
        // Central differences of the potential energy give the acceleration −∇U.
        let body = Body::EARTH;
        let r = Vector3::new(5000.0, -3000.0, 4200.0);
        let h = 1e-3;
        let mut grad = Vector3::zeros();
        for j in 0..3 {
            let mut rp = r;
            let mut rm = r;
            rp[j] += h;
            rm[j] -= h;
            grad[j] = (body.j2_potential(&rp) - body.j2_potential(&rm)) / (2.0 * h);
        }
        assert_relative_eq!(j2_acceleration(&body, &r), -grad, max_relative = 1e-7);
    }

    #[test]
    fn j2_radial_structure() {
        // Radial component scales as (1 − 3 sin²φ): −2 at the pole relative to +1 at the equator.
        let body = Body::EARTH;
        let eq = j2_acceleration(&body, &Vector3::new(7000.0, 0.0, 0.0));
        let pole = j2_acceleration(&body, &Vector3::new(0.0, 0.0, 7000.0));
        assert_relative_eq!(pole.z / eq.x, -2.0, max_relative = 1e-14);
    }

    #[test]
    fn tangential_thrust_on_circular_orbit() {
        let r = 6728.1363;
        let v = (crate::constants::MU_EARTH / r).sqrt();
        let x = CartesianState::new(
            Vector3::new(r, 0.0, 0.0),
            Vector3::new(0.0, v * 0.6, v * 0.8),
            0.0,
        );
        let a = 9.33e-8;
        let two_body = ForceModel::two_body();
        let acc = two_body.total_acceleration(&x, 600.0, &Vector3::new(0.0, a, 0.0))
            - two_body.gravity(&x.r);
        assert_relative_eq!(acc.dot(&x.v.normalize()), a, max_relative = 1e-12);
    }

    #[test]
    fn drag_opposes_relative_velocity() {
        let c = cfg();
        let model = ForceModel::low_fidelity(&c);
        let x = CartesianState::new(
            Vector3::new(6728.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 7.6),
            0.0,
        );
        let d = model.drag_acceleration(&x.r, &x.v, c.m0);
        let v_rel = x.v - Vector3::new(0.0, 0.0, crate::constants::OMEGA_EARTH).cross(&x.r);
        assert!(d.dot(&v_rel) < 0.0);
        assert!(d.cross(&v_rel).norm() < 1e-12 * d.norm() * v_rel.norm());
        // About 1e-9 km/s² at 350 km for this ballistic coefficient.
        assert!(d.norm() > 1e-11 && d.norm() < 1e-7);
    }

    #[test]
    fn config_validation() {
        assert!(cfg().validate().is_ok());
        let bad = SpacecraftConfig { isp: -1.0, ..cfg() };
        assert!(bad.validate().is_err());
        let bad = SpacecraftConfig {
            duty_cycle: 1.5,
            ..cfg()
        };
        assert!(bad.validate().is_err());
    }
}
