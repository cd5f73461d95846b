//! Edelbaum's constant-acceleration solution for combined semi-major axis
//! and inclination change between circular orbits.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::dynamics::SpacecraftConfig;
use crate::error::{Error, Result};

/// One quasi-circular transfer leg.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdelbaumLeg {
    pub a0: f64,
    pub i0: f64,
    pub a_f: f64,
    pub i_f: f64,
    /// Circular speeds at the end points, km/s.
    pub v0: f64,
    pub vf: f64,
    /// Initial out-of-plane steering angle, rad in [0, π].
    pub beta0: f64,
    /// Total velocity increment, km/s.
    pub dv: f64,
}

impl EdelbaumLeg {
    pub fn new(a0: f64, i0: f64, a_f: f64, i_f: f64, mu: f64) -> Result<Self> {
        if !(a0 > 0.0 && a_f > 0.0) {
            return Err(Error::Transfer(format!(
                "semi-major axes must be positive ({a0}, {a_f})"
            )));
        }
        let di = (i_f - i0).abs();
        if di > FRAC_PI_2 {
            return Err(Error::Transfer(format!(
                "inclination change {:.3} deg exceeds 90 deg",
                di.to_degrees()
            )));
        }
        let v0 = (mu / a0).sqrt();
        let vf = (mu / a_f).sqrt();
        let x = FRAC_PI_2 * di;
        let dv = (v0 * v0 - 2.0 * v0 * vf * x.cos() + vf * vf)
            .max(0.0)
            .sqrt();
        let beta0 = if dv > 0.0 {
            (vf * x.sin()).atan2(v0 - vf * x.cos())
        } else {
            0.0
        };
        Ok(EdelbaumLeg {
            a0,
            i0,
            a_f,
            i_f,
            v0,
            vf,
            beta0,
            dv,
        })
    }

    /// `+1` if the leg raises the inclination, `−1` otherwise.
    pub fn inclination_sign(&self) -> f64 {
        if self.i_f >= self.i0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Steering angle magnitude after spending `s` km/s of the leg.
    pub fn beta_at(&self, s: f64) -> f64 {
        if self.dv == 0.0 {
            return 0.0;
        }
        (self.v0 * self.beta0.sin()).atan2(self.v0 * self.beta0.cos() - s)
    }

    /// Mean semi-major axis and inclination after spending `s` km/s.
    pub fn elements_at(&self, s: f64, mu: f64) -> (f64, f64) {
        if self.dv == 0.0 {
            return (self.a0, self.i0);
        }
        let s = s.clamp(0.0, self.dv);
        let v2 = self.v0 * self.v0 - 2.0 * self.v0 * s * self.beta0.cos() + s * s;
        let di = (self.beta_at(s) - self.beta0) / FRAC_PI_2;
        (mu / v2, self.i0 + self.inclination_sign() * di)
    }
}

/// Thrust timeline of a leg flown at the duty-averaged acceleration
/// `DC′·T_max/m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegBurn {
    pub m_start: f64,
    pub m_end: f64,
    /// Duration, s.
    pub duration: f64,
    /// Mass flow, kg/s.
    pub mdot: f64,
    /// Exhaust velocity, km/s.
    pub ve: f64,
}

impl LegBurn {
    pub fn new(leg: &EdelbaumLeg, m_start: f64, cfg: &SpacecraftConfig, dc_ref: f64) -> Self {
        let ve = cfg.exhaust_velocity();
        let m_end = m_start * (-leg.dv / ve).exp();
        let mdot = dc_ref * cfg.t_max / (ve * 1e3);
        LegBurn {
            m_start,
            m_end,
            duration: (m_start - m_end) / mdot,
            mdot,
            ve,
        }
    }

    pub fn mass_at(&self, t: f64) -> f64 {
        self.m_start - self.mdot * t.clamp(0.0, self.duration)
    }

    /// Velocity increment spent after `t` seconds, km/s.
    pub fn dv_at(&self, t: f64) -> f64 {
        self.ve * (self.m_start / self.mass_at(t)).ln()
    }

    /// Duty-averaged acceleration at `t`, km/s².
    pub fn accel_at(&self, t: f64) -> f64 {
        self.mdot * self.ve / self.mass_at(t)
    }
}

/// Closed-form transfer summary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdelbaumTransfer {
    pub leg: EdelbaumLeg,
    /// m/s.
    pub dv: f64,
    /// s.
    pub tof: f64,
    pub beta0: f64,
    pub m_final: f64,
}

/// Velocity increment, flight time and steering law of a direct transfer
/// with duty-cycle-scaled thrust.
pub fn edelbaum_transfer(
    a0: f64,
    i0: f64,
    a_f: f64,
    i_f: f64,
    m0: f64,
    cfg: &SpacecraftConfig,
    dc_ref: f64,
    mu: f64,
) -> Result<EdelbaumTransfer> {
    if !(dc_ref > 0.0 && dc_ref <= cfg.duty_cycle) {
        return Err(Error::Config(format!(
            "reference duty cycle {dc_ref} outside (0, {}]",
            cfg.duty_cycle
        )));
    }
    let leg = EdelbaumLeg::new(a0, i0, a_f, i_f, mu)?;
    let burn = LegBurn::new(&leg, m0, cfg, dc_ref);
    Ok(EdelbaumTransfer {
        leg,
        dv: leg.dv * 1e3,
        tof: burn.duration,
        beta0: leg.beta0,
        m_final: burn.m_end,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{G0, MU_EARTH};

    fn cfg() -> SpacecraftConfig {
        SpacecraftConfig {
            m0: 800.0,
            t_max: 0.06,
            isp: 1300.0,
            g0: G0,
            duty_cycle: 0.5,
            cd: 2.2,
            area: 0.01,
        }
    }

    #[test]
    fn null_transfer() {
        let t = edelbaum_transfer(7000.0, 1.0, 7000.0, 1.0, 800.0, &cfg(), 0.4, MU_EARTH).unwrap();
        assert_eq!(t.dv, 0.0);
        assert_eq!(t.tof, 0.0);
    }

    #[test]
    fn end_point_reached() {
        let leg = EdelbaumLeg::new(6728.1363, 1.7156, 6975.0874, 1.7131, MU_EARTH).unwrap();
        let (a, i) = leg.elements_at(leg.dv, MU_EARTH);
        assert!((a - 6975.0874).abs() < 1e-8);
        assert!((i - 1.7131).abs() < 1e-12);
    }

    #[test]
    fn rejects_large_plane_change() {
        assert!(EdelbaumLeg::new(7000.0, 0.1, 7000.0, 1.8, MU_EARTH).is_err());
    }

    #[test]
    fn tof_uses_log_mean_mass() {
        let t = edelbaum_transfer(6728.1363, 1.0, 6975.0874, 1.0, 800.0, &cfg(), 0.4, MU_EARTH)
            .unwrap();
        let ve = cfg().exhaust_velocity() * 1e3;
        let m_bar = (800.0 - t.m_final) * ve / t.dv;
        assert!((t.tof - t.dv * m_bar / (0.06 * 0.4)).abs() < 1e-6 * t.tof);
    }
}
