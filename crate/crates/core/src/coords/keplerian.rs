use nalgebra::{Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use super::CartesianState;
use crate::constants::{normalize_angle, TWO_PI};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Osculating,
    Mean,
}

/// Classical orbital elements. Distances in km, angles in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeplerianElements {
    pub a: f64,
    pub e: f64,
    pub i: f64,
    pub raan: f64,
    pub argp: f64,
    pub ta: f64,
    pub kind: ElementKind,
}

impl KeplerianElements {
    pub fn osculating(a: f64, e: f64, i: f64, raan: f64, argp: f64, ta: f64) -> Self {
        KeplerianElements {
            a,
            e,
            i,
            raan: normalize_angle(raan),
            argp: normalize_angle(argp),
            ta: normalize_angle(ta),
            kind: ElementKind::Osculating,
        }
    }

    pub fn with_kind(self, kind: ElementKind) -> Self {
        KeplerianElements { kind, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) || !self.a.is_finite() {
            return Err(Error::InvalidElements(format!(
                "semi-major axis {}",
                self.a
            )));
        }
        if !(0.0..1.0).contains(&self.e) {
            return Err(Error::Unbound(self.e));
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.i) {
            return Err(Error::InvalidElements(format!("inclination {}", self.i)));
        }
        Ok(())
    }

    pub fn semi_latus_rectum(&self) -> f64 {
        self.a * (1.0 - self.e * self.e)
    }

    pub fn mean_anomaly(&self) -> f64 {
        true_to_mean(self.ta, self.e)
    }

    pub fn eccentric_anomaly(&self) -> f64 {
        true_to_eccentric(self.ta, self.e)
    }

    /// Argument of latitude ω + θ.
    pub fn arg_latitude(&self) -> f64 {
        normalize_angle(self.argp + self.ta)
    }

    /// Mean argument of latitude ω + M.
    pub fn mean_arg_latitude(&self) -> f64 {
        normalize_angle(self.argp + self.mean_anomaly())
    }

    pub fn mean_motion(&self, mu: f64) -> f64 {
        (mu / self.a.powi(3)).sqrt()
    }

    pub fn period(&self, mu: f64) -> f64 {
        TWO_PI / self.mean_motion(mu)
    }

    /// Returns the same orbit with the true anomaly replaced by the one
    /// corresponding to mean anomaly `m`.
    pub fn with_mean_anomaly(self, m: f64) -> Self {
        KeplerianElements {
            ta: mean_to_true(m, self.e),
            ..self
        }
    }
}

pub fn true_to_eccentric(ta: f64, e: f64) -> f64 {
    let b = (1.0 - e * e).sqrt();
    normalize_angle((b * ta.sin()).atan2(e + ta.cos()))
}

pub fn eccentric_to_true(ea: f64, e: f64) -> f64 {
    let b = (1.0 - e * e).sqrt();
    normalize_angle((b * ea.sin()).atan2(ea.cos() - e))
}

pub fn eccentric_to_mean(ea: f64, e: f64) -> f64 {
    normalize_angle(ea - e * ea.sin())
}

/// Solves Kepler's equation by Newton iteration.
pub fn mean_to_eccentric(m: f64, e: f64) -> f64 {
    let m = normalize_angle(m);
    let mut ea = if e < 0.8 { m } else { std::f64::consts::PI };
    for _ in 0..50 {
        let f = ea - e * ea.sin() - m;
        let d = f / (1.0 - e * ea.cos());
        ea -= d;
        if d.abs() < 1e-15 {
            break;
        }
    }
    normalize_angle(ea)
}

pub fn true_to_mean(ta: f64, e: f64) -> f64 {
    eccentric_to_mean(true_to_eccentric(ta, e), e)
}

pub fn mean_to_true(m: f64, e: f64) -> f64 {
    eccentric_to_true(mean_to_eccentric(m, e), e)
}

/// Osculating elements of a Cartesian state.
///
/// Conventions for the undefined angles: equatorial orbits take Ω = 0 and
/// circular orbits take ω = 0, so that the anomaly carries the position.
pub fn cart_to_kep(x: &CartesianState, mu: f64) -> Result<KeplerianElements> {
    let r = x.r;
    let v = x.v;
    let rn = r.norm();
    let h = r.cross(&v);
    let hn = h.norm();
    if hn <= 1e-10 * rn * v.norm() || hn == 0.0 {
        return Err(Error::Rectilinear);
    }
    let e_vec = ((v.norm_squared() - mu / rn) * r - r.dot(&v) * v) / mu;
    let e = e_vec.norm();
    if e >= 1.0 {
        return Err(Error::Unbound(e));
    }
    let a = 1.0 / (2.0 / rn - v.norm_squared() / mu);
    let h_hat = h / hn;
    let i = h_hat.z.clamp(-1.0, 1.0).acos();

    let node = Vector3::new(-h.y, h.x, 0.0);
    let nn = node.norm();
    let (raan, p_hat) = if nn > 1e-12 * hn {
        (node.y.atan2(node.x), node / nn)
    } else {
        (0.0, Vector3::x())
    };
    let q_hat = h_hat.cross(&p_hat);
    let argp = if e > 1e-13 {
        e_vec.dot(&q_hat).atan2(e_vec.dot(&p_hat))
    } else {
        0.0
    };
    let u = r.dot(&q_hat).atan2(r.dot(&p_hat));
    Ok(KeplerianElements {
        a,
        e,
        i,
        raan: normalize_angle(raan),
        argp: normalize_angle(argp),
        ta: normalize_angle(u - argp),
        kind: ElementKind::Osculating,
    })
}

pub fn kep_to_cart(k: &KeplerianElements, mu: f64, epoch: f64) -> CartesianState {
    let p = k.semi_latus_rectum();
    let (s, c) = k.ta.sin_cos();
    let rn = p / (1.0 + k.e * c);
    let r_pf = Vector3::new(rn * c, rn * s, 0.0);
    let vf = (mu / p).sqrt();
    let v_pf = Vector3::new(-vf * s, vf * (k.e + c), 0.0);
    let rot = Rotation3::from_axis_angle(&Vector3::z_axis(), k.raan)
        * Rotation3::from_axis_angle(&Vector3::x_axis(), k.i)
        * Rotation3::from_axis_angle(&Vector3::z_axis(), k.argp);
    CartesianState::new(rot * r_pf, rot * v_pf, epoch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::MU_EARTH;
    use approx::assert_relative_eq;

    #[test]
    fn table_orbit_recovers_elements() {
        let k = KeplerianElements::osculating(
            6728.1363,
            0.004,
            98.3f64.to_radians(),
            15.3f64.to_radians(),
            0.0,
            0.0,
        );
        let x = kep_to_cart(&k, MU_EARTH, 0.0);
        let back = cart_to_kep(&x, MU_EARTH).unwrap();
        assert_relative_eq!(back.a, k.a, max_relative = 1e-12);
        assert_relative_eq!(back.e, k.e, max_relative = 1e-10);
        assert_relative_eq!(back.i, k.i, epsilon = 1e-12);
        assert_relative_eq!(back.raan, k.raan, epsilon = 1e-12);
        // ω = 0 and θ = 0 may come back as values just below 2π.
        let u = crate::constants::wrap_pi(back.argp + back.ta);
        assert!(u.abs() < 1e-10);
        assert!(crate::constants::wrap_pi(back.argp).abs() < 1e-8);
    }

    #[test]
    fn circular_equatorial() {
        let x = CartesianState::new(
            Vector3::new(7000.0, 0.0, 0.0),
            Vector3::new(0.0, (MU_EARTH / 7000.0).sqrt(), 0.0),
            0.0,
        );
        let k = cart_to_kep(&x, MU_EARTH).unwrap();
        assert_relative_eq!(k.a, 7000.0, max_relative = 1e-12);
        assert!(k.e < 1e-12);
        assert!(k.i.abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_orbits() {
        let radial = CartesianState::new(
            Vector3::new(7000.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            0.0,
        );
        assert!(matches!(
            cart_to_kep(&radial, MU_EARTH),
            Err(Error::Rectilinear)
        ));
        let escape = CartesianState::new(
            Vector3::new(7000.0, 0.0, 0.0),
            Vector3::new(0.0, 11.0, 0.0),
            0.0,
        );
        assert!(matches!(
            cart_to_kep(&escape, MU_EARTH),
            Err(Error::Unbound(_))
        ));
    }

    #[test]
    fn kepler_equation_inverse() {
        for &e in &[0.0, 0.004, 0.1, 0.7] {
            for j in 0..36 {
                let m = j as f64 * 0.17453;
                let ea = mean_to_eccentric(m, e);
                assert!((crate::constants::wrap_pi(eccentric_to_mean(ea, e) - m)).abs() < 1e-13);
                let ta = mean_to_true(m, e);
                assert!((crate::constants::wrap_pi(true_to_mean(ta, e) - m)).abs() < 1e-12);
            }
        }
    }
}
