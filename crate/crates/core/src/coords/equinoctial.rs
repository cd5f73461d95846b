use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{CartesianState, ElementKind, KeplerianElements};
use crate::constants::normalize_angle;
use crate::error::{Error, Result};

/// Modified equinoctial elements.
///
/// `h = tan(i/2)·cos Ω`, `k = tan(i/2)·sin Ω`, `f, g` the eccentricity vector
/// in the equinoctial frame and `l` the true longitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquinoctialElements {
    pub p: f64,
    pub f: f64,
    pub g: f64,
    pub h: f64,
    pub k: f64,
    pub l: f64,
}

impl EquinoctialElements {
    /// `1 + h² + k²`.
    pub fn s2(&self) -> f64 {
        1.0 + self.h * self.h + self.k * self.k
    }

    pub fn eccentricity(&self) -> f64 {
        self.f.hypot(self.g)
    }

    pub fn semi_major_axis(&self) -> f64 {
        self.p / (1.0 - self.f * self.f - self.g * self.g)
    }
}

/// Classical equinoctial elements `(a, h, k, p, q, λ)` with
/// `h = e·sin ϖ`, `k = e·cos ϖ`, `p = tan(i/2)·sin Ω`, `q = tan(i/2)·cos Ω`
/// and `λ = M + ϖ` the mean longitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalEquinoctial {
    pub a: f64,
    pub h: f64,
    pub k: f64,
    pub p: f64,
    pub q: f64,
    pub lambda: f64,
}

/// Inclination-vector components `(tan(i/2)·sin Ω, tan(i/2)·cos Ω)` of a unit
/// angular-momentum direction.
pub(crate) fn inclination_vector(h_hat: &Vector3<f64>) -> Result<(f64, f64)> {
    let d = 1.0 + h_hat.z;
    if d <= 1e-12 {
        return Err(Error::RetrogradeEquatorial);
    }
    Ok((h_hat.x / d, -h_hat.y / d))
}

/// Equinoctial frame unit vectors `(ê_X, ê_Y)` for inclination components
/// `q1 = tan(i/2)·sin Ω`, `q2 = tan(i/2)·cos Ω`.
pub(crate) fn equinoctial_frame(q1: f64, q2: f64) -> (Vector3<f64>, Vector3<f64>) {
    let s = 1.0 + q1 * q1 + q2 * q2;
    let ex = Vector3::new(1.0 - q1 * q1 + q2 * q2, 2.0 * q1 * q2, -2.0 * q1) / s;
    let ey = Vector3::new(2.0 * q1 * q2, 1.0 + q1 * q1 - q2 * q2, 2.0 * q2) / s;
    (ex, ey)
}

/// Eccentric longitude `K` of the point `(x, y)` (equinoctial frame) on the
/// ellipse with semi-major axis `a` and eccentricity vector `(p1, p2)`, where
/// `p1 = e·sin ϖ` and `p2 = e·cos ϖ`.
pub(crate) fn eccentric_longitude(a: f64, p1: f64, p2: f64, x: f64, y: f64) -> f64 {
    let b = (1.0 - p1 * p1 - p2 * p2).sqrt();
    let alpha = 1.0 / (1.0 + b);
    let ab = a * b;
    let cos_k = p2 + ((1.0 - alpha * p2 * p2) * x - alpha * p1 * p2 * y) / ab;
    let sin_k = p1 + ((1.0 - alpha * p1 * p1) * y - alpha * p1 * p2 * x) / ab;
    sin_k.atan2(cos_k)
}

/// Solves the generalized Kepler equation `l = K + p1·cos K − p2·sin K`.
pub(crate) fn solve_generalized_kepler(l: f64, p1: f64, p2: f64) -> f64 {
    let l = normalize_angle(l);
    let mut k = l;
    for _ in 0..50 {
        let (s, c) = k.sin_cos();
        let f = k + p1 * c - p2 * s - l;
        let d = f / (1.0 - p1 * s - p2 * c);
        k -= d;
        if d.abs() < 1e-15 {
            break;
        }
    }
    k
}

/// In-plane position `(X, Y, r)` at eccentric longitude `k`.
pub(crate) fn in_plane_position(a: f64, p1: f64, p2: f64, k: f64) -> (f64, f64, f64) {
    let b = (1.0 - p1 * p1 - p2 * p2).sqrt();
    let alpha = 1.0 / (1.0 + b);
    let (s, c) = k.sin_cos();
    let x = a * (alpha * p1 * p2 * s + (1.0 - alpha * p1 * p1) * c - p2);
    let y = a * (alpha * p1 * p2 * c + (1.0 - alpha * p2 * p2) * s - p1);
    let r = a * (1.0 - p1 * s - p2 * c);
    (x, y, r)
}

pub fn kep_to_equinoctial(k: &KeplerianElements) -> Result<EquinoctialElements> {
    if k.i >= std::f64::consts::PI - 1e-12 {
        return Err(Error::RetrogradeEquatorial);
    }
    let lp = k.raan + k.argp;
    let t = (0.5 * k.i).tan();
    Ok(EquinoctialElements {
        p: k.semi_latus_rectum(),
        f: k.e * lp.cos(),
        g: k.e * lp.sin(),
        h: t * k.raan.cos(),
        k: t * k.raan.sin(),
        l: normalize_angle(lp + k.ta),
    })
}

/// Inverse of [`kep_to_equinoctial`], using the same conventions as
/// [`super::cart_to_kep`] for undefined angles (Ω = 0 when equatorial, ω = 0
/// when circular).
pub fn equinoctial_to_kep(q: &EquinoctialElements, kind: ElementKind) -> KeplerianElements {
    let e = q.eccentricity();
    let tn = q.h.hypot(q.k);
    let i = 2.0 * tn.atan();
    let raan = if tn > 0.0 { q.k.atan2(q.h) } else { 0.0 };
    let lp = if e > 0.0 { q.g.atan2(q.f) } else { raan };
    KeplerianElements {
        a: q.p / (1.0 - e * e),
        e,
        i,
        raan: normalize_angle(raan),
        argp: normalize_angle(lp - raan),
        ta: normalize_angle(q.l - lp),
        kind,
    }
}

pub fn cart_to_equinoctial(x: &CartesianState, mu: f64) -> Result<EquinoctialElements> {
    let r = x.r;
    let v = x.v;
    let rn = r.norm();
    let hv = r.cross(&v);
    let hn = hv.norm();
    if hn == 0.0 || hn <= 1e-10 * rn * v.norm() {
        return Err(Error::Rectilinear);
    }
    let e_vec = ((v.norm_squared() - mu / rn) * r - r.dot(&v) * v) / mu;
    if e_vec.norm() >= 1.0 {
        return Err(Error::Unbound(e_vec.norm()));
    }
    let (q1, q2) = inclination_vector(&(hv / hn))?;
    let (ex, ey) = equinoctial_frame(q1, q2);
    Ok(EquinoctialElements {
        p: hn * hn / mu,
        f: e_vec.dot(&ex),
        g: e_vec.dot(&ey),
        h: q2,
        k: q1,
        l: normalize_angle(r.dot(&ey).atan2(r.dot(&ex))),
    })
}

pub fn equinoctial_to_cart(q: &EquinoctialElements, mu: f64, epoch: f64) -> CartesianState {
    let (ex, ey) = equinoctial_frame(q.k, q.h);
    let (sl, cl) = q.l.sin_cos();
    let w = 1.0 + q.f * cl + q.g * sl;
    let rn = q.p / w;
    let sp = (mu / q.p).sqrt();
    let r = rn * (cl * ex + sl * ey);
    let v = sp * (-(q.g + sl) * ex + (q.f + cl) * ey);
    CartesianState::new(r, v, epoch)
}

pub fn kep_to_classical(k: &KeplerianElements) -> Result<ClassicalEquinoctial> {
    if k.i >= std::f64::consts::PI - 1e-12 {
        return Err(Error::RetrogradeEquatorial);
    }
    let lp = k.raan + k.argp;
    let t = (0.5 * k.i).tan();
    Ok(ClassicalEquinoctial {
        a: k.a,
        h: k.e * lp.sin(),
        k: k.e * lp.cos(),
        p: t * k.raan.sin(),
        q: t * k.raan.cos(),
        lambda: normalize_angle(lp + k.mean_anomaly()),
    })
}

pub fn cart_to_classical(x: &CartesianState, mu: f64) -> Result<ClassicalEquinoctial> {
    let r = x.r;
    let v = x.v;
    let rn = r.norm();
    let hv = r.cross(&v);
    let hn = hv.norm();
    if hn == 0.0 || hn <= 1e-10 * rn * v.norm() {
        return Err(Error::Rectilinear);
    }
    let e_vec = ((v.norm_squared() - mu / rn) * r - r.dot(&v) * v) / mu;
    if e_vec.norm() >= 1.0 {
        return Err(Error::Unbound(e_vec.norm()));
    }
    let a = 1.0 / (2.0 / rn - v.norm_squared() / mu);
    let (q1, q2) = inclination_vector(&(hv / hn))?;
    let (ex, ey) = equinoctial_frame(q1, q2);
    let h = e_vec.dot(&ey);
    let k = e_vec.dot(&ex);
    let big_k = eccentric_longitude(a, h, k, r.dot(&ex), r.dot(&ey));
    Ok(ClassicalEquinoctial {
        a,
        h,
        k,
        p: q1,
        q: q2,
        lambda: normalize_angle(big_k + h * big_k.cos() - k * big_k.sin()),
    })
}

pub fn classical_to_cart(c: &ClassicalEquinoctial, mu: f64, epoch: f64) -> CartesianState {
    let (ex, ey) = equinoctial_frame(c.p, c.q);
    let big_k = solve_generalized_kepler(c.lambda, c.h, c.k);
    let (x, y, rn) = in_plane_position(c.a, c.h, c.k, big_k);
    let b = (1.0 - c.h * c.h - c.k * c.k).sqrt();
    let beta = 1.0 / (1.0 + b);
    let (s, co) = big_k.sin_cos();
    let n = (mu / c.a.powi(3)).sqrt();
    let fac = n * c.a * c.a / rn;
    let xd = fac * (c.h * c.k * beta * co - (1.0 - c.h * c.h * beta) * s);
    let yd = fac * ((1.0 - c.k * c.k * beta) * co - c.h * c.k * beta * s);
    CartesianState::new(x * ex + y * ey, xd * ex + yd * ey, epoch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::MU_EARTH;
    use crate::coords::{cart_to_kep, kep_to_cart};
    use approx::assert_relative_eq;

    fn target() -> KeplerianElements {
        KeplerianElements::osculating(
            6975.0874,
            0.0040111,
            98.1521f64.to_radians(),
            19.9669f64.to_radians(),
            0.7,
            2.1,
        )
    }

    #[test]
    fn circular_and_equatorial_limits() {
        let k = KeplerianElements::osculating(7000.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        let q = kep_to_equinoctial(&k).unwrap();
        assert_eq!((q.f, q.g, q.h, q.k), (0.0, 0.0, 0.0, 0.0));
        assert_relative_eq!(q.p, 7000.0);
    }

    #[test]
    fn target_orbit_round_trip() {
        let k = target();
        let q = kep_to_equinoctial(&k).unwrap();
        let t = (0.5 * k.i).tan();
        assert_relative_eq!(q.p, k.a * (1.0 - k.e * k.e), max_relative = 1e-15);
        assert_relative_eq!(q.h, t * k.raan.cos(), max_relative = 1e-15);
        assert_relative_eq!(q.k, t * k.raan.sin(), max_relative = 1e-15);
        let back = equinoctial_to_kep(&q, ElementKind::Osculating);
        assert_relative_eq!(back.a, k.a, max_relative = 1e-12);
        assert_relative_eq!(back.e, k.e, max_relative = 1e-12);
        assert_relative_eq!(back.i, k.i, max_relative = 1e-12);
        assert_relative_eq!(back.raan, k.raan, max_relative = 1e-12);
        assert_relative_eq!(back.argp, k.argp, max_relative = 1e-12);
        assert_relative_eq!(back.ta, k.ta, max_relative = 1e-12);
    }

    #[test]
    fn retrograde_equatorial_rejected() {
        let k = KeplerianElements::osculating(7000.0, 0.01, std::f64::consts::PI, 0.0, 0.0, 0.0);
        assert!(matches!(
            kep_to_equinoctial(&k),
            Err(Error::RetrogradeEquatorial)
        ));
    }

    #[test]
    fn cartesian_paths_agree_with_keplerian_path() {
        let k = target();
        let x = kep_to_cart(&k, MU_EARTH, 0.0);
        let q_direct = cart_to_equinoctial(&x, MU_EARTH).unwrap();
        let q_kep = kep_to_equinoctial(&cart_to_kep(&x, MU_EARTH).unwrap()).unwrap();
        assert_relative_eq!(q_direct.p, q_kep.p, max_relative = 1e-12);
        assert_relative_eq!(q_direct.f, q_kep.f, epsilon = 1e-13);
        assert_relative_eq!(q_direct.g, q_kep.g, epsilon = 1e-13);
        assert_relative_eq!(q_direct.h, q_kep.h, epsilon = 1e-13);
        assert_relative_eq!(q_direct.k, q_kep.k, epsilon = 1e-13);
        assert_relative_eq!(q_direct.l, q_kep.l, epsilon = 1e-12);
        let y = equinoctial_to_cart(&q_direct, MU_EARTH, 0.0);
        assert_relative_eq!(y.r, x.r, max_relative = 1e-12);
        assert_relative_eq!(y.v, x.v, max_relative = 1e-12);

        let c_direct = cart_to_classical(&x, MU_EARTH).unwrap();
        let c_kep = kep_to_classical(&k).unwrap();
        assert_relative_eq!(c_direct.a, c_kep.a, max_relative = 1e-12);
        assert_relative_eq!(c_direct.h, c_kep.h, epsilon = 1e-12);
        assert_relative_eq!(c_direct.k, c_kep.k, epsilon = 1e-12);
        assert_relative_eq!(c_direct.p, c_kep.p, epsilon = 1e-13);
        assert_relative_eq!(c_direct.q, c_kep.q, epsilon = 1e-13);
        assert_relative_eq!(c_direct.lambda, c_kep.lambda, epsilon = 1e-11);
        let z = classical_to_cart(&c_direct, MU_EARTH, 0.0);
        assert_relative_eq!(z.r, x.r, max_relative = 1e-12);
        assert_relative_eq!(z.v, x.v, max_relative = 1e-12);
    }
}
