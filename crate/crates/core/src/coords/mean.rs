//! First-order J2 mean elements (Brouwer–Lyddane short-period terms).
//!
//! Only the short-period corrections are applied. The long-period terms carry
//! a `1/(1 − 5cos²i)` factor that is singular at the critical inclination and
//! scale with `e·J2`, which is negligible for the near-circular orbits this
//! crate targets.

use super::{cart_to_kep, CartesianState, ElementKind, KeplerianElements};
use crate::constants::{normalize_angle, wrap_pi, Body};
use crate::error::{Error, Result};

/// Largest eccentricity accepted by the mean-element theory.
const MAX_ECCENTRICITY: f64 = 0.1;

fn check(k: &KeplerianElements) -> Result<()> {
    k.validate()?;
    if k.e >= MAX_ECCENTRICITY {
        return Err(Error::InvalidElements(format!(
            "mean-element theory needs e < {MAX_ECCENTRICITY}, got {}",
            k.e
        )));
    }
    Ok(())
}

/// Adds the first-order J2 short-period oscillations to mean elements.
pub fn mean_to_osc(mean: &KeplerianElements, body: &Body) -> Result<KeplerianElements> {
    check(mean)?;
    if body.j2 == 0.0 {
        return Ok(mean.with_kind(ElementKind::Osculating));
    }
    let a = mean.a;
    let e = mean.e;
    let i = mean.i;
    let w = mean.argp;
    let raan = mean.raan;
    let m = mean.mean_anomaly();
    let f = mean.ta;

    let g2 = 0.5 * body.j2 * (body.radius / a).powi(2);
    let eta2 = 1.0 - e * e;
    let eta = eta2.sqrt();
    let g2p = g2 / (eta2 * eta2);
    let (sf, cf) = f.sin_cos();
    let ar = (1.0 + e * cf) / eta2;
    let c = i.cos();
    let c2 = c * c;
    let s2 = 1.0 - c2;
    let eta6 = eta2 * eta2 * eta2;
    let c2wf = (2.0 * w + 2.0 * f).cos();
    let s2wf = (2.0 * w + 2.0 * f).sin();
    let c2w1f = (2.0 * w + f).cos();
    let s2w1f = (2.0 * w + f).sin();
    let c2w3f = (2.0 * w + 3.0 * f).cos();
    let s2w3f = (2.0 * w + 3.0 * f).sin();

    let a_o = a + a
        * g2
        * ((3.0 * c2 - 1.0) * (ar.powi(3) - 1.0 / (eta2 * eta)) + 3.0 * s2 * ar.powi(3) * c2wf);

    let de = 0.5
        * eta2
        * (g2
            * ((3.0 * c2 - 1.0) / eta6
                * (e * eta + e / (1.0 + eta) + 3.0 * cf + 3.0 * e * cf * cf + e * e * cf.powi(3))
                + 3.0 * s2 / eta6
                    * (e + 3.0 * cf + 3.0 * e * cf * cf + e * e * cf.powi(3))
                    * c2wf)
            - g2p * s2 * (3.0 * c2w1f + c2w3f));

    let di = 0.5 * g2p * c * s2.sqrt() * (3.0 * c2wf + 3.0 * e * c2w1f + e * c2w3f);

    let fmm = wrap_pi(f - m) + e * sf;
    let per = 3.0 * s2wf + 3.0 * e * s2w1f + e * s2w3f;
    let lam_o =
        m + w + raan + 0.25 * g2p * (-6.0 * (1.0 - 5.0 * c2) * fmm + (3.0 - 5.0 * c2) * per)
            - 0.5 * g2p * c * (6.0 * fmm - per);

    let e_dm = -0.25
        * g2p
        * eta2
        * eta
        * (2.0 * (3.0 * c2 - 1.0) * (ar * ar * eta2 + ar + 1.0) * sf
            + 3.0
                * s2
                * ((-ar * ar * eta2 - ar + 1.0) * s2w1f
                    + (ar * ar * eta2 + ar + 1.0 / 3.0) * s2w3f));

    let d_raan = -0.5 * g2p * c * (6.0 * fmm - per);

    let (sm, cm) = m.sin_cos();
    let d1 = (e + de) * sm + e_dm * cm;
    let d2 = (e + de) * cm - e_dm * sm;
    let m_o = d1.atan2(d2);
    let e_o = d1.hypot(d2);

    let (shi, chi) = (0.5 * i).sin_cos();
    let (so, co) = raan.sin_cos();
    let d3 = (shi + 0.5 * chi * di) * so + shi * d_raan * co;
    let d4 = (shi + 0.5 * chi * di) * co - shi * d_raan * so;
    let raan_o = d3.atan2(d4);
    let i_o = 2.0 * d3.hypot(d4).min(1.0).asin();
    let w_o = lam_o - m_o - raan_o;

    Ok(KeplerianElements {
        a: a_o,
        e: e_o,
        i: i_o,
        raan: normalize_angle(raan_o),
        argp: normalize_angle(w_o),
        ta: 0.0,
        kind: ElementKind::Osculating,
    }
    .with_mean_anomaly(m_o))
}

/// Nonsingular parameters used by the fixed-point inversion:
/// `(a, e·cos ω, e·sin ω, i, Ω, ω + M)`.
fn to_params(k: &KeplerianElements) -> [f64; 6] {
    [
        k.a,
        k.e * k.argp.cos(),
        k.e * k.argp.sin(),
        k.i,
        k.raan,
        k.argp + k.mean_anomaly(),
    ]
}

fn from_params(p: &[f64; 6], kind: ElementKind) -> KeplerianElements {
    let e = p[1].hypot(p[2]);
    let argp = if e > 0.0 { p[2].atan2(p[1]) } else { 0.0 };
    KeplerianElements {
        a: p[0],
        e,
        i: p[3].clamp(0.0, std::f64::consts::PI),
        raan: normalize_angle(p[4]),
        argp: normalize_angle(argp),
        ta: 0.0,
        kind,
    }
    .with_mean_anomaly(p[5] - argp)
}

/// Removes the first-order J2 short-period oscillations by inverting
/// [`mean_to_osc`] with a fixed-point iteration.
pub fn osc_to_mean(osc: &KeplerianElements, body: &Body) -> Result<KeplerianElements> {
    check(osc)?;
    if body.j2 == 0.0 {
        return Ok(osc.with_kind(ElementKind::Mean));
    }
    let target = to_params(osc);
    let mut p = target;
    for _ in 0..60 {
        let trial = from_params(&p, ElementKind::Mean);
        let est = to_params(&mean_to_osc(&trial, body)?);
        let mut delta = [0.0; 6];
        for j in 0..6 {
            delta[j] = target[j] - est[j];
        }
        for j in 4..6 {
            delta[j] = wrap_pi(delta[j]);
        }
        for j in 0..6 {
            p[j] += delta[j];
        }
        let size = (delta[0] / p[0])
            .abs()
            .max(delta[1..].iter().fold(0.0f64, |m, d| m.max(d.abs())));
        if size < 1e-14 {
            break;
        }
    }
    let mean = from_params(&p, ElementKind::Mean);
    check(&mean)?;
    Ok(mean)
}

/// Mean Keplerian elements of a Cartesian state.
pub fn cart_to_mean(x: &CartesianState, body: &Body) -> Result<KeplerianElements> {
    osc_to_mean(&cart_to_kep(x, body.mu)?, body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_j2_is_identity() {
        let body = Body::EARTH.keplerian();
        let k = KeplerianElements::osculating(6728.0, 0.004, 1.7, 0.3, 0.1, 0.8);
        let m = osc_to_mean(&k, &body).unwrap();
        assert_eq!(m.a, k.a);
        assert_eq!(m.ta, k.ta);
        assert_eq!(m.kind, ElementKind::Mean);
    }

    #[test]
    fn round_trip() {
        let body = Body::EARTH;
        let k = KeplerianElements::osculating(6728.0, 0.004, 98.3f64.to_radians(), 0.3, 0.1, 0.8);
        let m = osc_to_mean(&k, &body).unwrap();
        assert!((m.a - k.a).abs() < 10.0);
        let back = mean_to_osc(&m, &body).unwrap();
        assert_relative_eq!(back.a, k.a, max_relative = 1e-10);
        assert!(wrap_pi(back.arg_latitude() - k.arg_latitude()).abs() < 1e-10);
        assert!((back.i - k.i).abs() < 1e-12);
    }

    #[test]
    fn eccentricity_limit_enforced() {
        let k = KeplerianElements::osculating(7000.0, 0.2, 1.0, 0.0, 0.0, 0.0);
        assert!(osc_to_mean(&k, &Body::EARTH).is_err());
    }
}
