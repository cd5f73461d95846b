//! Δv′: impulse estimate for closing an element gap, from the maximum-rate
//! Gauss variational equations in modified equinoctial elements.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::constants::Body;
use crate::coords::{cart_to_mean, kep_to_equinoctial, CartesianState, EquinoctialElements};
use crate::error::Result;

/// Which element gaps enter Δv′.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackMode {
    /// Semi-major axis and both inclination-vector components.
    #[default]
    Full,
    /// Semi-major axis only; the orbit plane is free.
    SemiMajorAxis,
}

impl TrackMode {
    fn mask(self) -> Vector3<f64> {
        match self {
            TrackMode::Full => Vector3::new(1.0, 1.0, 1.0),
            TrackMode::SemiMajorAxis => Vector3::new(1.0, 0.0, 0.0),
        }
    }
}

/// Gap-independent factors of Δv′, m/s per (km, 1, 1), evaluated at the
/// current elements.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DvPrimeCoefficients {
    pub c_a: f64,
    pub c_h: f64,
    pub c_k: f64,
}

impl DvPrimeCoefficients {
    pub fn new(current: &EquinoctialElements, mu: f64) -> Self {
        let a = current.semi_major_axis();
        let e = current.eccentricity();
        let (f, g) = (current.f, current.g);
        let s2 = current.s2();
        let sp = (mu / current.p).sqrt();
        DvPrimeCoefficients {
            c_a: 1e3 * (mu / a).sqrt() / (2.0 * a) * ((1.0 - e) / (1.0 + e)).sqrt(),
            c_h: 1e3 * 2.0 * sp * ((1.0 - g * g).sqrt() + f) / s2,
            c_k: 1e3 * 2.0 * sp * ((1.0 - f * f).sqrt() + f) / s2,
        }
    }

    /// Diagonal map from `(Δa, Δh, Δk)` to Δv′ components, with untracked
    /// components zeroed.
    pub fn matrix(&self, mode: TrackMode) -> Matrix3<f64> {
        Matrix3::from_diagonal(
            &Vector3::new(self.c_a, self.c_h, self.c_k).component_mul(&mode.mask()),
        )
    }
}

/// The `(a, h, k)` triple that Δv′ compares.
pub fn gap_elements(q: &EquinoctialElements) -> Vector3<f64> {
    Vector3::new(q.semi_major_axis(), q.h, q.k)
}

/// Δv′ vector `[Δv_a, Δv_h, Δv_k]` (m/s) from `current` to `target`, and its
/// magnitude.
pub fn delta_v_prime(
    current: &EquinoctialElements,
    target: &EquinoctialElements,
    mu: f64,
    mode: TrackMode,
) -> (Vector3<f64>, f64) {
    let gap = gap_elements(target) - gap_elements(current);
    let dv = DvPrimeCoefficients::new(current, mu).matrix(mode) * gap;
    (dv, dv.norm())
}

/// Mean modified equinoctial elements of a Cartesian state.
pub fn mean_equinoctial(x: &CartesianState, body: &Body) -> Result<EquinoctialElements> {
    kep_to_equinoctial(&cart_to_mean(x, body)?)
}

/// Δv′ from an osculating Cartesian state, compared on mean elements.
pub fn delta_v_prime_state(
    x: &CartesianState,
    target: &EquinoctialElements,
    body: &Body,
    mode: TrackMode,
) -> Result<(Vector3<f64>, f64)> {
    Ok(delta_v_prime(
        &mean_equinoctial(x, body)?,
        target,
        body.mu,
        mode,
    ))
}
