use nalgebra::{Vector3, Vector6};
use serde::{Deserialize, Serialize};

use crate::coords::{cart_to_geqoe, cart_to_mean, CartesianState};
use crate::dynamics::{Propagator, SolarGeometry};
use crate::error::{Error, Result};
use crate::reference::{steer_beta, steering_direction, ReferenceTrajectory};

/// Discretization of one tracking segment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SegmentConfig {
    pub n_orbits: usize,
    pub nodes_per_orbit: usize,
    /// Objective weight of the terminal Δv′ relative to the spent Δv.
    pub dv_prime_weight: f64,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        SegmentConfig {
            n_orbits: 5,
            nodes_per_orbit: 36,
            dv_prime_weight: 2.0,
        }
    }
}

impl SegmentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_orbit < 8 {
            return Err(Error::Config(format!(
                "nodes per orbit must be at least 8, got {}",
                self.nodes_per_orbit
            )));
        }
        if self.n_orbits < 1 {
            return Err(Error::Config("a segment spans at least one orbit".into()));
        }
        if !(self.dv_prime_weight > 0.0) {
            return Err(Error::Config(format!(
                "dv_prime_weight must be positive, got {}",
                self.dv_prime_weight
            )));
        }
        Ok(())
    }

    /// Steps per segment.
    pub fn steps(&self) -> usize {
        self.n_orbits * self.nodes_per_orbit
    }
}

/// Initial guess over one segment. Node `k` runs from `t[k]` to `t[k+1]`;
/// the last entry of `states` and `masses` is the terminal node, which
/// carries no thrust.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentGuess {
    pub t: Vec<f64>,
    pub states: Vec<CartesianState>,
    /// Scaled GEqOE states.
    pub geqoe: Vec<Vector6<f64>>,
    /// RTN acceleration held over each step, km/s².
    pub accels: Vec<Vector3<f64>>,
    pub masses: Vec<f64>,
    /// Thrust gate over each step with the actual duty cycle.
    pub eta: Vec<f64>,
}

impl SegmentGuess {
    pub fn steps(&self) -> usize {
        self.accels.len()
    }

    pub fn dt(&self, k: usize) -> f64 {
        self.t[k + 1] - self.t[k]
    }
}

/// Gate evaluated at the middle of the step starting from `x`, from its mean
/// argument of latitude advanced by half a step.
pub fn midpoint_eta(
    x: &CartesianState,
    dt: f64,
    prop: &Propagator,
    solar: &SolarGeometry,
    duty_cycle: f64,
) -> Result<(f64, f64)> {
    let body = prop.model.conversion_body();
    let mean = cart_to_mean(x, &body)?;
    let l_mid = mean.mean_arg_latitude() + mean.mean_motion(body.mu) * 0.5 * dt;
    let eta = solar
        .model(x.epoch + 0.5 * dt, mean.raan, mean.i, duty_cycle)
        .indicator(l_mid);
    Ok((eta, l_mid))
}

/// Builds the guess over `times` from the reference thrust profile, flown
/// from `(x0, m0)` with the same fixed-step map used for linearization.
/// The guess acceleration never exceeds the available `T_max/m`.
pub fn initial_guess_segment(
    x0: &CartesianState,
    m0: f64,
    reference: &ReferenceTrajectory,
    times: &[f64],
    prop: &Propagator,
    solar: &SolarGeometry,
) -> Result<SegmentGuess> {
    if times.len() < 2 {
        return Err(Error::Config("a segment needs at least two nodes".into()));
    }
    if (times[0] - x0.epoch).abs() > 1e-6 {
        return Err(Error::Config(format!(
            "segment starts at {} but the state is at {}",
            times[0], x0.epoch
        )));
    }
    let body = prop.model.conversion_body();
    let cfg = &prop.cfg;
    let steps = times.len() - 1;
    let mut states = Vec::with_capacity(steps + 1);
    let mut geqoe = Vec::with_capacity(steps + 1);
    let mut accels = Vec::with_capacity(steps);
    let mut masses = Vec::with_capacity(steps + 1);
    let mut eta = Vec::with_capacity(steps);
    let mut x = *x0;
    x.epoch = times[0];
    let mut m = m0;
    for k in 0..steps {
        let (t0, t1) = (times[k], times[k + 1]);
        let dt = t1 - t0;
        let (e, l_mid) =
            midpoint_eta(&x, dt, prop, solar, cfg.duty_cycle).map_err(|err| err.at_node(k))?;
        let f_avg = 0.5 * (reference.f_at(t0) + reference.f_at(t1));
        let mag = (e * f_avg / reference.dc_ref).min(e * cfg.max_accel(m));
        let beta_avg = 0.5 * (reference.beta_at(t0) + reference.beta_at(t1));
        let a = if mag > 0.0 {
            steering_direction(steer_beta(beta_avg, l_mid)) * mag
        } else {
            Vector3::zeros()
        };
        states.push(x);
        geqoe.push(
            cart_to_geqoe(&x, &body)
                .map_err(|err| err.at_node(k))?
                .to_scaled(&body),
        );
        masses.push(m);
        accels.push(a);
        eta.push(e);
        let (x1, m1) = prop.step_fixed(&x, m, dt, &a);
        x = x1;
        x.epoch = t1;
        m = m1;
    }
    states.push(x);
    geqoe.push(
        cart_to_geqoe(&x, &body)
            .map_err(|err| err.at_node(steps))?
            .to_scaled(&body),
    );
    masses.push(m);
    Ok(SegmentGuess {
        t: times.to_vec(),
        states,
        geqoe,
        accels,
        masses,
        eta,
    })
}
