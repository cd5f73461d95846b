//! Finite-difference sensitivities of the GEqOE step map.

use nalgebra::{Matrix6, Matrix6x3, Vector3, Vector6};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::propagate::Propagator;
use crate::constants::wrap_pi;
use crate::coords::{cart_to_geqoe, geqoe_to_cart, GeqoeState};
use crate::error::Result;

/// Perturbation applied to each scaled GEqOE component.
const STATE_STEP: f64 = 1e-5;
/// Perturbation applied to each acceleration component, km/s².
const ACCEL_STEP: f64 = 1e-8;

/// Linearized step map `δx(i+1) = A·δx(i) + B·δa(i)` in scaled GEqOE
/// coordinates (see [`GeqoeState::to_scaled`]); `B` is per km/s² of RTN
/// acceleration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StmPair {
    pub a_mat: Matrix6<f64>,
    pub b_mat: Matrix6x3<f64>,
}

/// Linearization point of one step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepNode {
    /// Scaled GEqOE state at the start of the step.
    pub x: Vector6<f64>,
    pub epoch: f64,
    pub mass: f64,
    /// RTN acceleration held over the step, km/s².
    pub accel: Vector3<f64>,
    pub dt: f64,
}

/// Nonlinear step map in scaled GEqOE coordinates. The generalized longitude
/// of the output is unwrapped to stay continuous with the input.
pub fn geqoe_step(
    prop: &Propagator,
    x: &Vector6<f64>,
    epoch: f64,
    mass: f64,
    accel: &Vector3<f64>,
    dt: f64,
) -> Result<Vector6<f64>> {
    let body = prop.model.conversion_body();
    let g = GeqoeState::from_scaled(x, &body);
    let cart = geqoe_to_cart(&g, &body, epoch)?;
    let (c1, _) = prop.step_fixed(&cart, mass, dt, accel);
    let mut y = cart_to_geqoe(&c1, &body)?.to_scaled(&body);
    let predicted = x[3] + x[0] * dt / body.time_unit();
    y[3] = predicted + wrap_pi(y[3] - predicted);
    Ok(y)
}

pub fn compute_stm(prop: &Propagator, node: &StepNode) -> Result<StmPair> {
    let mut a_mat = Matrix6::zeros();
    let mut b_mat = Matrix6x3::zeros();
    for j in 0..6 {
        let mut xp = node.x;
        let mut xm = node.x;
        xp[j] += STATE_STEP;
        xm[j] -= STATE_STEP;
        let yp = geqoe_step(prop, &xp, node.epoch, node.mass, &node.accel, node.dt)?;
        let ym = geqoe_step(prop, &xm, node.epoch, node.mass, &node.accel, node.dt)?;
        a_mat.set_column(j, &((yp - ym) / (2.0 * STATE_STEP)));
    }
    for j in 0..3 {
        let mut ap = node.accel;
        let mut am = node.accel;
        ap[j] += ACCEL_STEP;
        am[j] -= ACCEL_STEP;
        let yp = geqoe_step(prop, &node.x, node.epoch, node.mass, &ap, node.dt)?;
        let ym = geqoe_step(prop, &node.x, node.epoch, node.mass, &am, node.dt)?;
        b_mat.set_column(j, &((yp - ym) / (2.0 * ACCEL_STEP)));
    }
    Ok(StmPair { a_mat, b_mat })
}

/// STMs for a chain of nodes, evaluated in parallel. The result order and
/// values do not depend on thread scheduling.
pub fn compute_stm_chain(prop: &Propagator, nodes: &[StepNode]) -> Result<Vec<StmPair>> {
    nodes
        .par_iter()
        .enumerate()
        .map(|(i, n)| compute_stm(prop, n).map_err(|e| e.at_node(i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{Body, G0, MU_EARTH};
    use crate::coords::{kep_to_cart, KeplerianElements};
    use crate::dynamics::{ForceModel, SpacecraftConfig};

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

    fn node(prop: &Propagator, dt: f64, accel: Vector3<f64>) -> StepNode {
        let body = prop.model.conversion_body();
        let k =
            KeplerianElements::osculating(6728.1363, 0.004, 98.3f64.to_radians(), 0.27, 0.3, 1.1);
        let x = cart_to_geqoe(&kep_to_cart(&k, MU_EARTH, 0.0), &body)
            .unwrap()
            .to_scaled(&body);
        StepNode {
            x,
            epoch: 0.0,
            mass: 640.0,
            accel,
            dt,
        }
    }

    #[test]
    fn identity_limit() {
        let prop = Propagator::low_fidelity(&cfg());
        let dt = 1e-6;
        let stm = compute_stm(&prop, &node(&prop, dt, Vector3::new(0.0, 9e-8, 0.0))).unwrap();
        // The longitude advances as ν·dt, the only first-order term in dt.
        let mut expected = Matrix6::identity();
        expected[(3, 0)] = dt / prop.model.body.time_unit();
        assert!(
            (stm.a_mat - expected).amax() < 1e-9,
            "{}",
            stm.a_mat - expected
        );
        // Response to a 1e-6 km/s² acceleration, well above the thrust levels used.
        assert!(stm.b_mat.amax() * 1e-6 < 1e-9);
    }

    #[test]
    fn nu_row_is_conserved_without_control() {
        let prop = Propagator::new(ForceModel::two_body(), cfg());
        let stm = compute_stm(&prop, &node(&prop, 150.0, Vector3::zeros())).unwrap();
        let row = stm.a_mat.row(0);
        assert!((row[0] - 1.0).abs() < 1e-10);
        for j in 1..6 {
            assert!(row[j].abs() < 1e-10, "{row}");
        }
        let _ = Body::EARTH;
    }
}
