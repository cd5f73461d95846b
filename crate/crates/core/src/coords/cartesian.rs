use nalgebra::{Vector3, Vector6};
use serde::{Deserialize, Serialize};

/// Inertial position (km) and velocity (km/s) at `epoch` seconds after the
/// scenario start.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CartesianState {
    pub r: Vector3<f64>,
    pub v: Vector3<f64>,
    pub epoch: f64,
}

impl CartesianState {
    pub fn new(r: Vector3<f64>, v: Vector3<f64>, epoch: f64) -> Self {
        CartesianState { r, v, epoch }
    }

    pub fn from_vector(x: &Vector6<f64>, epoch: f64) -> Self {
        CartesianState {
            r: x.fixed_rows::<3>(0).into_owned(),
            v: x.fixed_rows::<3>(3).into_owned(),
            epoch,
        }
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(self.r.x, self.r.y, self.r.z, self.v.x, self.v.y, self.v.z)
    }

    pub fn radius(&self) -> f64 {
        self.r.norm()
    }

    pub fn speed(&self) -> f64 {
        self.v.norm()
    }

    pub fn angular_momentum(&self) -> Vector3<f64> {
        self.r.cross(&self.v)
    }

    /// Two-body specific energy, km²/s².
    pub fn keplerian_energy(&self, mu: f64) -> f64 {
        0.5 * self.v.norm_squared() - mu / self.r.norm()
    }
}
