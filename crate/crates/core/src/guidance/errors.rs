use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stochastic thrust execution errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThrustErrorModel {
    /// Probability that a whole segment is flown without thrust.
    pub p_misthrust: f64,
    /// Fractional standard deviation of the thrust magnitude.
    pub sigma_t: f64,
    /// Standard deviation of the out-of-plane angle, rad.
    pub sigma_beta: f64,
    pub seed: u64,
    /// Segments at the start of the run flown without thrust regardless of
    /// the draw.
    pub forced_off_segments: usize,
}

impl Default for ThrustErrorModel {
    fn default() -> Self {
        ThrustErrorModel {
            p_misthrust: 0.0,
            sigma_t: 0.0,
            sigma_beta: 0.0,
            seed: 0,
            forced_off_segments: 0,
        }
    }
}

impl ThrustErrorModel {
    /// `(p %, σ_T %, σ_β deg)` as tabulated.
    pub fn from_table(
        p_percent: f64,
        sigma_t_percent: f64,
        sigma_beta_deg: f64,
        seed: u64,
    ) -> Self {
        ThrustErrorModel {
            p_misthrust: p_percent / 100.0,
            sigma_t: sigma_t_percent / 100.0,
            sigma_beta: sigma_beta_deg.to_radians(),
            seed,
            forced_off_segments: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_misthrust) {
            return Err(Error::Config(format!(
                "misthrust probability {} outside [0, 1]",
                self.p_misthrust
            )));
        }
        if !(self.sigma_t >= 0.0 && self.sigma_beta >= 0.0) {
            return Err(Error::Config(
                "error standard deviations must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn is_nominal(&self) -> bool {
        self.p_misthrust == 0.0
            && self.sigma_t == 0.0
            && self.sigma_beta == 0.0
            && self.forced_off_segments == 0
    }
}

/// Controls after error injection.
#[derive(Clone, Debug, PartialEq)]
pub struct ErroredControls {
    pub accels: Vec<Vector3<f64>>,
    pub misthrust: bool,
}

/// Perturbs a segment's planned RTN accelerations. Each segment draws from
/// its own generator stream, so results do not depend on how many draws
/// earlier segments made.
pub fn apply_thrust_errors(
    accels: &[Vector3<f64>],
    model: &ThrustErrorModel,
    segment_index: usize,
) -> ErroredControls {
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    rng.set_stream(segment_index as u64);
    let draw: f64 = rng.random();
    if segment_index < model.forced_off_segments || draw < model.p_misthrust {
        return ErroredControls {
            accels: vec![Vector3::zeros(); accels.len()],
            misthrust: true,
        };
    }
    if model.sigma_t == 0.0 && model.sigma_beta == 0.0 {
        return ErroredControls {
            accels: accels.to_vec(),
            misthrust: false,
        };
    }
    let mag_err = Normal::new(0.0, model.sigma_t).expect("non-negative sigma");
    let beta_err = Normal::new(0.0, model.sigma_beta).expect("non-negative sigma");
    let out = accels
        .iter()
        .map(|a| {
            let dt_frac: f64 = mag_err.sample(&mut rng);
            let db: f64 = beta_err.sample(&mut rng);
            let mag = a.norm();
            if mag == 0.0 {
                return Vector3::zeros();
            }
            let in_plane = (a.x * a.x + a.y * a.y).sqrt();
            let (ur, ut) = if in_plane > 0.0 {
                (a.x / in_plane, a.y / in_plane)
            } else {
                (0.0, 1.0)
            };
            let beta = a.z.atan2(in_plane) + db;
            let m = mag * (1.0 + dt_frac);
            Vector3::new(m * beta.cos() * ur, m * beta.cos() * ut, m * beta.sin())
        })
        .collect();
    ErroredControls {
        accels: out,
        misthrust: false,
    }
}
