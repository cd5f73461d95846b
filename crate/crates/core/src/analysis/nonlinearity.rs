//! Nonlinearity index of the J2 flow expressed in different coordinate
//! systems: `v = sup_i ‖Φ(x_i) − Φ(x̄)‖₂ / ‖Φ(x̄)‖₂` over initial states
//! `x_i` sampled on an uncertainty ellipsoid around `x̄`.

use nalgebra::{Matrix6, Vector6};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{wrap_pi, Body};
use crate::coords::{
    cart_to_classical, cart_to_equinoctial, cart_to_geqoe, cart_to_kep, classical_to_cart,
    equinoctial_to_cart, geqoe_to_cart, kep_to_cart, CartesianState, ClassicalEquinoctial,
    EquinoctialElements, GeqoeState, KeplerianElements,
};
use crate::dynamics::{ForceModel, Propagator, SpacecraftConfig};
use crate::error::{Error, Result};

/// Finite-difference step in nondimensional coordinates.
const FD_STEP: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordinateSystem {
    Cartesian,
    Keplerian,
    ClassicalEquinoctial,
    ModifiedEquinoctial,
    Geqoe,
}

impl CoordinateSystem {
    pub const ALL: [CoordinateSystem; 5] = [
        CoordinateSystem::Cartesian,
        CoordinateSystem::Keplerian,
        CoordinateSystem::ClassicalEquinoctial,
        CoordinateSystem::ModifiedEquinoctial,
        CoordinateSystem::Geqoe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CoordinateSystem::Cartesian => "Cartesian",
            CoordinateSystem::Keplerian => "Keplerian",
            CoordinateSystem::ClassicalEquinoctial => "classical equinoctial",
            CoordinateSystem::ModifiedEquinoctial => "modified equinoctial",
            CoordinateSystem::Geqoe => "GEqOE",
        }
    }

    /// Components that are angles.
    fn angles(self) -> &'static [usize] {
        match self {
            CoordinateSystem::Cartesian => &[],
            CoordinateSystem::Keplerian => &[3, 4, 5],
            CoordinateSystem::ClassicalEquinoctial | CoordinateSystem::ModifiedEquinoctial => &[5],
            CoordinateSystem::Geqoe => &[3],
        }
    }

    /// Nondimensional coordinates: lengths in body radii, times in
    /// `sqrt(R³/μ)`.
    pub fn to_coords(self, x: &CartesianState, body: &Body) -> Result<Vector6<f64>> {
        let du = body.distance_unit();
        let vu = du / body.time_unit();
        Ok(match self {
            CoordinateSystem::Cartesian => Vector6::new(
                x.r.x / du,
                x.r.y / du,
                x.r.z / du,
                x.v.x / vu,
                x.v.y / vu,
                x.v.z / vu,
            ),
            CoordinateSystem::Keplerian => {
                let k = cart_to_kep(x, body.mu)?;
                Vector6::new(k.a / du, k.e, k.i, k.raan, k.argp, k.mean_anomaly())
            }
            CoordinateSystem::ClassicalEquinoctial => {
                let c = cart_to_classical(x, body.mu)?;
                Vector6::new(c.a / du, c.h, c.k, c.p, c.q, c.lambda)
            }
            CoordinateSystem::ModifiedEquinoctial => {
                let q = cart_to_equinoctial(x, body.mu)?;
                Vector6::new(q.p / du, q.f, q.g, q.h, q.k, q.l)
            }
            CoordinateSystem::Geqoe => cart_to_geqoe(x, body)?.to_scaled(body),
        })
    }

    pub fn from_coords(self, y: &Vector6<f64>, body: &Body, epoch: f64) -> Result<CartesianState> {
        let du = body.distance_unit();
        let vu = du / body.time_unit();
        Ok(match self {
            CoordinateSystem::Cartesian => CartesianState::from_vector(
                &Vector6::new(
                    y[0] * du,
                    y[1] * du,
                    y[2] * du,
                    y[3] * vu,
                    y[4] * vu,
                    y[5] * vu,
                ),
                epoch,
            ),
            CoordinateSystem::Keplerian => {
                let k = KeplerianElements::osculating(y[0] * du, y[1], y[2], y[3], y[4], 0.0)
                    .with_mean_anomaly(y[5]);
                k.validate()?;
                kep_to_cart(&k, body.mu, epoch)
            }
            CoordinateSystem::ClassicalEquinoctial => classical_to_cart(
                &ClassicalEquinoctial {
                    a: y[0] * du,
                    h: y[1],
                    k: y[2],
                    p: y[3],
                    q: y[4],
                    lambda: y[5],
                },
                body.mu,
                epoch,
            ),
            CoordinateSystem::ModifiedEquinoctial => equinoctial_to_cart(
                &EquinoctialElements {
                    p: y[0] * du,
                    f: y[1],
                    g: y[2],
                    h: y[3],
                    k: y[4],
                    l: y[5],
                },
                body.mu,
                epoch,
            ),
            CoordinateSystem::Geqoe => {
                geqoe_to_cart(&GeqoeState::from_scaled(y, body), body, epoch)?
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NonlinearityConfig {
    pub orbits: usize,
    pub samples: usize,
    /// Position and velocity uncertainty, km and km/s.
    pub sigma_r: f64,
    pub sigma_v: f64,
    pub seed: u64,
}

impl Default for NonlinearityConfig {
    fn default() -> Self {
        NonlinearityConfig {
            orbits: 15,
            samples: 16,
            sigma_r: 1.0,
            sigma_v: 1e-3,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearityCurve {
    pub system: CoordinateSystem,
    /// Index after `1..=orbits` orbits.
    pub index: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearityReport {
    /// Matrix norm in the index definition.
    pub norm: String,
    pub config: NonlinearityConfig,
    pub curves: Vec<NonlinearityCurve>,
}

impl NonlinearityReport {
    pub fn curve(&self, system: CoordinateSystem) -> &NonlinearityCurve {
        self.curves
            .iter()
            .find(|c| c.system == system)
            .expect("every system is reported")
    }

    /// One row per orbit count, one column per coordinate system.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["orbits".to_string()];
        header.extend(self.curves.iter().map(|c| c.system.name().to_string()));
        out.write_record(&header)?;
        for k in 0..self.config.orbits {
            let mut row = vec![(k + 1).to_string()];
            row.extend(self.curves.iter().map(|c| format!("{:e}", c.index[k])));
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn figure(&self) -> super::plot::Figure {
        use super::plot::{Figure, Panel, Series};
        let series = self
            .curves
            .iter()
            .map(|c| {
                Series::line(
                    c.system.name(),
                    c.index
                        .iter()
                        .enumerate()
                        .map(|(k, v)| ((k + 1) as f64, *v))
                        .collect(),
                )
                .with_dots()
            })
            .collect();
        Figure {
            title: "Nonlinearity index".into(),
            x_label: "orbits".into(),
            panels: vec![Panel {
                title: format!("{} norm, {} samples", self.norm, self.config.samples),
                y_label: "index".into(),
                series,
                log_y: true,
                ..Default::default()
            }],
        }
    }
}

/// Near-circular 350 km orbit at 99.22° used for the coordinate comparison.
pub fn reference_orbit() -> CartesianState {
    let a = crate::constants::R_EARTH + 350.0;
    kep_to_cart(
        &KeplerianElements::osculating(a, 1e-3, 99.22f64.to_radians(), 0.5, 0.3, 0.0),
        crate::constants::MU_EARTH,
        0.0,
    )
}

/// Cartesian states after each of `orbits` periods, starting from the
/// coordinates `y0`.
fn flow(
    system: CoordinateSystem,
    y0: &Vector6<f64>,
    prop: &Propagator,
    epoch: f64,
    period: f64,
    orbits: usize,
) -> Result<Vec<Vector6<f64>>> {
    let body = prop.model.conversion_body();
    let mut x = system.from_coords(y0, &body, epoch)?;
    let mut out = Vec::with_capacity(orbits);
    let mut prev = *y0;
    for k in 1..=orbits {
        let (x1, _) = prop.coast(&x, 1.0, epoch + k as f64 * period)?;
        x = x1;
        let mut y = system.to_coords(&x, &body)?;
        for &j in system.angles() {
            y[j] = prev[j] + wrap_pi(y[j] - prev[j]);
        }
        out.push(y);
        prev = y;
    }
    Ok(out)
}

/// STMs of the flow at each orbit count, by central differences.
fn stms(
    system: CoordinateSystem,
    x: &CartesianState,
    prop: &Propagator,
    period: f64,
    orbits: usize,
) -> Result<Vec<Matrix6<f64>>> {
    let body = prop.model.conversion_body();
    let y0 = system.to_coords(x, &body)?;
    let mut phi = vec![Matrix6::zeros(); orbits];
    for j in 0..6 {
        let mut yp = y0;
        let mut ym = y0;
        yp[j] += FD_STEP;
        ym[j] -= FD_STEP;
        let fp = flow(system, &yp, prop, x.epoch, period, orbits)?;
        let fm = flow(system, &ym, prop, x.epoch, period, orbits)?;
        for k in 0..orbits {
            let mut d = fp[k] - fm[k];
            for &a in system.angles() {
                d[a] = wrap_pi(d[a]);
            }
            phi[k].set_column(j, &(d / (2.0 * FD_STEP)));
        }
    }
    Ok(phi)
}

fn spectral_norm(m: &Matrix6<f64>) -> f64 {
    m.singular_values().max()
}

/// Evaluates the index in every coordinate system under J2-only dynamics.
pub fn nonlinearity_index(
    x0: &CartesianState,
    cfg: &NonlinearityConfig,
) -> Result<NonlinearityReport> {
    if cfg.samples < 8 {
        return Err(Error::Config(format!(
            "at least 8 samples are needed, got {}",
            cfg.samples
        )));
    }
    if cfg.orbits < 1 {
        return Err(Error::Config("at least one orbit is needed".into()));
    }
    let sc = SpacecraftConfig {
        m0: 1.0,
        t_max: 1e-3,
        isp: 1000.0,
        g0: crate::constants::G0,
        duty_cycle: 1.0,
        cd: 2.2,
        area: 1.0,
    };
    let prop = Propagator::new(ForceModel::j2_only(), sc);
    let body = prop.model.conversion_body();
    let period = body.period(cart_to_kep(x0, body.mu)?.a);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut states = vec![*x0];
    for _ in 0..cfg.samples {
        let u: Vector6<f64> = Vector6::from_fn(|_, _| StandardNormal.sample(&mut rng));
        let u = u / u.norm();
        let mut x = *x0;
        x.r += u.fixed_rows::<3>(0) * cfg.sigma_r;
        x.v += u.fixed_rows::<3>(3) * cfg.sigma_v;
        states.push(x);
    }

    let jobs: Vec<(CoordinateSystem, usize)> = CoordinateSystem::ALL
        .iter()
        .flat_map(|&s| (0..states.len()).map(move |i| (s, i)))
        .collect();
    let results: Vec<Vec<Matrix6<f64>>> = jobs
        .par_iter()
        .map(|&(s, i)| stms(s, &states[i], &prop, period, cfg.orbits))
        .collect::<Result<_>>()?;

    let per = states.len();
    let curves = CoordinateSystem::ALL
        .iter()
        .enumerate()
        .map(|(si, &system)| {
            let block = &results[si * per..(si + 1) * per];
            let nominal = &block[0];
            let index = (0..cfg.orbits)
                .map(|k| {
                    let base = spectral_norm(&nominal[k]);
                    block[1..]
                        .iter()
                        .map(|p| spectral_norm(&(p[k] - nominal[k])) / base)
                        .fold(0.0, f64::max)
                })
                .collect();
            NonlinearityCurve { system, index }
        })
        .collect();
    Ok(NonlinearityReport {
        norm: "spectral (matrix 2-norm)".into(),
        config: *cfg,
        curves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_round_trips() {
        let body = Body::EARTH;
        let x = reference_orbit();
        for s in CoordinateSystem::ALL {
            let y = s.to_coords(&x, &body).unwrap();
            let back = s.from_coords(&y, &body, 0.0).unwrap();
            assert!(
                (back.r - x.r).norm() < 1e-8 && (back.v - x.v).norm() < 1e-11,
                "{s:?}"
            );
        }
    }

    #[test]
    fn zero_uncertainty_gives_zero_index() {
        let cfg = NonlinearityConfig {
            orbits: 1,
            samples: 8,
            sigma_r: 0.0,
            sigma_v: 0.0,
            seed: 1,
        };
        let rep = nonlinearity_index(&reference_orbit(), &cfg).unwrap();
        for c in &rep.curves {
            assert_eq!(c.index, vec![0.0]);
        }
    }
}
