use nalgebra::{SVector, Vector3};

use super::force::{ForceModel, SpacecraftConfig};
use super::integrator::{integrate_adaptive, integrate_fixed, Tolerances};
use crate::coords::CartesianState;
use crate::error::{Error, Result};

type State7 = SVector<f64, 7>;

/// Longest substep used by the fixed-step map, s.
pub const FIXED_MAX_STEP: f64 = 15.0;
/// Spacing of gate samples used to bracket thrust switches, s.
const GATE_SAMPLE: f64 = 20.0;

/// Numerical propagator for position, velocity and mass.
///
/// Thrust is a zero-order hold in the RTN frame of the instantaneous state;
/// mass flow is `ṁ = −m·|a|/(Isp·g0)`.
#[derive(Clone, Copy, Debug)]
pub struct Propagator {
    pub model: ForceModel,
    pub cfg: SpacecraftConfig,
    pub tol: Tolerances,
}

/// Result of a gated propagation.
#[derive(Clone, Debug)]
pub struct GatedArc {
    pub state: CartesianState,
    pub mass: f64,
    /// Times at which the gate changed state, s.
    pub switches: Vec<f64>,
    /// Time spent with the engine on, s.
    pub on_time: f64,
}

fn pack(x: &CartesianState, m: f64) -> State7 {
    State7::from_column_slice(&[x.r.x, x.r.y, x.r.z, x.v.x, x.v.y, x.v.z, m])
}

fn unpack(y: &State7, epoch: f64) -> (CartesianState, f64) {
    (
        CartesianState::new(
            Vector3::new(y[0], y[1], y[2]),
            Vector3::new(y[3], y[4], y[5]),
            epoch,
        ),
        y[6],
    )
}

impl Propagator {
    pub fn new(model: ForceModel, cfg: SpacecraftConfig) -> Self {
        Propagator {
            model,
            cfg,
            tol: Tolerances::default(),
        }
    }

    /// Two-body + J2 + drag for the given spacecraft.
    pub fn low_fidelity(cfg: &SpacecraftConfig) -> Self {
        Propagator::new(ForceModel::low_fidelity(cfg), *cfg)
    }

    fn rhs(&self, y: &State7, a_rtn: &Vector3<f64>) -> State7 {
        let (x, m) = unpack(y, 0.0);
        let acc = self.model.total_acceleration(&x, m, a_rtn);
        let mdot = -m * a_rtn.norm() / self.cfg.exhaust_velocity();
        State7::from_column_slice(&[x.v.x, x.v.y, x.v.z, acc.x, acc.y, acc.z, mdot])
    }

    /// Propagates from `x0.epoch` to `t1` with constant RTN thrust acceleration
    /// `a_rtn` (km/s², already including any gating).
    pub fn propagate_arc(
        &self,
        x0: &CartesianState,
        m0: f64,
        t1: f64,
        a_rtn: &Vector3<f64>,
    ) -> Result<(CartesianState, f64)> {
        if t1 < x0.epoch {
            return Err(Error::Config(format!(
                "propagation end {t1} precedes start {}",
                x0.epoch
            )));
        }
        let f = |_t: f64, y: &State7| self.rhs(y, a_rtn);
        match integrate_adaptive(f, x0.epoch, pack(x0, m0), t1, &self.tol) {
            Ok((y, _)) => Ok(unpack(&y, t1)),
            Err(fail) => {
                let (x, m) = unpack(&fail.y, fail.t);
                Err(Error::Integration {
                    t: fail.t,
                    last_state: Box::new(x),
                    last_mass: m,
                    reason: fail.reason,
                })
            }
        }
    }

    pub fn coast(&self, x0: &CartesianState, m0: f64, t1: f64) -> Result<(CartesianState, f64)> {
        self.propagate_arc(x0, m0, t1, &Vector3::zeros())
    }

    /// Piecewise propagation over `times` with a zero-order hold of
    /// `eta[j]·controls[j]` on `[times[j], times[j+1]]`.
    pub fn propagate(
        &self,
        x0: &CartesianState,
        m0: f64,
        times: &[f64],
        controls: &[Vector3<f64>],
        eta: &[f64],
    ) -> Result<(CartesianState, f64)> {
        let mut x = *x0;
        let mut m = m0;
        for j in 0..times.len().saturating_sub(1) {
            let a = controls[j] * eta[j];
            let (x1, m1) = self
                .propagate_arc(&x, m, times[j + 1], &a)
                .map_err(|e| e.at_node(j))?;
            x = x1;
            m = m1;
        }
        Ok((x, m))
    }

    /// Fixed-step propagation over `dt` seconds; a smooth map of the initial
    /// state, used for finite-difference sensitivities.
    pub fn step_fixed(
        &self,
        x0: &CartesianState,
        m0: f64,
        dt: f64,
        a_rtn: &Vector3<f64>,
    ) -> (CartesianState, f64) {
        let f = |_t: f64, y: &State7| self.rhs(y, a_rtn);
        let y = integrate_fixed(f, x0.epoch, pack(x0, m0), x0.epoch + dt, FIXED_MAX_STEP);
        unpack(&y, x0.epoch + dt)
    }

    /// Propagates to `t1` with thrust `a_on` applied whenever
    /// `gate(state) ≥ 0`. Gate sign changes are located to 1e-6 s and
    /// reported as switching times.
    pub fn propagate_gated<G>(
        &self,
        x0: &CartesianState,
        m0: f64,
        t1: f64,
        a_on: &Vector3<f64>,
        gate: G,
    ) -> Result<GatedArc>
    where
        G: Fn(&CartesianState) -> Result<f64>,
    {
        self.propagate_gated_with(x0, m0, t1, |x, _| Ok((gate(x)?, *a_on)))
    }

    /// As [`Propagator::propagate_gated`], with the thrust direction and
    /// magnitude re-evaluated from the state at every gate sample (held for
    /// at most 20 s). `law(state, mass)` returns `(gate, a_on)`. Arcs between
    /// samples use the fixed-step map.
    pub fn propagate_gated_with<L>(
        &self,
        x0: &CartesianState,
        m0: f64,
        t1: f64,
        law: L,
    ) -> Result<GatedArc>
    where
        L: Fn(&CartesianState, f64) -> Result<(f64, Vector3<f64>)>,
    {
        let mut x = *x0;
        let mut m = m0;
        let (g0, mut a_on) = law(&x, m)?;
        let mut on = g0 >= 0.0;
        let mut switches = Vec::new();
        let mut on_time = 0.0;
        let zero = Vector3::zeros();
        while x.epoch < t1 {
            let t_next = (x.epoch + GATE_SAMPLE).min(t1);
            let a = if on { a_on } else { zero };
            let (xn, mn) = self.step_fixed(&x, m, t_next - x.epoch, &a);
            let (gn, an) = law(&xn, mn)?;
            if (gn >= 0.0) == on {
                if on {
                    on_time += t_next - x.epoch;
                }
                x = xn;
                m = mn;
                a_on = an;
                continue;
            }
            // Bracketed sign change: bisect on the arc flown with the old gate value.
            let (mut lo, mut hi) = (x.epoch, t_next);
            while hi - lo > 1e-6 {
                let mid = 0.5 * (lo + hi);
                let (xm, mm) = self.step_fixed(&x, m, mid - x.epoch, &a);
                if (law(&xm, mm)?.0 >= 0.0) == on {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let ts = 0.5 * (lo + hi);
            let (xs, ms) = self.step_fixed(&x, m, ts - x.epoch, &a);
            if on {
                on_time += ts - x.epoch;
            }
            switches.push(ts);
            a_on = law(&xs, ms)?.1;
            x = xs;
            m = ms;
            on = !on;
        }
        Ok(GatedArc {
            state: x,
            mass: m,
            switches,
            on_time,
        })
    }
}
