use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use super::edelbaum::{EdelbaumLeg, LegBurn};
use super::raan::{
    nodal_rate, raan_drift_match, DriftSearch, Schedule, ScheduleKind, TransferGoal, TransferStart,
};
use crate::constants::{normalize_angle, wrap_pi, Body};
use crate::coords::{cart_to_mean, CartesianState, EquinoctialElements};
use crate::dynamics::{Propagator, SolarGeometry, SpacecraftConfig};
use crate::error::{Error, Result};
use crate::tracker::{delta_v_prime_state, TrackMode};

pub const REFERENCE_VERSION: u32 = 1;

/// Out-of-plane angle with the sign that moves the inclination in the
/// direction of `beta_signed` at mean argument of latitude `l`. The sign
/// flips at `l = π/2` and `l = 3π/2`.
pub fn steer_beta(beta_signed: f64, l: f64) -> f64 {
    let mag = beta_signed.abs();
    let l = normalize_angle(l);
    let negative = if beta_signed >= 0.0 {
        l > FRAC_PI_2 && l <= 3.0 * FRAC_PI_2
    } else {
        !(l >= FRAC_PI_2 && l < 3.0 * FRAC_PI_2)
    };
    if negative {
        -mag
    } else {
        mag
    }
}

/// RTN thrust direction `[0, cos β, sin β]`.
pub fn steering_direction(beta: f64) -> Vector3<f64> {
    Vector3::new(0.0, beta.cos(), beta.sin())
}

/// Sampled reference profiles. Times are seconds since the scenario epoch;
/// equal consecutive times mark a jump, with the later sample holding from
/// that instant on.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub t: Vec<f64>,
    /// Duty-averaged thrust acceleration, km/s².
    pub f_t: Vec<f64>,
    /// Steering angle magnitude, signed by the direction of the inclination
    /// change, rad.
    pub beta: Vec<f64>,
    /// Cumulative velocity increment, m/s.
    pub dv: Vec<f64>,
    pub mass: Vec<f64>,
    /// Mean semi-major axis (km), inclination and unwrapped node (rad).
    pub a: Vec<f64>,
    pub inc: Vec<f64>,
    pub raan: Vec<f64>,
}

impl Profile {
    fn push(&mut self, t: f64, f_t: f64, beta: f64, dv: f64, mass: f64, a: f64, inc: f64) {
        self.t.push(t);
        self.f_t.push(f_t);
        self.beta.push(beta);
        self.dv.push(dv);
        self.mass.push(mass);
        self.a.push(a);
        self.inc.push(inc);
        self.raan.push(0.0);
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Linear interpolation of `col` at `t`, clamped to the end values.
    pub fn interp(&self, col: &[f64], t: f64) -> f64 {
        let n = self.t.len();
        if t <= self.t[0] {
            return col[0];
        }
        if t >= self.t[n - 1] {
            return col[n - 1];
        }
        let k = self.t.partition_point(|&x| x <= t);
        let (t0, t1) = (self.t[k - 1], self.t[k]);
        let w = (t - t0) / (t1 - t0);
        col[k - 1] + w * (col[k] - col[k - 1])
    }
}

/// Outcome of the thrust-profile adjustment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Adjustment {
    /// Δv′ at the end of the unadjusted forward propagation, m/s.
    pub dv_r: f64,
    /// Δv′ at the end of the adjusted forward propagation, m/s.
    pub dv_prime_after: f64,
}

/// Reference trajectory: time grid, thrust and steering profiles, and the
/// mean element histories the tracker aims at.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTrajectory {
    pub version: u32,
    /// Node times: uniform spacing `P/N` plus thrust switching times, s.
    pub grid: Vec<f64>,
    pub profile: Profile,
    /// m/s.
    pub dv_total: f64,
    /// s.
    pub tof: f64,
    pub dc_ref: f64,
    pub nodes_per_orbit: usize,
    /// Orbital period at the start, s.
    pub period: f64,
    pub mode: TrackMode,
    pub schedule: Schedule,
    pub adjustment: Option<Adjustment>,
}

/// Reference generation settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReferenceConfig {
    pub dc_ref: f64,
    pub nodes_per_orbit: usize,
    /// Spacing of profile samples, s.
    pub profile_step: f64,
    pub search: DriftSearch,
    /// Run the forward-propagation adjustment of the thrust profile.
    pub adjust: bool,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        ReferenceConfig {
            dc_ref: 0.4,
            nodes_per_orbit: 36,
            profile_step: 300.0,
            search: DriftSearch::default(),
            adjust: true,
        }
    }
}

/// Everything needed to fly a reference forward.
#[derive(Clone, Copy, Debug)]
pub struct ReferenceContext<'a> {
    pub prop: &'a Propagator,
    pub cfg: &'a SpacecraftConfig,
    pub solar: &'a SolarGeometry,
}

/// Terminal state of a reference forward propagation.
#[derive(Clone, Debug)]
pub struct ReferencePropagation {
    pub state: CartesianState,
    pub mass: f64,
    pub switches: Vec<f64>,
    pub dv_prime: f64,
}

impl ReferenceTrajectory {
    pub fn t0(&self) -> f64 {
        self.profile.t[0]
    }

    pub fn tf(&self) -> f64 {
        *self.profile.t.last().unwrap()
    }

    pub fn f_at(&self, t: f64) -> f64 {
        self.profile.interp(&self.profile.f_t, t)
    }

    pub fn beta_at(&self, t: f64) -> f64 {
        self.profile.interp(&self.profile.beta, t)
    }

    pub fn dv_at(&self, t: f64) -> f64 {
        self.profile.interp(&self.profile.dv, t)
    }

    /// Mean `(a, i, Ω)` at `t`.
    pub fn elements_at(&self, t: f64) -> (f64, f64, f64) {
        let p = &self.profile;
        (
            p.interp(&p.a, t),
            p.interp(&p.inc, t),
            normalize_angle(p.interp(&p.raan, t)),
        )
    }

    /// Circular target elements at `t`, in the form Δv′ compares.
    pub fn target_at(&self, t: f64) -> EquinoctialElements {
        let (a, i, raan) = self.elements_at(t);
        circular_target(a, i, raan)
    }

    /// Forward-propagates the osculating start state under the reference
    /// thrust, gated with the reference duty cycle.
    pub fn propagate(
        &self,
        ctx: &ReferenceContext,
        x0: &CartesianState,
        m0: f64,
    ) -> Result<ReferencePropagation> {
        let body = ctx.prop.model.conversion_body();
        let dc = self.dc_ref;
        let law = |x: &CartesianState, _m: f64| -> Result<(f64, Vector3<f64>)> {
            let t = x.epoch;
            let f = self.f_at(t);
            if f <= 0.0 {
                return Ok((1.0, Vector3::zeros()));
            }
            let mean = cart_to_mean(x, &body)?;
            let l = mean.mean_arg_latitude();
            let gate = ctx.solar.model(t, mean.raan, mean.i, dc).margin(l);
            let beta = steer_beta(self.beta_at(t), l);
            Ok((gate, steering_direction(beta) * (f / dc)))
        };
        let arc = ctx.prop.propagate_gated_with(x0, m0, self.tf(), law)?;
        let (_, dv_prime) =
            delta_v_prime_state(&arc.state, &self.target_at(self.tf()), &body, self.mode)?;
        Ok(ReferencePropagation {
            state: arc.state,
            mass: arc.mass,
            switches: arc.switches,
            dv_prime,
        })
    }

    /// Ramps the cumulative Δv by `dv_r` linearly in time and rebuilds mass
    /// and thrust profiles from the rocket equation.
    pub fn adjusted(&self, cfg: &SpacecraftConfig, dv_r: f64) -> ReferenceTrajectory {
        let mut out = self.clone();
        if dv_r == 0.0 {
            return out;
        }
        let (t0, tf) = (self.t0(), self.tf());
        let ve = cfg.exhaust_velocity() * 1e3;
        let m0 = self.profile.mass[0];
        let p = &mut out.profile;
        for j in 0..p.len() {
            let dv_adj = self.profile.dv[j] + (p.t[j] - t0) / (tf - t0) * dv_r;
            p.dv[j] = dv_adj;
            p.mass[j] = m0 / (dv_adj / ve).exp();
            if self.profile.f_t[j] > 0.0 {
                p.f_t[j] = self.dc_ref * cfg.max_accel(p.mass[j]);
            }
        }
        out.dv_total = self.dv_total + dv_r;
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: ReferenceTrajectory = serde_json::from_str(s)?;
        if r.version != REFERENCE_VERSION {
            return Err(Error::Config(format!(
                "unsupported reference version {}",
                r.version
            )));
        }
        Ok(r)
    }
}

pub fn circular_target(a: f64, i: f64, raan: f64) -> EquinoctialElements {
    let t = (0.5 * i).tan();
    EquinoctialElements {
        p: a,
        f: 0.0,
        g: 0.0,
        h: t * raan.cos(),
        k: t * raan.sin(),
        l: 0.0,
    }
}

/// Samples the schedule into profiles starting at `t0`.
fn sample_schedule(
    s: &Schedule,
    t0: f64,
    cfg: &SpacecraftConfig,
    dc_ref: f64,
    step: f64,
    body: &Body,
) -> Profile {
    let mut p = Profile::default();
    let mut dv_before = 0.0;
    let sample_leg =
        |p: &mut Profile, leg: &EdelbaumLeg, burn: &LegBurn, start: f64, dv_before: f64| {
            if burn.duration == 0.0 {
                return;
            }
            let n = (burn.duration / step).ceil().max(1.0) as usize;
            for k in 0..=n {
                let tau = burn.duration * k as f64 / n as f64;
                let s = burn.dv_at(tau);
                let (a, i) = leg.elements_at(s, body.mu);
                let f = dc_ref * cfg.max_accel(burn.mass_at(tau));
                let beta = leg.inclination_sign() * leg.beta_at(s);
                p.push(
                    start + tau,
                    f,
                    beta,
                    dv_before + s * 1e3,
                    burn.mass_at(tau),
                    a,
                    i,
                );
            }
        };
    let coast = |p: &mut Profile, a: f64, i: f64, start: f64, end: f64, dv: f64, m: f64| {
        let n = ((end - start) / step).ceil().max(1.0) as usize;
        for k in 0..=n {
            p.push(
                start + (end - start) * k as f64 / n as f64,
                0.0,
                0.0,
                dv,
                m,
                a,
                i,
            );
        }
    };
    sample_leg(&mut p, &s.leg1, &s.burn1, t0, dv_before);
    dv_before += s.leg1.dv * 1e3;
    if s.wait > 0.0 || p.is_empty() {
        coast(
            &mut p,
            s.a_d,
            s.i_d,
            t0 + s.t_leg1_end(),
            t0 + s.t_leg2_start(),
            dv_before,
            s.burn1.m_end,
        );
    }
    if s.burn2.duration > 0.0 {
        // Thrust resumes exactly at the leg start.
        sample_leg(&mut p, &s.leg2, &s.burn2, t0 + s.t_leg2_start(), dv_before);
    }
    if p.len() == 1 {
        let j = 0;
        let (a, i, m, dv) = (p.a[j], p.inc[j], p.mass[j], p.dv[j]);
        p.push(t0 + s.tof.max(1.0), 0.0, 0.0, dv, m, a, i);
    }
    p
}

/// Integrates the nodal regression along the sampled profile and blends any
/// residual so that the node ends on the target's.
fn fill_raan(p: &mut Profile, raan0: f64, goal_raan_end: Option<f64>, body: &Body) {
    p.raan[0] = raan0;
    for j in 1..p.len() {
        let r0 = nodal_rate(p.a[j - 1], p.inc[j - 1], body);
        let r1 = nodal_rate(p.a[j], p.inc[j], body);
        p.raan[j] = p.raan[j - 1] + 0.5 * (r0 + r1) * (p.t[j] - p.t[j - 1]);
    }
    if let Some(target) = goal_raan_end {
        let n = p.len();
        let residual = wrap_pi(target - p.raan[n - 1]);
        log::debug!(
            "reference node residual {:.4} deg blended over the profile",
            residual.to_degrees()
        );
        let (t0, tf) = (p.t[0], p.t[n - 1]);
        for j in 0..n {
            p.raan[j] += residual * (p.t[j] - t0) / (tf - t0);
        }
    }
}

/// Uniform `P/N` grid over `[t0, tf]` with the switching times merged in.
pub fn build_grid(
    t0: f64,
    tf: f64,
    period: f64,
    nodes_per_orbit: usize,
    switches: &[f64],
) -> Vec<f64> {
    let dt = period / nodes_per_orbit as f64;
    let n = ((tf - t0) / dt).floor() as usize;
    let mut grid: Vec<f64> = (0..=n).map(|k| t0 + k as f64 * dt).collect();
    if tf - grid[n] > 1.0 {
        grid.push(tf);
    } else {
        grid[n] = tf;
    }
    let mut merged: Vec<f64> = grid.clone();
    for &s in switches {
        if s <= t0 || s >= tf {
            continue;
        }
        let k = grid.partition_point(|&x| x <= s);
        let near = (s - grid[k - 1]).abs() < 1.0 || (k < grid.len() && (grid[k] - s).abs() < 1.0);
        if !near {
            merged.push(s);
        }
    }
    merged.sort_by(|a, b| a.partial_cmp(b).unwrap());
    merged.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    merged
}

/// Builds the reference from an osculating start state to `goal` (mean
/// elements; `goal.raan` is the target node at `x0.epoch`).
pub fn generate_reference(
    ctx: &ReferenceContext,
    x0: &CartesianState,
    m0: f64,
    goal: TransferGoal,
    rc: &ReferenceConfig,
) -> Result<ReferenceTrajectory> {
    let body = ctx.prop.model.conversion_body();
    if !(rc.dc_ref > 0.0 && rc.dc_ref <= ctx.cfg.duty_cycle) {
        return Err(Error::Config(format!(
            "reference duty cycle {} outside (0, {}]",
            rc.dc_ref, ctx.cfg.duty_cycle
        )));
    }
    if rc.nodes_per_orbit < 8 {
        return Err(Error::Config(format!(
            "nodes per orbit must be at least 8, got {}",
            rc.nodes_per_orbit
        )));
    }
    let mean = cart_to_mean(x0, &body)?;
    let start = TransferStart {
        a: mean.a,
        i: mean.i,
        raan: mean.raan,
        mass: m0,
    };
    let schedule = raan_drift_match(start, goal, ctx.cfg, rc.dc_ref, &body, &rc.search)?;
    let t0 = x0.epoch;
    let mut profile = sample_schedule(&schedule, t0, ctx.cfg, rc.dc_ref, rc.profile_step, &body);
    let tf = *profile.t.last().unwrap();
    let raan_end = goal
        .raan
        .map(|r| r + nodal_rate(goal.a, goal.i, &body) * (tf - t0));
    fill_raan(&mut profile, mean.raan, raan_end, &body);
    let period = body.period(mean.a);
    let mode = if goal.raan.is_some() {
        TrackMode::Full
    } else {
        TrackMode::SemiMajorAxis
    };
    let mut reference = ReferenceTrajectory {
        version: REFERENCE_VERSION,
        grid: Vec::new(),
        profile,
        dv_total: schedule.dv,
        tof: tf - t0,
        dc_ref: rc.dc_ref,
        nodes_per_orbit: rc.nodes_per_orbit,
        period,
        mode,
        schedule,
        adjustment: None,
    };
    if schedule.kind == ScheduleKind::PlaneCorrection {
        log::info!(
            "reference closes a node offset of {:.4} deg by thrusting",
            schedule.plane_correction.to_degrees()
        );
    }
    if schedule.tof <= 0.0 {
        reference.grid = vec![t0];
        reference.tof = 0.0;
        return Ok(reference);
    }
    let mut flown = reference.propagate(ctx, x0, m0)?;
    if rc.adjust {
        let dv_r = flown.dv_prime;
        let adjusted = reference.adjusted(ctx.cfg, dv_r);
        let after = adjusted.propagate(ctx, x0, m0)?;
        reference = adjusted;
        reference.adjustment = Some(Adjustment {
            dv_r,
            dv_prime_after: after.dv_prime,
        });
        flown = after;
    }
    reference.grid = build_grid(t0, tf, period, rc.nodes_per_orbit, &flown.switches);
    Ok(reference)
}
