use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::errors::{apply_thrust_errors, ThrustErrorModel};
use super::log::{
    ElementSample, GuidanceLog, NodeRecord, ReferenceSummary, SegmentRecord, TerminalSummary,
    TRACK_STEP,
};
use crate::constants::{wrap_pi, Body, DAY};
use crate::coords::{cart_to_mean, CartesianState, EquinoctialElements};
use crate::dynamics::{Propagator, SolarGeometry};
use crate::error::{Error, Result};
use crate::reference::{
    circular_target, generate_reference, nodal_rate, ReferenceConfig, ReferenceContext,
    ReferenceTrajectory, TransferGoal,
};
use crate::socp::{SolverSettings, SolverStatus};
use crate::tracker::{
    build_segment_problem, delta_v_prime_state, initial_guess_segment, midpoint_eta, solve_segment,
    SegmentConfig, TrackMode,
};

/// Target orbit in mean elements; `raan` is the node at scenario time zero,
/// `None` leaves the plane free.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferTarget {
    pub a: f64,
    pub i: f64,
    pub raan: Option<f64>,
}

impl TransferTarget {
    pub fn raan_at(&self, t: f64, prop: &Propagator) -> Option<f64> {
        let body = prop.model.conversion_body();
        self.raan.map(|r| r + nodal_rate(self.a, self.i, &body) * t)
    }

    pub fn goal_at(&self, t: f64, prop: &Propagator) -> TransferGoal {
        TransferGoal {
            a: self.a,
            i: self.i,
            raan: self.raan_at(t, prop),
        }
    }

    pub fn mode(&self) -> TrackMode {
        if self.raan.is_some() {
            TrackMode::Full
        } else {
            TrackMode::SemiMajorAxis
        }
    }

    /// Target elements at `t` as Δv′ compares them.
    pub fn elements_at(&self, t: f64, prop: &Propagator) -> EquinoctialElements {
        circular_target(self.a, self.i, self.raan_at(t, prop).unwrap_or(0.0))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GuidanceConfig {
    /// Δv′ tolerance that triggers reference regeneration, m/s.
    pub epsilon: f64,
    pub reference: ReferenceConfig,
    pub segment: SegmentConfig,
    pub errors: ThrustErrorModel,
    pub solver: SolverSettings,
    pub max_recomputations: usize,
}

impl Default for GuidanceConfig {
    fn default() -> Self {
        GuidanceConfig {
            epsilon: 2.0,
            reference: ReferenceConfig::default(),
            segment: SegmentConfig::default(),
            errors: ThrustErrorModel::default(),
            solver: SolverSettings::default(),
            max_recomputations: 25,
        }
    }
}

impl GuidanceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        self.segment.validate()?;
        self.errors.validate()
    }

    /// Reference settings with the node density of the tracker.
    pub fn reference_config(&self) -> ReferenceConfig {
        ReferenceConfig {
            nodes_per_orbit: self.segment.nodes_per_orbit,
            ..self.reference
        }
    }
}

/// Everything a guidance run needs.
#[derive(Clone, Debug)]
pub struct Mission {
    pub prop: Propagator,
    pub solar: SolarGeometry,
    /// Osculating start state at scenario time `x0.epoch`.
    pub x0: CartesianState,
    pub m0: f64,
    pub target: TransferTarget,
    pub config: GuidanceConfig,
}

/// Result of flying one segment.
#[derive(Clone, Debug)]
pub struct FlownSegment {
    pub nodes: Vec<NodeRecord>,
    pub state: CartesianState,
    pub mass: f64,
    pub dv: f64,
    pub bound_violations: usize,
}

/// Flies `accels` over `times` from `(x0, m0)`, holding each step's
/// acceleration scaled by the gate recomputed on the flown state with the
/// actual duty cycle. Accelerations above `T_max/m` are clipped and counted.
pub fn forward_propagate_segment(
    x0: &CartesianState,
    m0: f64,
    times: &[f64],
    accels: &[Vector3<f64>],
    prop: &Propagator,
    solar: &SolarGeometry,
    dv_start: f64,
) -> Result<FlownSegment> {
    let mut x = *x0;
    let mut m = m0;
    let mut dv = dv_start;
    let mut nodes = Vec::with_capacity(accels.len());
    let mut bound_violations = 0;
    for (k, a) in accels.iter().enumerate() {
        let dt = times[k + 1] - times[k];
        let eta = if a.norm() > 0.0 {
            midpoint_eta(&x, dt, prop, solar, prop.cfg.duty_cycle)
                .map_err(|e| e.at_node(k))?
                .0
        } else {
            0.0
        };
        let mut applied = a * eta;
        // The plan bounds thrust with the guess masses; the engine cannot
        // exceed T_max on the flown mass.
        let cap = prop.cfg.max_accel(m);
        if applied.norm() > cap * (1.0 + 1e-9) {
            bound_violations += 1;
            applied *= cap / applied.norm();
        }
        nodes.push(NodeRecord {
            t: times[k],
            state: x,
            mass: m,
            accel: applied,
            eta,
            dv_cum: dv,
        });
        let (x1, m1) = prop
            .propagate_arc(&x, m, times[k + 1], &applied)
            .map_err(|e| e.at_node(k))?;
        dv += applied.norm() * dt * 1e3;
        x = x1;
        m = m1;
    }
    Ok(FlownSegment {
        nodes,
        state: x,
        mass: m,
        dv: dv - dv_start,
        bound_violations,
    })
}

fn reference_sample(r: &ReferenceTrajectory, t: f64) -> ElementSample {
    let p = &r.profile;
    ElementSample {
        t,
        a_km: p.interp(&p.a, t),
        i_deg: p.interp(&p.inc, t).to_degrees(),
        raan_deg: p.interp(&p.raan, t).to_degrees(),
    }
}

fn flown_sample(x: &CartesianState, near: &ElementSample, body: &Body) -> Result<ElementSample> {
    let mean = cart_to_mean(x, body)?;
    let raan_ref = near.raan_deg.to_radians();
    Ok(ElementSample {
        t: x.epoch,
        a_km: mean.a,
        i_deg: mean.i.to_degrees(),
        raan_deg: (raan_ref + wrap_pi(mean.raan - raan_ref)).to_degrees(),
    })
}

fn reference_track(r: &ReferenceTrajectory) -> Vec<ElementSample> {
    let n = ((r.tf() - r.t0()) / TRACK_STEP).ceil().max(1.0) as usize;
    (0..=n)
        .map(|k| reference_sample(r, r.t0() + (r.tf() - r.t0()) * k as f64 / n as f64))
        .collect()
}

fn summarize_reference(r: &ReferenceTrajectory) -> ReferenceSummary {
    ReferenceSummary {
        t0: r.t0(),
        kind: r.schedule.kind,
        dv_total: r.dv_total,
        tof: r.tof,
        nodes: r.grid.len(),
        dv_prime_unadjusted: r.adjustment.map(|a| a.dv_r),
        dv_prime_adjusted: r.adjustment.map(|a| a.dv_prime_after),
        track: reference_track(r),
    }
}

/// Reference for the mission start, also used by the analysis tools.
pub fn initial_reference(mission: &Mission) -> Result<ReferenceTrajectory> {
    let ctx = ReferenceContext {
        prop: &mission.prop,
        cfg: &mission.prop.cfg,
        solar: &mission.solar,
    };
    generate_reference(
        &ctx,
        &mission.x0,
        mission.m0,
        mission.target.goal_at(mission.x0.epoch, &mission.prop),
        &mission.config.reference_config(),
    )
}

/// Runs the guidance loop from the given starting reference.
pub fn run_guidance_with(mission: &Mission, reference: ReferenceTrajectory) -> Result<GuidanceLog> {
    let cfg = &mission.config;
    cfg.validate()?;
    let prop = &mission.prop;
    let ctx = ReferenceContext {
        prop,
        cfg: &prop.cfg,
        solar: &mission.solar,
    };
    let rc = cfg.reference_config();
    let mode = mission.target.mode();
    let steps = cfg.segment.steps();

    let mut reference = reference;
    let mut references = vec![summarize_reference(&reference)];
    let mut nodes = Vec::new();
    let mut segments: Vec<SegmentRecord> = Vec::new();
    let mut recompute_times = Vec::new();
    let mut x = mission.x0;
    let mut m = mission.m0;
    let mut dv = 0.0;
    let mut n_run = 0usize;
    let mut seg_index = 0usize;

    while n_run + 1 < reference.grid.len() {
        let end = (n_run + steps).min(reference.grid.len() - 1);
        let times = &reference.grid[n_run..=end];
        let guess = initial_guess_segment(&x, m, &reference, times, prop, &mission.solar)?;
        let target = reference.target_at(times[times.len() - 1]);
        let mut problem = build_segment_problem(&guess, target, mode, prop)?;
        problem.dv_prime_weight = cfg.segment.dv_prime_weight;
        let sol = solve_segment(&problem, &cfg.solver);
        let (_, dv_prime_guess) = delta_v_prime_state(
            guess.states.last().unwrap(),
            &target,
            &prop.model.conversion_body(),
            mode,
        )?;
        let mut record = SegmentRecord {
            index: seg_index,
            reference: references.len() - 1,
            t_start: times[0],
            t_end: times[times.len() - 1],
            steps: times.len() - 1,
            status: sol.status,
            iterations: sol.iterations,
            misthrust: false,
            dv_prime_planned: sol.dv_prime,
            dv_prime_guess,
            dv_prime: 0.0,
            objective: sol.objective,
            guess_objective: sol.guess_objective,
            dv_segment: 0.0,
            bound_violations: 0,
            recompute: false,
            flown_end: ElementSample::default(),
            reference_end: reference_sample(&reference, times[times.len() - 1]),
        };
        // A failed solve flies the guess, which respects the thrust bounds,
        // and forces a new reference.
        let optimal = sol.status == SolverStatus::Optimal;
        if !optimal {
            log::warn!(
                "segment {seg_index}: solver returned {:?}, flying the guess",
                sol.status
            );
        }
        let planned = if optimal { &sol.accels } else { &guess.accels };
        let controls = apply_thrust_errors(planned, &cfg.errors, seg_index);
        let flown =
            forward_propagate_segment(&x, m, times, &controls.accels, prop, &mission.solar, dv)?;
        let (_, dv_prime) =
            delta_v_prime_state(&flown.state, &target, &prop.model.conversion_body(), mode)?;
        record.misthrust = controls.misthrust;
        record.dv_prime = dv_prime;
        record.dv_segment = flown.dv;
        record.bound_violations = flown.bound_violations;
        record.flown_end = flown_sample(
            &flown.state,
            &record.reference_end,
            &prop.model.conversion_body(),
        )?;
        nodes.extend(flown.nodes);
        x = flown.state;
        m = flown.mass;
        dv += flown.dv;
        n_run = end;
        let recompute = !optimal || dv_prime > cfg.epsilon;
        log::debug!(
            "segment {seg_index}: t = {:.2} d, {:?} in {} it, planned dv' {:.4}, guess dv' {:.4}, flown dv' {:.4}, dv {:.3}",
            record.t_end / DAY,
            record.status,
            record.iterations,
            record.dv_prime_planned,
            record.dv_prime_guess,
            record.dv_prime,
            dv
        );
        seg_index += 1;
        let done = n_run + 1 >= reference.grid.len();
        if recompute && !done {
            if recompute_times.len() >= cfg.max_recomputations {
                return Err(Error::Guidance(format!(
                    "more than {} reference recomputations",
                    cfg.max_recomputations
                )));
            }
            record.recompute = true;
            recompute_times.push(x.epoch);
            log::info!(
                "segment {}: regenerating reference at t = {:.1} d",
                record.index,
                x.epoch / DAY
            );
            reference = generate_reference(&ctx, &x, m, mission.target.goal_at(x.epoch, prop), &rc)
                .map_err(|e| {
                    Error::Guidance(format!(
                        "reference regeneration at t = {:.0} s failed: {e}",
                        x.epoch
                    ))
                })?;
            references.push(summarize_reference(&reference));
            n_run = 0;
        }
        segments.push(record);
    }

    nodes.push(NodeRecord {
        t: x.epoch,
        state: x,
        mass: m,
        accel: Vector3::zeros(),
        eta: 0.0,
        dv_cum: dv,
    });
    let body = prop.model.conversion_body();
    let mean = cart_to_mean(&x, &body)?;
    let final_target = mission.target.elements_at(x.epoch, prop);
    let (_, dv_prime) = delta_v_prime_state(&x, &final_target, &body, mode)?;
    let summary = TerminalSummary {
        da_km: mean.a - mission.target.a,
        di_deg: mission
            .target
            .raan
            .map(|_| (mean.i - mission.target.i).to_degrees()),
        draan_deg: mission
            .target
            .raan_at(x.epoch, prop)
            .map(|r| wrap_pi(mean.raan - r).to_degrees()),
        tof_days: (x.epoch - mission.x0.epoch) / DAY,
        dv_ms: dv,
        dv_prime_ms: dv_prime,
        final_mass: m,
        recomputations: recompute_times.len(),
        segments: segments.len(),
    };
    Ok(GuidanceLog {
        nodes,
        segments,
        references,
        recompute_times,
        summary,
    })
}

/// Generates the reference and runs the guidance loop.
pub fn run_guidance(mission: &Mission) -> Result<GuidanceLog> {
    mission.config.validate()?;
    let reference = initial_reference(mission)?;
    run_guidance_with(mission, reference)
}
