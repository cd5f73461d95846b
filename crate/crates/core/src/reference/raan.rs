//! RAAN matching through J2 nodal regression on an intermediate drift orbit.
//!
//! The schedule is a transfer to the drift orbit `(a_d, i_d)`, a coast on it,
//! and a transfer to the target. Whatever node offset the two transfers leave
//! open is closed by differential nodal regression during the coast.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use super::edelbaum::{EdelbaumLeg, LegBurn};
use crate::constants::{normalize_angle, wrap_pi, Body, DAY, TWO_PI};
use crate::dynamics::SpacecraftConfig;
use crate::error::{Error, Result};

/// Secular J2 nodal rate of a circular orbit, rad/s.
pub fn nodal_rate(a: f64, i: f64, body: &Body) -> f64 {
    let n = (body.mu / a.powi(3)).sqrt();
    -1.5 * body.j2 * (body.radius / a).powi(2) * n * i.cos()
}

/// Node advance accumulated over a burn, by composite Simpson quadrature.
fn leg_drift(leg: &EdelbaumLeg, burn: &LegBurn, body: &Body) -> f64 {
    if burn.duration == 0.0 {
        return 0.0;
    }
    const PANELS: usize = 64;
    let h = burn.duration / PANELS as f64;
    let rate = |t: f64| {
        let (a, i) = leg.elements_at(burn.dv_at(t), body.mu);
        nodal_rate(a, i, body)
    };
    let mut sum = rate(0.0) + rate(burn.duration);
    for k in 1..PANELS {
        sum += rate(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    /// Node free: a single transfer.
    Direct,
    /// Coast on a drift orbit until the nodes line up.
    Drift,
    /// Single transfer; the residual node offset is removed by thrusting.
    PlaneCorrection,
}

/// Orbit at the start of a transfer (mean elements).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferStart {
    pub a: f64,
    pub i: f64,
    pub raan: f64,
    pub mass: f64,
}

/// Target orbit at the start time. `raan = None` leaves the node free.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferGoal {
    pub a: f64,
    pub i: f64,
    pub raan: Option<f64>,
}

/// A three-phase transfer schedule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub kind: ScheduleKind,
    pub a_d: f64,
    pub i_d: f64,
    pub leg1: EdelbaumLeg,
    pub burn1: LegBurn,
    /// Coast on the drift orbit, s.
    pub wait: f64,
    pub leg2: EdelbaumLeg,
    pub burn2: LegBurn,
    /// Node offset left to thrusting, rad.
    pub plane_correction: f64,
    /// m/s, including any plane correction.
    pub dv: f64,
    /// s.
    pub tof: f64,
}

impl Schedule {
    pub fn t_leg1_end(&self) -> f64 {
        self.burn1.duration
    }

    pub fn t_leg2_start(&self) -> f64 {
        self.burn1.duration + self.wait
    }

    fn key(&self) -> (i64, i64, f64) {
        // Quantized so that numerically equal costs fall through to the next key.
        (
            (self.dv * 1e3).round() as i64,
            (self.tof / 60.0).round() as i64,
            self.a_d,
        )
    }

    /// Lexicographic order on (Δv, TOF, a_d).
    pub fn compare(&self, other: &Schedule) -> Ordering {
        let (a, b) = (self.key(), other.key());
        a.0.cmp(&b.0)
            .then(a.1.cmp(&b.1))
            .then(a.2.partial_cmp(&b.2).unwrap_or(Ordering::Equal))
    }
}

/// Drift-orbit search settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriftSearch {
    /// Drift-orbit altitude band, km.
    pub alt_min: f64,
    pub alt_max: f64,
    /// Grid resolution, km and deg.
    pub step_a: f64,
    pub step_i_deg: f64,
    /// Inclination band beyond the end points, deg.
    pub i_margin_deg: f64,
    /// Minimum coast drift angle kept clear of the wrap-around, deg.
    pub guard_deg: f64,
    /// Longest admissible flight time, days.
    pub max_tof_days: f64,
    /// Allow closing small node offsets by thrusting instead of drifting.
    pub plane_correction: bool,
}

impl Default for DriftSearch {
    fn default() -> Self {
        DriftSearch {
            alt_min: 250.0,
            alt_max: 800.0,
            step_a: 2.0,
            step_i_deg: 0.02,
            i_margin_deg: 0.5,
            guard_deg: 0.05,
            max_tof_days: 400.0,
            plane_correction: true,
        }
    }
}

struct Problem<'a> {
    start: TransferStart,
    goal: TransferGoal,
    cfg: &'a SpacecraftConfig,
    dc_ref: f64,
    body: Body,
    search: DriftSearch,
}

impl Problem<'_> {
    fn legs(&self, a_d: f64, i_d: f64) -> Result<(EdelbaumLeg, LegBurn, EdelbaumLeg, LegBurn)> {
        let leg1 = EdelbaumLeg::new(self.start.a, self.start.i, a_d, i_d, self.body.mu)?;
        let burn1 = LegBurn::new(&leg1, self.start.mass, self.cfg, self.dc_ref);
        let leg2 = EdelbaumLeg::new(a_d, i_d, self.goal.a, self.goal.i, self.body.mu)?;
        let burn2 = LegBurn::new(&leg2, burn1.m_end, self.cfg, self.dc_ref);
        Ok((leg1, burn1, leg2, burn2))
    }

    /// Node offset still to be closed after flying both legs without a coast.
    fn open_gap(
        &self,
        leg1: &EdelbaumLeg,
        burn1: &LegBurn,
        leg2: &EdelbaumLeg,
        burn2: &LegBurn,
    ) -> f64 {
        let target_raan = self.goal.raan.unwrap_or(0.0);
        let rate_f = nodal_rate(self.goal.a, self.goal.i, &self.body);
        let t = burn1.duration + burn2.duration;
        target_raan + rate_f * t
            - self.start.raan
            - leg_drift(leg1, burn1, &self.body)
            - leg_drift(leg2, burn2, &self.body)
    }

    fn drift(&self, a_d: f64, i_d: f64) -> Option<Schedule> {
        let (leg1, burn1, leg2, burn2) = self.legs(a_d, i_d).ok()?;
        let gap = self.open_gap(&leg1, &burn1, &leg2, &burn2);
        let rel =
            nodal_rate(a_d, i_d, &self.body) - nodal_rate(self.goal.a, self.goal.i, &self.body);
        let angle = if rel >= 0.0 {
            normalize_angle(gap)
        } else {
            normalize_angle(-gap)
        };
        let aligned = angle < 1e-10 || TWO_PI - angle < 1e-10;
        if !aligned && angle < self.search.guard_deg.to_radians() {
            return None;
        }
        let wait = if aligned {
            0.0
        } else if rel.abs() > 0.0 {
            angle / rel.abs()
        } else {
            return None;
        };
        let tof = burn1.duration + wait + burn2.duration;
        if tof > self.search.max_tof_days * DAY {
            return None;
        }
        Some(Schedule {
            kind: ScheduleKind::Drift,
            a_d,
            i_d,
            leg1,
            burn1,
            wait,
            leg2,
            burn2,
            plane_correction: 0.0,
            dv: (leg1.dv + leg2.dv) * 1e3,
            tof,
        })
    }

    /// Direct transfer; with a fixed node the offset is removed by an
    /// out-of-plane impulse of about `V·sin i·|ΔΩ|`.
    fn direct(&self) -> Result<Schedule> {
        let (leg1, burn1, leg2, burn2) = self.legs(self.start.a, self.start.i)?;
        let (kind, correction) = match self.goal.raan {
            None => (ScheduleKind::Direct, 0.0),
            Some(_) => (
                ScheduleKind::PlaneCorrection,
                wrap_pi(self.open_gap(&leg1, &burn1, &leg2, &burn2)),
            ),
        };
        let vf = (self.body.mu / self.goal.a).sqrt();
        Ok(Schedule {
            kind,
            a_d: self.start.a,
            i_d: self.start.i,
            leg1,
            burn1,
            wait: 0.0,
            leg2,
            burn2,
            plane_correction: correction,
            dv: (leg1.dv + leg2.dv + vf * self.goal.i.sin() * correction.abs()) * 1e3,
            tof: burn1.duration + burn2.duration,
        })
    }

    fn grid(&self) -> Vec<(f64, f64)> {
        let s = &self.search;
        let r = self.body.radius;
        let na = ((s.alt_max - s.alt_min) / s.step_a).floor() as usize;
        let lo = self.start.i.min(self.goal.i) - s.i_margin_deg.to_radians();
        let hi = self.start.i.max(self.goal.i) + s.i_margin_deg.to_radians();
        let step_i = s.step_i_deg.to_radians();
        let ni = ((hi - lo) / step_i).floor() as usize;
        let mut pts = Vec::with_capacity((na + 1) * (ni + 1) + 2);
        for ja in 0..=na {
            for ji in 0..=ni {
                pts.push((
                    r + s.alt_min + ja as f64 * s.step_a,
                    lo + ji as f64 * step_i,
                ));
            }
        }
        pts.push((self.start.a, self.start.i));
        pts.push((self.goal.a, self.goal.i));
        pts
    }

    fn in_bounds(&self, a: f64, i: f64) -> bool {
        let alt = a - self.body.radius;
        let lo = self.start.i.min(self.goal.i) - self.search.i_margin_deg.to_radians();
        let hi = self.start.i.max(self.goal.i) + self.search.i_margin_deg.to_radians();
        let band = |x: f64, l: f64, h: f64| x >= l - 1e-9 && x <= h + 1e-9;
        (band(alt, self.search.alt_min, self.search.alt_max) || (a - self.start.a).abs() < 1e-9)
            && band(i, lo, hi)
    }

    /// Compass search seeded from the best grid point.
    fn refine(&self, seed: Schedule) -> Schedule {
        let mut best = seed;
        let mut da = self.search.step_a;
        let mut di = self.search.step_i_deg.to_radians();
        while da > 1e-3 || di > 1e-8 {
            let mut improved = false;
            for (sa, si) in [(da, 0.0), (-da, 0.0), (0.0, di), (0.0, -di)] {
                let (a, i) = (best.a_d + sa, best.i_d + si);
                if !self.in_bounds(a, i) {
                    continue;
                }
                if let Some(c) = self.drift(a, i) {
                    if c.compare(&best) == Ordering::Less {
                        best = c;
                        improved = true;
                    }
                }
            }
            if !improved {
                da *= 0.5;
                di *= 0.5;
            }
        }
        best
    }
}

/// Picks the fuel-optimal schedule from `start` to `goal`.
pub fn raan_drift_match(
    start: TransferStart,
    goal: TransferGoal,
    cfg: &SpacecraftConfig,
    dc_ref: f64,
    body: &Body,
    search: &DriftSearch,
) -> Result<Schedule> {
    let problem = Problem {
        start,
        goal,
        cfg,
        dc_ref,
        body: *body,
        search: *search,
    };
    if goal.raan.is_none() {
        return problem.direct();
    }
    let candidates: Vec<Schedule> = problem
        .grid()
        .par_iter()
        .filter_map(|&(a, i)| problem.drift(a, i))
        .collect();
    let best_grid = candidates.into_iter().min_by(|x, y| x.compare(y));
    let mut best = best_grid.map(|s| problem.refine(s));
    if search.plane_correction {
        let direct = problem.direct()?;
        if best
            .as_ref()
            .is_none_or(|b| direct.compare(b) == Ordering::Less)
        {
            best = Some(direct);
        }
    }
    best.ok_or_else(|| {
        Error::Infeasible(format!(
            "no drift orbit between {} and {} km altitude closes the node offset within {} days",
            search.alt_min, search.alt_max, search.max_tof_days
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::G0;

    fn cfg() -> SpacecraftConfig {
        SpacecraftConfig {
            m0: 800.0,
            t_max: 0.06,
            isp: 1300.0,
            g0: G0,
            duty_cycle: 0.5,
            cd: 2.2,
            area: 0.01,
        }
    }

    fn upleg(gap_scale: f64) -> (TransferStart, TransferGoal) {
        let raan0 = 15.3f64.to_radians();
        let gap = (19.9669f64 - 15.3).to_radians() * gap_scale;
        (
            TransferStart {
                a: 6728.1363,
                i: 98.3f64.to_radians(),
                raan: raan0,
                mass: 800.0,
            },
            TransferGoal {
                a: 6975.0874,
                i: 98.1521f64.to_radians(),
                raan: Some(raan0 + gap),
            },
        )
    }

    #[test]
    fn sun_synchronous_rate() {
        // About 0.9856 deg/day at 98 deg and 700 km.
        let r = nodal_rate(7078.0, 98.19f64.to_radians(), &Body::EARTH).to_degrees() * DAY;
        assert!((r - 0.9856).abs() < 0.01, "{r}");
    }

    #[test]
    fn aligned_nodes_need_no_wait() {
        let body = Body::EARTH;
        let start = TransferStart {
            a: 7000.0,
            i: 1.0,
            raan: 0.4,
            mass: 800.0,
        };
        let goal = TransferGoal {
            a: 7000.0,
            i: 1.0,
            raan: Some(0.4),
        };
        let s = raan_drift_match(start, goal, &cfg(), 0.4, &body, &DriftSearch::default()).unwrap();
        assert!(s.wait < 60.0, "{s:?}");
        assert!(s.dv < 1e-2, "{s:?}");
    }

    #[test]
    fn upleg_schedule() {
        let (start, goal) = upleg(1.0);
        let s = raan_drift_match(
            start,
            goal,
            &cfg(),
            0.4,
            &Body::EARTH,
            &DriftSearch::default(),
        )
        .unwrap();
        let tof = s.tof / DAY;
        assert!((tof - 60.172).abs() < 0.15 * 60.172, "tof {tof} d, {s:?}");
        assert!(s.dv > 126.0 && s.dv < 149.0, "dv {}", s.dv);
    }

    #[test]
    fn larger_gap_waits_longer() {
        let body = Body::EARTH;
        let search = DriftSearch::default();
        let (s1, g1) = upleg(1.0);
        let (s2, g2) = upleg(2.0);
        let a = raan_drift_match(s1, g1, &cfg(), 0.4, &body, &search).unwrap();
        let b = raan_drift_match(s2, g2, &cfg(), 0.4, &body, &search).unwrap();
        assert!(b.tof > a.tof, "{} vs {}", b.tof / DAY, a.tof / DAY);
    }
}
