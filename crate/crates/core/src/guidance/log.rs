use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

use crate::coords::CartesianState;
use crate::error::Result;
use crate::reference::ScheduleKind;
use crate::socp::SolverStatus;

/// State and applied control at the start of one step. The last record of
/// a run carries zero acceleration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub t: f64,
    pub state: CartesianState,
    pub mass: f64,
    /// RTN acceleration applied over the following step, km/s².
    pub accel: Vector3<f64>,
    pub eta: f64,
    /// Cumulative velocity increment at `t`, m/s.
    pub dv_cum: f64,
}

/// One flown segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub index: usize,
    /// Index into [`GuidanceLog::references`].
    pub reference: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
    pub status: SolverStatus,
    pub iterations: usize,
    pub misthrust: bool,
    /// Planned Δv′ from the convex solution, m/s.
    pub dv_prime_planned: f64,
    /// Δv′ of the guess terminal state, m/s.
    pub dv_prime_guess: f64,
    /// Δv′ after forward propagation, m/s.
    pub dv_prime: f64,
    pub objective: f64,
    pub guess_objective: f64,
    /// Δv spent over the segment, m/s.
    pub dv_segment: f64,
    /// Steps whose planned acceleration exceeded `T_max/m` and was clipped.
    pub bound_violations: usize,
    /// The reference was regenerated after this segment.
    pub recompute: bool,
    /// Mean elements reached at `t_end`, node unwrapped next to the reference.
    pub flown_end: ElementSample,
    /// Reference elements at `t_end`.
    pub reference_end: ElementSample,
}

/// Mean elements at one instant, for plotting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ElementSample {
    pub t: f64,
    pub a_km: f64,
    pub i_deg: f64,
    /// Unwrapped node, deg.
    pub raan_deg: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSummary {
    pub t0: f64,
    pub kind: ScheduleKind,
    /// m/s.
    pub dv_total: f64,
    /// s.
    pub tof: f64,
    pub nodes: usize,
    /// Δv′ of the unadjusted and adjusted forward propagations, m/s.
    pub dv_prime_unadjusted: Option<f64>,
    pub dv_prime_adjusted: Option<f64>,
    /// Reference elements sampled about every [`TRACK_STEP`] seconds.
    pub track: Vec<ElementSample>,
}

/// Sampling interval of [`ReferenceSummary::track`], s.
pub const TRACK_STEP: f64 = 3600.0;

/// Terminal errors against the target, mean elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TerminalSummary {
    pub da_km: f64,
    pub di_deg: Option<f64>,
    pub draan_deg: Option<f64>,
    pub tof_days: f64,
    pub dv_ms: f64,
    pub dv_prime_ms: f64,
    pub final_mass: f64,
    pub recomputations: usize,
    pub segments: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuidanceLog {
    pub nodes: Vec<NodeRecord>,
    pub segments: Vec<SegmentRecord>,
    pub references: Vec<ReferenceSummary>,
    /// Times at which the reference was regenerated, s.
    pub recompute_times: Vec<f64>,
    pub summary: TerminalSummary,
}

/// Flat CSV row.
#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub t_s: f64,
    pub x_km: f64,
    pub y_km: f64,
    pub z_km: f64,
    pub vx_kms: f64,
    pub vy_kms: f64,
    pub vz_kms: f64,
    pub m_kg: f64,
    #[serde(rename = "aR_kms2")]
    pub a_r_kms2: f64,
    #[serde(rename = "aT_kms2")]
    pub a_t_kms2: f64,
    #[serde(rename = "aN_kms2")]
    pub a_n_kms2: f64,
    pub eta: f64,
    pub dv_cum_ms: f64,
}

impl From<&NodeRecord> for CsvRow {
    fn from(n: &NodeRecord) -> Self {
        CsvRow {
            t_s: n.t,
            x_km: n.state.r.x,
            y_km: n.state.r.y,
            z_km: n.state.r.z,
            vx_kms: n.state.v.x,
            vy_kms: n.state.v.y,
            vz_kms: n.state.v.z,
            m_kg: n.mass,
            a_r_kms2: n.accel.x,
            a_t_kms2: n.accel.y,
            a_n_kms2: n.accel.z,
            eta: n.eta,
            dv_cum_ms: n.dv_cum,
        }
    }
}

impl From<CsvRow> for NodeRecord {
    fn from(r: CsvRow) -> Self {
        NodeRecord {
            t: r.t_s,
            state: CartesianState::new(
                Vector3::new(r.x_km, r.y_km, r.z_km),
                Vector3::new(r.vx_kms, r.vy_kms, r.vz_kms),
                r.t_s,
            ),
            mass: r.m_kg,
            accel: Vector3::new(r.a_r_kms2, r.a_t_kms2, r.a_n_kms2),
            eta: r.eta,
            dv_cum: r.dv_cum_ms,
        }
    }
}

impl GuidanceLog {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Writes the per-node time series.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for n in &self.nodes {
            out.serialize(CsvRow::from(n))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Reads a per-node time series written by [`GuidanceLog::write_csv`].
pub fn read_csv<R: Read>(r: R) -> Result<Vec<NodeRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut out = Vec::new();
    for row in rdr.deserialize::<CsvRow>() {
        out.push(row?.into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_order() {
        let log = GuidanceLog {
            nodes: vec![NodeRecord {
                t: 1.5,
                state: CartesianState::new(
                    Vector3::new(7000.0, 0.1, -0.2),
                    Vector3::new(0.0, 7.5, 1e-3),
                    1.5,
                ),
                mass: 800.0,
                accel: Vector3::new(0.0, 3.1e-8, -1.0 / 3.0 * 1e-8),
                eta: 1.0,
                dv_cum: 0.123456789,
            }],
            segments: vec![],
            references: vec![],
            recompute_times: vec![],
            summary: TerminalSummary {
                da_km: 0.0,
                di_deg: None,
                draan_deg: None,
                tof_days: 0.0,
                dv_ms: 0.0,
                dv_prime_ms: 0.0,
                final_mass: 800.0,
                recomputations: 0,
                segments: 0,
            },
        };
        let mut buf = Vec::new();
        log.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "t_s,x_km,y_km,z_km,vx_kms,vy_kms,vz_kms,m_kg,aR_kms2,aT_kms2,aN_kms2,eta,dv_cum_ms\n"
        ));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), log.nodes);
    }
}
