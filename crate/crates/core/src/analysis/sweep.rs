//! Reference duty-cycle trade: error-free guidance runs over a set of DC′.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

use super::plot::{Figure, Panel, Series};
use super::scenario::{ErrorSpec, ScenarioFile};
use crate::constants::DAY;
use crate::error::{Error, Result};
use crate::guidance::{initial_reference, run_guidance_with};

/// One sweep point. Guidance fields are empty when the point failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub dc_ref: f64,
    pub reference_tof_days: Option<f64>,
    pub reference_dv_ms: Option<f64>,
    pub tof_days: Option<f64>,
    pub dv_ms: Option<f64>,
    pub recomputations: Option<usize>,
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(dc_ref: f64, e: Error) -> Self {
        SweepRow {
            dc_ref,
            reference_tof_days: None,
            reference_dv_ms: None,
            tof_days: None,
            dv_ms: None,
            recomputations: None,
            error: Some(e.to_string()),
        }
    }
}

fn sweep_point(base: &ScenarioFile, dc: f64) -> SweepRow {
    let mut sc = base.clone();
    sc.guidance.dc_ref = dc;
    sc.errors = ErrorSpec::default();
    let mission = match sc.mission() {
        Ok(m) => m,
        Err(e) => return SweepRow::failed(dc, e),
    };
    let reference = match initial_reference(&mission) {
        Ok(r) => r,
        Err(e) => return SweepRow::failed(dc, e),
    };
    let (ref_tof, ref_dv) = (reference.tof / DAY, reference.dv_total);
    match run_guidance_with(&mission, reference) {
        Ok(log) => SweepRow {
            dc_ref: dc,
            reference_tof_days: Some(ref_tof),
            reference_dv_ms: Some(ref_dv),
            tof_days: Some(log.summary.tof_days),
            dv_ms: Some(log.summary.dv_ms),
            recomputations: Some(log.summary.recomputations),
            error: None,
        },
        Err(e) => SweepRow {
            reference_tof_days: Some(ref_tof),
            reference_dv_ms: Some(ref_dv),
            ..SweepRow::failed(dc, e)
        },
    }
}

/// Runs error-free guidance for every value in `dc_values`, in parallel.
/// Rows keep the input order. Values outside `(0, duty_cycle]` are
/// rejected before anything runs; failures of individual points are
/// recorded in their row.
pub fn dcprime_sweep(scenario: &ScenarioFile, dc_values: &[f64]) -> Result<Vec<SweepRow>> {
    let dc = scenario.spacecraft.duty_cycle;
    if dc_values.is_empty() {
        return Err(Error::Config("sweep needs at least one DC' value".into()));
    }
    if let Some(bad) = dc_values.iter().find(|&&v| !(v > 0.0 && v <= dc)) {
        return Err(Error::Config(format!("DC' = {bad} outside (0, {dc}]")));
    }
    Ok(dc_values
        .par_iter()
        .map(|&v| sweep_point(scenario, v))
        .collect())
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn sweep_figure(rows: &[SweepRow]) -> Figure {
    let pts = |f: fn(&SweepRow) -> Option<f64>| -> Vec<(f64, f64)> {
        rows.iter()
            .filter_map(|r| f(r).map(|y| (r.dc_ref, y)))
            .collect()
    };
    Figure {
        title: "Reference duty cycle trade".into(),
        x_label: "DC'".into(),
        panels: vec![
            Panel {
                title: "Time of flight".into(),
                y_label: "TOF [d]".into(),
                series: vec![
                    Series::line("reference", pts(|r| r.reference_tof_days))
                        .dashed()
                        .with_dots(),
                    Series::line("flown", pts(|r| r.tof_days)).with_dots(),
                ],
                ..Default::default()
            },
            Panel {
                title: "Velocity increment".into(),
                y_label: "dv [m/s]".into(),
                series: vec![
                    Series::line("reference", pts(|r| r.reference_dv_ms))
                        .dashed()
                        .with_dots(),
                    Series::line("flown", pts(|r| r.dv_ms)).with_dots(),
                ],
                ..Default::default()
            },
            Panel {
                title: "Reference recomputations".into(),
                y_label: "count".into(),
                series: vec![Series::line(
                    "recomputations",
                    pts(|r| r.recomputations.map(|n| n as f64)),
                )
                .with_dots()],
                ..Default::default()
            },
        ],
    }
}
