//! Scenario execution with artifacts on disk.

use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use super::plot::{emit_plots, PlotOutcome};
use super::scenario::ScenarioFile;
use crate::error::Result;
use crate::guidance::{initial_reference, run_guidance_with, GuidanceLog};

/// Environment variable that overrides the scenario's output directory.
pub const OUT_DIR_ENV: &str = "LOWTHRUST_OUT_DIR";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    #[default]
    Csv,
    Json,
}

impl TableFormat {
    pub fn extension(self) -> &'static str {
        match self {
            TableFormat::Csv => "csv",
            TableFormat::Json => "json",
        }
    }
}

/// Output directory: explicit argument, then [`OUT_DIR_ENV`], then the
/// scenario file, then `out`.
pub fn resolve_out_dir(explicit: Option<&Path>, scenario: Option<&ScenarioFile>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    scenario
        .and_then(|s| s.output.dir.clone())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out"))
}

#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub log: GuidanceLog,
    pub log_json: PathBuf,
    pub trajectory_csv: PathBuf,
    pub plots: PlotOutcome,
}

/// Generates the reference, runs guidance, then writes `<prefix>log.json`,
/// `<prefix>trajectory.csv` and the two plots into `out_dir`. Nothing is
/// written when the run fails.
pub fn run_scenario(scenario: &ScenarioFile, out_dir: &Path) -> Result<RunArtifacts> {
    let mission = scenario.mission()?;
    let reference = initial_reference(&mission)?;
    let log = run_guidance_with(&mission, reference)?;
    std::fs::create_dir_all(out_dir)?;
    let prefix = scenario.output.prefix.as_deref().unwrap_or("");
    let log_json = out_dir.join(format!("{prefix}log.json"));
    let trajectory_csv = out_dir.join(format!("{prefix}trajectory.csv"));
    std::fs::write(&log_json, log.to_json()?)?;
    log.write_csv(BufWriter::new(File::create(&trajectory_csv)?))?;
    let plots = emit_plots(&log, out_dir)?;
    Ok(RunArtifacts {
        log,
        log_json,
        trajectory_csv,
        plots,
    })
}
