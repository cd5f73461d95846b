//! Scenario files, batch studies and output emission.

pub mod nonlinearity;
pub mod plot;
pub mod runner;
pub mod scenario;
pub mod sweep;

pub use nonlinearity::{
    nonlinearity_index, CoordinateSystem, NonlinearityConfig, NonlinearityCurve, NonlinearityReport,
};
pub use plot::{emit_plots, PlotOutcome, DV_PRIME_SVG, ELEMENTS_SVG};
pub use runner::{resolve_out_dir, run_scenario, RunArtifacts, TableFormat, OUT_DIR_ENV};
pub use scenario::{
    ErrorSpec, GuidanceSpec, InitialElements, OutputSpec, ScenarioFile, TargetElements,
};
pub use sweep::{dcprime_sweep, sweep_figure, write_sweep_csv, SweepRow};
