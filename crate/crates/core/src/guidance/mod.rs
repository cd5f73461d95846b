//! Model-predictive guidance loop: segment tracking, thrust errors, forward
//! propagation and reference regeneration.

pub mod errors;
pub mod log;
pub mod run;

pub use errors::{apply_thrust_errors, ErroredControls, ThrustErrorModel};
pub use log::{
    read_csv, CsvRow, ElementSample, GuidanceLog, NodeRecord, ReferenceSummary, SegmentRecord,
    TerminalSummary, TRACK_STEP,
};
pub use run::{
    forward_propagate_segment, initial_reference, run_guidance, run_guidance_with, FlownSegment,
    GuidanceConfig, Mission, TransferTarget,
};
