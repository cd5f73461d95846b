//! Reference trajectory generation: Edelbaum legs, node-drift matching and
//! the sampled thrust profile.

pub mod edelbaum;
pub mod raan;
pub mod trajectory;

pub use edelbaum::{edelbaum_transfer, EdelbaumLeg, EdelbaumTransfer, LegBurn};
pub use raan::{
    nodal_rate, raan_drift_match, DriftSearch, Schedule, ScheduleKind, TransferGoal, TransferStart,
};
pub use trajectory::{
    build_grid, circular_target, generate_reference, steer_beta, steering_direction, Adjustment,
    Profile, ReferenceConfig, ReferenceContext, ReferencePropagation, ReferenceTrajectory,
    REFERENCE_VERSION,
};
