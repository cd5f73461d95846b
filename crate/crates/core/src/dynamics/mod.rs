//! Low-fidelity dynamics: two-body + J2 + drag + thrust, the duty-cycle gate,
//! numerical propagation and step-map sensitivities.

pub mod atmosphere;
pub mod eclipse;
mod force;
pub mod integrator;
mod propagate;
mod stm;

pub use atmosphere::atmospheric_density;
pub use eclipse::{eclipse_indicator, gate_margin, EclipseModel, SolarGeometry};
pub use force::{j2_acceleration, total_acceleration, ForceModel, SpacecraftConfig};
pub use propagate::{GatedArc, Propagator, FIXED_MAX_STEP};
pub use stm::{compute_stm, compute_stm_chain, geqoe_step, StepNode, StmPair};
