//! Convex tracking of the reference over one guidance segment.

pub mod dvprime;
pub mod guess;
pub mod problem;

pub use dvprime::{
    delta_v_prime, delta_v_prime_state, gap_elements, mean_equinoctial, DvPrimeCoefficients,
    TrackMode,
};
pub use guess::{initial_guess_segment, midpoint_eta, SegmentConfig, SegmentGuess};
pub use problem::{
    build_segment_problem, solve_segment, solve_segment_dense, SegmentCone, SegmentKkt,
    SegmentProblem, SegmentSolution,
};
