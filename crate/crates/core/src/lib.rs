//! Convex model-predictive guidance for low-thrust orbit transfers.

pub mod analysis;
pub mod constants;
pub mod coords;
pub mod dynamics;
pub mod error;
pub mod guidance;
pub mod reference;
pub mod socp;
pub mod tracker;

pub use constants::Body;
pub use error::{Error, Result};
