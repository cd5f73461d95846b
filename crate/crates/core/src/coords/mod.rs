//! Element sets and the conversions between them.
//!
//! Cartesian states are the truth representation used by the propagator.
//! Keplerian elements (osculating or mean) describe targets and references,
//! modified equinoctial elements feed the Δv′ metric, and generalized
//! equinoctial elements (GEqOE) carry the linearized tracking dynamics.

mod cartesian;
mod equinoctial;
mod frames;
mod geqoe;
mod keplerian;
mod mean;

pub use cartesian::CartesianState;
pub use equinoctial::{
    cart_to_classical, cart_to_equinoctial, classical_to_cart, equinoctial_to_cart,
    equinoctial_to_kep, kep_to_classical, kep_to_equinoctial, ClassicalEquinoctial,
    EquinoctialElements,
};
pub use frames::{rtn_basis, rtn_to_inertial};
pub use geqoe::{cart_to_geqoe, geqoe_to_cart, GeqoeState};
pub use keplerian::{
    cart_to_kep, eccentric_to_mean, eccentric_to_true, kep_to_cart, mean_to_eccentric,
    mean_to_true, true_to_eccentric, true_to_mean, ElementKind, KeplerianElements,
};
pub use mean::{cart_to_mean, mean_to_osc, osc_to_mean};
