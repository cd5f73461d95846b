use thiserror::Error;

use crate::coords::CartesianState;

#[derive(Debug, Error)]
pub enum Error {
    #[error("orbit is not bound (eccentricity or energy out of range: {0})")]
    Unbound(f64),
    #[error("rectilinear orbit: angular momentum vanishes")]
    Rectilinear,
    #[error("inclination of 180 deg is singular for equinoctial element sets")]
    RetrogradeEquatorial,
    #[error("invalid elements: {0}")]
    InvalidElements(String),
    #[error("integration failed at t = {t:.3} s: {reason}")]
    Integration {
        t: f64,
        last_state: Box<CartesianState>,
        last_mass: f64,
        reason: String,
    },
    #[error("propagation failed at node {node}: {source}")]
    Node {
        node: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("transfer rejected: {0}")]
    Transfer(String),
    #[error("no feasible drift orbit: {0}")]
    Infeasible(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("guidance aborted: {0}")]
    Guidance(String),
    #[error("scenario error: {0}")]
    Scenario(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code: 2 for bad input, 4 for I/O, 3 for anything
    /// raised while computing.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Scenario(_) => 2,
            Error::Json(e) if e.is_io() => 4,
            Error::Json(_) => 2,
            Error::Csv(e) if e.is_io_error() => 4,
            Error::Csv(_) => 2,
            Error::Io(_) => 4,
            _ => 3,
        }
    }

    pub(crate) fn at_node(self, node: usize) -> Error {
        Error::Node {
            node,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
