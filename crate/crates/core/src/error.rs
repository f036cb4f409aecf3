use std::io;

use thiserror::Error;

/// Errors raised by the solver.
///
/// Variants split into two families: configuration problems (bad grids,
/// parameters, file contents) and numerical failures that happen while a
/// run is in progress. [`Error::is_numerical`] tells them apart, which the
/// command-line driver uses to pick its exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("{name}: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("grid mismatch: expected {expected} nodes, got {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("invalid state at node {node}: {reason}")]
    InvalidState { node: usize, reason: String },

    #[error("periodic Poisson problem is not solvable: mean(rho - rho0) = {mean:e}")]
    Solvability { mean: f64 },

    #[error("singular linear system in {0}")]
    SingularSystem(&'static str),

    #[error("time step {dt:e} violates the advective CFL bound {limit:e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("non-finite value in term group '{group}' at t = {time:e}")]
    NonFinite { group: &'static str, time: f64 },

    #[error("non-finite intermediate state at t = {time:e}")]
    NonFiniteState { time: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// True for failures that happen during time integration.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::NonFiniteState { .. }
                | Error::Solvability { .. }
                | Error::SingularSystem(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
