//! Phase-space grid, the charge/spin state, initial data and momentum
//! moments.

mod grid;
mod state;

pub use grid::{make_grid, GridConfig, PhaseSpaceGrid, QBoundary};
pub use state::{
    init_gaussian, moment_density, total_charge, InitialCondition, Moments, SpinChargeState,
};
