//! Deterministic phase-space solver for coupled charge and spin
//! magnetization transport.
//!
//! The state is a pair of distributions over a 1-D position axis and a 1-D
//! or 2-D momentum grid: the charge sector `s0` and the magnetization
//! sector `spin`. [`transport`] assembles the leading-order equations of
//! motion and integrates them with classical RK4; [`bloch`] is the
//! position-space Bloch solver used as the oracle in the collision-dominated
//! limit, and [`limits`] runs the acceptance checks.
//!
//! Units are natural: `ħ = m* = |e| = 1`.

pub mod analysis;
pub mod bloch;
pub mod error;
pub mod fields;
pub mod limits;
pub mod moyal;
pub mod output;
pub mod phase_space;
pub mod poisson;
pub mod scenarios;
pub mod selfenergy;
pub mod transport;
pub mod vec3;

pub use error::{Error, Result};
pub use fields::{DevicePotential, FieldConfig};
pub use moyal::PhaseField;
pub use phase_space::{
    init_gaussian, make_grid, GridConfig, InitialCondition, PhaseSpaceGrid, QBoundary,
    SpinChargeState,
};
pub use poisson::PoissonConfig;
pub use scenarios::Scenario;
pub use selfenergy::{RelaxationClosure, SelfEnergyClosure, SelfEnergySet, TableClosure};
pub use transport::{
    run, run_from, Observables, RunConfig, RunFailure, SnapshotSeries, TermGroup, TermToggles,
};
pub use vec3::Vec3;
