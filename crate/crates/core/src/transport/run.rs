use super::integrate::rk4_step;
use super::rhs::{Inflow, TransportOperator};
use super::TermToggles;
use crate::error::{Error, Result};
use crate::fields::{electric_field, FieldConfig};
use crate::phase_space::{
    init_gaussian, make_grid, moment_density, GridConfig, InitialCondition, PhaseSpaceGrid,
    SpinChargeState,
};
use crate::poisson::PoissonConfig;
use crate::scenarios::Scenario;
use crate::selfenergy::SelfEnergyClosure;
use crate::vec3::norm;

/// Everything needed to reproduce one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub grid: GridConfig,
    pub fields: FieldConfig,
    pub closure: SelfEnergyClosure,
    pub toggles: TermToggles,
    pub initial: InitialCondition,
    pub poisson: PoissonConfig,
    pub dt: f64,
    pub n_steps: usize,
    /// Observables are recorded every this many steps (and at the end).
    pub output_every: usize,
    /// Full snapshots every this many steps; 0 keeps only the initial one.
    pub snapshot_every: usize,
    /// Turn a CFL violation into an error instead of a warning.
    pub strict_cfl: bool,
    /// Reserved; every preset is deterministic.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenario: Scenario::Custom,
            grid: GridConfig::default(),
            fields: FieldConfig::default(),
            closure: SelfEnergyClosure::None,
            toggles: TermToggles::default(),
            initial: InitialCondition::default(),
            poisson: PoissonConfig::default(),
            dt: 0.01,
            n_steps: 100,
            output_every: 1,
            snapshot_every: 0,
            strict_cfl: false,
            seed: 0,
        }
    }
}

impl RunConfig {
    /// Validates every section and returns the grid.
    pub fn check(&self) -> Result<PhaseSpaceGrid> {
        let grid = make_grid(&self.grid)?;
        self.fields.check()?;
        self.closure.check(&grid)?;
        self.initial.check()?;
        self.poisson.check()?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("run.dt", "must be finite and > 0"));
        }
        if self.output_every == 0 {
            return Err(Error::invalid("run.output_every", "must be >= 1"));
        }
        Ok(grid)
    }

    /// Advective CFL limit at the initial state.
    pub fn cfl_limit(&self) -> Result<f64> {
        let grid = self.check()?;
        let state = init_gaussian(&grid, &self.initial)?;
        let op = self.operator(&grid, &state)?;
        let phi = op.potential(&state)?;
        op.cfl_limit(Some(&phi))
    }

    fn operator<'a>(
        &'a self,
        grid: &'a PhaseSpaceGrid,
        initial: &SpinChargeState,
    ) -> Result<TransportOperator<'a>> {
        TransportOperator::new(grid, &self.fields, &self.closure, self.toggles)?
            .with_poisson(self.poisson.clone())?
            .with_inflow(Inflow::from_state(initial, grid)?)
    }
}

/// Scalar diagnostics recorded at the output cadence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub t: f64,
    pub total_charge: f64,
    pub mx_mean: f64,
    pub my_mean: f64,
    pub mz_mean: f64,
    /// Mean over position of `|M(q)|`.
    pub m_norm_mean: f64,
    /// Potential at the middle position node.
    pub phi_mid: f64,
    /// `½ ε Σ E² dq`; not part of the CSV schema.
    pub field_energy: f64,
}

impl Observables {
    pub fn measure(
        state: &SpinChargeState,
        grid: &PhaseSpaceGrid,
        phi: &[f64],
        fields: &FieldConfig,
        epsilon: f64,
    ) -> Result<Self> {
        let mom = moment_density(state, grid)?;
        let n = grid.n_q() as f64;
        let mut m = [0.0; 3];
        let mut norm_sum = 0.0;
        for v in &mom.mag {
            m[0] += v[0];
            m[1] += v[1];
            m[2] += v[2];
            norm_sum += norm(*v);
        }
        let e = electric_field(grid, phi, fields.e_ext)?;
        let field_energy = 0.5 * epsilon * e.iter().map(|x| x * x).sum::<f64>() * grid.dq();
        Ok(Observables {
            t: state.time,
            total_charge: mom.rho.iter().sum::<f64>() * grid.dq(),
            mx_mean: m[0] / n,
            my_mean: m[1] / n,
            mz_mean: m[2] / n,
            m_norm_mean: norm_sum / n,
            phi_mid: phi[grid.n_q() / 2],
            field_energy,
        })
    }
}

/// Output of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSeries {
    pub grid: PhaseSpaceGrid,
    pub observables: Vec<Observables>,
    pub snapshots: Vec<SpinChargeState>,
    pub final_state: SpinChargeState,
    pub warnings: Vec<String>,
}

/// A run that stopped early, with whatever it recorded before the failure.
#[derive(Debug, thiserror::Error)]
#[error("{error}")]
pub struct RunFailure {
    #[source]
    pub error: Error,
    pub partial: Option<Box<SnapshotSeries>>,
}

impl From<Error> for RunFailure {
    fn from(error: Error) -> Self {
        RunFailure {
            error,
            partial: None,
        }
    }
}

/// Runs `config` from its Gaussian initial condition.
pub fn run(config: &RunConfig) -> std::result::Result<SnapshotSeries, RunFailure> {
    let grid = config.check()?;
    let initial = init_gaussian(&grid, &config.initial)?;
    run_from(config, initial)
}

/// Runs `config` from an explicit initial state.
pub fn run_from(
    config: &RunConfig,
    initial: SpinChargeState,
) -> std::result::Result<SnapshotSeries, RunFailure> {
    let grid = config.check()?;
    initial.validate(&grid)?;
    let op = config.operator(&grid, &initial)?;
    let eps = config.poisson.epsilon;

    let mut warnings = Vec::new();
    let phi0 = op.potential(&initial)?;
    let limit = op.cfl_limit(Some(&phi0))?;
    if config.dt > limit {
        if config.strict_cfl {
            return Err(Error::Cfl {
                dt: config.dt,
                limit,
            }
            .into());
        }
        let msg = format!("dt = {:e} exceeds the CFL bound {:e}", config.dt, limit);
        log::warn!("{msg}");
        warnings.push(msg);
    }

    let mut series = SnapshotSeries {
        grid: grid.clone(),
        observables: vec![Observables::measure(
            &initial,
            &grid,
            &phi0,
            &config.fields,
            eps,
        )?],
        snapshots: vec![initial.clone()],
        final_state: initial.clone(),
        warnings,
    };

    let mut state = initial;
    let t0 = state.time;
    for step in 1..=config.n_steps {
        let next = rk4_step(&state, config.dt, |s| op.rhs(s));
        let mut next = match next {
            Ok(n) => n,
            Err(error) => {
                series.final_state = state;
                return Err(RunFailure {
                    error,
                    partial: Some(Box::new(series)),
                });
            }
        };
        // Avoid accumulated rounding in the clock.
        next.time = t0 + step as f64 * config.dt;
        state = next;

        let record = step % config.output_every == 0 || step == config.n_steps;
        if record {
            let obs = op
                .potential(&state)
                .and_then(|phi| Observables::measure(&state, &grid, &phi, &config.fields, eps));
            match obs {
                Ok(o) => series.observables.push(o),
                Err(error) => {
                    series.final_state = state;
                    return Err(RunFailure {
                        error,
                        partial: Some(Box::new(series)),
                    });
                }
            }
        }
        if config.snapshot_every > 0 && step % config.snapshot_every == 0 {
            series.snapshots.push(state.clone());
        }
    }
    series.final_state = state;
    Ok(series)
}
