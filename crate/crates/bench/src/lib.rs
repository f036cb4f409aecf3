//! Benchmark fixtures: presets resized to a chosen grid.

use spinwig_core::transport::RunConfig;
use spinwig_core::{init_gaussian, PhaseSpaceGrid, Result, Scenario, SpinChargeState};

pub struct Fixture {
    pub config: RunConfig,
    pub grid: PhaseSpaceGrid,
    pub state: SpinChargeState,
}

/// `scenario` with `n_q × n_p` nodes on the preset's extents.
pub fn fixture(scenario: Scenario, n_q: usize, n_p: usize) -> Result<Fixture> {
    let mut config = scenario.preset();
    config.grid.n_q = n_q;
    config.grid.n_p = n_p;
    let grid = config.check()?;
    let state = init_gaussian(&grid, &config.initial)?;
    Ok(Fixture {
        config,
        grid,
        state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        let f = fixture(Scenario::BlochLimit, 32, 16).unwrap();
        assert_eq!(f.grid.len(), 32 * 16);
        assert_eq!(f.state.s0.len(), f.grid.len());
    }
}
