//! One-dimensional electrostatics: `∇²Φ = e (ρ − ρ₀) / ε` with `e = +1`.
//!
//! The discrete Laplacian is the three-point central stencil. Dirichlet
//! grids fix Φ at both end nodes and solve the interior tridiagonal system
//! directly. Periodic grids pin Φ at node 0, solve the remaining rows, and
//! shift the result to zero mean; the dropped row holds automatically when
//! the net charge vanishes.

use crate::error::{Error, Result};
use crate::phase_space::PhaseSpaceGrid;

/// Net charge tolerance for the periodic solvability condition.
pub const PERIODIC_SOLVABILITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonConfig {
    pub epsilon: f64,
    pub rho_background: f64,
    /// Boundary values; used only on Dirichlet grids.
    pub phi_left: f64,
    pub phi_right: f64,
}

impl Default for PoissonConfig {
    fn default() -> Self {
        PoissonConfig {
            epsilon: 1.0,
            rho_background: 0.0,
            phi_left: 0.0,
            phi_right: 0.0,
        }
    }
}

impl PoissonConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid("poisson.epsilon", "must be finite and > 0"));
        }
        let finite = [self.rho_background, self.phi_left, self.phi_right]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("poisson", "boundary values must be finite"));
        }
        Ok(())
    }
}

/// Thomas algorithm for `a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i`.
fn solve_tridiagonal(lower: f64, diag: f64, upper: f64, rhs: &mut [f64]) -> Result<()> {
    let n = rhs.len();
    if n == 0 {
        return Ok(());
    }
    let mut c_prime = vec![0.0; n];
    let mut denom = diag;
    if denom == 0.0 {
        return Err(Error::SingularSystem("poisson"));
    }
    c_prime[0] = upper / denom;
    rhs[0] /= denom;
    for i in 1..n {
        denom = diag - lower * c_prime[i - 1];
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::SingularSystem("poisson"));
        }
        c_prime[i] = upper / denom;
        rhs[i] = (rhs[i] - lower * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c_prime[i] * rhs[i + 1];
    }
    Ok(())
}

/// Solves for the potential on the position nodes of `grid`.
pub fn solve_poisson(rho: &[f64], cfg: &PoissonConfig, grid: &PhaseSpaceGrid) -> Result<Vec<f64>> {
    cfg.check()?;
    let n = grid.n_q();
    if rho.len() != n {
        return Err(Error::GridMismatch {
            expected: n,
            found: rho.len(),
        });
    }
    if rho.iter().any(|r| !r.is_finite()) {
        return Err(Error::invalid("rho", "non-finite charge density"));
    }
    let h2 = grid.dq() * grid.dq();
    let source: Vec<f64> = rho
        .iter()
        .map(|r| (r - cfg.rho_background) / cfg.epsilon)
        .collect();

    if grid.is_periodic() {
        let mean = source.iter().sum::<f64>() / n as f64;
        if mean.abs() > PERIODIC_SOLVABILITY_TOL {
            return Err(Error::Solvability { mean });
        }
        // Φ_0 = 0; rows 1..n-1 form a Dirichlet problem with Φ_0 on both sides.
        let mut interior: Vec<f64> = source[1..].iter().map(|s| h2 * s).collect();
        solve_tridiagonal(1.0, -2.0, 1.0, &mut interior)?;
        let mut phi = Vec::with_capacity(n);
        phi.push(0.0);
        phi.extend(interior);
        let shift = phi.iter().sum::<f64>() / n as f64;
        phi.iter_mut().for_each(|v| *v -= shift);
        Ok(phi)
    } else {
        let mut interior: Vec<f64> = source[1..n - 1].iter().map(|s| h2 * s).collect();
        interior[0] -= cfg.phi_left;
        let last = interior.len() - 1;
        interior[last] -= cfg.phi_right;
        solve_tridiagonal(1.0, -2.0, 1.0, &mut interior)?;
        let mut phi = Vec::with_capacity(n);
        phi.push(cfg.phi_left);
        phi.extend(interior);
        phi.push(cfg.phi_right);
        Ok(phi)
    }
}

/// Residual of the stencil equation at interior rows (all rows if
/// periodic), for diagnostics and tests.
pub fn stencil_residual(
    phi: &[f64],
    rho: &[f64],
    cfg: &PoissonConfig,
    grid: &PhaseSpaceGrid,
) -> f64 {
    let n = phi.len();
    let h2 = grid.dq() * grid.dq();
    let row = |i: usize, l: f64, r: f64| {
        (l - 2.0 * phi[i] + r) / h2 - (rho[i] - cfg.rho_background) / cfg.epsilon
    };
    let mut worst: f64 = 0.0;
    for i in 1..n - 1 {
        worst = worst.max(row(i, phi[i - 1], phi[i + 1]).abs());
    }
    if grid.is_periodic() {
        worst = worst.max(row(0, phi[n - 1], phi[1]).abs());
        worst = worst.max(row(n - 1, phi[n - 2], phi[0]).abs());
    }
    worst
}
