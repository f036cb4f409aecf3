use crate::error::{Error, Result};
use crate::phase_space::PhaseSpaceGrid;
use crate::vec3::{norm, Vec3};

/// Charge and spin sectors of the equal-time distribution at one instant.
///
/// `s0` carries the charge-sector distribution and `spin` the magnetization
/// distribution (already scaled by `g_s μ_B`). Both are stored in the node
/// order of [`PhaseSpaceGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpinChargeState {
    pub s0: Vec<f64>,
    pub spin: Vec<Vec3>,
    pub time: f64,
}

/// Polarization bound checks allow this much relative slack so that
/// `polarization * s0` with `|polarization| = 1` is not rejected by rounding.
const POLARIZATION_SLACK: f64 = 1e-12;

impl SpinChargeState {
    pub fn zeros(grid: &PhaseSpaceGrid) -> Self {
        SpinChargeState {
            s0: vec![0.0; grid.len()],
            spin: vec![[0.0; 3]; grid.len()],
            time: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.s0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s0.is_empty()
    }

    pub fn check_shape(&self, grid: &PhaseSpaceGrid) -> Result<()> {
        if self.s0.len() != grid.len() {
            return Err(Error::GridMismatch {
                expected: grid.len(),
                found: self.s0.len(),
            });
        }
        if self.spin.len() != grid.len() {
            return Err(Error::GridMismatch {
                expected: grid.len(),
                found: self.spin.len(),
            });
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.s0.iter().all(|v| v.is_finite())
            && self.spin.iter().flatten().all(|v| v.is_finite())
    }

    /// Checks shape and finiteness.
    pub fn validate(&self, grid: &PhaseSpaceGrid) -> Result<()> {
        self.check_shape(grid)?;
        for (node, (s, m)) in self.s0.iter().zip(&self.spin).enumerate() {
            if !s.is_finite() || m.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidState {
                    node,
                    reason: "non-finite entry".into(),
                });
            }
        }
        Ok(())
    }

    /// Initial-data validator: `s0 >= 0` and `|spin| <= s0` at every node.
    /// Evolution is not required to preserve this.
    pub fn validate_initial(&self, grid: &PhaseSpaceGrid) -> Result<()> {
        self.validate(grid)?;
        for (node, (&s, m)) in self.s0.iter().zip(&self.spin).enumerate() {
            if s < 0.0 {
                return Err(Error::InvalidState {
                    node,
                    reason: format!("negative charge density {s:e}"),
                });
            }
            let mag = norm(*m);
            if mag > s * (1.0 + POLARIZATION_SLACK) {
                return Err(Error::InvalidState {
                    node,
                    reason: format!("|spin| = {mag:e} exceeds s0 = {s:e}"),
                });
            }
        }
        Ok(())
    }
}

/// Parameters of a separable Gaussian initial condition.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialCondition {
    pub center_q: f64,
    /// `(p_x, p_y)`; `p_y` is ignored on 1-D momentum grids.
    pub center_p: [f64; 2],
    /// An infinite width gives a profile that is exactly uniform in `q`.
    pub width_q: f64,
    pub width_p: f64,
    pub polarization: Vec3,
    pub amplitude: f64,
}

impl Default for InitialCondition {
    fn default() -> Self {
        InitialCondition {
            center_q: 0.0,
            center_p: [0.0, 0.0],
            width_q: 1.0,
            width_p: 1.0,
            polarization: [0.0, 0.0, 1.0],
            amplitude: 1.0,
        }
    }
}

impl InitialCondition {
    pub fn check(&self) -> Result<()> {
        if !(self.width_q > 0.0) {
            return Err(Error::invalid("initial.width_q", "must be > 0"));
        }
        if !(self.width_p > 0.0 && self.width_p.is_finite()) {
            return Err(Error::invalid("initial.width_p", "must be finite and > 0"));
        }
        if !(norm(self.polarization) <= 1.0) {
            return Err(Error::invalid("initial.polarization", "|polarization| must be <= 1"));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::invalid("initial.amplitude", "must be finite and >= 0"));
        }
        Ok(())
    }
}

/// `s0 = A exp(-(q-q0)²/2σq²) exp(-|p-p0|²/2σp²)` with `spin = polarization * s0`.
pub fn init_gaussian(grid: &PhaseSpaceGrid, ic: &InitialCondition) -> Result<SpinChargeState> {
    ic.check()?;
    let mut state = SpinChargeState::zeros(grid);
    let dims = grid.momentum_dims();
    for iq in 0..grid.n_q() {
        let dq = grid.q(iq) - ic.center_q;
        let gq = (-(dq * dq) / (2.0 * ic.width_q * ic.width_q)).exp();
        for m in 0..grid.n_mom() {
            let p = grid.momentum(m);
            let mut p2 = (p[0] - ic.center_p[0]).powi(2);
            if dims == 2 {
                p2 += (p[1] - ic.center_p[1]).powi(2);
            }
            let gp = (-p2 / (2.0 * ic.width_p * ic.width_p)).exp();
            let idx = grid.index(iq, m);
            let s = ic.amplitude * gq * gp;
            state.s0[idx] = s;
            state.spin[idx] = [
                ic.polarization[0] * s,
                ic.polarization[1] * s,
                ic.polarization[2] * s,
            ];
        }
    }
    state.validate_initial(grid)?;
    Ok(state)
}

/// Position-space moments of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub rho: Vec<f64>,
    pub mag: Vec<Vec3>,
}

/// Momentum reduction `rho(q) = c_norm Σ_p s0 dp^d`, likewise for the
/// magnetization. Summation runs over momentum nodes in ascending order.
pub fn moment_density(state: &SpinChargeState, grid: &PhaseSpaceGrid) -> Result<Moments> {
    state.check_shape(grid)?;
    let n_mom = grid.n_mom();
    let w = grid.c_norm() * grid.dp_measure();
    let mut rho = Vec::with_capacity(grid.n_q());
    let mut mag = Vec::with_capacity(grid.n_q());
    for iq in 0..grid.n_q() {
        let base = iq * n_mom;
        let mut r = 0.0;
        let mut m3 = [0.0; 3];
        for m in 0..n_mom {
            r += state.s0[base + m];
            let s = state.spin[base + m];
            m3[0] += s[0];
            m3[1] += s[1];
            m3[2] += s[2];
        }
        rho.push(w * r);
        mag.push([w * m3[0], w * m3[1], w * m3[2]]);
    }
    Ok(Moments { rho, mag })
}

/// `∫ rho dq` as a plain node sum.
pub fn total_charge(state: &SpinChargeState, grid: &PhaseSpaceGrid) -> Result<f64> {
    let moments = moment_density(state, grid)?;
    Ok(moments.rho.iter().sum::<f64>() * grid.dq())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{make_grid, GridConfig, QBoundary};

    fn grid(dims: usize) -> PhaseSpaceGrid {
        make_grid(&GridConfig {
            n_q: 12,
            n_p: 9,
            momentum_dims: dims,
            q_min: -3.0,
            q_max: 3.0,
            p_min: -4.0,
            p_max: 4.0,
            q_boundary: QBoundary::Periodic,
        })
        .unwrap()
    }

    #[test]
    fn polarized_gaussian() {
        let g = grid(1);
        let ic = InitialCondition {
            polarization: [0.0, 0.0, 1.0],
            ..Default::default()
        };
        let st = init_gaussian(&g, &ic).unwrap();
        for (s, m) in st.s0.iter().zip(&st.spin) {
            assert_eq!(m[2], *s);
            assert_eq!(m[0], 0.0);
            assert_eq!(m[1], 0.0);
        }
    }

    #[test]
    fn zero_amplitude_gives_zero_state() {
        let g = grid(2);
        let ic = InitialCondition {
            amplitude: 0.0,
            ..Default::default()
        };
        assert_eq!(init_gaussian(&g, &ic).unwrap(), SpinChargeState::zeros(&g));
    }

    #[test]
    fn over_polarized_is_rejected() {
        let g = grid(1);
        let ic = InitialCondition {
            polarization: [0.8, 0.8, 0.0],
            ..Default::default()
        };
        assert!(init_gaussian(&g, &ic).is_err());
    }

    #[test]
    fn unit_polarization_off_axis_passes() {
        let g = grid(1);
        let ic = InitialCondition {
            polarization: [0.6, 0.8, 0.0],
            ..Default::default()
        };
        assert!(init_gaussian(&g, &ic).is_ok());
    }

    #[test]
    fn gaussian_total_charge_matches_quadrature() {
        for dims in [1, 2] {
            let g = grid(dims);
            let ic = InitialCondition {
                center_q: 0.3,
                center_p: [0.5, -0.25],
                width_q: 0.9,
                width_p: 1.1,
                polarization: [0.0, 0.5, 0.0],
                amplitude: 2.5,
            };
            let st = init_gaussian(&g, &ic).unwrap();
            // Independent quadrature over every grid node.
            let mut sum = 0.0;
            for iq in 0..g.n_q() {
                let q = -3.0 + iq as f64 * 0.5;
                let gq = (-(q - 0.3f64).powi(2) / (2.0 * 0.81)).exp();
                for jx in 0..9 {
                    let px = -4.0 + jx as f64;
                    let gx = (-(px - 0.5f64).powi(2) / (2.0 * 1.21)).exp();
                    if dims == 1 {
                        sum += gq * gx;
                    } else {
                        for jy in 0..9 {
                            let py = -4.0 + jy as f64;
                            let gy = (-(py + 0.25f64).powi(2) / (2.0 * 1.21)).exp();
                            sum += gq * gx * gy;
                        }
                    }
                }
            }
            let c_norm = if dims == 1 {
                1.0 / (2.0 * std::f64::consts::PI)
            } else {
                1.0 / (4.0 * std::f64::consts::PI.powi(2))
            };
            let expected = c_norm * 2.5 * sum * 0.5 * 1.0;
            let got = total_charge(&st, &g).unwrap();
            assert!(((got - expected) / expected).abs() < 1e-13, "{got} vs {expected}");
        }
    }

    #[test]
    fn single_node_moment() {
        let g = grid(1);
        let mut st = SpinChargeState::zeros(&g);
        let idx = g.index(4, 6);
        st.s0[idx] = 3.0;
        st.spin[idx] = [1.0, -2.0, 0.5];
        let mom = moment_density(&st, &g).unwrap();
        let c = g.c_norm() * g.dp();
        for (iq, (&r, m)) in mom.rho.iter().zip(&mom.mag).enumerate() {
            if iq == 4 {
                assert_eq!(r, c * 3.0);
                assert_eq!(*m, [c * 1.0, c * -2.0, c * 0.5]);
            } else {
                assert_eq!(r, 0.0);
                assert_eq!(*m, [0.0; 3]);
            }
        }
    }

    #[test]
    fn zero_state_has_zero_moments() {
        let g = grid(2);
        let mom = moment_density(&SpinChargeState::zeros(&g), &g).unwrap();
        assert!(mom.rho.iter().all(|&r| r == 0.0));
        assert!(mom.mag.iter().flatten().all(|&m| m == 0.0));
    }

    #[test]
    fn negative_charge_fails_initial_validation() {
        let g = grid(1);
        let mut st = SpinChargeState::zeros(&g);
        st.s0[3] = -1e-3;
        assert!(st.validate(&g).is_ok());
        assert!(st.validate_initial(&g).is_err());
    }
}
