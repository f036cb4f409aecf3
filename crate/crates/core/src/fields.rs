//! Single-particle Hamiltonian sector: vector potential, scalar energy,
//! electric field and the effective precession field.
//!
//! Natural units throughout: ħ = m* = |e| = c = 1. The 1-D position axis is
//! embedded along x, and momenta `(p_x, p_y)` are embedded as
//! `(p_x, p_y, 0)`.

use crate::error::{Error, Result};
use crate::moyal::grad_q_line;
use crate::phase_space::PhaseSpaceGrid;
use crate::vec3::{add, cross, scale, Vec3};

/// Static device potential: a linear bias ramp plus an optional Gaussian
/// barrier.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DevicePotential {
    /// Potential difference between the right and left ends of the channel.
    pub bias: f64,
    pub barrier_height: f64,
    pub barrier_center: f64,
    pub barrier_width: f64,
}

impl DevicePotential {
    pub fn is_zero(&self) -> bool {
        self.bias == 0.0 && self.barrier_height == 0.0
    }

    pub fn profile(&self, grid: &PhaseSpaceGrid) -> Vec<f64> {
        let len = grid.q_max() - grid.q_min();
        (0..grid.n_q())
            .map(|iq| {
                let q = grid.q(iq);
                let mut v = self.bias * (q - grid.q_min()) / len;
                if self.barrier_height != 0.0 {
                    let d = q - self.barrier_center;
                    v += self.barrier_height
                        * (-(d * d) / (2.0 * self.barrier_width * self.barrier_width)).exp();
                }
                v
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldConfig {
    /// Uniform external magnetic field.
    pub b_ext: Vec3,
    pub alpha_rashba: f64,
    pub beta_dresselhaus: f64,
    pub g_s: f64,
    /// Prefactor mapping `b_ext` onto the precession field; `g_s/2` in
    /// natural units.
    pub zeeman_scale: f64,
    /// Uniform external electric field along the channel.
    pub e_ext: f64,
    pub device: DevicePotential,
    pub use_poisson: bool,
    /// Scale the Rashba coefficient by the local electric field `E(q)`.
    pub rashba_field_scaling: bool,
    /// Keep the ½ on the magnetic part of the Lorentz force.
    pub lorentz_half_factor: bool,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig {
            b_ext: [0.0; 3],
            alpha_rashba: 0.0,
            beta_dresselhaus: 0.0,
            g_s: 2.0,
            zeeman_scale: 1.0,
            e_ext: 0.0,
            device: DevicePotential::default(),
            use_poisson: false,
            rashba_field_scaling: false,
            lorentz_half_factor: true,
        }
    }
}

impl FieldConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.g_s > 0.0 && self.g_s.is_finite()) {
            return Err(Error::invalid("fields.g_s", "must be finite and > 0"));
        }
        let finite = self.b_ext.iter().all(|v| v.is_finite())
            && [
                self.alpha_rashba,
                self.beta_dresselhaus,
                self.zeeman_scale,
                self.e_ext,
                self.device.bias,
                self.device.barrier_height,
                self.device.barrier_center,
            ]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("fields", "all field parameters must be finite"));
        }
        if self.device.barrier_height != 0.0 && !(self.device.barrier_width > 0.0) {
            return Err(Error::invalid("fields.barrier_width", "must be > 0"));
        }
        Ok(())
    }

    /// Magnetization per unit spin density, `g_s μ_B` with `μ_B = 1/2`.
    pub fn mag_scale(&self) -> f64 {
        0.5 * self.g_s
    }

    /// Symmetric gauge `A(q) = ½ B × q`, with `q` embedded along x.
    pub fn vector_potential(&self, q: f64) -> Vec3 {
        scale(cross(self.b_ext, [q, 0.0, 0.0]), 0.5)
    }

    /// Scalar energy `|p + A(q)|²/2 − φ(q) + ½ Re Σʳ(p, q)`.
    pub fn scalar_hamiltonian(&self, p: [f64; 2], q: f64, phi: f64, re_sigma_r: f64) -> f64 {
        let v = self.kinetic_momentum(p, q);
        0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) - phi + 0.5 * re_sigma_r
    }

    /// `p + A(q)`, which is also the velocity for unit mass.
    pub fn kinetic_momentum(&self, p: [f64; 2], q: f64) -> Vec3 {
        add([p[0], p[1], 0.0], self.vector_potential(q))
    }

    /// Spin-orbit part of the precession field.
    ///
    /// Matching `−½ σ·B_so` to `α(σx py − σy px) + β(σx px − σy py)` gives
    /// `B_so = −2 (α py + β px, −α px − β py, 0)`.
    pub fn spin_orbit_field(&self, p: [f64; 2], alpha: f64) -> Vec3 {
        let beta = self.beta_dresselhaus;
        [
            -2.0 * (alpha * p[1] + beta * p[0]),
            2.0 * (alpha * p[0] + beta * p[1]),
            0.0,
        ]
    }

    /// Rashba coefficient in effect where the local field is `e_local`.
    pub fn rashba_at(&self, e_local: f64) -> f64 {
        if self.rashba_field_scaling {
            self.alpha_rashba * e_local
        } else {
            self.alpha_rashba
        }
    }

    /// Effective precession field `zeeman_scale · b_ext + B_so(p)`.
    pub fn effective_field(&self, p: [f64; 2], e_local: f64) -> Vec3 {
        add(
            scale(self.b_ext, self.zeeman_scale),
            self.spin_orbit_field(p, self.rashba_at(e_local)),
        )
    }

    pub fn has_magnetic_field(&self) -> bool {
        self.b_ext.iter().any(|&b| b != 0.0)
    }
}

/// `E(q) = −∂Φ/∂q + e_ext` using the bracket kernel's `q` stencil.
pub fn electric_field(grid: &PhaseSpaceGrid, phi: &[f64], e_ext: f64) -> Result<Vec<f64>> {
    if phi.len() != grid.n_q() {
        return Err(Error::GridMismatch {
            expected: grid.n_q(),
            found: phi.len(),
        });
    }
    Ok(grad_q_line(grid, phi)
        .into_iter()
        .map(|d| -d + e_ext)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{make_grid, GridConfig, QBoundary};
    use std::f64::consts::PI;

    #[test]
    fn vector_potential_cases() {
        let f = FieldConfig {
            b_ext: [0.0, 0.0, 3.0],
            ..Default::default()
        };
        assert_eq!(f.vector_potential(2.0), [0.0, 3.0, 0.0]);
        assert_eq!(f.vector_potential(0.0), [0.0, 0.0, 0.0]);
        let f = FieldConfig {
            b_ext: [1.5, 0.0, 0.0],
            ..Default::default()
        };
        assert_eq!(f.vector_potential(4.0), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn hamiltonian_values() {
        let f = FieldConfig::default();
        assert_eq!(f.scalar_hamiltonian([0.0, 0.0], 0.0, 0.0, 0.0), 0.0);
        assert_eq!(f.scalar_hamiltonian([1.0, 0.0], 0.0, 0.0, 0.0), 0.5);
        for q in [-1.0, 0.5, 3.0] {
            for p in [-2.0, 0.0, 1.5] {
                assert_eq!(f.scalar_hamiltonian([p, 0.0], q, q, 0.0), 0.5 * p * p - q);
            }
        }
        assert_eq!(f.scalar_hamiltonian([0.0, 0.0], 0.0, 0.0, 3.0), 1.5);
    }

    #[test]
    fn zeeman_only() {
        let f = FieldConfig {
            b_ext: [0.0, 0.0, 2.0],
            zeeman_scale: 1.5,
            ..Default::default()
        };
        assert_eq!(f.effective_field([0.7, -0.2], 0.0), [0.0, 0.0, 3.0]);
        let f = FieldConfig::default();
        assert_eq!(f.effective_field([0.7, -0.2], 0.0), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn rashba_axis() {
        let f = FieldConfig {
            alpha_rashba: 1.0,
            ..Default::default()
        };
        let b = f.effective_field([0.8, 0.0], 0.0);
        assert_eq!(b, [0.0, 1.6, 0.0]);
    }

    #[test]
    fn rashba_axis_drives_x_spin_about_y() {
        // Two momentum nodes p = ±0.8, spin along x. Precession dM/dt = B × M
        // keeps M_y = 0 and preserves |M| while rotating within x–z.
        let f = FieldConfig {
            alpha_rashba: 1.0,
            ..Default::default()
        };
        for px in [0.8, -0.8] {
            let b = f.effective_field([px, 0.0], 0.0);
            let mut m = [1.0, 0.0, 0.0];
            let dt = 1e-3;
            for _ in 0..1000 {
                let k1 = cross(b, m);
                let mid = add(m, scale(k1, 0.5 * dt));
                let k2 = cross(b, mid);
                m = add(m, scale(k2, dt));
            }
            let angle = 2.0 * px;
            assert_eq!(m[1], 0.0);
            assert!((m[0] - angle.cos()).abs() < 1e-5);
            assert!((m[2] + angle.sin()).abs() < 1e-5);
        }
    }

    #[test]
    fn spin_orbit_is_odd_and_linear() {
        let f = FieldConfig {
            alpha_rashba: 0.4,
            beta_dresselhaus: -0.7,
            ..Default::default()
        };
        for p in [[0.3, 1.1], [-2.0, 0.5], [0.0, -1.0]] {
            let a = f.effective_field(p, 0.0);
            let b = f.effective_field([-p[0], -p[1]], 0.0);
            for k in 0..3 {
                assert_eq!(a[k], -b[k]);
            }
        }
        // Joint linearity in (b_ext, α, β).
        let g = FieldConfig {
            b_ext: [0.1, -0.3, 0.2],
            alpha_rashba: -1.2,
            beta_dresselhaus: 0.25,
            ..Default::default()
        };
        let sum = FieldConfig {
            b_ext: [0.1, -0.3, 0.2],
            alpha_rashba: 0.4 - 1.2,
            beta_dresselhaus: -0.7 + 0.25,
            ..Default::default()
        };
        let p = [0.6, -0.9];
        let lhs = sum.effective_field(p, 0.0);
        let rhs = add(f.effective_field(p, 0.0), g.effective_field(p, 0.0));
        for k in 0..3 {
            assert!((lhs[k] - rhs[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn hamiltonian_is_even_without_gauge_field() {
        let f = FieldConfig::default();
        for p in [[0.3, 1.1], [-2.0, 0.5]] {
            let a = f.scalar_hamiltonian(p, 0.4, 0.2, 0.0);
            let b = f.scalar_hamiltonian([-p[0], -p[1]], 0.4, 0.2, 0.0);
            assert_eq!(a, b);
        }
    }

    fn line_grid(n: usize, bc: QBoundary) -> PhaseSpaceGrid {
        make_grid(&GridConfig {
            n_q: n,
            n_p: 4,
            momentum_dims: 1,
            q_min: 0.0,
            q_max: 2.0 * PI,
            p_min: -1.0,
            p_max: 1.0,
            q_boundary: bc,
        })
        .unwrap()
    }

    #[test]
    fn electric_field_cases() {
        let g = line_grid(16, QBoundary::DirichletInflow);
        let e = electric_field(&g, &vec![2.0; 16], 0.3).unwrap();
        assert!(e.iter().all(|&v| (v - 0.3).abs() < 1e-15));
        let phi: Vec<f64> = g.q_nodes().iter().map(|q| -q).collect();
        let e = electric_field(&g, &phi, 0.3).unwrap();
        assert!(e.iter().all(|&v| (v - 1.3).abs() < 1e-13));
    }

    #[test]
    fn electric_field_converges_at_second_order() {
        let k = 3.0;
        let errs: Vec<f64> = [32usize, 64, 128]
            .iter()
            .map(|&n| {
                let g = line_grid(n, QBoundary::Periodic);
                let phi: Vec<f64> = g.q_nodes().iter().map(|q| (k * q).sin()).collect();
                let e = electric_field(&g, &phi, 0.0).unwrap();
                g.q_nodes()
                    .iter()
                    .zip(&e)
                    .map(|(q, v)| (v + k * (k * q).cos()).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        for w in errs.windows(2) {
            assert!((w[0] / w[1]).log2() >= 1.9);
        }
    }

    #[test]
    fn device_profile() {
        let g = line_grid(5, QBoundary::DirichletInflow);
        let d = DevicePotential {
            bias: 2.0,
            ..Default::default()
        };
        let v = d.profile(&g);
        assert_eq!(v[0], 0.0);
        assert!((v[4] - 2.0).abs() < 1e-15);
    }
}
