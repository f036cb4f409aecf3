//! Leading-order phase-space operator kernel.
//!
//! Commutators of two operators reduce, at lowest order in the gradient
//! expansion, to the classical Poisson bracket of their phase-space symbols,
//! and anticommutators to twice the pointwise product. Only those leading
//! terms are provided here; the transport module applies the physical
//! prefactors.
//!
//! Derivatives use second-order central differences. Along `q` the grid
//! wraps when periodic and falls back to one-sided second-order stencils at
//! Dirichlet edges. Along `p` values beyond the cutoff are taken as zero.

use crate::error::{Error, Result};
use crate::phase_space::PhaseSpaceGrid;

/// A real scalar field over the phase-space grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    pub name: String,
    pub values: Vec<f64>,
}

impl PhaseField {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        PhaseField {
            name: name.into(),
            values,
        }
    }

    pub fn zeros(name: impl Into<String>, grid: &PhaseSpaceGrid) -> Self {
        PhaseField::new(name, vec![0.0; grid.len()])
    }

    /// Samples `f(p, q)` at every node.
    pub fn from_fn(
        name: impl Into<String>,
        grid: &PhaseSpaceGrid,
        f: impl Fn([f64; 2], f64) -> f64,
    ) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for iq in 0..grid.n_q() {
            let q = grid.q(iq);
            for m in 0..grid.n_mom() {
                values.push(f(grid.momentum(m), q));
            }
        }
        PhaseField::new(name, values)
    }

    pub fn check(&self, grid: &PhaseSpaceGrid) -> Result<()> {
        if self.values.len() != grid.len() {
            return Err(Error::GridMismatch {
                expected: grid.len(),
                found: self.values.len(),
            });
        }
        if let Some(node) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidState {
                node,
                reason: format!("non-finite entry in field '{}'", self.name),
            });
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

fn check_len(grid: &PhaseSpaceGrid, values: &[f64]) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::GridMismatch {
            expected: grid.len(),
            found: values.len(),
        });
    }
    Ok(())
}

/// Derivative of a position-only profile (length `n_q`) with the same
/// stencil as [`grad_q`].
pub fn grad_q_line(grid: &PhaseSpaceGrid, line: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; line.len()];
    line_derivative(line, 1, line.len(), grid.dq(), grid.is_periodic(), &mut out, 1);
    out
}

/// Central difference of `n` samples spaced `stride` apart in `src`,
/// written with the same stride into `dst`.
fn line_derivative(
    src: &[f64],
    stride: usize,
    n: usize,
    h: f64,
    periodic: bool,
    dst: &mut [f64],
    dst_stride: usize,
) {
    let inv = 1.0 / (2.0 * h);
    let at = |i: usize| src[i * stride];
    for i in 1..n - 1 {
        dst[i * dst_stride] = (at(i + 1) - at(i - 1)) * inv;
    }
    if periodic {
        dst[0] = (at(1) - at(n - 1)) * inv;
        dst[(n - 1) * dst_stride] = (at(0) - at(n - 2)) * inv;
    } else {
        dst[0] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv;
        dst[(n - 1) * dst_stride] = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) * inv;
    }
}

pub(crate) fn grad_q_into(grid: &PhaseSpaceGrid, src: &[f64], dst: &mut [f64]) {
    let n_mom = grid.n_mom();
    let n_q = grid.n_q();
    for m in 0..n_mom {
        line_derivative(
            &src[m..],
            n_mom,
            n_q,
            grid.dq(),
            grid.is_periodic(),
            &mut dst[m..],
            n_mom,
        );
    }
}

pub(crate) fn grad_p_into(grid: &PhaseSpaceGrid, axis: usize, src: &[f64], dst: &mut [f64]) {
    let stride = grid.p_stride(axis);
    let n_p = grid.n_p();
    let inv = 1.0 / (2.0 * grid.dp());
    for idx in 0..src.len() {
        let (_, m) = grid.split(idx);
        let j = grid.p_coord(m, axis);
        let lo = if j == 0 { 0.0 } else { src[idx - stride] };
        let hi = if j + 1 == n_p { 0.0 } else { src[idx + stride] };
        dst[idx] = (hi - lo) * inv;
    }
}

/// `∂f/∂q` at every node.
pub fn grad_q(grid: &PhaseSpaceGrid, f: &PhaseField) -> Result<PhaseField> {
    check_len(grid, &f.values)?;
    let mut out = vec![0.0; f.values.len()];
    grad_q_into(grid, &f.values, &mut out);
    Ok(PhaseField::new(format!("d({})/dq", f.name), out))
}

/// `∂f/∂p_axis` at every node.
pub fn grad_p(grid: &PhaseSpaceGrid, f: &PhaseField, axis: usize) -> Result<PhaseField> {
    check_len(grid, &f.values)?;
    if axis >= grid.momentum_dims() {
        return Err(Error::invalid(
            "axis",
            format!("momentum axis {axis} out of range"),
        ));
    }
    let mut out = vec![0.0; f.values.len()];
    grad_p_into(grid, axis, &f.values, &mut out);
    Ok(PhaseField::new(format!("d({})/dp{axis}", f.name), out))
}

/// Precomputed gradients of one operand, reused across several brackets.
#[derive(Debug, Clone)]
pub(crate) struct Gradients {
    pub dq: Vec<f64>,
    pub dp: Vec<f64>,
}

impl Gradients {
    pub fn of(grid: &PhaseSpaceGrid, values: &[f64]) -> Self {
        let mut dq = vec![0.0; values.len()];
        let mut dp = vec![0.0; values.len()];
        grad_q_into(grid, values, &mut dq);
        // The position axis is x, so only p_x pairs with it in the bracket.
        grad_p_into(grid, 0, values, &mut dp);
        Gradients { dq, dp }
    }

    /// `{a, b}` at node `i`.
    #[inline]
    pub fn bracket(a: &Gradients, b: &Gradients, i: usize) -> f64 {
        a.dp[i] * b.dq[i] - a.dq[i] * b.dp[i]
    }
}

/// Leading-order bracket `∂a/∂p · ∂b/∂q − ∂a/∂q · ∂b/∂p`.
///
/// The position axis is one-dimensional (along x), so on 2-D momentum grids
/// only the `p_x` derivative contributes.
pub fn poisson_bracket(
    grid: &PhaseSpaceGrid,
    a: &PhaseField,
    b: &PhaseField,
) -> Result<PhaseField> {
    check_len(grid, &a.values)?;
    check_len(grid, &b.values)?;
    let ga = Gradients::of(grid, &a.values);
    let gb = Gradients::of(grid, &b.values);
    let values = (0..a.values.len())
        .map(|i| Gradients::bracket(&ga, &gb, i))
        .collect();
    Ok(PhaseField::new(format!("{{{},{}}}", a.name, b.name), values))
}

/// Leading-order anticommutator symbol: `2ab` pointwise.
pub fn anticommutator_leading(
    grid: &PhaseSpaceGrid,
    a: &PhaseField,
    b: &PhaseField,
) -> Result<PhaseField> {
    check_len(grid, &a.values)?;
    check_len(grid, &b.values)?;
    let values = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| 2.0 * (x * y))
        .collect();
    Ok(PhaseField::new(format!("[{},{}]+", a.name, b.name), values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{make_grid, GridConfig, QBoundary};
    use std::f64::consts::PI;

    fn grid(n_q: usize, n_p: usize, bc: QBoundary) -> PhaseSpaceGrid {
        make_grid(&GridConfig {
            n_q,
            n_p,
            momentum_dims: 1,
            q_min: 0.0,
            q_max: 2.0 * PI,
            p_min: -3.0,
            p_max: 3.0,
            q_boundary: bc,
        })
        .unwrap()
    }

    #[test]
    fn constant_has_zero_gradient() {
        let g = grid(16, 9, QBoundary::DirichletInflow);
        let f = PhaseField::from_fn("c", &g, |_, _| 4.5);
        assert!(grad_q(&g, &f).unwrap().values.iter().all(|&v| v.abs() < 1e-13));
        let gp = grad_p(&g, &f, 0).unwrap();
        for (i, v) in gp.values.iter().enumerate() {
            if g.is_interior(i) {
                assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn linear_in_q_is_exact() {
        let g = grid(16, 9, QBoundary::Periodic);
        let f = PhaseField::from_fn("lin", &g, |_, q| 0.75 * q - 1.0);
        let d = grad_q(&g, &f).unwrap();
        for (i, v) in d.values.iter().enumerate() {
            let (iq, _) = g.split(i);
            if iq != 0 && iq + 1 != g.n_q() {
                assert!((v - 0.75).abs() < 1e-14);
            }
        }
        // Dirichlet one-sided stencils are exact on linear data too.
        let g = grid(16, 9, QBoundary::DirichletInflow);
        let f = PhaseField::from_fn("lin", &g, |_, q| 0.75 * q - 1.0);
        let d = grad_q(&g, &f).unwrap();
        assert!(d.values.iter().all(|v| (v - 0.75).abs() < 1e-13));
    }

    #[test]
    fn sine_derivative_is_second_order() {
        let mut errs = Vec::new();
        for n in [32usize, 64, 128] {
            let g = grid(n, 5, QBoundary::Periodic);
            let f = PhaseField::from_fn("s", &g, |_, q| (2.0 * q).sin());
            let d = grad_q(&g, &f).unwrap();
            let err = d
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let q = g.q(g.split(i).0);
                    (v - 2.0 * (2.0 * q).cos()).abs()
                })
                .fold(0.0, f64::max);
            errs.push(err);
        }
        for w in errs.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 1.9, "order {order}");
        }
    }

    #[test]
    fn canonical_bracket_is_one_inside() {
        // Unit spacings keep the difference quotients exact.
        let g = make_grid(&GridConfig {
            n_q: 10,
            n_p: 7,
            momentum_dims: 1,
            q_min: 0.0,
            q_max: 9.0,
            p_min: -3.0,
            p_max: 3.0,
            q_boundary: QBoundary::DirichletInflow,
        })
        .unwrap();
        let p = PhaseField::from_fn("p", &g, |p, _| p[0]);
        let q = PhaseField::from_fn("q", &g, |_, q| q);
        let pb = poisson_bracket(&g, &p, &q).unwrap();
        for (i, v) in pb.values.iter().enumerate() {
            if g.is_interior(i) {
                assert_eq!(*v, 1.0);
            }
        }
    }

    #[test]
    fn self_bracket_vanishes() {
        let g = grid(12, 7, QBoundary::Periodic);
        let a = PhaseField::from_fn("a", &g, |p, q| (q.sin() + 0.3) * p[0].powi(3));
        let pb = poisson_bracket(&g, &a, &a).unwrap();
        assert!(pb.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn quadratic_bracket_matches_product() {
        // {p²/2, q²/2} = p q; central differences are exact for quadratics
        // away from the edges.
        let g = grid(12, 9, QBoundary::DirichletInflow);
        let a = PhaseField::from_fn("a", &g, |p, _| 0.5 * p[0] * p[0]);
        let b = PhaseField::from_fn("b", &g, |_, q| 0.5 * q * q);
        let pb = poisson_bracket(&g, &a, &b).unwrap();
        for (i, v) in pb.values.iter().enumerate() {
            if g.is_interior(i) {
                let (iq, m) = g.split(i);
                let expect = g.momentum(m)[0] * g.q(iq);
                assert!((v - expect).abs() < 1e-12, "{v} vs {expect}");
            }
        }
    }

    #[test]
    fn anticommutator_is_twice_product() {
        let g = grid(8, 5, QBoundary::Periodic);
        let one = PhaseField::from_fn("1", &g, |_, _| 1.0);
        let b = PhaseField::from_fn("b", &g, |p, q| p[0] * 0.3 + q.cos());
        let r = anticommutator_leading(&g, &one, &b).unwrap();
        for (x, y) in r.values.iter().zip(&b.values) {
            assert_eq!(*x, 2.0 * y);
        }
        let zero = PhaseField::zeros("0", &g);
        let r = anticommutator_leading(&g, &zero, &b).unwrap();
        assert!(r.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let g = grid(8, 5, QBoundary::Periodic);
        let a = PhaseField::new("a", vec![0.0; 3]);
        let b = PhaseField::zeros("b", &g);
        assert!(poisson_bracket(&g, &a, &b).is_err());
        assert!(anticommutator_leading(&g, &b, &a).is_err());
    }

    #[test]
    fn p_edges_read_zero_beyond_cutoff() {
        let g = grid(4, 5, QBoundary::Periodic);
        let f = PhaseField::from_fn("one", &g, |_, _| 1.0);
        let d = grad_p(&g, &f, 0).unwrap();
        let h = g.dp();
        assert_eq!(d.values[g.index(0, 0)], 1.0 / (2.0 * h));
        assert_eq!(d.values[g.index(0, 4)], -1.0 / (2.0 * h));
    }
}
