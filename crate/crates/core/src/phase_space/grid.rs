use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Boundary rule along the position axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QBoundary {
    Periodic,
    /// Nodes sit on both ends; incoming characteristics read a frozen
    /// inflow distribution, outgoing ones leave freely.
    DirichletInflow,
}

impl QBoundary {
    pub fn as_str(self) -> &'static str {
        match self {
            QBoundary::Periodic => "periodic",
            QBoundary::DirichletInflow => "dirichlet_inflow",
        }
    }
}

impl fmt::Display for QBoundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QBoundary {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "periodic" => Ok(QBoundary::Periodic),
            "dirichlet_inflow" | "dirichlet" => Ok(QBoundary::DirichletInflow),
            other => Err(format!("unknown q boundary '{other}'")),
        }
    }
}

/// User-facing grid parameters. The momentum range is symmetric, so only
/// `p_min`/`p_max` pairs with `p_min == -p_max` are accepted.
#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub n_q: usize,
    pub n_p: usize,
    pub momentum_dims: usize,
    pub q_min: f64,
    pub q_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub q_boundary: QBoundary,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n_q: 64,
            n_p: 32,
            momentum_dims: 1,
            q_min: 0.0,
            q_max: 32.0,
            p_min: -5.0,
            p_max: 5.0,
            q_boundary: QBoundary::Periodic,
        }
    }
}

/// Uniform discretization of `(p, q)` phase space: a 1-D position axis and a
/// 1-D or 2-D momentum lattice.
///
/// Nodes are stored position-major. For a position index `iq` and a
/// momentum index `m` the flat index is `iq * n_mom + m`; in two momentum
/// dimensions `m = jx * n_p + jy`. Momentum reductions always sum `m` in
/// ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceGrid {
    n_q: usize,
    n_p: usize,
    momentum_dims: usize,
    q_min: f64,
    q_max: f64,
    p_max: f64,
    q_boundary: QBoundary,
    dq: f64,
    dp: f64,
}

/// Builds a grid, checking every structural invariant.
pub fn make_grid(cfg: &GridConfig) -> Result<PhaseSpaceGrid> {
    if cfg.n_q < 4 {
        return Err(Error::InvalidGrid(format!("n_q = {} < 4", cfg.n_q)));
    }
    if cfg.n_p < 4 {
        return Err(Error::InvalidGrid(format!("n_p = {} < 4", cfg.n_p)));
    }
    if cfg.momentum_dims != 1 && cfg.momentum_dims != 2 {
        return Err(Error::InvalidGrid(format!(
            "momentum_dims = {} (expected 1 or 2)",
            cfg.momentum_dims
        )));
    }
    let finite = [cfg.q_min, cfg.q_max, cfg.p_min, cfg.p_max]
        .iter()
        .all(|v| v.is_finite());
    if !finite {
        return Err(Error::InvalidGrid("non-finite extents".into()));
    }
    if cfg.q_max <= cfg.q_min {
        return Err(Error::InvalidGrid(format!(
            "inverted position extent [{}, {}]",
            cfg.q_min, cfg.q_max
        )));
    }
    if cfg.p_max <= cfg.p_min {
        return Err(Error::InvalidGrid(format!(
            "inverted momentum extent [{}, {}]",
            cfg.p_min, cfg.p_max
        )));
    }
    if cfg.p_min != -cfg.p_max {
        return Err(Error::InvalidGrid(format!(
            "momentum range [{}, {}] is not symmetric about 0",
            cfg.p_min, cfg.p_max
        )));
    }
    let len = cfg.q_max - cfg.q_min;
    let dq = match cfg.q_boundary {
        QBoundary::Periodic => len / cfg.n_q as f64,
        QBoundary::DirichletInflow => len / (cfg.n_q - 1) as f64,
    };
    let dp = (cfg.p_max - cfg.p_min) / (cfg.n_p - 1) as f64;
    Ok(PhaseSpaceGrid {
        n_q: cfg.n_q,
        n_p: cfg.n_p,
        momentum_dims: cfg.momentum_dims,
        q_min: cfg.q_min,
        q_max: cfg.q_max,
        p_max: cfg.p_max,
        q_boundary: cfg.q_boundary,
        dq,
        dp,
    })
}

impl PhaseSpaceGrid {
    pub fn n_q(&self) -> usize {
        self.n_q
    }

    /// Momentum points per axis.
    pub fn n_p(&self) -> usize {
        self.n_p
    }

    pub fn momentum_dims(&self) -> usize {
        self.momentum_dims
    }

    /// Momentum nodes per position node (`n_p` or `n_p²`).
    pub fn n_mom(&self) -> usize {
        self.n_p.pow(self.momentum_dims as u32)
    }

    /// Total number of phase-space nodes.
    pub fn len(&self) -> usize {
        self.n_q * self.n_mom()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dq(&self) -> f64 {
        self.dq
    }

    pub fn dp(&self) -> f64 {
        self.dp
    }

    /// Momentum-space volume element `dp^dims`.
    pub fn dp_measure(&self) -> f64 {
        self.dp.powi(self.momentum_dims as i32)
    }

    pub fn q_min(&self) -> f64 {
        self.q_min
    }

    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    pub fn p_min(&self) -> f64 {
        -self.p_max
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn q_boundary(&self) -> QBoundary {
        self.q_boundary
    }

    pub fn is_periodic(&self) -> bool {
        self.q_boundary == QBoundary::Periodic
    }

    /// Normalization replacing the `1/(2πħ)^d` prefactor of the density
    /// integral, with ħ = 1.
    pub fn c_norm(&self) -> f64 {
        (2.0 * PI).powi(-(self.momentum_dims as i32))
    }

    pub fn q(&self, iq: usize) -> f64 {
        self.q_min + iq as f64 * self.dq
    }

    /// Coordinate of momentum index `j` along one axis.
    pub fn p_axis(&self, j: usize) -> f64 {
        -self.p_max + j as f64 * self.dp
    }

    /// Per-axis indices `(jx, jy)` of momentum node `m`; `jy` is 0 in 1-D.
    pub fn momentum_indices(&self, m: usize) -> (usize, usize) {
        if self.momentum_dims == 1 {
            (m, 0)
        } else {
            (m / self.n_p, m % self.n_p)
        }
    }

    /// Momentum vector `(p_x, p_y)` of node `m`; `p_y = 0` in 1-D.
    pub fn momentum(&self, m: usize) -> [f64; 2] {
        let (jx, jy) = self.momentum_indices(m);
        if self.momentum_dims == 1 {
            [self.p_axis(jx), 0.0]
        } else {
            [self.p_axis(jx), self.p_axis(jy)]
        }
    }

    pub fn index(&self, iq: usize, m: usize) -> usize {
        iq * self.n_mom() + m
    }

    /// Inverse of [`index`](Self::index).
    pub fn split(&self, idx: usize) -> (usize, usize) {
        let n_mom = self.n_mom();
        (idx / n_mom, idx % n_mom)
    }

    /// Stride between neighbouring nodes along momentum axis `axis`.
    pub(crate) fn p_stride(&self, axis: usize) -> usize {
        if self.momentum_dims == 2 && axis == 0 {
            self.n_p
        } else {
            1
        }
    }

    /// Index of node `m` along momentum axis `axis`.
    pub(crate) fn p_coord(&self, m: usize, axis: usize) -> usize {
        let (jx, jy) = self.momentum_indices(m);
        if axis == 0 {
            jx
        } else {
            jy
        }
    }

    /// True when node `idx` lies strictly inside the grid: not on a momentum
    /// edge, and not on a position edge for non-periodic grids.
    pub fn is_interior(&self, idx: usize) -> bool {
        let (iq, m) = self.split(idx);
        let (jx, jy) = self.momentum_indices(m);
        let p_edge = |j: usize| j == 0 || j + 1 == self.n_p;
        if p_edge(jx) || (self.momentum_dims == 2 && p_edge(jy)) {
            return false;
        }
        self.is_periodic() || (iq != 0 && iq + 1 != self.n_q)
    }

    pub fn q_nodes(&self) -> Vec<f64> {
        (0..self.n_q).map(|i| self.q(i)).collect()
    }

    pub fn p_nodes(&self) -> Vec<f64> {
        (0..self.n_p).map(|j| self.p_axis(j)).collect()
    }

    pub fn config(&self) -> GridConfig {
        GridConfig {
            n_q: self.n_q,
            n_p: self.n_p,
            momentum_dims: self.momentum_dims,
            q_min: self.q_min,
            q_max: self.q_max,
            p_min: -self.p_max,
            p_max: self.p_max,
            q_boundary: self.q_boundary,
        }
    }
}
