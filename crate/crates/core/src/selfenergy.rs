//! Self-energy spinor decomposition and collision closures.
//!
//! A spinor self-energy splits into a spin-independent scalar part and a
//! vector part along the Pauli matrices. Scattering-out rates and spectral
//! functions follow from the imaginary parts of the retarded quantities:
//! `Γ̄ = −Im Σ̄ʳ`, `γ = −Im Ξʳ`, `Ā = −Im S̄ʳ`, `𝒜 = −Im Sʳ`.
//!
//! Two closures supply the scattering terms used by the transport equation:
//!
//! * a relaxation-time closure bridging to Bloch phenomenology: momentum
//!   relaxation at `1/τ_p` toward a Gaussian equilibrium, transverse spin
//!   dephasing at `1/T2` and longitudinal relaxation at `1/T1`. The scalar
//!   scattering-out rate plays the role of `ħ/T2` here.
//! * a table closure that reads static phase-space self-energy fields.
//!
//! Every closure exposes its scattering-out and scattering-in pieces
//! separately so the transport module can toggle them independently.

use crate::error::{Error, Result};
use crate::moyal::PhaseField;
use crate::phase_space::{PhaseSpaceGrid, SpinChargeState};
use crate::vec3::{dot, normalized, Vec3};

/// `Γ̄ = −Im Σ̄ʳ` elementwise. The real part is only checked for shape.
pub fn gamma_from_retarded(re: &PhaseField, im: &PhaseField) -> Result<PhaseField> {
    if re.values.len() != im.values.len() {
        return Err(Error::GridMismatch {
            expected: re.values.len(),
            found: im.values.len(),
        });
    }
    Ok(negated("gamma", im))
}

/// Vector version: `γ = −Im Ξʳ`, component by component.
pub fn gamma_vec_from_retarded(
    re: &[PhaseField; 3],
    im: &[PhaseField; 3],
) -> Result<[PhaseField; 3]> {
    Ok([
        gamma_from_retarded(&re[0], &im[0])?,
        gamma_from_retarded(&re[1], &im[1])?,
        gamma_from_retarded(&re[2], &im[2])?,
    ])
}

/// `Ā = −Im S̄ʳ` and `𝒜 = −Im Sʳ`.
pub fn spectral_from_retarded(
    im_s0_r: &PhaseField,
    im_s_r: &[PhaseField; 3],
) -> Result<(PhaseField, [PhaseField; 3])> {
    let n = im_s0_r.values.len();
    if let Some(bad) = im_s_r.iter().find(|f| f.values.len() != n) {
        return Err(Error::GridMismatch {
            expected: n,
            found: bad.values.len(),
        });
    }
    Ok((
        negated("a_bar", im_s0_r),
        [
            negated("a_x", &im_s_r[0]),
            negated("a_y", &im_s_r[1]),
            negated("a_z", &im_s_r[2]),
        ],
    ))
}

fn negated(name: &str, f: &PhaseField) -> PhaseField {
    PhaseField::new(name, f.values.iter().map(|v| -v).collect())
}

/// Static phase-space self-energy data for the table closure.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfEnergySet {
    /// `Re Σ̄ʳ`
    pub re_sigma_r: PhaseField,
    /// `Γ̄`, non-negative.
    pub gamma_bar: PhaseField,
    /// `γ`
    pub gamma_vec: [PhaseField; 3],
    /// `Re Ξʳ`
    pub re_xi_r: [PhaseField; 3],
    /// Phase-space symbol of `−iħ Σ̄^<`.
    pub sigma_less: PhaseField,
    /// `Ξ^<`
    pub xi_less: [PhaseField; 3],
    /// `Ā`
    pub a_bar: PhaseField,
    /// `𝒜`
    pub a_vec: [PhaseField; 3],
    /// `Re S₀ʳ`
    pub re_s0_r: PhaseField,
    /// `Im S₀ʳ`
    pub im_s0_r: PhaseField,
    /// `Re Sʳ`
    pub re_s_r: [PhaseField; 3],
}

/// File stems used when the set is stored as one CSV per field, in the
/// order of [`SelfEnergySet::fields`].
pub const TABLE_FIELD_NAMES: [&str; 21] = [
    "re_sigma_r",
    "gamma_bar",
    "gamma_x",
    "gamma_y",
    "gamma_z",
    "re_xi_r_x",
    "re_xi_r_y",
    "re_xi_r_z",
    "sigma_less",
    "xi_less_x",
    "xi_less_y",
    "xi_less_z",
    "a_bar",
    "a_x",
    "a_y",
    "a_z",
    "re_s0_r",
    "im_s0_r",
    "re_s_r_x",
    "re_s_r_y",
    "re_s_r_z",
];

impl SelfEnergySet {
    pub fn zeros(grid: &PhaseSpaceGrid) -> Self {
        let z = |n: &str| PhaseField::zeros(n, grid);
        let z3 = |n: &str| {
            [
                z(&format!("{n}_x")),
                z(&format!("{n}_y")),
                z(&format!("{n}_z")),
            ]
        };
        SelfEnergySet {
            re_sigma_r: z("re_sigma_r"),
            gamma_bar: z("gamma_bar"),
            gamma_vec: z3("gamma"),
            re_xi_r: z3("re_xi_r"),
            sigma_less: z("sigma_less"),
            xi_less: z3("xi_less"),
            a_bar: z("a_bar"),
            a_vec: z3("a"),
            re_s0_r: z("re_s0_r"),
            im_s0_r: z("im_s0_r"),
            re_s_r: z3("re_s_r"),
        }
    }

    pub fn fields(&self) -> impl Iterator<Item = &PhaseField> {
        [&self.re_sigma_r, &self.gamma_bar]
            .into_iter()
            .chain(&self.gamma_vec)
            .chain(&self.re_xi_r)
            .chain([&self.sigma_less])
            .chain(&self.xi_less)
            .chain([&self.a_bar])
            .chain(&self.a_vec)
            .chain([&self.re_s0_r, &self.im_s0_r])
            .chain(&self.re_s_r)
    }

    pub fn fields_mut(&mut self) -> impl Iterator<Item = &mut PhaseField> {
        [&mut self.re_sigma_r, &mut self.gamma_bar]
            .into_iter()
            .chain(&mut self.gamma_vec)
            .chain(&mut self.re_xi_r)
            .chain([&mut self.sigma_less])
            .chain(&mut self.xi_less)
            .chain([&mut self.a_bar])
            .chain(&mut self.a_vec)
            .chain([&mut self.re_s0_r, &mut self.im_s0_r])
            .chain(&mut self.re_s_r)
    }

    pub fn check(&self, grid: &PhaseSpaceGrid) -> Result<()> {
        for f in self.fields() {
            f.check(grid)?;
        }
        if let Some(node) = self.gamma_bar.values.iter().position(|&g| g < 0.0) {
            return Err(Error::InvalidState {
                node,
                reason: "negative scattering-out rate gamma_bar".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationClosure {
    pub tau_p: f64,
    pub t1: f64,
    pub t2: f64,
    /// Equilibrium magnetization density; only its projection on
    /// `relax_axis` enters.
    pub m_eq: Vec3,
    pub relax_axis: Vec3,
    /// Width of the Gaussian equilibrium momentum distribution.
    pub eq_width: f64,
    /// Apply momentum relaxation to the spin sector as well, which
    /// isotropizes spin over momentum at rate `1/τ_p` while conserving the
    /// local magnetization.
    pub spin_momentum_scattering: bool,
}

impl Default for RelaxationClosure {
    fn default() -> Self {
        RelaxationClosure {
            tau_p: 1.0,
            t1: 10.0,
            t2: 10.0,
            m_eq: [0.0; 3],
            relax_axis: [0.0, 0.0, 1.0],
            eq_width: 1.0,
            spin_momentum_scattering: false,
        }
    }
}

impl RelaxationClosure {
    pub fn check(&self) -> Result<()> {
        for (name, v) in [
            ("closure.tau_p", self.tau_p),
            ("closure.t1", self.t1),
            ("closure.t2", self.t2),
        ] {
            // Infinite times switch a channel off.
            if !(v > 0.0) {
                return Err(Error::invalid(name, "must be > 0"));
            }
        }
        if !(self.eq_width > 0.0 && self.eq_width.is_finite()) {
            return Err(Error::invalid("closure.eq_width", "must be finite and > 0"));
        }
        if self.m_eq.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("closure.m_eq", "must be finite"));
        }
        let n = dot(self.relax_axis, self.relax_axis).sqrt();
        if !((n - 1.0).abs() <= 1e-12) {
            return Err(Error::invalid("closure.relax_axis", "must be a unit vector"));
        }
        Ok(())
    }

    /// Relaxation axis along `b_ext` when it is nonzero, else `ẑ`.
    pub fn default_axis(b_ext: Vec3) -> Vec3 {
        normalized(b_ext).unwrap_or([0.0, 0.0, 1.0])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableClosure {
    pub set: SelfEnergySet,
    /// Scattering-in prefactor.
    pub c_a: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum SelfEnergyClosure {
    #[default]
    None,
    RelaxationTime(RelaxationClosure),
    Table(Box<TableClosure>),
}

impl SelfEnergyClosure {
    pub fn kind(&self) -> &'static str {
        match self {
            SelfEnergyClosure::None => "none",
            SelfEnergyClosure::RelaxationTime(_) => "relaxation_time",
            SelfEnergyClosure::Table(_) => "table",
        }
    }

    pub fn check(&self, grid: &PhaseSpaceGrid) -> Result<()> {
        match self {
            SelfEnergyClosure::None => Ok(()),
            SelfEnergyClosure::RelaxationTime(r) => r.check(),
            SelfEnergyClosure::Table(t) => {
                if !t.c_a.is_finite() {
                    return Err(Error::invalid("closure.c_a", "must be finite"));
                }
                t.set.check(grid)
            }
        }
    }

    pub fn table(&self) -> Option<&SelfEnergySet> {
        match self {
            SelfEnergyClosure::Table(t) => Some(&t.set),
            _ => None,
        }
    }

    pub fn relaxation(&self) -> Option<&RelaxationClosure> {
        match self {
            SelfEnergyClosure::RelaxationTime(r) => Some(r),
            _ => None,
        }
    }
}

/// Gaussian momentum weight normalized so that `c_norm Σ_p w dp^d = 1`.
pub fn equilibrium_weight(grid: &PhaseSpaceGrid, width: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..grid.n_mom())
        .map(|m| {
            let p = grid.momentum(m);
            (-(p[0] * p[0] + p[1] * p[1]) / (2.0 * width * width)).exp()
        })
        .collect();
    let total = grid.c_norm() * grid.dp_measure() * raw.iter().sum::<f64>();
    raw.into_iter().map(|w| w / total).collect()
}

/// Scattering operator bound to one grid and closure. Holds the
/// equilibrium momentum weight so repeated evaluations do not rebuild it.
#[derive(Debug, Clone)]
pub struct Collisions<'a> {
    grid: &'a PhaseSpaceGrid,
    closure: &'a SelfEnergyClosure,
    weight: Vec<f64>,
}

impl<'a> Collisions<'a> {
    pub fn new(grid: &'a PhaseSpaceGrid, closure: &'a SelfEnergyClosure) -> Result<Self> {
        closure.check(grid)?;
        let weight = match closure {
            SelfEnergyClosure::RelaxationTime(r) => equilibrium_weight(grid, r.eq_width),
            _ => Vec::new(),
        };
        Ok(Collisions {
            grid,
            closure,
            weight,
        })
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    /// Writes the scattering-out contribution into `ds0`/`dspin`
    /// (overwriting them).
    pub fn scattering_out(&self, state: &SpinChargeState, ds0: &mut [f64], dspin: &mut [Vec3]) {
        match self.closure {
            SelfEnergyClosure::None => zero(ds0, dspin),
            SelfEnergyClosure::RelaxationTime(r) => {
                let rate_p = 1.0 / r.tau_p;
                let (r1, r2) = (1.0 / r.t1, 1.0 / r.t2);
                let axis = r.relax_axis;
                for i in 0..state.s0.len() {
                    ds0[i] = -state.s0[i] * rate_p;
                    let m = state.spin[i];
                    let l = dot(m, axis);
                    let mut d = [0.0; 3];
                    for k in 0..3 {
                        let trans = m[k] - l * axis[k];
                        d[k] = -trans * r2 - l * axis[k] * r1;
                        if r.spin_momentum_scattering {
                            d[k] -= m[k] * rate_p;
                        }
                    }
                    dspin[i] = d;
                }
            }
            SelfEnergyClosure::Table(t) => {
                let g = &t.set.gamma_bar.values;
                for i in 0..state.s0.len() {
                    ds0[i] = -g[i] * state.s0[i];
                    let m = state.spin[i];
                    dspin[i] = [-g[i] * m[0], -g[i] * m[1], -g[i] * m[2]];
                }
            }
        }
    }

    /// Writes the scattering-in contribution into `ds0`/`dspin`
    /// (overwriting them).
    pub fn scattering_in(&self, state: &SpinChargeState, ds0: &mut [f64], dspin: &mut [Vec3]) {
        match self.closure {
            SelfEnergyClosure::None => zero(ds0, dspin),
            SelfEnergyClosure::RelaxationTime(r) => {
                let grid = self.grid;
                let n_mom = grid.n_mom();
                let rate_p = 1.0 / r.tau_p;
                let r1 = 1.0 / r.t1;
                let axis = r.relax_axis;
                let l_eq = dot(r.m_eq, axis);
                let c = grid.c_norm();
                let dpm = grid.dp_measure();
                for iq in 0..grid.n_q() {
                    let base = iq * n_mom;
                    let mut n = 0.0;
                    let mut sm = [0.0; 3];
                    for m in 0..n_mom {
                        n += state.s0[base + m];
                        let s = state.spin[base + m];
                        sm[0] += s[0];
                        sm[1] += s[1];
                        sm[2] += s[2];
                    }
                    let local_charge = c * n * dpm;
                    let local_spin = [c * sm[0] * dpm, c * sm[1] * dpm, c * sm[2] * dpm];
                    for m in 0..n_mom {
                        let w = self.weight[m];
                        ds0[base + m] = local_charge * w * rate_p;
                        let mut d = [0.0; 3];
                        for k in 0..3 {
                            d[k] = l_eq * w * axis[k] * r1;
                            if r.spin_momentum_scattering {
                                d[k] += local_spin[k] * w * rate_p;
                            }
                        }
                        dspin[base + m] = d;
                    }
                }
            }
            SelfEnergyClosure::Table(t) => {
                let set = &t.set;
                let sl = &set.sigma_less.values;
                for i in 0..state.s0.len() {
                    let a = [
                        set.a_vec[0].values[i],
                        set.a_vec[1].values[i],
                        set.a_vec[2].values[i],
                    ];
                    let xl = [
                        set.xi_less[0].values[i],
                        set.xi_less[1].values[i],
                        set.xi_less[2].values[i],
                    ];
                    ds0[i] = t.c_a * (sl[i] * set.a_bar.values[i] + dot(xl, a));
                    dspin[i] = [
                        t.c_a * sl[i] * a[0],
                        t.c_a * sl[i] * a[1],
                        t.c_a * sl[i] * a[2],
                    ];
                }
            }
        }
    }
}

fn zero(ds0: &mut [f64], dspin: &mut [Vec3]) {
    ds0.iter_mut().for_each(|v| *v = 0.0);
    dspin.iter_mut().for_each(|v| *v = [0.0; 3]);
}

/// Full collision contribution (scattering-out plus scattering-in).
pub fn collision_terms(
    state: &SpinChargeState,
    closure: &SelfEnergyClosure,
    grid: &PhaseSpaceGrid,
) -> Result<(Vec<f64>, Vec<Vec3>)> {
    state.check_shape(grid)?;
    let ops = Collisions::new(grid, closure)?;
    let n = grid.len();
    let (mut o0, mut os) = (vec![0.0; n], vec![[0.0; 3]; n]);
    let (mut i0, mut is) = (vec![0.0; n], vec![[0.0; 3]; n]);
    ops.scattering_out(state, &mut o0, &mut os);
    ops.scattering_in(state, &mut i0, &mut is);
    for k in 0..n {
        o0[k] += i0[k];
        for c in 0..3 {
            os[k][c] += is[k][c];
        }
    }
    Ok((o0, os))
}
