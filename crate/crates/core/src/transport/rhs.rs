use super::{TermGroup, TermToggles};
use crate::error::{Error, Result};
use crate::fields::{electric_field, FieldConfig};
use crate::moyal::Gradients;
use crate::phase_space::{moment_density, PhaseSpaceGrid, SpinChargeState};
use crate::poisson::{solve_poisson, PoissonConfig};
use crate::selfenergy::{Collisions, SelfEnergyClosure, SelfEnergySet};
use crate::vec3::{cross, Vec3};

/// Ghost values for Dirichlet inflow edges, one entry per momentum node.
#[derive(Debug, Clone, PartialEq)]
pub struct Inflow {
    pub left_s0: Vec<f64>,
    pub left_spin: Vec<Vec3>,
    pub right_s0: Vec<f64>,
    pub right_spin: Vec<Vec3>,
}

impl Inflow {
    /// Freezes the edge columns of `state` as the inflow data.
    pub fn from_state(state: &SpinChargeState, grid: &PhaseSpaceGrid) -> Result<Self> {
        state.check_shape(grid)?;
        let n_mom = grid.n_mom();
        let last = (grid.n_q() - 1) * n_mom;
        Ok(Inflow {
            left_s0: state.s0[..n_mom].to_vec(),
            left_spin: state.spin[..n_mom].to_vec(),
            right_s0: state.s0[last..].to_vec(),
            right_spin: state.spin[last..].to_vec(),
        })
    }

    /// Empty (vacuum) inflow.
    pub fn vacuum(grid: &PhaseSpaceGrid) -> Self {
        let n = grid.n_mom();
        Inflow {
            left_s0: vec![0.0; n],
            left_spin: vec![[0.0; 3]; n],
            right_s0: vec![0.0; n],
            right_spin: vec![[0.0; 3]; n],
        }
    }

    fn component(&self, c: usize) -> (Vec<f64>, Vec<f64>) {
        if c == 0 {
            (self.left_s0.clone(), self.right_s0.clone())
        } else {
            (
                self.left_spin.iter().map(|s| s[c - 1]).collect(),
                self.right_spin.iter().map(|s| s[c - 1]).collect(),
            )
        }
    }
}

/// Static pieces of the table closure: operand gradients and the brackets
/// that do not involve the state.
#[derive(Debug, Clone)]
struct TableTerms {
    re_sigma: Gradients,
    gamma: [Gradients; 3],
    re_xi: [Gradients; 3],
    /// `(c_A/4) ε_ijk {Ξ^<_j, 𝒜_k}`
    torque_static: Vec<Vec3>,
    /// `−½ {Σ^<, Re ℳʳ_i}`
    resig_spin_static: Vec<Vec3>,
    /// `−½ {Σ^<, Re S₀ʳ}`
    resig_s0_static: Vec<f64>,
    /// `−Ξ^<_i Im M₀ʳ − ½ {Ξ^<_i, Re M₀ʳ}`
    charge_static: Vec<Vec3>,
    /// `−½ Σ_j {Ξ^<_j, Re S_jʳ}`
    scalar_static: Vec<f64>,
}

impl TableTerms {
    fn build(grid: &PhaseSpaceGrid, set: &SelfEnergySet, c_a: f64, ms: f64) -> Self {
        let n = grid.len();
        let g = |v: &[f64]| Gradients::of(grid, v);
        let xi_less = [
            g(&set.xi_less[0].values),
            g(&set.xi_less[1].values),
            g(&set.xi_less[2].values),
        ];
        let a_vec = [
            g(&set.a_vec[0].values),
            g(&set.a_vec[1].values),
            g(&set.a_vec[2].values),
        ];
        let re_s = [
            g(&set.re_s_r[0].values),
            g(&set.re_s_r[1].values),
            g(&set.re_s_r[2].values),
        ];
        let sigma_less = g(&set.sigma_less.values);
        let re_s0 = g(&set.re_s0_r.values);

        let mut torque_static = vec![[0.0; 3]; n];
        let mut resig_spin_static = vec![[0.0; 3]; n];
        let mut resig_s0_static = vec![0.0; n];
        let mut charge_static = vec![[0.0; 3]; n];
        let mut scalar_static = vec![0.0; n];
        for idx in 0..n {
            let eps = levi_civita_bracket(&xi_less, &a_vec, idx);
            let im_m0 = ms * set.im_s0_r.values[idx];
            let pb_xi_res0 = |i: usize| Gradients::bracket(&xi_less[i], &re_s0, idx);
            let mut scalar = 0.0;
            for i in 0..3 {
                torque_static[idx][i] = 0.25 * c_a * eps[i];
                resig_spin_static[idx][i] =
                    -0.5 * ms * Gradients::bracket(&sigma_less, &re_s[i], idx);
                charge_static[idx][i] =
                    -set.xi_less[i].values[idx] * im_m0 - 0.5 * ms * pb_xi_res0(i);
                scalar += Gradients::bracket(&xi_less[i], &re_s[i], idx);
            }
            resig_s0_static[idx] = -0.5 * Gradients::bracket(&sigma_less, &re_s0, idx);
            scalar_static[idx] = -0.5 * scalar;
        }
        TableTerms {
            re_sigma: g(&set.re_sigma_r.values),
            gamma: [
                g(&set.gamma_vec[0].values),
                g(&set.gamma_vec[1].values),
                g(&set.gamma_vec[2].values),
            ],
            re_xi: [
                g(&set.re_xi_r[0].values),
                g(&set.re_xi_r[1].values),
                g(&set.re_xi_r[2].values),
            ],
            torque_static,
            resig_spin_static,
            resig_s0_static,
            charge_static,
            scalar_static,
        }
    }
}

/// `ε_ijk {a_j, b_k}` at one node.
fn levi_civita_bracket(a: &[Gradients; 3], b: &[Gradients; 3], idx: usize) -> Vec3 {
    let pb = |j: usize, k: usize| Gradients::bracket(&a[j], &b[k], idx);
    [
        pb(1, 2) - pb(2, 1),
        pb(2, 0) - pb(0, 2),
        pb(0, 1) - pb(1, 0),
    ]
}

/// Gradients of the state's charge and spin components.
struct StateGradients {
    s0: Gradients,
    spin: [Gradients; 3],
}

impl StateGradients {
    fn of(grid: &PhaseSpaceGrid, state: &SpinChargeState) -> Self {
        let comp = |c: usize| -> Vec<f64> { state.spin.iter().map(|s| s[c]).collect() };
        StateGradients {
            s0: Gradients::of(grid, &state.s0),
            spin: [
                Gradients::of(grid, &comp(0)),
                Gradients::of(grid, &comp(1)),
                Gradients::of(grid, &comp(2)),
            ],
        }
    }
}

/// Right-hand side of the transport equations bound to one grid, field
/// configuration, closure and toggle set.
///
/// Construction precomputes everything that does not depend on the state:
/// node velocities, the equilibrium weight of the closure and the static
/// table brackets.
#[derive(Debug, Clone)]
pub struct TransportOperator<'a> {
    grid: &'a PhaseSpaceGrid,
    fields: &'a FieldConfig,
    closure: &'a SelfEnergyClosure,
    toggles: TermToggles,
    collisions: Collisions<'a>,
    poisson: PoissonConfig,
    inflow: Inflow,
    device: Vec<f64>,
    velocity: Vec<Vec3>,
    table: Option<TableTerms>,
}

impl<'a> TransportOperator<'a> {
    pub fn new(
        grid: &'a PhaseSpaceGrid,
        fields: &'a FieldConfig,
        closure: &'a SelfEnergyClosure,
        toggles: TermToggles,
    ) -> Result<Self> {
        fields.check()?;
        let collisions = Collisions::new(grid, closure)?;
        let velocity = (0..grid.len())
            .map(|idx| {
                let (iq, m) = grid.split(idx);
                fields.kinetic_momentum(grid.momentum(m), grid.q(iq))
            })
            .collect();
        let ms = fields.mag_scale();
        let table = match closure {
            SelfEnergyClosure::Table(t) => Some(TableTerms::build(grid, &t.set, t.c_a, ms)),
            _ => None,
        };
        Ok(TransportOperator {
            grid,
            fields,
            closure,
            toggles,
            collisions,
            poisson: PoissonConfig::default(),
            inflow: Inflow::vacuum(grid),
            device: fields.device.profile(grid),
            velocity,
            table,
        })
    }

    /// Electrostatics used when `fields.use_poisson` is set.
    pub fn with_poisson(mut self, cfg: PoissonConfig) -> Result<Self> {
        cfg.check()?;
        self.poisson = cfg;
        Ok(self)
    }

    /// Ghost data for Dirichlet inflow edges (vacuum by default).
    pub fn with_inflow(mut self, inflow: Inflow) -> Result<Self> {
        let n = self.grid.n_mom();
        let lens = [
            inflow.left_s0.len(),
            inflow.left_spin.len(),
            inflow.right_s0.len(),
            inflow.right_spin.len(),
        ];
        if let Some(&bad) = lens.iter().find(|&&l| l != n) {
            return Err(Error::GridMismatch {
                expected: n,
                found: bad,
            });
        }
        self.inflow = inflow;
        Ok(self)
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        self.grid
    }

    pub fn toggles(&self) -> TermToggles {
        self.toggles
    }

    /// Total potential: device profile plus the self-consistent part.
    pub fn potential(&self, state: &SpinChargeState) -> Result<Vec<f64>> {
        let mut phi = self.device.clone();
        if self.fields.use_poisson {
            let moments = moment_density(state, self.grid)?;
            let sc = solve_poisson(&moments.rho, &self.poisson, self.grid)?;
            for (p, s) in phi.iter_mut().zip(sc) {
                *p += s;
            }
        }
        Ok(phi)
    }

    /// Time derivative with the potential recomputed from `state`.
    pub fn rhs(&self, state: &SpinChargeState) -> Result<SpinChargeState> {
        let phi = self.potential(state)?;
        self.assemble_rhs(state, Some(&phi))
    }

    /// Sum of the enabled term groups for a given potential (`None` means
    /// zero potential). Each group is evaluated into its own buffer and
    /// added to the total in [`TermGroup::ALL`] order.
    pub fn assemble_rhs(
        &self,
        state: &SpinChargeState,
        phi: Option<&[f64]>,
    ) -> Result<SpinChargeState> {
        let ctx = self.context(state, phi)?;
        let mut total = SpinChargeState::zeros(self.grid);
        total.time = state.time;
        for group in self.toggles.enabled_groups() {
            let buf = self.eval_group(group, state, &ctx)?;
            for (t, b) in total.s0.iter_mut().zip(&buf.s0) {
                *t += b;
            }
            for (t, b) in total.spin.iter_mut().zip(&buf.spin) {
                t[0] += b[0];
                t[1] += b[1];
                t[2] += b[2];
            }
        }
        Ok(total)
    }

    /// Contribution of a single term group, regardless of the toggles.
    pub fn group_rhs(
        &self,
        group: TermGroup,
        state: &SpinChargeState,
        phi: Option<&[f64]>,
    ) -> Result<SpinChargeState> {
        let ctx = self.context(state, phi)?;
        self.eval_group(group, state, &ctx)
    }

    /// `0.5 · min(dq/v_max, dp/F_max)` over the enabled advective groups;
    /// infinite when neither is active or all speeds vanish.
    pub fn cfl_limit(&self, phi: Option<&[f64]>) -> Result<f64> {
        let mut limit = f64::INFINITY;
        if self.toggles.drift {
            let v_max = self.velocity.iter().fold(0.0f64, |a, v| a.max(v[0].abs()));
            if v_max > 0.0 {
                limit = limit.min(self.grid.dq() / v_max);
            }
        }
        if self.toggles.lorentz {
            let e = self.e_field(phi)?;
            let mut f_max = 0.0f64;
            for idx in 0..self.grid.len() {
                let (iq, _) = self.grid.split(idx);
                let a = self.force(idx, e[iq]);
                for axis in 0..self.grid.momentum_dims() {
                    f_max = f_max.max(a[axis].abs());
                }
            }
            if f_max > 0.0 {
                limit = limit.min(self.grid.dp() / f_max);
            }
        }
        Ok(0.5 * limit)
    }

    fn e_field(&self, phi: Option<&[f64]>) -> Result<Vec<f64>> {
        match phi {
            Some(phi) => {
                if phi.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite {
                        group: "potential",
                        time: f64::NAN,
                    });
                }
                electric_field(self.grid, phi, self.fields.e_ext)
            }
            None => Ok(vec![self.fields.e_ext; self.grid.n_q()]),
        }
    }

    /// Force `e (E x̂ + h v × B)` with `e = +1`.
    fn force(&self, idx: usize, e_local: f64) -> Vec3 {
        let h = if self.fields.lorentz_half_factor { 0.5 } else { 1.0 };
        let vxb = cross(self.velocity[idx], self.fields.b_ext);
        [e_local + h * vxb[0], h * vxb[1], h * vxb[2]]
    }

    fn context(&self, state: &SpinChargeState, phi: Option<&[f64]>) -> Result<Context> {
        state.check_shape(self.grid)?;
        let e = self.e_field(phi)?;
        let t = &self.toggles;
        let needs_field = t.precession || t.charge_coupling || t.scalar_spin_coupling;
        let b_eff: Vec<Vec3> = if needs_field {
            (0..self.grid.len())
                .map(|idx| {
                    let (iq, m) = self.grid.split(idx);
                    self.fields.effective_field(self.grid.momentum(m), e[iq])
                })
                .collect()
        } else {
            Vec::new()
        };
        let needs_brackets = t.torque_gamma
            || t.re_sigma_corrections
            || t.charge_coupling
            || t.scalar_spin_coupling;
        let grads = needs_brackets.then(|| StateGradients::of(self.grid, state));
        let b_grads = if t.charge_coupling || t.scalar_spin_coupling {
            let comp = |c: usize| -> Vec<f64> { b_eff.iter().map(|b| b[c]).collect() };
            Some([
                Gradients::of(self.grid, &comp(0)),
                Gradients::of(self.grid, &comp(1)),
                Gradients::of(self.grid, &comp(2)),
            ])
        } else {
            None
        };
        Ok(Context {
            e,
            b_eff,
            grads,
            b_grads,
        })
    }

    fn eval_group(
        &self,
        group: TermGroup,
        state: &SpinChargeState,
        ctx: &Context,
    ) -> Result<SpinChargeState> {
        let mut buf = SpinChargeState::zeros(self.grid);
        buf.time = state.time;
        match group {
            TermGroup::Drift => self.drift(state, &mut buf),
            TermGroup::Lorentz => self.lorentz(state, ctx, &mut buf),
            TermGroup::Precession => {
                for (d, (bf, m)) in buf.spin.iter_mut().zip(ctx.b_eff.iter().zip(&state.spin)) {
                    *d = cross(*bf, *m);
                }
            }
            TermGroup::ScatteringOut => {
                self.collisions
                    .scattering_out(state, &mut buf.s0, &mut buf.spin)
            }
            TermGroup::ScatteringIn => {
                self.collisions
                    .scattering_in(state, &mut buf.s0, &mut buf.spin)
            }
            TermGroup::TorqueGamma => self.torque_gamma(state, ctx, &mut buf),
            TermGroup::ReSigmaCorrections => self.re_sigma(state, ctx, &mut buf),
            TermGroup::ReXiTorque => self.re_xi_torque(state, &mut buf),
            TermGroup::ChargeCoupling => self.charge_coupling(state, ctx, &mut buf),
            TermGroup::ScalarSpinCoupling => self.scalar_spin_coupling(state, ctx, &mut buf),
        }
        if !buf.is_finite() {
            return Err(Error::NonFinite {
                group: group.name(),
                time: state.time,
            });
        }
        Ok(buf)
    }

    fn drift(&self, state: &SpinChargeState, buf: &mut SpinChargeState) {
        let vel: Vec<f64> = self.velocity.iter().map(|v| v[0]).collect();
        let mut dst = vec![0.0; self.grid.len()];
        for c in 0..4 {
            let src = component(state, c);
            let (gl, gr) = self.inflow.component(c);
            advect_q(self.grid, &vel, &src, &gl, &gr, &mut dst);
            store(buf, c, &dst);
        }
    }

    fn lorentz(&self, state: &SpinChargeState, ctx: &Context, buf: &mut SpinChargeState) {
        let n = self.grid.len();
        let mut acc = vec![0.0; n];
        let mut dst = vec![0.0; n];
        let forces: Vec<Vec3> = (0..n)
            .map(|idx| self.force(idx, ctx.e[self.grid.split(idx).0]))
            .collect();
        for c in 0..4 {
            let src = component(state, c);
            acc.iter_mut().for_each(|v| *v = 0.0);
            for axis in 0..self.grid.momentum_dims() {
                let a: Vec<f64> = forces.iter().map(|f| f[axis]).collect();
                advect_p(self.grid, axis, &a, &src, &mut dst);
                for (x, d) in acc.iter_mut().zip(&dst) {
                    *x += d;
                }
            }
            store(buf, c, &acc);
        }
    }

    fn torque_gamma(&self, state: &SpinChargeState, ctx: &Context, buf: &mut SpinChargeState) {
        let (Some(tab), Some(set), Some(g)) = (&self.table, self.closure.table(), &ctx.grads)
        else {
            return;
        };
        let ms = self.fields.mag_scale();
        for idx in 0..self.grid.len() {
            let eps = levi_civita_bracket(&tab.gamma, &g.spin, idx);
            let gamma = [
                set.gamma_vec[0].values[idx],
                set.gamma_vec[1].values[idx],
                set.gamma_vec[2].values[idx],
            ];
            let m0 = ms * state.s0[idx];
            let mut d = [0.0; 3];
            for i in 0..3 {
                d[i] = -0.5 * eps[i] + tab.torque_static[idx][i] - gamma[i] * m0;
            }
            buf.spin[idx] = d;
            let s = state.spin[idx];
            buf.s0[idx] = -(gamma[0] * s[0] + gamma[1] * s[1] + gamma[2] * s[2]) / ms;
        }
    }

    fn re_sigma(&self, _state: &SpinChargeState, ctx: &Context, buf: &mut SpinChargeState) {
        let (Some(tab), Some(g)) = (&self.table, &ctx.grads) else {
            return;
        };
        for idx in 0..self.grid.len() {
            for i in 0..3 {
                buf.spin[idx][i] = -0.5 * Gradients::bracket(&tab.re_sigma, &g.spin[i], idx)
                    + tab.resig_spin_static[idx][i];
            }
            buf.s0[idx] =
                -0.5 * Gradients::bracket(&tab.re_sigma, &g.s0, idx) + tab.resig_s0_static[idx];
        }
    }

    fn re_xi_torque(&self, state: &SpinChargeState, buf: &mut SpinChargeState) {
        let Some(set) = self.closure.table() else {
            return;
        };
        let ms = self.fields.mag_scale();
        let at = |f: &[crate::moyal::PhaseField; 3], idx: usize| -> Vec3 {
            [f[0].values[idx], f[1].values[idx], f[2].values[idx]]
        };
        for idx in 0..self.grid.len() {
            let re_xi = at(&set.re_xi_r, idx);
            let xi_less = at(&set.xi_less, idx);
            let re_s = at(&set.re_s_r, idx);
            let re_m = [ms * re_s[0], ms * re_s[1], ms * re_s[2]];
            let a = cross(re_xi, state.spin[idx]);
            let b = cross(xi_less, re_m);
            buf.spin[idx] = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
        }
    }

    fn charge_coupling(&self, _state: &SpinChargeState, ctx: &Context, buf: &mut SpinChargeState) {
        let (Some(g), Some(bg)) = (&ctx.grads, &ctx.b_grads) else {
            return;
        };
        let ms = self.fields.mag_scale();
        for idx in 0..self.grid.len() {
            for i in 0..3 {
                let mut d = -0.5 * ms * Gradients::bracket(&bg[i], &g.s0, idx);
                if let Some(tab) = &self.table {
                    d += -0.5 * ms * Gradients::bracket(&tab.re_xi[i], &g.s0, idx)
                        + tab.charge_static[idx][i];
                }
                buf.spin[idx][i] = d;
            }
        }
    }

    fn scalar_spin_coupling(
        &self,
        _state: &SpinChargeState,
        ctx: &Context,
        buf: &mut SpinChargeState,
    ) {
        let (Some(g), Some(bg)) = (&ctx.grads, &ctx.b_grads) else {
            return;
        };
        let inv_ms = 1.0 / self.fields.mag_scale();
        for idx in 0..self.grid.len() {
            let mut field = 0.0;
            let mut table = 0.0;
            for j in 0..3 {
                field += Gradients::bracket(&bg[j], &g.spin[j], idx);
                if let Some(tab) = &self.table {
                    table += Gradients::bracket(&tab.re_xi[j], &g.spin[j], idx);
                }
            }
            let mut d = -0.5 * inv_ms * field;
            if let Some(tab) = &self.table {
                d += -0.5 * inv_ms * table + tab.scalar_static[idx];
            }
            buf.s0[idx] = d;
        }
    }
}

struct Context {
    e: Vec<f64>,
    b_eff: Vec<Vec3>,
    grads: Option<StateGradients>,
    b_grads: Option<[Gradients; 3]>,
}

/// Component `c` of the state: 0 is `s0`, 1..=3 are the spin components.
fn component(state: &SpinChargeState, c: usize) -> Vec<f64> {
    if c == 0 {
        state.s0.clone()
    } else {
        state.spin.iter().map(|s| s[c - 1]).collect()
    }
}

fn store(buf: &mut SpinChargeState, c: usize, values: &[f64]) {
    if c == 0 {
        buf.s0.copy_from_slice(values);
    } else {
        for (s, v) in buf.spin.iter_mut().zip(values) {
            s[c - 1] = *v;
        }
    }
}

/// Upwind flux of `a⁺ F_left + a⁻ F_right`.
#[inline]
fn upwind(a: f64, left: f64, right: f64) -> f64 {
    if a > 0.0 {
        a * left
    } else {
        a * right
    }
}

/// Conservative first-order upwind form of `−∂(vF)/∂q`.
///
/// Periodic grids wrap; Dirichlet grids take the ghost value on the inflow
/// side and the edge value on the outflow side.
fn advect_q(
    grid: &PhaseSpaceGrid,
    vel: &[f64],
    src: &[f64],
    ghost_left: &[f64],
    ghost_right: &[f64],
    dst: &mut [f64],
) {
    let n_q = grid.n_q();
    let n_mom = grid.n_mom();
    let inv = 1.0 / grid.dq();
    let periodic = grid.is_periodic();
    let mut flux = vec![0.0; n_q + 1];
    for m in 0..n_mom {
        let at = |iq: usize| iq * n_mom + m;
        // flux[k] is the face between nodes k-1 and k
        for k in 1..n_q {
            let a = 0.5 * (vel[at(k - 1)] + vel[at(k)]);
            flux[k] = upwind(a, src[at(k - 1)], src[at(k)]);
        }
        if periodic {
            let a = 0.5 * (vel[at(n_q - 1)] + vel[at(0)]);
            let f = upwind(a, src[at(n_q - 1)], src[at(0)]);
            flux[0] = f;
            flux[n_q] = f;
        } else {
            flux[0] = upwind(vel[at(0)], ghost_left[m], src[at(0)]);
            flux[n_q] = upwind(vel[at(n_q - 1)], src[at(n_q - 1)], ghost_right[m]);
        }
        for iq in 0..n_q {
            dst[at(iq)] = -(flux[iq + 1] - flux[iq]) * inv;
        }
    }
}

/// Conservative first-order upwind form of `−∂(aF)/∂p_axis` with zero flux
/// through the outer momentum faces.
fn advect_p(grid: &PhaseSpaceGrid, axis: usize, accel: &[f64], src: &[f64], dst: &mut [f64]) {
    let n_p = grid.n_p();
    let stride = grid.p_stride(axis);
    let inv = 1.0 / grid.dp();
    for idx in 0..src.len() {
        let (_, m) = grid.split(idx);
        let j = grid.p_coord(m, axis);
        let lo = if j == 0 {
            0.0
        } else {
            let a = 0.5 * (accel[idx - stride] + accel[idx]);
            upwind(a, src[idx - stride], src[idx])
        };
        let hi = if j + 1 == n_p {
            0.0
        } else {
            let a = 0.5 * (accel[idx] + accel[idx + stride]);
            upwind(a, src[idx], src[idx + stride])
        };
        dst[idx] = -(hi - lo) * inv;
    }
}

/// Scattering-free right-hand side: drift, force and precession only.
pub fn ballistic_rhs(
    state: &SpinChargeState,
    fields: &FieldConfig,
    grid: &PhaseSpaceGrid,
) -> Result<SpinChargeState> {
    let closure = SelfEnergyClosure::None;
    let op = TransportOperator::new(grid, fields, &closure, TermToggles::ballistic())?;
    op.rhs(state)
}
