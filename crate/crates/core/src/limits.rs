//! Limit-recovery and property checks, one function per acceptance
//! criterion. Each returns a [`LimitReport`] with the measured quantities
//! and the bounds they were held to.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{
    convergence_orders, fit_angular_frequency, fit_decay_rate, linear_fit, profile_moments,
    relative_l2,
};
use crate::bloch::{bloch_run, BlochConfig, BlochParams, BlochState};
use crate::error::{Error, Result};
use crate::fields::{DevicePotential, FieldConfig};
use crate::moyal::{poisson_bracket, PhaseField};
use crate::output::{write_observables, DEFAULT_PRECISION};
use crate::phase_space::{
    init_gaussian, make_grid, moment_density, GridConfig, InitialCondition, PhaseSpaceGrid,
    QBoundary, SpinChargeState,
};
use crate::poisson::{solve_poisson, PoissonConfig};
use crate::scenarios::{self, Scenario};
use crate::selfenergy::{RelaxationClosure, SelfEnergyClosure, SelfEnergySet, TableClosure};
use crate::transport::{
    rk4_step, run, RunConfig, SnapshotSeries, TermGroup, TermToggles, TransportOperator,
};
use crate::vec3::norm;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    pub name: &'static str,
    pub value: f64,
    pub bound: Bound,
}

impl Metric {
    pub fn at_most(name: &'static str, value: f64, limit: f64) -> Self {
        Metric {
            name,
            value,
            bound: Bound::AtMost(limit),
        }
    }

    pub fn at_least(name: &'static str, value: f64, limit: f64) -> Self {
        Metric {
            name,
            value,
            bound: Bound::AtLeast(limit),
        }
    }

    pub fn ok(&self) -> bool {
        match self.bound {
            Bound::AtMost(l) => self.value <= l,
            Bound::AtLeast(l) => self.value >= l,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bound {
            Bound::AtMost(l) => write!(f, "{}={:.3e} (<= {:.1e})", self.name, self.value, l),
            Bound::AtLeast(l) => write!(f, "{}={:.4} (>= {})", self.name, self.value, l),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport {
    pub id: u8,
    pub name: &'static str,
    pub metrics: Vec<Metric>,
    /// Set when the check could not be carried out.
    pub error: Option<String>,
}

impl LimitReport {
    fn new(id: u8, name: &'static str, outcome: Result<Vec<Metric>>) -> Self {
        match outcome {
            Ok(metrics) => LimitReport {
                id,
                name,
                metrics,
                error: None,
            },
            Err(e) => LimitReport {
                id,
                name,
                metrics: Vec::new(),
                error: Some(e.to_string()),
            },
        }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && !self.metrics.is_empty() && self.metrics.iter().all(Metric::ok)
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|m| m.name == name).map(|m| m.value)
    }
}

impl fmt::Display for LimitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {} {}", self.id, self.name)?;
        if let Some(e) = &self.error {
            return write!(f, ": error: {e}");
        }
        for (i, m) in self.metrics.iter().enumerate() {
            write!(f, "{}{m}", if i == 0 { ": " } else { ", " })?;
        }
        Ok(())
    }
}

/// Runs every check in order.
pub fn run_all() -> Vec<LimitReport> {
    vec![
        larmor(),
        relaxation(),
        bloch_limit(),
        charge_conservation(),
        poisson_convergence(),
        moyal_kernel(),
        dp_narrowing(),
        additivity_and_determinism(),
        rk4_order(),
    ]
}

fn run_ok(cfg: &RunConfig) -> Result<SnapshotSeries> {
    run(cfg).map_err(|f| f.error)
}

fn column(series: &SnapshotSeries, f: impl Fn(&crate::transport::Observables) -> f64) -> Vec<f64> {
    series.observables.iter().map(f).collect()
}

/// 1: ballistic precession of a uniform state.
pub fn larmor() -> LimitReport {
    LimitReport::new(1, "larmor_precession", larmor_metrics())
}

fn larmor_metrics() -> Result<Vec<Metric>> {
    let cfg = Scenario::Larmor.preset();
    let series = run_ok(&cfg)?;
    let t = column(&series, |o| o.t);
    let mx = column(&series, |o| o.mx_mean);
    let omega = fit_angular_frequency(&t, &mx)?;
    let expected = cfg.fields.zeeman_scale * norm(cfg.fields.b_ext);
    let n0 = series.observables[0].m_norm_mean;
    let mean_drift = series
        .observables
        .iter()
        .map(|o| (o.m_norm_mean - n0).abs())
        .fold(0.0, f64::max);
    let first = &series.snapshots[0];
    let node_drift = first
        .spin
        .iter()
        .zip(&series.final_state.spin)
        .map(|(a, b)| (norm(*a) - norm(*b)).abs())
        .fold(0.0, f64::max);
    Ok(vec![
        Metric::at_most("frequency_rel_error", (omega - expected).abs() / expected, 1e-6),
        Metric::at_most("mean_norm_drift", mean_drift, 1e-10),
        Metric::at_most("node_norm_drift", node_drift, 1e-10),
    ])
}

/// 2: transverse decay and longitudinal recovery under the relaxation
/// closure.
pub fn relaxation() -> LimitReport {
    LimitReport::new(2, "t2_t1_relaxation", relaxation_metrics())
}

fn relaxation_metrics() -> Result<Vec<Metric>> {
    let cfg = Scenario::T2Decay.preset();
    let SelfEnergyClosure::RelaxationTime(r) = &cfg.closure else {
        return Err(Error::invalid("closure", "t2_decay preset must use relaxation"));
    };
    let t2 = r.t2;
    let series = run_ok(&cfg)?;
    let at_t2 = series
        .observables
        .iter()
        .min_by(|a, b| (a.t - t2).abs().total_cmp(&(b.t - t2).abs()))
        .ok_or_else(|| Error::invalid("series", "empty"))?;
    let ratio = at_t2.mx_mean / series.observables[0].mx_mean;
    let exact = (-at_t2.t / t2).exp();
    let t2_err = (ratio - exact).abs() / exact;

    let cfg = Scenario::T1Recovery.preset();
    let SelfEnergyClosure::RelaxationTime(r) = &cfg.closure else {
        return Err(Error::invalid("closure", "t1_recovery preset must use relaxation"));
    };
    let (t1, m_eq) = (r.t1, r.m_eq[2]);
    let series = run_ok(&cfg)?;
    let t = column(&series, |o| o.t);
    let dev: Vec<f64> = series.observables.iter().map(|o| o.mz_mean - m_eq).collect();
    let rate = fit_decay_rate(&t, &dev)?;
    let t1_err = (rate * t1 - 1.0).abs();
    Ok(vec![
        Metric::at_most("t2_ratio_rel_error", t2_err, 1e-6),
        Metric::at_most("t1_rate_rel_error", t1_err, 1e-4),
    ])
}

/// 3: position moments of a collision-dominated run against the Bloch
/// equations with the diffusion constant measured from the charge sector.
pub fn bloch_limit() -> LimitReport {
    LimitReport::new(3, "diffusive_bloch_limit", bloch_metrics())
}

/// Outcome of the diffusive comparison, exposed for diagnostics.
#[derive(Debug, Clone)]
pub struct BlochComparison {
    pub diffusion: f64,
    pub times: Vec<f64>,
    pub rel_l2: Vec<f64>,
    pub seconds: f64,
}

pub fn bloch_comparison() -> Result<BlochComparison> {
    let start = Instant::now();
    let mut cfg = Scenario::BlochLimit.preset();
    cfg.snapshot_every = cfg.output_every;
    let SelfEnergyClosure::RelaxationTime(r) = cfg.closure.clone() else {
        return Err(Error::invalid("closure", "bloch_limit preset must use relaxation"));
    };
    let series = run_ok(&cfg)?;
    let grid = &series.grid;
    let q = grid.q_nodes();

    let mut times = Vec::new();
    let mut moments = Vec::new();
    for s in &series.snapshots {
        times.push(s.time);
        moments.push(moment_density(s, grid)?);
    }
    // Diffusion constant from the late-time growth of the charge variance.
    let t_end = *times.last().unwrap_or(&0.0);
    let (mut tv, mut vv) = (Vec::new(), Vec::new());
    for (t, m) in times.iter().zip(&moments) {
        if *t >= 0.25 * t_end {
            tv.push(*t);
            vv.push(profile_moments(&q, &m.rho).1);
        }
    }
    let (slope, _) = linear_fit(&tv, &vv)?;
    let diffusion = 0.5 * slope;

    let params = BlochParams {
        diffusion,
        t1: r.t1,
        t2: r.t2,
        gamma: -1.0,
        m0: 0.0,
        b: [
            cfg.fields.zeeman_scale * cfg.fields.b_ext[0],
            cfg.fields.zeeman_scale * cfg.fields.b_ext[1],
            cfg.fields.zeeman_scale * cfg.fields.b_ext[2],
        ],
    };
    let bcfg = BlochConfig {
        params,
        dt: cfg.dt,
        n_steps: cfg.n_steps,
        output_every: cfg.output_every,
    };
    let reference = bloch_run(
        &bcfg,
        grid,
        BlochState {
            m: moments[0].mag.clone(),
            time: 0.0,
        },
    )?;
    let mut rel = Vec::new();
    let mut rel_times = Vec::new();
    for (k, refstate) in reference.states.iter().enumerate().skip(1) {
        let flat_ps: Vec<f64> = moments[k].mag.iter().flatten().copied().collect();
        let flat_ref: Vec<f64> = refstate.m.iter().flatten().copied().collect();
        rel.push(relative_l2(&flat_ps, &flat_ref));
        rel_times.push(refstate.time);
    }
    Ok(BlochComparison {
        diffusion,
        times: rel_times,
        rel_l2: rel,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn bloch_metrics() -> Result<Vec<Metric>> {
    let c = bloch_comparison()?;
    let worst = c.rel_l2.iter().copied().fold(0.0, f64::max);
    Ok(vec![
        Metric::at_least("measured_diffusion", c.diffusion, 1e-6),
        Metric::at_most("max_rel_l2_error", worst, 0.02),
        Metric::at_most("runtime_seconds", c.seconds, 60.0),
    ])
}

/// Periodic channel with a driving field and the charge-conserving
/// relaxation closure.
pub fn conservation_config() -> RunConfig {
    let mut cfg = Scenario::BallisticDrift.preset();
    cfg.scenario = Scenario::Custom;
    cfg.fields.e_ext = 0.05;
    cfg.closure = SelfEnergyClosure::RelaxationTime(RelaxationClosure {
        tau_p: 0.5,
        t1: 5.0,
        t2: 3.0,
        spin_momentum_scattering: true,
        ..Default::default()
    });
    cfg.toggles = TermToggles::default();
    cfg.n_steps = 1000;
    cfg.output_every = 10;
    cfg
}

/// 4: total charge over 1000 RK4 steps.
pub fn charge_conservation() -> LimitReport {
    LimitReport::new(4, "charge_conservation", conservation_metrics())
}

fn conservation_metrics() -> Result<Vec<Metric>> {
    let cfg = conservation_config();
    let series = run_ok(&cfg)?;
    let q0 = series.observables[0].total_charge;
    let drift = series
        .observables
        .iter()
        .map(|o| ((o.total_charge - q0) / q0).abs())
        .fold(0.0, f64::max);
    Ok(vec![
        Metric::at_least("rk4_steps", cfg.n_steps as f64, 1000.0),
        Metric::at_most("relative_charge_drift", drift, 1e-12),
    ])
}

fn line_grid(n: usize, len: f64, bc: QBoundary) -> Result<PhaseSpaceGrid> {
    make_grid(&GridConfig {
        n_q: n,
        n_p: 4,
        momentum_dims: 1,
        q_min: 0.0,
        q_max: len,
        p_min: -1.0,
        p_max: 1.0,
        q_boundary: bc,
    })
}

/// Max nodal error of the solve for `Φ* = sin(kq)` on `[0, π]`.
pub fn poisson_manufactured_error(n: usize) -> Result<f64> {
    let k = 2.0;
    let eps = 1.5;
    let grid = line_grid(n, std::f64::consts::PI, QBoundary::DirichletInflow)?;
    let q = grid.q_nodes();
    let rho: Vec<f64> = q.iter().map(|x| -eps * k * k * (k * x).sin()).collect();
    let cfg = PoissonConfig {
        epsilon: eps,
        ..Default::default()
    };
    let phi = solve_poisson(&rho, &cfg, &grid)?;
    Ok(phi
        .iter()
        .zip(&q)
        .map(|(p, x)| (p - (k * x).sin()).abs())
        .fold(0.0, f64::max))
}

/// 5: manufactured convergence and the exact quadratic case.
pub fn poisson_convergence() -> LimitReport {
    LimitReport::new(5, "poisson_solver", poisson_metrics())
}

fn poisson_metrics() -> Result<Vec<Metric>> {
    let sizes = [17usize, 33, 65, 129];
    let mut h = Vec::new();
    let mut err = Vec::new();
    for n in sizes {
        h.push(std::f64::consts::PI / (n - 1) as f64);
        err.push(poisson_manufactured_error(n)?);
    }
    let order = convergence_orders(&h, &err)
        .into_iter()
        .fold(f64::INFINITY, f64::min);

    let len = 6.0;
    let (c, eps) = (0.35, 0.8);
    let grid = line_grid(25, len, QBoundary::DirichletInflow)?;
    let phi = solve_poisson(
        &vec![c; 25],
        &PoissonConfig {
            epsilon: eps,
            ..Default::default()
        },
        &grid,
    )?;
    let quad = phi
        .iter()
        .zip(grid.q_nodes())
        .map(|(p, x)| (p - c / (2.0 * eps) * x * (x - len)).abs())
        .fold(0.0, f64::max);
    Ok(vec![
        Metric::at_least("refinements", (sizes.len() - 1) as f64, 3.0),
        Metric::at_least("min_order", order, 1.9),
        Metric::at_most("quadratic_nodal_error", quad, 1e-12),
    ])
}

fn random_field(grid: &PhaseSpaceGrid, rng: &mut ChaCha8Rng, name: &str) -> PhaseField {
    PhaseField::new(name, (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect())
}

/// Largest interior Leibniz defect `{a, bc} − b{a, c} − c{a, b}` for smooth
/// fields on an `n × n` periodic grid.
pub fn leibniz_defect(n: usize) -> Result<f64> {
    let grid = make_grid(&GridConfig {
        n_q: n,
        n_p: n + 1,
        momentum_dims: 1,
        q_min: 0.0,
        q_max: 2.0 * std::f64::consts::PI,
        p_min: -6.0,
        p_max: 6.0,
        q_boundary: QBoundary::Periodic,
    })?;
    let a = PhaseField::from_fn("a", &grid, |p, q| q.sin() * (-0.5 * p[0] * p[0]).exp());
    let b = PhaseField::from_fn("b", &grid, |p, q| (2.0 * q).cos() * p[0] * (-0.25 * p[0] * p[0]).exp());
    let c = PhaseField::from_fn("c", &grid, |p, q| (q.cos() + 2.0) * (-0.3 * p[0] * p[0]).exp());
    let bc = PhaseField::new(
        "bc",
        b.values.iter().zip(&c.values).map(|(x, y)| x * y).collect(),
    );
    let lhs = poisson_bracket(&grid, &a, &bc)?;
    let ac = poisson_bracket(&grid, &a, &c)?;
    let ab = poisson_bracket(&grid, &a, &b)?;
    let mut worst: f64 = 0.0;
    for i in 0..grid.len() {
        if grid.is_interior(i) {
            let d = lhs.values[i] - b.values[i] * ac.values[i] - c.values[i] * ab.values[i];
            worst = worst.max(d.abs());
        }
    }
    Ok(worst)
}

/// 6: bracket antisymmetry, the canonical pair and the Leibniz defect.
pub fn moyal_kernel() -> LimitReport {
    LimitReport::new(6, "moyal_kernel", moyal_metrics())
}

fn moyal_metrics() -> Result<Vec<Metric>> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut mismatches = 0usize;
    for (dims, bc) in [(1, QBoundary::Periodic), (2, QBoundary::DirichletInflow)] {
        let grid = make_grid(&GridConfig {
            n_q: 9,
            n_p: 7,
            momentum_dims: dims,
            q_min: -1.0,
            q_max: 2.0,
            p_min: -1.3,
            p_max: 1.3,
            q_boundary: bc,
        })?;
        for _ in 0..8 {
            let a = random_field(&grid, &mut rng, "a");
            let b = random_field(&grid, &mut rng, "b");
            let ab = poisson_bracket(&grid, &a, &b)?;
            let ba = poisson_bracket(&grid, &b, &a)?;
            mismatches += ab
                .values
                .iter()
                .zip(&ba.values)
                .filter(|(x, y)| **x != -**y)
                .count();
        }
    }

    let grid = make_grid(&GridConfig {
        n_q: 10,
        n_p: 9,
        momentum_dims: 1,
        q_min: 0.0,
        q_max: 9.0,
        p_min: -4.0,
        p_max: 4.0,
        q_boundary: QBoundary::DirichletInflow,
    })?;
    let p = PhaseField::from_fn("p", &grid, |p, _| p[0]);
    let q = PhaseField::from_fn("q", &grid, |_, q| q);
    let pq = poisson_bracket(&grid, &p, &q)?;
    let canon = (0..grid.len())
        .filter(|i| grid.is_interior(*i))
        .map(|i| (pq.values[i] - 1.0).abs())
        .fold(0.0, f64::max);

    let sizes = [32usize, 64, 128, 256];
    let h: Vec<f64> = sizes.iter().map(|n| 1.0 / *n as f64).collect();
    let err = sizes
        .iter()
        .map(|n| leibniz_defect(*n))
        .collect::<Result<Vec<_>>>()?;
    let order = convergence_orders(&h, &err)
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(vec![
        Metric::at_most("antisymmetry_mismatches", mismatches as f64, 0.0),
        Metric::at_most("canonical_pair_error", canon, 0.0),
        Metric::at_least("leibniz_min_order", order, 1.9),
    ])
}

/// Momentum relaxation times used for the narrowing sweep (one decade).
pub const DP_TAUS: [f64; 5] = [0.1, 0.177_827_941, 0.316_227_766, 0.562_341_325, 1.0];

/// Fitted decay rate of `⟨M_z⟩` for one momentum relaxation time.
pub fn dp_rate(tau_p: f64) -> Result<f64> {
    let cfg = scenarios::dp_narrowing(tau_p);
    let series = run_ok(&cfg)?;
    let t_fit = 0.25 * cfg.dt * cfg.n_steps as f64;
    let (t, mz): (Vec<f64>, Vec<f64>) = series
        .observables
        .iter()
        .filter(|o| o.t >= t_fit)
        .map(|o| (o.t, o.mz_mean))
        .unzip();
    fit_decay_rate(&t, &mz)
}

/// 7: spin relaxation rate falls as momentum scattering speeds up.
pub fn dp_narrowing() -> LimitReport {
    LimitReport::new(7, "dyakonov_perel_narrowing", dp_metrics())
}

fn dp_metrics() -> Result<Vec<Metric>> {
    let rates = DP_TAUS
        .iter()
        .map(|t| dp_rate(*t))
        .collect::<Result<Vec<_>>>()?;
    let violations = rates.windows(2).filter(|w| !(w[0] < w[1])).count();
    // RMS precession frequency 2α√⟨p²⟩ for the 2-D equilibrium weight.
    let cfg = scenarios::dp_narrowing(1.0);
    let SelfEnergyClosure::RelaxationTime(r) = &cfg.closure else {
        return Err(Error::invalid("closure", "dp_narrowing preset must use relaxation"));
    };
    let omega = 2.0 * cfg.fields.alpha_rashba * (2.0f64).sqrt() * r.eq_width;
    let tau_max = DP_TAUS.iter().copied().fold(0.0, f64::max);
    let tau_min = DP_TAUS.iter().copied().fold(f64::INFINITY, f64::min);
    let positive = rates.iter().filter(|r| **r > 0.0).count();
    Ok(vec![
        Metric::at_least("tau_values", DP_TAUS.len() as f64, 4.0),
        Metric::at_least("tau_span_decades", (tau_max / tau_min).log10() + 1e-9, 1.0),
        Metric::at_most("max_omega_tau", omega * tau_max, 1.0),
        Metric::at_least("positive_rates", positive as f64, DP_TAUS.len() as f64),
        Metric::at_most("monotonicity_violations", violations as f64, 0.0),
    ])
}

/// Random state and table closure that make every term group nonzero.
pub fn random_problem(
    seed: u64,
    dims: usize,
    bc: QBoundary,
) -> Result<(PhaseSpaceGrid, FieldConfig, SelfEnergyClosure, SpinChargeState)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = make_grid(&GridConfig {
        n_q: 8,
        n_p: 6,
        momentum_dims: dims,
        q_min: 0.0,
        q_max: 4.0,
        p_min: -2.0,
        p_max: 2.0,
        q_boundary: bc,
    })?;
    let mut u = |lo: f64, hi: f64| rng.random_range(lo..hi);
    let fields = FieldConfig {
        b_ext: [u(-1.0, 1.0), u(-1.0, 1.0), u(-1.0, 1.0)],
        alpha_rashba: u(-0.5, 0.5),
        beta_dresselhaus: u(-0.5, 0.5),
        e_ext: u(-0.3, 0.3),
        device: DevicePotential {
            bias: u(-0.5, 0.5),
            barrier_height: u(0.0, 1.0),
            barrier_center: 2.0,
            barrier_width: 0.7,
        },
        rashba_field_scaling: bc == QBoundary::DirichletInflow,
        ..Default::default()
    };
    let mut set = SelfEnergySet::zeros(&grid);
    for f in set.fields_mut() {
        for v in f.values.iter_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
    }
    for v in set.gamma_bar.values.iter_mut() {
        *v = v.abs();
    }
    let closure = SelfEnergyClosure::Table(Box::new(TableClosure {
        set,
        c_a: rng.random_range(0.5..1.5),
    }));
    let mut state = SpinChargeState::zeros(&grid);
    for i in 0..grid.len() {
        state.s0[i] = rng.random_range(0.0..1.0);
        state.spin[i] = [
            rng.random_range(-0.5..0.5),
            rng.random_range(-0.5..0.5),
            rng.random_range(-0.5..0.5),
        ];
    }
    state.time = 0.0;
    Ok((grid, fields, closure, state))
}

/// Number of bitwise mismatches between the all-groups right-hand side and
/// the ordered sum of single-group evaluations.
pub fn additivity_mismatches(seed: u64, dims: usize, bc: QBoundary) -> Result<usize> {
    let (grid, fields, closure, state) = random_problem(seed, dims, bc)?;
    let full = TransportOperator::new(&grid, &fields, &closure, TermToggles::all())?;
    let phi = full.potential(&state)?;
    let total = full.assemble_rhs(&state, Some(&phi))?;
    let mut sum = SpinChargeState::zeros(&grid);
    for g in TermGroup::ALL {
        let op = TransportOperator::new(&grid, &fields, &closure, TermToggles::only(g))?;
        let part = op.assemble_rhs(&state, Some(&phi))?;
        for i in 0..grid.len() {
            sum.s0[i] += part.s0[i];
            for k in 0..3 {
                sum.spin[i][k] += part.spin[i][k];
            }
        }
    }
    let mut bad = 0;
    for i in 0..grid.len() {
        bad += usize::from(sum.s0[i].to_bits() != total.s0[i].to_bits());
        for k in 0..3 {
            bad += usize::from(sum.spin[i][k].to_bits() != total.spin[i][k].to_bits());
        }
    }
    Ok(bad)
}

/// Bytes of `observables.csv` for a short deterministic run.
pub fn observables_bytes(cfg: &RunConfig) -> Result<Vec<u8>> {
    let series = run_ok(cfg)?;
    let mut buf = Vec::new();
    write_observables(&series.observables, &mut buf, DEFAULT_PRECISION)?;
    Ok(buf)
}

/// 8: toggle additivity on random states and byte-identical output.
pub fn additivity_and_determinism() -> LimitReport {
    LimitReport::new(8, "additivity_and_determinism", additivity_metrics())
}

fn additivity_metrics() -> Result<Vec<Metric>> {
    let mut mismatches = 0;
    let mut cases = 0;
    for seed in 0..4u64 {
        for (dims, bc) in [(1, QBoundary::Periodic), (2, QBoundary::DirichletInflow)] {
            mismatches += additivity_mismatches(seed, dims, bc)?;
            cases += 1;
        }
    }
    let mut cfg = conservation_config();
    cfg.n_steps = 100;
    let a = observables_bytes(&cfg)?;
    let b = observables_bytes(&cfg)?;
    let differ = usize::from(a != b || a.is_empty());
    Ok(vec![
        Metric::at_least("random_cases", cases as f64, 8.0),
        Metric::at_most("additivity_bit_mismatches", mismatches as f64, 0.0),
        Metric::at_most("observables_differ", differ as f64, 0.0),
    ])
}

/// Max nodal error of `M_x` at `t = 1` for the pure transverse decay
/// `dM/dt = −M/T2` integrated with step `dt`.
pub fn decay_error(dt: f64) -> Result<f64> {
    let t2 = 0.5;
    let grid = make_grid(&GridConfig {
        n_q: 4,
        n_p: 5,
        ..Default::default()
    })?;
    let fields = FieldConfig::default();
    let closure = SelfEnergyClosure::RelaxationTime(RelaxationClosure {
        t2,
        t1: f64::INFINITY,
        ..Default::default()
    });
    let toggles = TermToggles::only(TermGroup::ScatteringOut);
    let op = TransportOperator::new(&grid, &fields, &closure, toggles)?;
    let init = init_gaussian(
        &grid,
        &InitialCondition {
            width_q: f64::INFINITY,
            polarization: [1.0, 0.0, 0.0],
            ..Default::default()
        },
    )?;
    let steps = (1.0 / dt).round() as usize;
    let mut s = init.clone();
    for _ in 0..steps {
        s = rk4_step(&s, dt, |x| op.assemble_rhs(x, None))?;
    }
    let t = steps as f64 * dt;
    Ok(init
        .spin
        .iter()
        .zip(&s.spin)
        .map(|(a, b)| (b[0] - a[0] * (-t / t2).exp()).abs())
        .fold(0.0, f64::max))
}

/// 9: global convergence order of RK4 on the decay problem.
pub fn rk4_order() -> LimitReport {
    LimitReport::new(9, "rk4_order", rk4_metrics())
}

fn rk4_metrics() -> Result<Vec<Metric>> {
    let h = [0.1, 0.05, 0.025];
    let err = h.iter().map(|d| decay_error(*d)).collect::<Result<Vec<_>>>()?;
    let order = convergence_orders(&h, &err)
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Ok(vec![Metric::at_least("min_global_order", order, 3.8)])
}
