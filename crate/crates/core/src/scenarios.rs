//! Named presets. Each expands to a complete, validated [`RunConfig`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::fields::{DevicePotential, FieldConfig};
use crate::phase_space::{init_gaussian, make_grid, moment_density, GridConfig, InitialCondition, QBoundary};
use crate::poisson::PoissonConfig;
use crate::selfenergy::{RelaxationClosure, SelfEnergyClosure};
use crate::transport::{RunConfig, TermToggles};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Scenario {
    Larmor,
    T2Decay,
    T1Recovery,
    BallisticDrift,
    BlochLimit,
    RashbaPrecession,
    DpNarrowing,
    SelfConsistentPileup,
    #[default]
    Custom,
}

impl Scenario {
    pub const ALL: [Scenario; 9] = [
        Scenario::Larmor,
        Scenario::T2Decay,
        Scenario::T1Recovery,
        Scenario::BallisticDrift,
        Scenario::BlochLimit,
        Scenario::RashbaPrecession,
        Scenario::DpNarrowing,
        Scenario::SelfConsistentPileup,
        Scenario::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Larmor => "larmor",
            Scenario::T2Decay => "t2_decay",
            Scenario::T1Recovery => "t1_recovery",
            Scenario::BallisticDrift => "ballistic_drift",
            Scenario::BlochLimit => "bloch_limit",
            Scenario::RashbaPrecession => "rashba_precession",
            Scenario::DpNarrowing => "dp_narrowing",
            Scenario::SelfConsistentPileup => "self_consistent_pileup",
            Scenario::Custom => "custom",
        }
    }

    /// The preset configuration for this scenario.
    pub fn preset(self) -> RunConfig {
        let cfg = match self {
            Scenario::Larmor => larmor(),
            Scenario::T2Decay => t2_decay(),
            Scenario::T1Recovery => t1_recovery(),
            Scenario::BallisticDrift => ballistic_drift(),
            Scenario::BlochLimit => bloch_limit(),
            Scenario::RashbaPrecession => rashba_precession(),
            Scenario::DpNarrowing => dp_narrowing(0.316),
            Scenario::SelfConsistentPileup => pileup(),
            Scenario::Custom => RunConfig::default(),
        };
        RunConfig {
            scenario: self,
            ..cfg
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("unknown scenario '{s}'"))
    }
}

/// Field strength of the Larmor preset.
pub const LARMOR_B: f64 = 1.0;
/// Steps per precession period in the Larmor preset.
pub const LARMOR_STEPS_PER_PERIOD: usize = 1000;
pub const LARMOR_PERIODS: usize = 10;

fn uniform_grid(n_q: usize, n_p: usize, dims: usize, p_max: f64) -> GridConfig {
    GridConfig {
        n_q,
        n_p,
        momentum_dims: dims,
        q_min: 0.0,
        q_max: n_q as f64,
        p_min: -p_max,
        p_max,
        q_boundary: QBoundary::Periodic,
    }
}

fn uniform_initial(polarization: [f64; 3]) -> InitialCondition {
    InitialCondition {
        width_q: f64::INFINITY,
        polarization,
        ..Default::default()
    }
}

fn larmor() -> RunConfig {
    let period = 2.0 * PI / LARMOR_B;
    RunConfig {
        grid: uniform_grid(4, 16, 1, 5.0),
        fields: FieldConfig {
            b_ext: [0.0, 0.0, LARMOR_B],
            ..Default::default()
        },
        // The orbital force of b_ext would redistribute momentum; the
        // uniform state makes drift vanish identically.
        toggles: TermToggles {
            drift: true,
            precession: true,
            ..TermToggles::none()
        },
        initial: uniform_initial([1.0, 0.0, 0.0]),
        dt: period / LARMOR_STEPS_PER_PERIOD as f64,
        n_steps: LARMOR_STEPS_PER_PERIOD * LARMOR_PERIODS,
        ..Default::default()
    }
}

pub const RELAX_T1: f64 = 1.5;
pub const RELAX_T2: f64 = 1.0;
pub const RELAX_M_EQ: f64 = 0.8;

fn relaxation_only(polarization: [f64; 3], t_end: f64, dt: f64) -> RunConfig {
    RunConfig {
        grid: uniform_grid(4, 16, 1, 5.0),
        closure: SelfEnergyClosure::RelaxationTime(RelaxationClosure {
            tau_p: 1.0,
            t1: RELAX_T1,
            t2: RELAX_T2,
            m_eq: [0.0, 0.0, RELAX_M_EQ],
            relax_axis: [0.0, 0.0, 1.0],
            eq_width: 1.0,
            spin_momentum_scattering: false,
        }),
        toggles: TermToggles {
            scattering_out: true,
            scattering_in: true,
            ..TermToggles::none()
        },
        initial: uniform_initial(polarization),
        dt,
        n_steps: (t_end / dt).round() as usize,
        ..Default::default()
    }
}

fn t2_decay() -> RunConfig {
    relaxation_only([1.0, 0.0, 0.0], 2.0 * RELAX_T2, 0.01)
}

fn t1_recovery() -> RunConfig {
    relaxation_only([0.0, 0.0, -0.5], 4.0 * RELAX_T1, 0.01)
}

fn ballistic_drift() -> RunConfig {
    RunConfig {
        grid: GridConfig {
            n_q: 64,
            n_p: 32,
            momentum_dims: 1,
            q_min: 0.0,
            q_max: 32.0,
            p_min: -4.0,
            p_max: 4.0,
            q_boundary: QBoundary::Periodic,
        },
        toggles: TermToggles::ballistic(),
        initial: InitialCondition {
            center_q: 8.0,
            center_p: [1.0, 0.0],
            width_q: 2.0,
            width_p: 0.5,
            polarization: [1.0, 0.0, 0.0],
            amplitude: 1.0,
        },
        dt: 0.02,
        n_steps: 500,
        output_every: 10,
        ..Default::default()
    }
}

/// Bloch-limit parameters: `τ_p ≪ T2`, field along x, relaxation axis z.
pub const BLOCH_TAU_P: f64 = 0.1;
pub const BLOCH_T1: f64 = 8.0;
pub const BLOCH_T2: f64 = 5.0;
pub const BLOCH_B: f64 = 0.6;

fn bloch_limit() -> RunConfig {
    RunConfig {
        grid: GridConfig {
            n_q: 64,
            n_p: 32,
            momentum_dims: 1,
            q_min: 0.0,
            q_max: 32.0,
            p_min: -5.0,
            p_max: 5.0,
            q_boundary: QBoundary::Periodic,
        },
        fields: FieldConfig {
            b_ext: [BLOCH_B, 0.0, 0.0],
            ..Default::default()
        },
        closure: SelfEnergyClosure::RelaxationTime(RelaxationClosure {
            tau_p: BLOCH_TAU_P,
            t1: BLOCH_T1,
            t2: BLOCH_T2,
            m_eq: [0.0; 3],
            relax_axis: [0.0, 0.0, 1.0],
            eq_width: 1.0,
            spin_momentum_scattering: true,
        }),
        toggles: TermToggles::default(),
        initial: InitialCondition {
            center_q: 16.0,
            center_p: [0.0, 0.0],
            width_q: 3.0,
            width_p: 1.0,
            polarization: [0.0, 0.6, 0.8],
            amplitude: 1.0,
        },
        dt: 0.02,
        n_steps: (BLOCH_T2 / 0.02).round() as usize,
        output_every: 5,
        ..Default::default()
    }
}

fn rashba_precession() -> RunConfig {
    RunConfig {
        grid: GridConfig {
            n_q: 64,
            n_p: 48,
            momentum_dims: 1,
            q_min: 0.0,
            q_max: 32.0,
            p_min: -4.0,
            p_max: 4.0,
            q_boundary: QBoundary::Periodic,
        },
        fields: FieldConfig {
            alpha_rashba: 0.5,
            ..Default::default()
        },
        toggles: TermToggles {
            drift: true,
            precession: true,
            ..TermToggles::none()
        },
        initial: InitialCondition {
            center_q: 8.0,
            center_p: [1.5, 0.0],
            width_q: 2.0,
            width_p: 0.25,
            polarization: [0.0, 0.0, 1.0],
            amplitude: 1.0,
        },
        dt: 0.02,
        n_steps: 500,
        output_every: 5,
        ..Default::default()
    }
}

pub const DP_ALPHA: f64 = 0.25;

/// Motional-narrowing setup for one momentum relaxation time.
pub fn dp_narrowing(tau_p: f64) -> RunConfig {
    RunConfig {
        scenario: Scenario::DpNarrowing,
        grid: uniform_grid(4, 24, 2, 5.0),
        fields: FieldConfig {
            alpha_rashba: DP_ALPHA,
            ..Default::default()
        },
        closure: SelfEnergyClosure::RelaxationTime(RelaxationClosure {
            tau_p,
            t1: f64::INFINITY,
            t2: f64::INFINITY,
            m_eq: [0.0; 3],
            relax_axis: [0.0, 0.0, 1.0],
            eq_width: 1.0,
            spin_momentum_scattering: true,
        }),
        toggles: TermToggles {
            drift: true,
            precession: true,
            scattering_out: true,
            scattering_in: true,
            ..TermToggles::none()
        },
        initial: uniform_initial([0.0, 0.0, 1.0]),
        dt: 0.05,
        n_steps: 400,
        output_every: 2,
        ..Default::default()
    }
}

fn pileup() -> RunConfig {
    let grid = GridConfig {
        n_q: 64,
        n_p: 32,
        momentum_dims: 1,
        q_min: 0.0,
        q_max: 32.0,
        p_min: -5.0,
        p_max: 5.0,
        q_boundary: QBoundary::DirichletInflow,
    };
    let initial = uniform_initial([0.0, 0.0, 0.5]);
    // Neutralizing background equal to the uniform initial density.
    let rho0 = make_grid(&grid)
        .and_then(|g| {
            let s = init_gaussian(&g, &initial)?;
            Ok(moment_density(&s, &g)?.rho[0])
        })
        .unwrap_or(0.0);
    RunConfig {
        grid,
        fields: FieldConfig {
            b_ext: [0.0; 3],
            alpha_rashba: 0.1,
            e_ext: 0.0,
            device: DevicePotential {
                bias: 0.2,
                barrier_height: 0.5,
                barrier_center: 16.0,
                barrier_width: 1.5,
            },
            use_poisson: true,
            rashba_field_scaling: true,
            ..Default::default()
        },
        closure: SelfEnergyClosure::RelaxationTime(RelaxationClosure {
            tau_p: 0.5,
            t1: 20.0,
            t2: 10.0,
            ..Default::default()
        }),
        toggles: TermToggles::default(),
        initial,
        poisson: PoissonConfig {
            epsilon: 5.0,
            rho_background: rho0,
            phi_left: 0.0,
            phi_right: 0.0,
        },
        dt: 0.02,
        n_steps: 1000,
        output_every: 10,
        ..Default::default()
    }
}
