//! Leading-order spin/charge transport: right-hand side assembly, time
//! integration and the run orchestrator.

mod integrate;
mod rhs;
mod run;

pub use integrate::{rk4_step, OdeState};
pub use rhs::{ballistic_rhs, Inflow, TransportOperator};
pub use run::{run, run_from, Observables, RunConfig, RunFailure, SnapshotSeries};

use std::fmt;
use std::str::FromStr;

/// Term groups of the magnetization/charge equations, in assembly order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermGroup {
    Drift,
    Lorentz,
    Precession,
    ScatteringOut,
    ScatteringIn,
    TorqueGamma,
    ReSigmaCorrections,
    ReXiTorque,
    ChargeCoupling,
    ScalarSpinCoupling,
}

impl TermGroup {
    pub const ALL: [TermGroup; 10] = [
        TermGroup::Drift,
        TermGroup::Lorentz,
        TermGroup::Precession,
        TermGroup::ScatteringOut,
        TermGroup::ScatteringIn,
        TermGroup::TorqueGamma,
        TermGroup::ReSigmaCorrections,
        TermGroup::ReXiTorque,
        TermGroup::ChargeCoupling,
        TermGroup::ScalarSpinCoupling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TermGroup::Drift => "drift",
            TermGroup::Lorentz => "lorentz",
            TermGroup::Precession => "precession",
            TermGroup::ScatteringOut => "scattering_out",
            TermGroup::ScatteringIn => "scattering_in",
            TermGroup::TorqueGamma => "torque_gamma",
            TermGroup::ReSigmaCorrections => "re_sigma_corrections",
            TermGroup::ReXiTorque => "re_xi_torque",
            TermGroup::ChargeCoupling => "charge_coupling",
            TermGroup::ScalarSpinCoupling => "scalar_spin_coupling",
        }
    }
}

impl fmt::Display for TermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TermGroup {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TermGroup::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| format!("unknown term group '{s}'"))
    }
}

/// Per-group switches. Any combination is legal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermToggles {
    pub drift: bool,
    pub lorentz: bool,
    pub precession: bool,
    pub scattering_out: bool,
    pub scattering_in: bool,
    pub torque_gamma: bool,
    pub re_sigma_corrections: bool,
    pub re_xi_torque: bool,
    pub charge_coupling: bool,
    pub scalar_spin_coupling: bool,
}

impl Default for TermToggles {
    /// Drift, force, precession and both scattering groups.
    fn default() -> Self {
        TermToggles {
            drift: true,
            lorentz: true,
            precession: true,
            scattering_out: true,
            scattering_in: true,
            ..TermToggles::none()
        }
    }
}

impl TermToggles {
    pub const fn none() -> Self {
        TermToggles {
            drift: false,
            lorentz: false,
            precession: false,
            scattering_out: false,
            scattering_in: false,
            torque_gamma: false,
            re_sigma_corrections: false,
            re_xi_torque: false,
            charge_coupling: false,
            scalar_spin_coupling: false,
        }
    }

    pub fn all() -> Self {
        let mut t = TermToggles::none();
        for g in TermGroup::ALL {
            t.set(g, true);
        }
        t
    }

    /// Scattering-free evolution: drift, force and precession.
    pub fn ballistic() -> Self {
        TermToggles {
            drift: true,
            lorentz: true,
            precession: true,
            ..TermToggles::none()
        }
    }

    pub fn only(group: TermGroup) -> Self {
        let mut t = TermToggles::none();
        t.set(group, true);
        t
    }

    pub fn enabled(&self, group: TermGroup) -> bool {
        match group {
            TermGroup::Drift => self.drift,
            TermGroup::Lorentz => self.lorentz,
            TermGroup::Precession => self.precession,
            TermGroup::ScatteringOut => self.scattering_out,
            TermGroup::ScatteringIn => self.scattering_in,
            TermGroup::TorqueGamma => self.torque_gamma,
            TermGroup::ReSigmaCorrections => self.re_sigma_corrections,
            TermGroup::ReXiTorque => self.re_xi_torque,
            TermGroup::ChargeCoupling => self.charge_coupling,
            TermGroup::ScalarSpinCoupling => self.scalar_spin_coupling,
        }
    }

    pub fn set(&mut self, group: TermGroup, on: bool) {
        let slot = match group {
            TermGroup::Drift => &mut self.drift,
            TermGroup::Lorentz => &mut self.lorentz,
            TermGroup::Precession => &mut self.precession,
            TermGroup::ScatteringOut => &mut self.scattering_out,
            TermGroup::ScatteringIn => &mut self.scattering_in,
            TermGroup::TorqueGamma => &mut self.torque_gamma,
            TermGroup::ReSigmaCorrections => &mut self.re_sigma_corrections,
            TermGroup::ReXiTorque => &mut self.re_xi_torque,
            TermGroup::ChargeCoupling => &mut self.charge_coupling,
            TermGroup::ScalarSpinCoupling => &mut self.scalar_spin_coupling,
        };
        *slot = on;
    }

    pub fn enabled_groups(&self) -> impl Iterator<Item = TermGroup> + '_ {
        TermGroup::ALL.into_iter().filter(|g| self.enabled(*g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_names_round_trip() {
        for g in TermGroup::ALL {
            assert_eq!(g.name().parse::<TermGroup>().unwrap(), g);
        }
        assert!("gird".parse::<TermGroup>().is_err());
    }

    #[test]
    fn toggle_presets() {
        assert_eq!(TermToggles::all().enabled_groups().count(), 10);
        assert_eq!(TermToggles::none().enabled_groups().count(), 0);
        let d = TermToggles::default();
        assert!(d.drift && d.lorentz && d.precession && d.scattering_out && d.scattering_in);
        assert!(!d.torque_gamma && !d.charge_coupling && !d.re_sigma_corrections);
        let only = TermToggles::only(TermGroup::ReXiTorque);
        assert_eq!(only.enabled_groups().collect::<Vec<_>>(), vec![TermGroup::ReXiTorque]);
    }
}
