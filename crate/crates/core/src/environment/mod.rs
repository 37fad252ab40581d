//! Electromagnetic environments and their coupling to the total dipole.
//!
//! Every environment acts on the electron through a uniform field `E`, i.e.
//! the potential `v(x, t) = E(t) x` (the same convention as the external
//! drive). The work done on the electrons is `E Rdot`, so the energy handed
//! to the environment accumulates as `-int E Rdot dt`.

pub mod abraham_lorentz;
pub mod bath;
pub mod cavity;
pub mod kernel;
pub mod waveguide;

pub use abraham_lorentz::{al3d_jerk_slope, al3d_slope, AbrahamLorentzSpec, AlMode};
pub use bath::{bath_step, BathMode, ModeBath};
pub use cavity::{cavity_convolution, cavity_step, CavityModeState};
pub use kernel::{kernel_field, KernelState, KernelTable};
pub use waveguide::{edge_modulation, radiated_field, rr_slope_1d, EdgeSpec, WaveguideSpec};

use crate::error::Result;

/// One coupled environment together with whatever state it carries.
#[derive(Debug, Clone)]
pub enum Environment {
    /// Local 1D recoil, optionally scaled by an edge-emission factor.
    Waveguide {
        spec: WaveguideSpec,
        factor: f64,
    },
    AbrahamLorentz(AbrahamLorentzSpec),
    Kernel(KernelState),
    Cavity(CavityModeState),
    Bath(ModeBath),
}

impl Environment {
    pub fn waveguide(spec: WaveguideSpec) -> Self {
        Environment::Waveguide { spec, factor: 1.0 }
    }

    pub fn edge_waveguide(spec: WaveguideSpec, edge: &EdgeSpec) -> Result<Self> {
        Ok(Environment::Waveguide {
            spec,
            factor: edge_modulation(edge)?,
        })
    }

    pub fn validate(&self, dt: f64) -> Result<()> {
        match self {
            Environment::Waveguide { spec, .. } => spec.validate(),
            Environment::AbrahamLorentz(spec) => spec.validate(),
            Environment::Kernel(k) => k.table().check_dt(dt),
            Environment::Cavity(_) | Environment::Bath(_) => Ok(()),
        }
    }

    fn reset(&mut self, r: f64, r_dot: f64) {
        match self {
            Environment::Waveguide { .. } | Environment::AbrahamLorentz(_) => {}
            Environment::Kernel(k) => k.reset(r_dot),
            Environment::Cavity(c) => c.reset(r_dot),
            Environment::Bath(b) => b.initialize(r),
        }
    }

    fn field_at(&mut self, r: f64, r_dot: f64, t: f64, dt: f64, commit: bool) -> f64 {
        match self {
            Environment::Waveguide { spec, factor } => *factor * rr_slope_1d(r_dot, spec, t),
            Environment::AbrahamLorentz(spec) => -spec.strength() * r_dot,
            Environment::Kernel(k) => {
                if commit {
                    k.push(r_dot);
                    k.field()
                } else {
                    k.field_with(r_dot)
                }
            }
            Environment::Cavity(c) => {
                if commit {
                    let (next, slope) = cavity_step(c, r_dot, dt);
                    *c = next;
                    slope
                } else {
                    c.slope_after(r_dot, dt)
                }
            }
            Environment::Bath(b) => {
                if commit {
                    b.advance(r, dt);
                    b.slope(r)
                } else {
                    b.slope_after(r, dt)
                }
            }
        }
    }

    /// Energy stored in the environment, if it keeps any.
    pub fn stored_energy(&self, r: f64) -> Option<f64> {
        match self {
            Environment::Cavity(c) => Some(c.energy()),
            Environment::Bath(b) => Some(b.energy(r)),
            _ => None,
        }
    }
}

/// All environments coupled to one simulation, switched on together.
///
/// Before `switch_on_time` the field is zero and no environment evolves; at
/// the first step starting at or after it, every environment is reset to
/// the current dipole (baths and cavities start at rest in the instantaneous
/// polarization).
#[derive(Debug, Clone)]
pub struct EnvironmentState {
    pub environments: Vec<Environment>,
    pub switch_on_time: f64,
    active: bool,
    field: f64,
    r: f64,
}

impl EnvironmentState {
    pub fn new(environments: Vec<Environment>, switch_on_time: f64) -> Self {
        Self {
            environments,
            switch_on_time,
            active: false,
            field: 0.0,
            r: 0.0,
        }
    }

    pub fn none() -> Self {
        Self::new(Vec::new(), 0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.environments.is_empty()
    }

    pub fn is_active(&self) -> bool {
        self.active
    }

    pub fn validate(&self, dt: f64) -> Result<()> {
        self.environments.iter().try_for_each(|e| e.validate(dt))
    }

    /// Field at the current (committed) time.
    pub fn field(&self) -> f64 {
        self.field
    }

    /// Switch on if due. Call at the start of a step.
    pub(crate) fn activate_if_due(&mut self, t: f64, r: f64, r_dot: f64, dt: f64) {
        if self.active || self.environments.is_empty() {
            return;
        }
        if t + 1e-9 * dt >= self.switch_on_time {
            for e in &mut self.environments {
                e.reset(r, r_dot);
            }
            self.active = true;
            self.r = r;
            self.field = self
                .environments
                .iter_mut()
                .map(|e| match e {
                    Environment::Waveguide { spec, factor } => {
                        *factor * rr_slope_1d(r_dot, spec, t)
                    }
                    Environment::AbrahamLorentz(spec) => -spec.strength() * r_dot,
                    Environment::Kernel(k) => k.field(),
                    Environment::Cavity(c) => c.slope(),
                    Environment::Bath(b) => b.slope(r),
                })
                .sum();
        }
    }

    /// Field at `t` given the provisional dipole there; nothing is committed.
    pub(crate) fn field_after(&mut self, r: f64, r_dot: f64, t: f64, dt: f64) -> f64 {
        if !self.active {
            return 0.0;
        }
        self.environments
            .iter_mut()
            .map(|e| e.field_at(r, r_dot, t, dt, false))
            .sum()
    }

    /// Advance all environments to `t` with the final dipole of the step.
    pub(crate) fn commit(&mut self, r: f64, r_dot: f64, t: f64, dt: f64) -> f64 {
        if !self.active {
            return 0.0;
        }
        self.r = r;
        self.field = self
            .environments
            .iter_mut()
            .map(|e| e.field_at(r, r_dot, t, dt, true))
            .sum();
        self.field
    }

    /// Sum of the energies stored in cavity modes and baths.
    pub fn stored_energy(&self) -> f64 {
        self.environments
            .iter()
            .filter_map(|e| e.stored_energy(self.r))
            .sum()
    }
}
