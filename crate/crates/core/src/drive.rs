//! External driving fields, applied as `v(x, t) = E(t) x`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Narrow Lorentzian pulse used as a linear-response kick.
///
/// The profile is `1 / (pi [(t - t_c)^2 + eta^2])` without the `eta`
/// normalization, so the total impulse per unit `x` is `-strength / eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KickSpec {
    pub strength: f64,
    pub center: f64,
    /// Square of the Lorentzian half-width.
    pub width2: f64,
}

impl Default for KickSpec {
    fn default() -> Self {
        Self {
            strength: 1e-6,
            center: 1.0,
            width2: 1e-4,
        }
    }
}

/// `v(x, t) = -kappa x / (pi [(t - t_c)^2 + eta^2])`.
pub fn kick_potential(x: f64, t: f64, spec: &KickSpec) -> f64 {
    x * kick_field(t, spec)
}

fn kick_field(t: f64, spec: &KickSpec) -> f64 {
    let d = t - spec.center;
    -spec.strength / (PI * (d * d + spec.width2))
}

fn kick_impulse(t0: f64, t1: f64, spec: &KickSpec) -> f64 {
    let eta = spec.width2.sqrt();
    let a1 = ((t1 - spec.center) / eta).atan();
    let a0 = ((t0 - spec.center) / eta).atan();
    -spec.strength / (PI * eta) * (a1 - a0)
}

/// Gaussian-enveloped carrier `E0 sin(omega t) exp(-(t - t0)^2 / sigma^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    pub amplitude: f64,
    pub omega: f64,
    pub center: f64,
    pub width: f64,
}

pub fn pulse_envelope(t: f64, spec: &PulseSpec) -> f64 {
    let d = (t - spec.center) / spec.width;
    (-d * d).exp()
}

pub fn pulse_field(t: f64, spec: &PulseSpec) -> f64 {
    spec.amplitude * (spec.omega * t).sin() * pulse_envelope(t, spec)
}

/// Continuous drive `A sin(omega t)` with a sine-squared turn-on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CwSpec {
    pub amplitude: f64,
    pub omega: f64,
    /// Length of the turn-on window; zero switches on abruptly.
    pub ramp: f64,
}

impl CwSpec {
    /// Ramp over two carrier periods.
    pub fn new(amplitude: f64, omega: f64) -> Self {
        Self {
            amplitude,
            omega,
            ramp: 2.0 * 2.0 * PI / omega,
        }
    }
}

pub fn resonant_cw(t: f64, spec: &CwSpec) -> f64 {
    let carrier = spec.amplitude * (spec.omega * t).sin();
    if t >= spec.ramp {
        carrier
    } else if t <= 0.0 {
        0.0
    } else {
        let s = (0.5 * PI * t / spec.ramp).sin();
        carrier * s * s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drive {
    None,
    Kick(KickSpec),
    Pulse(PulseSpec),
    Cw(CwSpec),
}

impl Drive {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        match self {
            Drive::Kick(k) if !(k.width2 > 0.0) => bad("kick width2 must be positive"),
            Drive::Pulse(p) if !(p.width > 0.0) => bad("pulse width must be positive"),
            Drive::Cw(c) if !(c.ramp >= 0.0) => bad("cw ramp must be non-negative"),
            _ => Ok(()),
        }
    }

    pub fn field(&self, t: f64) -> f64 {
        match self {
            Drive::None => 0.0,
            Drive::Kick(k) => kick_field(t, k),
            Drive::Pulse(p) => pulse_field(t, p),
            Drive::Cw(c) => resonant_cw(t, c),
        }
    }

    /// `int_{t0}^{t1} E(t) dt`; exact for the kick, Simpson otherwise.
    pub fn impulse(&self, t0: f64, t1: f64) -> f64 {
        match self {
            Drive::None => 0.0,
            Drive::Kick(k) => kick_impulse(t0, t1, k),
            _ => {
                let tm = 0.5 * (t0 + t1);
                (t1 - t0) / 6.0 * (self.field(t0) + 4.0 * self.field(tm) + self.field(t1))
            }
        }
    }

    /// Time after which the drive is negligible, if it ever switches off.
    pub fn end_time(&self) -> Option<f64> {
        match self {
            Drive::None => Some(0.0),
            // the 1/t^2 tail beyond 1e4 widths carries < 1e-4 of the impulse
            Drive::Kick(k) => Some(k.center + 1e4 * k.width2.sqrt()),
            Drive::Pulse(p) => Some(p.center + 6.0 * p.width),
            Drive::Cw(_) => None,
        }
    }
}
