//! A single lossless cavity mode coupled through the dipole.
//!
//! The mode is tracked through `u = omega q - lambda R` (the displacement
//! relative to the polarization-shifted equilibrium) and its momentum `p`.
//! With `w = u + i p` the equations of motion reduce to
//! `dw/dt = -i omega w - lambda Rdot`, which is advanced by an exact rotation
//! plus a trapezoidal source. Starting from `w = 0` (mode at rest in the
//! initial polarization) the field felt by the electron is the cosine
//! convolution `-lambda^2 int_0^t cos(omega (t - t')) Rdot(t') dt'`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::units::EPSILON_0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityModeState {
    pub omega_c: f64,
    /// `sqrt(1 / (eps0 V))` times the polarization projection.
    pub coupling_lambda: f64,
    /// `omega q - lambda R`.
    pub u: f64,
    pub p: f64,
    last_r_dot: f64,
}

impl CavityModeState {
    pub fn new(omega_c: f64, coupling_lambda: f64) -> Result<Self> {
        if !(omega_c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cavity frequency must be positive, got {omega_c}"
            )));
        }
        if !coupling_lambda.is_finite() {
            return Err(Error::InvalidParameter(
                "cavity coupling must be finite".into(),
            ));
        }
        Ok(Self {
            omega_c,
            coupling_lambda,
            u: 0.0,
            p: 0.0,
            last_r_dot: 0.0,
        })
    }

    /// Mode with `g / omega_c` given, where `g = sqrt(omega_c / (2 eps0 V))`
    /// is the coupling energy per unit dipole.
    pub fn from_g_ratio(omega_c: f64, g_over_omega: f64) -> Result<Self> {
        let g = g_over_omega * omega_c;
        Self::new(omega_c, g * (2.0 / omega_c).sqrt())
    }

    /// Mode volume corresponding to the coupling.
    pub fn volume(&self) -> f64 {
        1.0 / (EPSILON_0 * self.coupling_lambda * self.coupling_lambda)
    }

    /// Photon displacement coordinate for the current dipole.
    pub fn q(&self, r: f64) -> f64 {
        (self.u + self.coupling_lambda * r) / self.omega_c
    }

    /// Mode energy including the self-polarization, `(p^2 + u^2) / 2`.
    pub fn energy(&self) -> f64 {
        0.5 * (self.p * self.p + self.u * self.u)
    }

    /// Field felt by the electron (slope of `v(x) = slope * x`).
    pub fn slope(&self) -> f64 {
        self.coupling_lambda * self.u
    }

    /// Put the mode at rest in the polarization of the current dipole.
    pub(crate) fn reset(&mut self, r_dot: f64) {
        self.u = 0.0;
        self.p = 0.0;
        self.last_r_dot = r_dot;
    }

    fn advanced(&self, r_dot: f64, dt: f64) -> Complex64 {
        let rot = Complex64::from_polar(1.0, -self.omega_c * dt);
        let w = Complex64::new(self.u, self.p);
        rot * w - self.coupling_lambda * 0.5 * dt * (rot * self.last_r_dot + r_dot)
    }

    pub(crate) fn slope_after(&self, r_dot: f64, dt: f64) -> f64 {
        self.coupling_lambda * self.advanced(r_dot, dt).re
    }
}

/// Advance the mode by one step given the dipole velocity at the end of the
/// step. Returns the new state and the field slope at the end of the step.
pub fn cavity_step(state: &CavityModeState, r_dot: f64, dt: f64) -> (CavityModeState, f64) {
    let w = state.advanced(r_dot, dt);
    let next = CavityModeState {
        u: w.re,
        p: w.im,
        last_r_dot: r_dot,
        ..*state
    };
    (next, next.slope())
}

/// Direct trapezoidal evaluation of `-lambda^2 int_0^t cos(omega (t-t')) Rdot dt'`
/// on a uniformly sampled history; quadratic cost, used to cross-check
/// [`cavity_step`].
pub fn cavity_convolution(omega_c: f64, coupling_lambda: f64, r_dot: &[f64], dt: f64) -> f64 {
    let n = r_dot.len();
    if n < 2 {
        return 0.0;
    }
    let t = (n - 1) as f64 * dt;
    let mut acc = 0.0;
    for (m, rd) in r_dot.iter().enumerate() {
        let w = if m == 0 || m == n - 1 { 0.5 } else { 1.0 };
        acc += w * (omega_c * (t - m as f64 * dt)).cos() * rd;
    }
    -coupling_lambda * coupling_lambda * acc * dt
}
