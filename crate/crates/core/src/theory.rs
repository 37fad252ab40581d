//! Closed-form two-level predictions for emission into a 1D waveguide and
//! into 3D free space.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::units::{waveguide_coupling, EPSILON_0, HARTREE_EV, SPEED_OF_LIGHT};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelData {
    /// Bare excitation energy (Hartree).
    pub omega_eg: f64,
    /// Transition dipole magnitude (a.u.).
    pub r_eg: f64,
    pub inv_area: f64,
    pub pol: f64,
}

impl TwoLevelData {
    pub fn new(omega_eg: f64, r_eg: f64, inv_area: f64) -> Result<Self> {
        let d = Self {
            omega_eg,
            r_eg: r_eg.abs(),
            inv_area,
            pol: 1.0,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_eg > 0.0) || !(self.r_eg >= 0.0) || !(self.inv_area >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "two-level data needs omega_eg > 0, r_eg >= 0, inv_area >= 0 (got {}, {}, {})",
                self.omega_eg, self.r_eg, self.inv_area
            )));
        }
        Ok(())
    }

    /// Dimensionless coupling `x = 4 pi alpha A^-1 |pol r_eg|^2`.
    pub fn coupling(&self) -> f64 {
        let pr = self.pol * self.r_eg;
        waveguide_coupling(self.inv_area) * pr * pr
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolePair {
    /// Pole with positive real part (or the upper one when overdamped).
    pub positive: Complex64,
    pub negative: Complex64,
    /// `x > 1`: the square root was continued onto the imaginary axis.
    pub overdamped: bool,
}

/// Complex excitation poles `+-Omega (sqrt(1 - x^2) + i x)`.
pub fn casida_poles(data: &TwoLevelData) -> PolePair {
    let x = data.coupling();
    let (root, overdamped) = if x <= 1.0 {
        (Complex64::new((1.0 - x * x).sqrt(), 0.0), false)
    } else {
        (Complex64::new(0.0, (x * x - 1.0).sqrt()), true)
    };
    let p = data.omega_eg * (root + Complex64::new(0.0, x));
    PolePair {
        positive: p,
        negative: -p,
        overdamped,
    }
}

/// Radiative linewidth `Gamma_rr = Omega x` (Hartree).
pub fn gamma_rr(data: &TwoLevelData) -> f64 {
    data.omega_eg * data.coupling()
}

/// Wigner-Weisskopf rate for the 1D waveguide, `omega |pol r|^2 A^-1 / (eps0 c)`.
pub fn gamma_ww_1d(data: &TwoLevelData) -> f64 {
    let pr = data.pol * data.r_eg;
    data.omega_eg * pr * pr * data.inv_area / (EPSILON_0 * SPEED_OF_LIGHT)
}

/// Abraham-Lorentz linewidth in 3D, `omega^3 r^2 / (6 pi eps0 c^3)`.
pub fn gamma_rr_3d(omega_n: f64, r_n: f64) -> f64 {
    omega_n.powi(3) * r_n * r_n / (6.0 * std::f64::consts::PI * EPSILON_0 * SPEED_OF_LIGHT.powi(3))
}

/// Wigner-Weisskopf rate in 3D, `omega^3 r^2 / (3 pi eps0 c^3)`.
pub fn gamma_ww_3d(omega_n: f64, r_n: f64) -> f64 {
    omega_n.powi(3) * r_n * r_n / (3.0 * std::f64::consts::PI * EPSILON_0 * SPEED_OF_LIGHT.powi(3))
}

/// Resonant Lorentzian `Im alpha(omega) = 2 r^2 Gamma / ((omega - Re Omega)^2 + Gamma^2)`.
pub fn lorentzian_imalpha(omega: f64, data: &TwoLevelData) -> f64 {
    let g = gamma_rr(data);
    let d = omega - casida_poles(data).positive.re;
    2.0 * data.r_eg * data.r_eg * g / (d * d + g * g)
}

/// Shift of the resonance, `Re Omega - Omega_eg` (Hartree).
pub fn pole_shift(data: &TwoLevelData) -> f64 {
    casida_poles(data).positive.re - data.omega_eg
}

/// One row of the `theory` table, energies in eV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheorySummary {
    pub x: f64,
    pub pole_re_ev: f64,
    pub pole_im_ev: f64,
    pub shift_mev: f64,
    pub gamma_rr_ev: f64,
    pub gamma_ww_1d_ev: f64,
    pub gamma_rr_3d_ev: f64,
    pub gamma_ww_3d_ev: f64,
    pub overdamped: bool,
}

pub fn summarize(data: &TwoLevelData) -> TheorySummary {
    let p = casida_poles(data);
    TheorySummary {
        x: data.coupling(),
        pole_re_ev: p.positive.re * HARTREE_EV,
        pole_im_ev: p.positive.im * HARTREE_EV,
        shift_mev: pole_shift(data) * HARTREE_EV * 1e3,
        gamma_rr_ev: gamma_rr(data) * HARTREE_EV,
        gamma_ww_1d_ev: gamma_ww_1d(data) * HARTREE_EV,
        gamma_rr_3d_ev: gamma_rr_3d(data.omega_eg, data.r_eg) * HARTREE_EV,
        gamma_ww_3d_ev: gamma_ww_3d(data.omega_eg, data.r_eg) * HARTREE_EV,
        overdamped: p.overdamped,
    }
}
