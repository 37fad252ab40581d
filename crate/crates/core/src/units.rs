//! Physical constants and unit conversions.
//!
//! Everything inside the crate works in Hartree atomic units
//! (hbar = e = m_e = a0 = 1, 4 pi eps0 = 1, c = 1/alpha). The conversion
//! helpers here are only meant for configuration parsing and output.

use std::f64::consts::PI;

/// Fine-structure constant.
pub const FINE_STRUCTURE: f64 = 1.0 / 137.035999;
/// eV per Hartree.
pub const HARTREE_EV: f64 = 27.211386;
/// fs per atomic unit of time.
pub const AU_TIME_FS: f64 = 0.02418884;
/// Angstrom per Bohr radius.
pub const BOHR_ANGSTROM: f64 = 0.529177;

/// Speed of light in atomic units.
pub const SPEED_OF_LIGHT: f64 = 1.0 / FINE_STRUCTURE;
/// Vacuum permittivity in atomic units.
pub const EPSILON_0: f64 = 1.0 / (4.0 * PI);

/// Bundle of the constants above, for callers that want to print or
/// serialize them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub fine_structure_alpha: f64,
    pub hartree_to_ev: f64,
    pub au_time_to_fs: f64,
    pub bohr_to_angstrom: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            fine_structure_alpha: FINE_STRUCTURE,
            hartree_to_ev: HARTREE_EV,
            au_time_to_fs: AU_TIME_FS,
            bohr_to_angstrom: BOHR_ANGSTROM,
        }
    }
}

/// Radiation-reaction strength `4 pi alpha` of a waveguide with unit inverse
/// cross-section, i.e. `1 / (eps0 c)` in atomic units.
pub fn waveguide_coupling(inv_area: f64) -> f64 {
    4.0 * PI * FINE_STRUCTURE * inv_area
}

pub fn ev_to_hartree(ev: f64) -> f64 {
    ev / HARTREE_EV
}

pub fn hartree_to_ev(h: f64) -> f64 {
    h * HARTREE_EV
}

pub fn fs_to_au(fs: f64) -> f64 {
    fs / AU_TIME_FS
}

pub fn au_to_fs(t: f64) -> f64 {
    t * AU_TIME_FS
}

pub fn angstrom_to_bohr(a: f64) -> f64 {
    a / BOHR_ANGSTROM
}

/// Cross-sections come out of the analysis in a0^2.
pub fn bohr2_to_angstrom2(s: f64) -> f64 {
    s * BOHR_ANGSTROM * BOHR_ANGSTROM
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupling_of_unit_area() {
        assert!((waveguide_coupling(1.0) - 0.091701).abs() < 1e-6);
        assert!((1.0 / (EPSILON_0 * SPEED_OF_LIGHT) - waveguide_coupling(1.0)).abs() < 1e-15);
    }

    #[test]
    fn conversions_invert() {
        assert!((hartree_to_ev(ev_to_hartree(10.746)) - 10.746).abs() < 1e-12);
        assert!((au_to_fs(fs_to_au(72.57)) - 72.57).abs() < 1e-12);
        assert!((ev_to_hartree(1.166) - 0.042851).abs() < 2e-6);
    }
}
