use crate::error::{Error, Result};
use crate::units::waveguide_coupling;

/// Emission into an idealized one-dimensional waveguide of cross-section `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveguideSpec {
    /// `1/A` in a0^-2; zero switches the environment off exactly.
    pub inv_area: f64,
    /// Projection of the mode polarization on the electron axis.
    pub pol_projection: f64,
    /// The coupling is zero before this time.
    pub switch_on_time: f64,
}

impl WaveguideSpec {
    pub fn new(inv_area: f64) -> Self {
        Self {
            inv_area,
            pol_projection: 1.0,
            switch_on_time: 0.0,
        }
    }

    pub fn switched_on_at(mut self, t: f64) -> Self {
        self.switch_on_time = t;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.inv_area >= 0.0 && self.inv_area.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "waveguide inv_area must be >= 0, got {}",
                self.inv_area
            )));
        }
        if !(-1.0..=1.0).contains(&self.pol_projection) {
            return Err(Error::InvalidParameter(format!(
                "polarization projection must lie in [-1, 1], got {}",
                self.pol_projection
            )));
        }
        Ok(())
    }
}

/// Slope `c(t)` of the radiation-reaction potential `v(x, t) = c(t) x`.
///
/// The sign is fixed by dissipativity: the electron always does positive
/// work against the recoil, `c(t) * Rdot = -4 pi alpha A^-1 (pol Rdot)^2 <= 0`.
pub fn rr_slope_1d(r_dot: f64, spec: &WaveguideSpec, t: f64) -> f64 {
    if t < spec.switch_on_time {
        return 0.0;
    }
    let pol = spec.pol_projection;
    -waveguide_coupling(spec.inv_area) * pol * pol * r_dot
}

/// Radiated field at the emitter along the mode polarization,
/// `E_r = -4 pi alpha A^-1 (pol . Rdot)`.
pub fn radiated_field(r_dot: f64, spec: &WaveguideSpec) -> f64 {
    -waveguide_coupling(spec.inv_area) * spec.pol_projection * r_dot
}

/// Emitter placed between two mirrors, emitting along the mirror plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeSpec {
    /// Position between the mirrors as a fraction of their distance.
    pub z_ratio: f64,
}

/// Suppression of edge emission by the two cavity mirrors.
pub fn edge_modulation(spec: &EdgeSpec) -> Result<f64> {
    let z = spec.z_ratio;
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "edge position z0/Lz must lie in (0, 1), got {z}"
        )));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    Ok((1.0 - sinc(two_pi * z)) * (1.0 - sinc(two_pi * (1.0 - z))))
}

fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-8 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn slope_examples() {
        let spec = WaveguideSpec::new(1.0);
        assert_eq!(rr_slope_1d(0.0, &spec, 5.0), 0.0);
        let s = rr_slope_1d(1.0, &spec, 5.0);
        assert!((s.abs() - 0.091701).abs() < 1e-6);
        assert!((s - (-4.0 * std::f64::consts::PI / 137.035999)).abs() < 1e-15);
        assert_eq!(rr_slope_1d(1.0, &spec.switched_on_at(2.0), 1.9), 0.0);
        assert_eq!(rr_slope_1d(1.0, &WaveguideSpec::new(0.0), 3.0), 0.0);
    }

    #[test]
    fn radiated_field_examples() {
        let spec = WaveguideSpec::new(1.0);
        assert_eq!(radiated_field(0.0, &spec), 0.0);
        assert!((radiated_field(1.0, &spec) + 0.091701).abs() < 1e-6);
    }

    #[test]
    fn edge_examples() {
        let f = |z| edge_modulation(&EdgeSpec { z_ratio: z }).unwrap();
        assert!((f(0.5) - 1.0).abs() < 1e-15);
        assert!(f(1e-6) < 1e-9);
        let s = sinc(1.5 * std::f64::consts::PI);
        assert!((s + 0.2122).abs() < 1e-4);
        assert!(edge_modulation(&EdgeSpec { z_ratio: 0.0 }).is_err());
        assert!(edge_modulation(&EdgeSpec { z_ratio: 1.0 }).is_err());
        assert!(edge_modulation(&EdgeSpec { z_ratio: -0.2 }).is_err());
    }

    proptest! {
        #[test]
        fn edge_symmetric_and_bounded(z in 1e-4f64..(1.0 - 1e-4)) {
            let a = edge_modulation(&EdgeSpec { z_ratio: z }).unwrap();
            let b = edge_modulation(&EdgeSpec { z_ratio: 1.0 - z }).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!(a >= 0.0 && a <= (1.0 + 0.2172f64).powi(2));
        }

        #[test]
        fn recoil_is_dissipative(r_dot in -10.0f64..10.0, inv_area in 0.0f64..10.0, pol in -1.0f64..1.0) {
            let spec = WaveguideSpec { inv_area, pol_projection: pol, switch_on_time: 0.0 };
            prop_assert!(rr_slope_1d(r_dot, &spec, 1.0) * r_dot <= 0.0);
        }
    }
}
