//! Explicit bath of discrete waveguide modes coupled in the dipolar
//! (length-gauge) form, including the self-polarization term.
//!
//! Each mode obeys `q'' + omega^2 q = omega lambda R(t)` and the electron
//! feels `v(x) = x sum_k lambda_k (omega_k q_k - lambda_k R)`. The modes are
//! integrated exactly under a linear interpolation of `R` across the step,
//! so a static dipole leaves a mode initialized at `q = lambda R / omega` at
//! rest for any step size or mode frequency.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::units::{EPSILON_0, SPEED_OF_LIGHT};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathMode {
    pub omega: f64,
    pub lambda: f64,
    pub q: f64,
    pub p: f64,
}

/// Per-mode propagator coefficients for one step size.
type StepCoefficients = Vec<(Complex64, Complex64, Complex64)>;

#[derive(Debug, Clone)]
pub struct ModeBath {
    pub modes: Vec<BathMode>,
    pub box_length: f64,
    pub cutoff: f64,
    last_r: f64,
    cache: Option<(f64, StepCoefficients)>,
}

impl ModeBath {
    pub fn new(modes: Vec<BathMode>, box_length: f64, cutoff: f64) -> Self {
        Self {
            modes,
            box_length,
            cutoff,
            last_r: 0.0,
            cache: None,
        }
    }

    /// Discretized waveguide continuum: `omega_n = 2 pi c n / L` for
    /// `n = 1..` up to `cutoff`, coupling `lambda^2 = 4 A^-1 / (eps0 L)`.
    ///
    /// The doubled coupling (relative to a single standing wave) makes the
    /// one-sided memory integral of the dense mode sum converge to the local
    /// recoil `4 pi alpha A^-1 Rdot`.
    pub fn waveguide(inv_area: f64, box_length: f64, cutoff: f64) -> Result<Self> {
        if !(inv_area >= 0.0) || !(box_length > 0.0) || !(cutoff > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mode bath needs inv_area >= 0, box_length > 0, cutoff > 0 (got {inv_area}, {box_length}, {cutoff})"
            )));
        }
        let spacing = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / box_length;
        let n_max = (cutoff / spacing).floor() as usize;
        if n_max == 0 {
            return Err(Error::InvalidParameter(format!(
                "cutoff {cutoff} is below the lowest box mode {spacing}"
            )));
        }
        let lambda = (4.0 * inv_area / (EPSILON_0 * box_length)).sqrt();
        let modes = (1..=n_max)
            .map(|n| BathMode {
                omega: n as f64 * spacing,
                lambda,
                q: 0.0,
                p: 0.0,
            })
            .collect();
        Ok(Self::new(modes, box_length, cutoff))
    }

    /// Same as [`ModeBath::waveguide`] but parameterized by the number of
    /// modes below the cutoff.
    pub fn waveguide_with_modes(inv_area: f64, n_modes: usize, cutoff: f64) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidParameter(
                "mode bath needs at least one mode".into(),
            ));
        }
        // nudge so that floor(cutoff / spacing) == n_modes
        let box_length =
            2.0 * std::f64::consts::PI * SPEED_OF_LIGHT * (n_modes as f64 + 0.5) / cutoff;
        Self::waveguide(inv_area, box_length, cutoff)
    }

    /// Time after which a wave packet emitted at the origin returns.
    pub fn recurrence_time(&self) -> f64 {
        self.box_length / SPEED_OF_LIGHT
    }

    /// Start every mode at rest in the polarization of `r`.
    pub fn initialize(&mut self, r: f64) {
        for m in &mut self.modes {
            m.q = m.lambda * r / m.omega;
            m.p = 0.0;
        }
        self.last_r = r;
    }

    pub fn slope(&self, r: f64) -> f64 {
        self.modes
            .iter()
            .map(|m| m.lambda * (m.omega * m.q - m.lambda * r))
            .sum()
    }

    pub fn energy(&self, r: f64) -> f64 {
        self.modes
            .iter()
            .map(|m| {
                let u = m.omega * m.q - m.lambda * r;
                0.5 * (m.p * m.p + u * u)
            })
            .sum()
    }

    fn coefficients(&mut self, dt: f64) {
        if matches!(&self.cache, Some((h, _)) if *h == dt) {
            return;
        }
        let c = self
            .modes
            .iter()
            .map(|m| {
                let rot = Complex64::from_polar(1.0, -m.omega * dt);
                let one_minus = Complex64::new(1.0, 0.0) - rot;
                let ramp = Complex64::new(1.0, 0.0) + Complex64::i() * one_minus / (m.omega * dt);
                (rot, one_minus, ramp)
            })
            .collect();
        self.cache = Some((dt, c));
    }

    fn advance_mode(
        mode: &BathMode,
        c: &(Complex64, Complex64, Complex64),
        r0: f64,
        r1: f64,
    ) -> Complex64 {
        let (rot, one_minus, ramp) = *c;
        let b = Complex64::new(mode.omega * mode.q, mode.p);
        rot * b + mode.lambda * (one_minus * r0 + ramp * (r1 - r0))
    }

    pub(crate) fn slope_after(&mut self, r: f64, dt: f64) -> f64 {
        self.coefficients(dt);
        let cache = &self.cache.as_ref().unwrap().1;
        self.modes
            .iter()
            .zip(cache)
            .map(|(m, c)| m.lambda * (Self::advance_mode(m, c, self.last_r, r).re - m.lambda * r))
            .sum()
    }

    pub(crate) fn advance(&mut self, r: f64, dt: f64) {
        self.coefficients(dt);
        let cache = &self.cache.as_ref().unwrap().1;
        let r0 = self.last_r;
        for (m, c) in self.modes.iter_mut().zip(cache) {
            let b = Self::advance_mode(m, c, r0, r);
            m.q = b.re / m.omega;
            m.p = b.im;
        }
        self.last_r = r;
    }
}

/// Advance every bath mode by one step, given the dipole at the end of the
/// step. Returns the new bath and the field slope at the end of the step.
pub fn bath_step(bath: &ModeBath, r: f64, dt: f64) -> (ModeBath, f64) {
    let mut next = bath.clone();
    next.advance(r, dt);
    let slope = next.slope(r);
    (next, slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::cavity::{cavity_step, CavityModeState};

    #[test]
    fn static_dipole_leaves_bath_at_rest() {
        let mut bath = ModeBath::waveguide_with_modes(1.0, 50, 5.0).unwrap();
        bath.initialize(0.0);
        for _ in 0..100 {
            let (next, slope) = bath_step(&bath, 0.0, 0.01);
            assert_eq!(slope, 0.0);
            bath = next;
        }
        assert!(bath.modes.iter().all(|m| m.q == 0.0 && m.p == 0.0));

        let mut bath = ModeBath::waveguide_with_modes(1.0, 50, 5.0).unwrap();
        bath.initialize(0.7);
        for _ in 0..100 {
            let (next, slope) = bath_step(&bath, 0.7, 0.37);
            assert!(slope.abs() < 1e-12);
            bath = next;
        }
    }

    #[test]
    fn mode_count_and_spacing() {
        let bath = ModeBath::waveguide_with_modes(1.0, 40, 4.0).unwrap();
        assert_eq!(bath.modes.len(), 40);
        assert!(bath.modes.last().unwrap().omega <= 4.0);
        let l = bath.box_length;
        assert!(
            (bath.modes[0].omega - 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / l).abs() < 1e-12
        );
        assert!(ModeBath::waveguide(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn single_mode_agrees_with_cavity() {
        let (w, lam, dt) = (0.3949, 0.02, 0.01);
        let mut bath = ModeBath::new(
            vec![BathMode {
                omega: w,
                lambda: lam,
                q: 0.0,
                p: 0.0,
            }],
            1.0,
            w,
        );
        let mut cav = CavityModeState::new(w, lam).unwrap();
        let r = |t: f64| 0.8 * (0.41 * t).sin() + 0.1 * (1.1 * t).cos();
        let r_dot = |t: f64| 0.8 * 0.41 * (0.41 * t).cos() - 0.11 * (1.1 * t).sin();
        bath.initialize(r(0.0));
        cav.reset(r_dot(0.0));
        let mut worst: f64 = 0.0;
        for n in 1..=2000 {
            let t = n as f64 * dt;
            let (b, sb) = bath_step(&bath, r(t), dt);
            let (c, sc) = cavity_step(&cav, r_dot(t), dt);
            bath = b;
            cav = c;
            worst = worst.max((sb - sc).abs());
            assert!((bath.energy(r(t)) - cav.energy()).abs() < 1e-6);
        }
        // two quadratures of the same mode; differ at O(dt^2)
        assert!(worst < 1e-7, "{worst}");
    }
}
