use crate::error::{Error, Result};
use crate::units::FINE_STRUCTURE;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlMode {
    /// Replaces the jerk by `-omega_n^2 Rdot` (harmonic closure).
    Harmonic,
    /// Third derivative of the stored dipole history. Unstable; not usable
    /// inside the propagator.
    Jerk,
}

/// Three-dimensional free-space emission in the Abraham-Lorentz form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbrahamLorentzSpec {
    pub omega_n: f64,
    pub mode: AlMode,
}

impl AbrahamLorentzSpec {
    pub fn harmonic(omega_n: f64) -> Self {
        Self {
            omega_n,
            mode: AlMode::Harmonic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.mode {
            AlMode::Harmonic if !(self.omega_n > 0.0) => Err(Error::InvalidParameter(format!(
                "harmonic Abraham-Lorentz closure needs omega_n > 0, got {}",
                self.omega_n
            ))),
            AlMode::Harmonic => Ok(()),
            AlMode::Jerk => Err(Error::InvalidParameter(
                "jerk-mode Abraham-Lorentz admits runaway solutions; use mode = harmonic".into(),
            )),
        }
    }

    /// Equivalent damping strength, `(2/3) omega_n^2 alpha^3`.
    pub fn strength(&self) -> f64 {
        2.0 / 3.0 * self.omega_n * self.omega_n * FINE_STRUCTURE.powi(3)
    }
}

/// Potential slope of the harmonic Abraham-Lorentz recoil.
pub fn al3d_slope(r_dot: f64, spec: &AbrahamLorentzSpec) -> Result<f64> {
    match spec.mode {
        AlMode::Harmonic => {
            spec.validate()?;
            Ok(-spec.strength() * r_dot)
        }
        AlMode::Jerk => Err(Error::InvalidParameter(
            "jerk mode needs the dipole history; call al3d_jerk_slope".into(),
        )),
    }
}

/// Potential slope `(2/3) alpha^3 d^3R/dt^3` from the last five dipole
/// samples (oldest first).
///
/// The third derivative uses a one-sided 5-point stencil. It is compared
/// against the 4-point estimate; if they disagree by more than half the
/// history is considered noise-dominated and an error is returned.
pub fn al3d_jerk_slope(r_history: &[f64], dt: f64) -> Result<f64> {
    if r_history.len() < 5 {
        return Err(Error::InvalidParameter(format!(
            "jerk estimate needs 5 samples, got {}",
            r_history.len()
        )));
    }
    let n = r_history.len();
    let f = |k: usize| r_history[n - 1 - k];
    let h3 = dt * dt * dt;
    let j5 = (5.0 * f(0) - 18.0 * f(1) + 24.0 * f(2) - 14.0 * f(3) + 3.0 * f(4)) / (2.0 * h3);
    let j4 = (f(0) - 3.0 * f(1) + 3.0 * f(2) - f(3)) / h3;
    let scale = j5.abs().max(j4.abs());
    let spread = if scale > 0.0 {
        (j5 - j4).abs() / scale
    } else {
        0.0
    };
    if spread > 0.5 {
        return Err(Error::NoisyJerk { spread });
    }
    Ok(2.0 / 3.0 * FINE_STRUCTURE.powi(3) * j5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_slope() {
        let spec = AbrahamLorentzSpec::harmonic(0.4);
        assert_eq!(al3d_slope(0.0, &spec).unwrap(), 0.0);
        let s = al3d_slope(1.0, &spec).unwrap();
        assert!(s < 0.0);
        assert!((s + 2.0 / 3.0 * 0.16 * FINE_STRUCTURE.powi(3)).abs() < 1e-20);
        assert!(al3d_slope(1.0, &AbrahamLorentzSpec::harmonic(0.0)).is_err());
    }

    #[test]
    fn jerk_matches_harmonic_closure_on_clean_oscillation() {
        let w = 0.4;
        let dt = 0.01;
        let t0 = 3.0;
        let hist: Vec<f64> = (0..5)
            .map(|k| (w * (t0 + (k as f64 - 4.0) * dt)).cos())
            .collect();
        let jerk = al3d_jerk_slope(&hist, dt).unwrap();
        let r_dot = -w * (w * t0).sin();
        let harmonic = al3d_slope(r_dot, &AbrahamLorentzSpec::harmonic(w)).unwrap();
        assert!(
            (jerk - harmonic).abs() < 2e-2 * harmonic.abs(),
            "{jerk} vs {harmonic}"
        );
    }

    #[test]
    fn jerk_rejects_noisy_history() {
        let dt = 0.01;
        let noise = [0.0, 1e-6, -1e-6, 1e-6, -1e-6];
        let hist: Vec<f64> = (0..5)
            .map(|k| (0.4 * k as f64 * dt).cos() + noise[k])
            .collect();
        assert!(matches!(
            al3d_jerk_slope(&hist, dt),
            Err(Error::NoisyJerk { .. })
        ));
        assert!(AbrahamLorentzSpec {
            omega_n: 0.4,
            mode: AlMode::Jerk
        }
        .validate()
        .is_err());
    }
}
