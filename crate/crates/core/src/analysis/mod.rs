//! Frequency-domain post-processing of trajectories.

mod fourier;
mod lineshape;

pub use fourier::{fourier, fourier_with, FourierOptions, RealSpectrum, Spectrum};
pub use lineshape::{fwhm, peak_shift, LineshapeFit};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::propagate::TrajectoryRecord;
use crate::units::FINE_STRUCTURE;

/// `alpha(omega) = R(omega) / E(omega)` of the dipole change relative to
/// the first sample. Bins where `|E| < 1e-14 max |E|` are masked.
pub fn polarizability(record: &TrajectoryRecord, opts: &FourierOptions) -> Result<Spectrum> {
    if record.is_empty() {
        return Err(Error::Empty("trajectory"));
    }
    let dt = record.sample_interval();
    let r0 = record.r[0];
    let dr: Vec<f64> = record.r.iter().map(|r| r - r0).collect();
    let rw = fourier_with(&dr, dt, opts)?;
    let ew = fourier_with(&record.e_drive, dt, opts)?;
    let emax = ew.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let cut = 1e-14 * emax;
    let mut values = Vec::with_capacity(rw.len());
    let mut mask = Vec::with_capacity(rw.len());
    for (r, e) in rw.values.iter().zip(&ew.values) {
        if emax > 0.0 && e.norm() >= cut {
            values.push(r / e);
            mask.push(true);
        } else {
            values.push(Complex64::new(0.0, 0.0));
            mask.push(false);
        }
    }
    Ok(Spectrum {
        omega: rw.omega,
        values,
        mask,
    })
}

/// Photoabsorption cross-section `sigma = 4 pi omega / c Im alpha` (a.u.).
pub fn cross_section(alpha: &Spectrum) -> RealSpectrum {
    let k = 4.0 * std::f64::consts::PI * FINE_STRUCTURE;
    alpha.map_real(|w, a| k * w * a.im)
}

/// Intensity near one harmonic of the driving frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicPeak {
    pub order: usize,
    pub omega: f64,
    /// Largest `|E_r|^2` within a quarter of the fundamental.
    pub intensity: f64,
    /// That maximum is interior to the half-fundamental neighborhood.
    pub local_max: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HhgSpectrum {
    /// `|E_r(omega)|^2` for `omega >= 0`.
    pub spectrum: RealSpectrum,
    pub omega_l: f64,
    pub harmonics: Vec<HarmonicPeak>,
}

impl HhgSpectrum {
    pub fn harmonic(&self, order: usize) -> Option<&HarmonicPeak> {
        self.harmonics.iter().find(|h| h.order == order)
    }
}

/// Spectrum of the radiated field with harmonic orders `1..=max_order`
/// of `omega_l` annotated.
pub fn hhg_spectrum(
    record: &TrajectoryRecord,
    omega_l: f64,
    max_order: usize,
    opts: &FourierOptions,
) -> Result<HhgSpectrum> {
    let full = fourier_with(&record.e_r, record.sample_interval(), opts)?;
    let start = full.omega.partition_point(|&w| w < 0.0);
    let spectrum = RealSpectrum {
        omega: full.omega[start..].to_vec(),
        values: full.values[start..].iter().map(|v| v.norm_sqr()).collect(),
    };
    let harmonics = (1..=max_order)
        .map(|n| {
            let w0 = n as f64 * omega_l;
            let near = spectrum.window(w0 - 0.25 * omega_l, w0 + 0.25 * omega_l);
            let wide = spectrum.window(w0 - 0.5 * omega_l, w0 + 0.5 * omega_l);
            let max_in = |r: std::ops::Range<usize>| {
                spectrum.values[r].iter().copied().fold(0.0f64, f64::max)
            };
            let intensity = max_in(near.clone());
            let neighborhood = max_in(wide);
            HarmonicPeak {
                order: n,
                omega: w0,
                intensity,
                local_max: !near.is_empty() && intensity >= neighborhood,
            }
        })
        .collect();
    Ok(HhgSpectrum {
        spectrum,
        omega_l,
        harmonics,
    })
}

/// Energy bookkeeping of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger {
    /// Emitted energy at each sample.
    pub de_rr: Vec<f64>,
    /// `max |(E_e + dE_rr)(t) - (E_e + dE_rr)(t_off)| / |E_e(t_off)|` over `t >= t_off`.
    pub residual: f64,
    /// Emitted energy never decreases between samples.
    pub monotone: bool,
}

/// Cumulative trapezoidal `-int E_r Rdot dt` of a uniformly sampled series.
pub fn cumulative_emission(r_dot: &[f64], e_r: &[f64], dt: f64) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(r_dot.len());
    for i in 0..r_dot.len() {
        if i > 0 {
            acc -= 0.5 * (e_r[i - 1] * r_dot[i - 1] + e_r[i] * r_dot[i]) * dt;
        }
        out.push(acc);
    }
    out
}

/// Closure of `E_e + dE_rr` once the drive is off. Uses the emitted energy
/// accumulated at every propagation step.
pub fn energy_ledger(record: &TrajectoryRecord, t_off: f64) -> Result<EnergyLedger> {
    if record.is_empty() {
        return Err(Error::Empty("trajectory"));
    }
    let i0 = record.t.partition_point(|&t| t < t_off);
    if i0 >= record.len() {
        return Err(Error::InvalidParameter(format!(
            "t_off = {t_off} lies beyond the end of the record"
        )));
    }
    let reference = record.e_e[i0] + record.de_rr[i0];
    let scale = record.e_e[i0].abs();
    let residual = (i0..record.len())
        .map(|i| (record.e_e[i] + record.de_rr[i] - reference).abs())
        .fold(0.0, f64::max)
        / scale;
    let monotone = record.de_rr.windows(2).all(|w| w[1] >= w[0]);
    Ok(EnergyLedger {
        de_rr: record.de_rr.clone(),
        residual,
        monotone,
    })
}
