use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::units::HARTREE_EV;

/// Complex spectrum on an ascending, uniform frequency grid (a.u.).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub values: Vec<Complex64>,
    /// False where the value is undefined (e.g. vanishing drive).
    pub mask: Vec<bool>,
}

/// Real-valued spectrum on an ascending, uniform frequency grid (a.u.).
#[derive(Debug, Clone, PartialEq)]
pub struct RealSpectrum {
    pub omega: Vec<f64>,
    pub values: Vec<f64>,
}

impl Spectrum {
    pub fn resolution(&self) -> f64 {
        spacing(&self.omega)
    }

    pub fn omega_ev(&self) -> Vec<f64> {
        self.omega.iter().map(|w| w * HARTREE_EV).collect()
    }

    pub fn map_real(&self, f: impl Fn(f64, Complex64) -> f64) -> RealSpectrum {
        RealSpectrum {
            omega: self.omega.clone(),
            values: self
                .omega
                .iter()
                .zip(&self.values)
                .zip(&self.mask)
                .map(|((&w, &v), &ok)| if ok { f(w, v) } else { 0.0 })
                .collect(),
        }
    }

    pub fn imag(&self) -> RealSpectrum {
        self.map_real(|_, v| v.im)
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }
}

impl RealSpectrum {
    pub fn resolution(&self) -> f64 {
        spacing(&self.omega)
    }

    pub fn omega_ev(&self) -> Vec<f64> {
        self.omega.iter().map(|w| w * HARTREE_EV).collect()
    }

    /// Value at `omega` by linear interpolation (zero outside the grid).
    pub fn at(&self, omega: f64) -> f64 {
        let n = self.omega.len();
        if n == 0 || omega < self.omega[0] || omega > self.omega[n - 1] {
            return 0.0;
        }
        if n == 1 {
            return self.values[0];
        }
        let h = self.resolution();
        let pos = (omega - self.omega[0]) / h;
        let i = (pos.floor() as usize).min(n - 2);
        let f = pos - i as f64;
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }

    /// Index range of the bins with `lo <= omega <= hi`.
    pub fn window(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let start = self.omega.partition_point(|&w| w < lo);
        let end = self.omega.partition_point(|&w| w <= hi);
        start..end.max(start)
    }
}

fn spacing(omega: &[f64]) -> f64 {
    if omega.len() < 2 {
        0.0
    } else {
        (omega[omega.len() - 1] - omega[0]) / (omega.len() - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourierOptions {
    /// Zero-pad to at least this many samples.
    pub pad_to: usize,
    /// Multiply by `exp(-damping t)` before transforming. Exploratory only.
    pub damping: f64,
}

impl FourierOptions {
    pub fn padded(pad_to: usize) -> Self {
        Self {
            pad_to,
            damping: 0.0,
        }
    }
}

/// `F(omega) = sum_n f(t_n) exp(i omega t_n) dt` with `t_n = n dt`, no
/// window and no padding.
pub fn fourier(series: &[f64], dt: f64) -> Result<Spectrum> {
    fourier_with(series, dt, &FourierOptions::default())
}

pub fn fourier_with(series: &[f64], dt: f64, opts: &FourierOptions) -> Result<Spectrum> {
    if series.is_empty() {
        return Err(Error::Empty("time series"));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sampling interval must be positive, got {dt}"
        )));
    }
    let m = series.len().max(opts.pad_to);
    let mut buf: Vec<Complex64> = series
        .iter()
        .enumerate()
        .map(|(n, &f)| {
            let w = if opts.damping > 0.0 {
                (-opts.damping * n as f64 * dt).exp()
            } else {
                1.0
            };
            Complex64::new(f * w, 0.0)
        })
        .collect();
    buf.resize(m, Complex64::new(0.0, 0.0));
    // the inverse transform carries the exp(+i ...) sign of our convention
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);

    let d_omega = 2.0 * std::f64::consts::PI / (m as f64 * dt);
    let k_min = -((m / 2) as isize);
    let mut omega = Vec::with_capacity(m);
    let mut values = Vec::with_capacity(m);
    for j in 0..m {
        let k = j as isize + k_min;
        let src = k.rem_euclid(m as isize) as usize;
        omega.push(k as f64 * d_omega);
        values.push(buf[src] * dt);
    }
    Ok(Spectrum {
        omega,
        values,
        mask: vec![true; m],
    })
}
