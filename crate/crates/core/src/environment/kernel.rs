//! Tabulated memory kernels for arbitrary photonic environments.
//!
//! A table holds cell averages `K_m = (1/dt) int_{m dt}^{(m+1) dt} K(tau) dtau`
//! and the radiated field is the causal sum `E_r(t_n) = -dt sum_m K_m Rdot_{n-m}`.
//! With this convention a Dirac kernel `k delta(tau)` is the single cell
//! `K_0 = k / dt` and reproduces the local waveguide recoil exactly.

use std::collections::VecDeque;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    dt: f64,
    values: Vec<f64>,
}

impl KernelTable {
    pub fn new(dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "kernel spacing must be positive, got {dt}"
            )));
        }
        if values.is_empty() {
            return Err(Error::Empty("kernel table"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "kernel table contains non-finite values".into(),
            ));
        }
        Ok(Self { dt, values })
    }

    /// `strength * delta(tau)`.
    pub fn delta(strength: f64, dt: f64) -> Result<Self> {
        Self::new(dt, vec![strength / dt])
    }

    /// Cell-averaged cosine sum `sum_k lambda_k^2 cos(omega_k tau)` over `[0, tau_max)`.
    pub fn from_modes(modes: &[(f64, f64)], dt: f64, tau_max: f64) -> Result<Self> {
        let n = (tau_max / dt).round().max(1.0) as usize;
        let values = (0..n)
            .map(|m| {
                let t0 = m as f64 * dt;
                modes
                    .iter()
                    .map(|&(w, l2)| l2 * ((w * (t0 + dt)).sin() - (w * t0).sin()) / (w * dt))
                    .sum()
            })
            .collect();
        Self::new(dt, values)
    }

    /// Parse the two-column text format `tau K(tau)` (atomic units), one
    /// sample per line, `#` starting a comment. The first sample must sit at
    /// `tau = 0` and the spacing must be uniform.
    pub fn parse(text: &str) -> Result<Self> {
        let mut taus = Vec::new();
        let mut values = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Config {
                path: "kernel table".into(),
                line: lineno + 1,
                message,
            };
            let mut cols = line.split_whitespace();
            let (Some(a), Some(b), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(err(format!("expected two columns, got `{line}`")));
            };
            let tau: f64 = a.parse().map_err(|_| err(format!("bad tau `{a}`")))?;
            let k: f64 = b
                .parse()
                .map_err(|_| err(format!("bad kernel value `{b}`")))?;
            taus.push(tau);
            values.push(k);
        }
        if taus.len() < 2 {
            return Err(Error::InvalidParameter(
                "kernel table needs at least two samples".into(),
            ));
        }
        let dt = taus[1] - taus[0];
        if taus[0].abs() > 1e-12 * dt.abs().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "kernel table must start at tau = 0, starts at {}",
                taus[0]
            )));
        }
        for (m, tau) in taus.iter().enumerate() {
            if (tau - m as f64 * dt).abs() > 1e-6 * dt {
                return Err(Error::InvalidParameter(format!(
                    "kernel table spacing is not uniform at sample {m}"
                )));
            }
        }
        Self::new(dt, values)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text =
            std::fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config { line, message, .. } => Error::Config {
                path: path.as_ref().display().to_string(),
                line,
                message,
            },
            other => other,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tau_max(&self) -> f64 {
        self.dt * self.values.len() as f64
    }

    pub fn check_dt(&self, dt: f64) -> Result<()> {
        if (self.dt - dt).abs() > 1e-9 * dt {
            return Err(Error::KernelResample {
                table: self.dt,
                propagation: dt,
            });
        }
        Ok(())
    }
}

/// Radiated field from the dipole-velocity history (oldest first, newest
/// last, spaced by `dt`). Samples before the start of the history count as
/// zero current.
pub fn kernel_field(current_history: &[f64], table: &KernelTable, dt: f64) -> Result<f64> {
    table.check_dt(dt)?;
    Ok(causal_sum(current_history.iter().rev(), table))
}

fn causal_sum<'a>(newest_first: impl Iterator<Item = &'a f64>, table: &KernelTable) -> f64 {
    -table.dt
        * table
            .values
            .iter()
            .zip(newest_first)
            .map(|(k, r)| k * r)
            .sum::<f64>()
}

/// Kernel environment with its own bounded history of `Rdot`.
#[derive(Debug, Clone)]
pub struct KernelState {
    table: KernelTable,
    /// newest first
    history: VecDeque<f64>,
}

impl KernelState {
    pub fn new(table: KernelTable) -> Self {
        let cap = table.values.len();
        Self {
            table,
            history: VecDeque::with_capacity(cap),
        }
    }

    pub fn table(&self) -> &KernelTable {
        &self.table
    }

    pub(crate) fn reset(&mut self, r_dot: f64) {
        self.history.clear();
        self.history.push_front(r_dot);
    }

    pub(crate) fn field(&self) -> f64 {
        causal_sum(self.history.iter(), &self.table)
    }

    /// Field after appending `r_dot_next`, without committing it.
    pub(crate) fn field_with(&self, r_dot_next: f64) -> f64 {
        let head = -self.table.dt * self.table.values[0] * r_dot_next;
        let tail: f64 = self
            .table
            .values
            .iter()
            .skip(1)
            .zip(self.history.iter())
            .map(|(k, r)| k * r)
            .sum();
        head - self.table.dt * tail
    }

    pub(crate) fn push(&mut self, r_dot: f64) {
        if self.history.len() == self.table.values.len() {
            self.history.pop_back();
        }
        self.history.push_front(r_dot);
    }
}
