//! Crank-Nicolson propagation of one or more emitters sharing a set of
//! environments.
//!
//! All emitters feel the same uniform field, built from the drive averaged
//! over the step and the mean of the environment field at both ends of the
//! step. Because the environment field at the end of the step depends on the
//! new wavefunction, the step is iterated: a predictor extrapolates the
//! dipole, and each corrector pass re-solves from `psi(t)` using the dipole
//! of the previous attempt.

use num_complex::Complex64;

use crate::drive::Drive;
use crate::environment::EnvironmentState;
use crate::error::{Error, Result};
use crate::quantum::{dipole, dipole_velocity, electronic_energy, StaticPotential, Wavefunction};

#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorConfig {
    pub dt: f64,
    pub corrector_iterations: usize,
    pub total_time: f64,
    /// Record every `stride` steps.
    pub stride: usize,
    /// Keep `Rdot` at every step (for replaying kernels after the run).
    pub record_history: bool,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-2,
            corrector_iterations: 1,
            total_time: 4000.0,
            stride: 1,
            record_history: true,
        }
    }
}

impl PropagatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.total_time >= 0.0 && self.total_time.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "total_time must be non-negative, got {}",
                self.total_time
            )));
        }
        if self.stride == 0 {
            return Err(Error::InvalidParameter("stride must be at least 1".into()));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.total_time / self.dt).round() as usize
    }
}

/// Emitters, environments and the bookkeeping carried between steps.
#[derive(Debug, Clone)]
pub struct SimulationState {
    pub emitters: Vec<Wavefunction>,
    pub environment: EnvironmentState,
    pub time: f64,
    pub step_index: usize,
    r: f64,
    r_dot: f64,
    emitted: f64,
    max_norm_drift: f64,
    norms: Vec<f64>,
    pub r_dot_history: Vec<f64>,
}

impl SimulationState {
    pub fn new(emitters: Vec<Wavefunction>, environment: EnvironmentState) -> Result<Self> {
        let first = emitters.first().ok_or(Error::InvalidParameter(
            "at least one emitter is required".into(),
        ))?;
        if emitters.iter().any(|e| e.grid != first.grid) {
            return Err(Error::InvalidParameter(
                "all emitters must share one grid".into(),
            ));
        }
        let r = emitters.iter().map(dipole).sum();
        let norms = emitters.iter().map(|e| e.norm_squared()).collect();
        let r_dot = emitters.iter().map(dipole_velocity).sum();
        Ok(Self {
            emitters,
            environment,
            time: 0.0,
            step_index: 0,
            r,
            r_dot,
            emitted: 0.0,
            max_norm_drift: 0.0,
            norms,
            r_dot_history: Vec::new(),
        })
    }

    /// Total dipole of all emitters.
    pub fn dipole(&self) -> f64 {
        self.r
    }

    pub fn dipole_velocity(&self) -> f64 {
        self.r_dot
    }

    /// Energy handed to the environments so far, `-int E_r Rdot dt`.
    pub fn emitted_energy(&self) -> f64 {
        self.emitted
    }

    /// Largest change of any emitter norm in a single step.
    pub fn max_norm_drift(&self) -> f64 {
        self.max_norm_drift
    }

    pub fn electronic_energy(&self, potential: &StaticPotential) -> f64 {
        self.emitters
            .iter()
            .map(|e| electronic_energy(e, potential))
            .sum()
    }
}

/// Uniformly sampled observables of a run. `e_drive` holds the drive
/// averaged over the sampling interval centered on each sample.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryRecord {
    pub dt: f64,
    pub stride: usize,
    pub t: Vec<f64>,
    pub r: Vec<f64>,
    pub r_dot: Vec<f64>,
    pub e_drive: Vec<f64>,
    pub e_r: Vec<f64>,
    pub e_e: Vec<f64>,
    pub de_rr: Vec<f64>,
    /// Energy stored in cavity modes and baths.
    pub e_env: Vec<f64>,
    pub r_dot_history: Vec<f64>,
    pub steps: usize,
    pub max_norm_drift: f64,
}

impl TrajectoryRecord {
    pub fn sample_interval(&self) -> f64 {
        self.dt * self.stride as f64
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// Crank-Nicolson propagator for a static potential plus uniform fields.
#[derive(Debug, Clone)]
pub struct Propagator {
    potential: StaticPotential,
    drive: Drive,
    config: PropagatorConfig,
    base_diagonal: Vec<f64>,
    x: Vec<f64>,
    scratch: Vec<Complex64>,
    next: Vec<Vec<Complex64>>,
}

impl Propagator {
    pub fn new(potential: StaticPotential, drive: Drive, config: PropagatorConfig) -> Result<Self> {
        config.validate()?;
        drive.validate()?;
        let base_diagonal = potential.hamiltonian_diagonal();
        let x = potential.grid.coordinates().collect();
        Ok(Self {
            potential,
            drive,
            config,
            base_diagonal,
            x,
            scratch: Vec::new(),
            next: Vec::new(),
        })
    }

    pub fn config(&self) -> &PropagatorConfig {
        &self.config
    }

    pub fn potential(&self) -> &StaticPotential {
        &self.potential
    }

    pub fn drive(&self) -> &Drive {
        &self.drive
    }

    /// Solve `(1 + i dt/2 H) out = (1 - i dt/2 H) psi` for `H = T + V + slope x`
    /// by a Thomas sweep. The Hermitian part of the matrix is the identity, so
    /// no pivoting is needed.
    ///
    /// The pivots `den_i = p_i / p_{i-1}` come from the three-term recurrence
    /// of the leading principal minors `p_i`, which keeps the division off the
    /// serial dependency chain.
    fn solve(
        &mut self,
        psi: &[Complex64],
        slope: f64,
        out: &mut [Complex64],
        step: usize,
    ) -> Result<()> {
        const BIG: f64 = 1e150;
        const SCALE: f64 = 1e-150;
        let n = psi.len();
        let tau = 0.5 * self.config.dt;
        // implicit off-diagonal is i*beta, explicit one -i*beta
        let beta = tau * self.potential.grid.kinetic_offdiagonal();
        let beta2 = beta * beta;
        self.scratch.resize(n, Complex64::new(0.0, 0.0));
        let cp = &mut self.scratch[..n];
        let out = &mut out[..n];
        let psi = &psi[..n];
        let diag = &self.base_diagonal[..n];
        let x = &self.x[..n];
        // p_{i-1} and p_{i-2}
        let (mut p1_re, mut p1_im) = (1.0f64, 0.0f64);
        let (mut p2_re, mut p2_im) = (0.0f64, 0.0f64);
        let (mut d_re, mut d_im) = (0.0f64, 0.0f64);
        let mut left = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let th = tau * (diag[i] + slope * x[i]);
            // p_i = (1 + i th) p_{i-1} + beta^2 p_{i-2}
            let mut q_re = p1_re - th * p1_im + beta2 * p2_re;
            let mut q_im = p1_im + th * p1_re + beta2 * p2_im;
            let mut prev_re = p1_re;
            let mut prev_im = p1_im;
            let nq = q_re * q_re + q_im * q_im;
            if nq > BIG {
                q_re *= SCALE;
                q_im *= SCALE;
                prev_re *= SCALE;
                prev_im *= SCALE;
            }
            let nq = q_re * q_re + q_im * q_im;
            if !(nq > 1e-300) || !nq.is_finite() {
                return Err(Error::SingularSystem { row: i, step });
            }
            // g = 1 / den_i = p_{i-1} / p_i
            let g_re = (prev_re * q_re + prev_im * q_im) / nq;
            let g_im = (prev_im * q_re - prev_re * q_im) / nq;
            p2_re = prev_re;
            p2_im = prev_im;
            p1_re = q_re;
            p1_im = q_im;

            let p = psi[i];
            let right = if i + 1 < n {
                psi[i + 1]
            } else {
                Complex64::new(0.0, 0.0)
            };
            let s = left + right;
            left = p;
            // rhs - i beta d_{i-1}, with rhs = (1 - i th) p - i beta s
            let u_re = p.re + th * p.im + beta * (s.im + d_im);
            let u_im = p.im - th * p.re - beta * (s.re + d_re);
            d_re = u_re * g_re - u_im * g_im;
            d_im = u_re * g_im + u_im * g_re;
            // c = i beta g
            cp[i] = Complex64::new(-beta * g_im, beta * g_re);
            out[i] = Complex64::new(d_re, d_im);
        }
        for i in (0..n - 1).rev() {
            let next = out[i + 1];
            out[i] -= cp[i] * next;
        }
        Ok(())
    }

    /// Advance the state by one step.
    pub fn step(&mut self, state: &mut SimulationState) -> Result<()> {
        let dt = self.config.dt;
        let index = state.step_index;
        let t0 = index as f64 * dt;
        let t1 = (index + 1) as f64 * dt;
        let (r0, rd0) = (state.r, state.r_dot);

        state.environment.activate_if_due(t0, r0, rd0, dt);
        let e0 = state.environment.field();
        let drive = self.drive.impulse(t0, t1) / dt;
        let passes = if state.environment.is_active() {
            1 + self.config.corrector_iterations
        } else {
            1
        };

        let n_em = state.emitters.len();
        let n = self.x.len();
        let mut next = std::mem::take(&mut self.next);
        next.resize_with(n_em, Vec::new);
        for buf in &mut next {
            buf.resize(n, Complex64::new(0.0, 0.0));
        }

        let dx = self.potential.grid.spacing();
        let mut r1 = r0 + dt * rd0;
        let mut rd1 = rd0;
        for _ in 0..passes {
            let e1 = state.environment.field_after(r1, rd1, t1, dt);
            let slope = drive + 0.5 * (e0 + e1);
            for (psi, out) in state.emitters.iter().zip(next.iter_mut()) {
                self.solve(&psi.amplitudes, slope, out, index)?;
            }
            r1 = 0.0;
            rd1 = 0.0;
            for out in &next {
                let (r, rd) = moments(out, &self.x, dx);
                r1 += r;
                rd1 += rd;
            }
        }
        if !(r1.is_finite() && rd1.is_finite()) {
            self.next = next;
            return Err(Error::NonFinite { step: index });
        }

        let e1 = state.environment.commit(r1, rd1, t1, dt);
        state.emitted -= 0.5 * (e0 * rd0 + e1 * rd1) * dt;

        for ((psi, out), before) in state
            .emitters
            .iter_mut()
            .zip(next.iter_mut())
            .zip(state.norms.iter_mut())
        {
            std::mem::swap(&mut psi.amplitudes, out);
            let after: f64 = psi.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * dx;
            let drift = (after - *before).abs();
            if !drift.is_finite() {
                self.next = next;
                return Err(Error::NonFinite { step: index });
            }
            state.max_norm_drift = state.max_norm_drift.max(drift);
            *before = after;
        }
        self.next = next;

        state.r = r1;
        state.r_dot = rd1;
        state.step_index = index + 1;
        state.time = t1;
        if self.config.record_history {
            state.r_dot_history.push(rd1);
        }
        Ok(())
    }

    fn sample(&self, state: &SimulationState, record: &mut TrajectoryRecord) {
        let t = state.time;
        let h = 0.5 * record.sample_interval();
        record.t.push(t);
        record.r.push(state.r);
        record.r_dot.push(state.r_dot);
        record
            .e_drive
            .push(self.drive.impulse(t - h, t + h) / (2.0 * h));
        record.e_r.push(state.environment.field());
        record.e_e.push(state.electronic_energy(&self.potential));
        record.de_rr.push(state.emitted);
        record.e_env.push(state.environment.stored_energy());
    }

    /// Propagate `state` for the configured time, recording every `stride` steps.
    pub fn run(&mut self, state: &mut SimulationState) -> Result<TrajectoryRecord> {
        state.environment.validate(self.config.dt)?;
        let stride = self.config.stride;
        let mut record = TrajectoryRecord {
            dt: self.config.dt,
            stride,
            ..Default::default()
        };
        if self.config.record_history && state.r_dot_history.is_empty() {
            state.r_dot_history.push(state.r_dot);
        }
        self.sample(state, &mut record);
        let mut target = state.step_index + self.config.steps();
        target -= target % stride;
        while state.step_index < target {
            self.step(state)?;
            if state.step_index.is_multiple_of(stride) {
                self.sample(state, &mut record);
            }
        }
        record.steps = state.step_index;
        record.max_norm_drift = state.max_norm_drift;
        record.r_dot_history = std::mem::take(&mut state.r_dot_history);
        Ok(record)
    }
}

/// Dipole and dipole velocity of raw amplitudes in one sweep.
fn moments(a: &[Complex64], x: &[f64], dx: f64) -> (f64, f64) {
    let n = a.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mut r = 0.0;
    let mut cur = 0.0;
    for i in 0..n - 1 {
        r += x[i] * a[i].norm_sqr();
        // Im(a_i^* a_{i+1}) enters twice with opposite signs of the neighbour
        cur += a[i].re * a[i + 1].im - a[i].im * a[i + 1].re;
    }
    r += x[n - 1] * a[n - 1].norm_sqr();
    (-r * dx, -cur)
}

/// Propagate a single emitter from `initial`.
pub fn run(
    potential: StaticPotential,
    drive: Drive,
    config: PropagatorConfig,
    initial: Wavefunction,
    environment: EnvironmentState,
) -> Result<TrajectoryRecord> {
    ensemble_run(1, potential, drive, config, initial, environment)
}

/// Propagate `n_emitters` identical, non-interacting copies of `initial`
/// that share the environments through their total dipole.
pub fn ensemble_run(
    n_emitters: usize,
    potential: StaticPotential,
    drive: Drive,
    config: PropagatorConfig,
    initial: Wavefunction,
    environment: EnvironmentState,
) -> Result<TrajectoryRecord> {
    if n_emitters == 0 {
        return Err(Error::InvalidParameter(
            "n_emitters must be at least 1".into(),
        ));
    }
    let mut state = SimulationState::new(vec![initial; n_emitters], environment)?;
    let mut prop = Propagator::new(potential, drive, config)?;
    prop.run(&mut state)
}
