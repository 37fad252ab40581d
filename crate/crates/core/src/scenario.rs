//! Scenario execution: builds the model from a [`Scenario`], runs the
//! required propagations and writes CSV tables plus a plain-text summary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::analysis::{
    cross_section, energy_ledger, fwhm, hhg_spectrum, peak_shift, polarizability, FourierOptions,
    HhgSpectrum, LineshapeFit, RealSpectrum, Spectrum,
};
use crate::config::{emit, DriveKind, InitialState, Scenario, ScenarioKind};
use crate::drive::Drive;
use crate::environment::{
    AbrahamLorentzSpec, CavityModeState, EdgeSpec, Environment, EnvironmentState, KernelState,
    KernelTable, ModeBath, WaveguideSpec,
};
use crate::error::{Error, Result};
use crate::propagate::{ensemble_run, PropagatorConfig, TrajectoryRecord};
use crate::quantum::{
    eigenstates, soft_coulomb, EigenSolution, Grid1D, StaticPotential, Wavefunction,
};
use crate::theory::{gamma_rr, gamma_ww_1d, pole_shift, summarize, TwoLevelData};
use crate::units::{bohr2_to_angstrom2, HARTREE_EV};

/// Environment variable holding the number of sweep workers.
pub const WORKERS_ENV: &str = "RRSIM_WORKERS";

/// Static model shared by all runs of a scenario.
#[derive(Debug, Clone)]
pub struct Model {
    pub potential: StaticPotential,
    pub eigen: EigenSolution,
    pub omega_eg: f64,
    pub r_eg: f64,
}

impl Model {
    pub fn new(s: &Scenario) -> Result<Self> {
        let grid = Grid1D::new(s.grid.points, s.grid.spacing)?;
        let potential = soft_coulomb(grid, s.grid.softening)?;
        let eigen = eigenstates(&potential, 2)?;
        let omega_eg = eigen.excitation(1);
        let r_eg = eigen.transition_dipole(0, 1).abs();
        Ok(Self {
            potential,
            eigen,
            omega_eg,
            r_eg,
        })
    }

    pub fn two_level(&self, inv_area: f64, pol: f64) -> TwoLevelData {
        TwoLevelData {
            omega_eg: self.omega_eg,
            r_eg: self.r_eg,
            inv_area,
            pol,
        }
    }

    pub fn initial(&self, which: InitialState) -> Result<Wavefunction> {
        let s = &self.eigen.states;
        match which {
            InitialState::Ground => Ok(s[0].clone()),
            InitialState::Excited => Ok(s[1].clone()),
            InitialState::Superposition => {
                let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                Wavefunction::superposition(&[(&s[0], c), (&s[1], c)])
            }
        }
    }
}

/// Named numbers reported by a run, in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub values: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

impl Summary {
    pub fn push(&mut self, key: impl Into<String>, value: f64) {
        self.values.push((key.into(), value));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn to_text(&self, kind: ScenarioKind) -> String {
        let mut o = format!("scenario = {}\n", kind.name());
        for (k, v) in &self.values {
            let _ = writeln!(o, "{k} = {}", fmt_num(*v));
        }
        for n in &self.notes {
            let _ = writeln!(o, "# {n}");
        }
        o
    }
}

/// Outcome class of a failed scenario, mapped to process exit codes.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_validation() {
        2
    } else if matches!(err, Error::Io { .. }) {
        1
    } else {
        3
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Write a numeric CSV with 17 significant digits and LF line endings.
pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> Result<()> {
    let mut o = header.join(",");
    o.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| fmt_num(*v)).collect();
        o.push_str(&cells.join(","));
        o.push('\n');
    }
    write_file(path, &o)
}

pub fn write_trajectory(path: &Path, r: &TrajectoryRecord) -> Result<()> {
    write_csv(
        path,
        &["t", "R", "Rdot", "E_drive", "E_r", "E_e", "dE_rr"],
        (0..r.len()).map(|i| {
            vec![
                r.t[i],
                r.r[i],
                r.r_dot[i],
                r.e_drive[i],
                r.e_r[i],
                r.e_e[i],
                r.de_rr[i],
            ]
        }),
    )
}

/// Polarizability and cross-section (in angstrom^2) for `0 <= omega <= omega_max`.
pub fn write_spectrum(
    path: &Path,
    alpha: &Spectrum,
    sigma: &RealSpectrum,
    omega_max: f64,
) -> Result<()> {
    let rows = (0..alpha.len())
        .filter(|&i| alpha.omega[i] >= 0.0 && alpha.omega[i] <= omega_max)
        .map(|i| {
            let w = alpha.omega[i];
            let a = alpha.values[i];
            vec![
                w,
                w * HARTREE_EV,
                a.re,
                a.im,
                bohr2_to_angstrom2(sigma.values[i]),
            ]
        });
    write_csv(
        path,
        &["omega_au", "omega_ev", "re_alpha", "im_alpha", "sigma"],
        rows,
    )
}

/// Everything needed to start one propagation.
pub struct RunPlan {
    pub potential: StaticPotential,
    pub drive: Drive,
    pub config: PropagatorConfig,
    pub initial: Wavefunction,
    pub n_emitters: usize,
    pub environment: EnvironmentState,
}

impl RunPlan {
    pub fn execute(self) -> Result<TrajectoryRecord> {
        ensemble_run(
            self.n_emitters,
            self.potential,
            self.drive,
            self.config,
            self.initial,
            self.environment,
        )
    }
}

/// Environments of `s` with the waveguide coupling replaced by `inv_area`.
pub fn build_environment(s: &Scenario, inv_area: f64) -> Result<EnvironmentState> {
    let e = &s.environment;
    let mut envs = Vec::new();
    if e.bath_modes > 0 {
        if inv_area > 0.0 {
            envs.push(Environment::Bath(ModeBath::waveguide_with_modes(
                inv_area * e.pol * e.pol,
                e.bath_modes,
                e.bath_cutoff,
            )?));
        }
    } else if inv_area > 0.0 {
        let spec = WaveguideSpec {
            inv_area,
            pol_projection: e.pol,
            switch_on_time: e.switch_on,
        };
        envs.push(match e.edge_z {
            Some(z) => Environment::edge_waveguide(spec, &EdgeSpec { z_ratio: z })?,
            None => Environment::waveguide(spec),
        });
    }
    if let Some(w) = e.al_omega {
        envs.push(Environment::AbrahamLorentz(AbrahamLorentzSpec::harmonic(w)));
    }
    if let Some(path) = &e.kernel_file {
        envs.push(Environment::Kernel(KernelState::new(KernelTable::load(
            path,
        )?)));
    }
    if let Some(wc) = e.cavity_omega {
        if e.g_over_omega != 0.0 {
            envs.push(Environment::Cavity(CavityModeState::from_g_ratio(
                wc,
                e.g_over_omega,
            )?));
        }
    }
    let state = EnvironmentState::new(envs, e.switch_on);
    state.validate(s.propagation.dt)?;
    Ok(state)
}

pub fn build_drive(s: &Scenario, model: &Model) -> Drive {
    match s.drive.kind {
        DriveKind::None => Drive::None,
        DriveKind::Kick => Drive::Kick(s.drive.kick),
        DriveKind::Pulse => Drive::Pulse(s.drive.pulse),
        DriveKind::Cw => Drive::Cw(s.cw(model.omega_eg)),
    }
}

pub fn propagator_config(s: &Scenario, total_time: f64) -> PropagatorConfig {
    PropagatorConfig {
        dt: s.propagation.dt,
        corrector_iterations: s.propagation.corrector_iterations,
        total_time,
        stride: s.propagation.stride,
        record_history: s.propagation.record_history,
    }
}

/// Propagation time for a linewidth measurement: at least `decay_lengths`
/// predicted amplitude decay times, and never shorter than configured.
pub fn linewidth_run_time(s: &Scenario, gamma: f64) -> f64 {
    if gamma > 0.0 {
        s.propagation
            .total_time
            .max(s.analysis.decay_lengths / gamma)
    } else {
        s.propagation.total_time
    }
}

/// Run plan for the scenario exactly as configured.
pub fn plan(s: &Scenario, model: &Model, inv_area: f64, total_time: f64) -> Result<RunPlan> {
    Ok(RunPlan {
        potential: model.potential.clone(),
        drive: build_drive(s, model),
        config: propagator_config(s, total_time),
        initial: model.initial(s.initial)?,
        n_emitters: s.n_emitters,
        environment: build_environment(s, inv_area)?,
    })
}

/// FFT options for a record: padded to at least four times its length.
pub fn fourier_options(s: &Scenario, record: &TrajectoryRecord) -> FourierOptions {
    FourierOptions::padded(s.analysis.pad_to.max(4 * record.len()).next_power_of_two())
}

pub struct Absorption {
    pub alpha: Spectrum,
    pub sigma: RealSpectrum,
}

pub fn absorption(s: &Scenario, record: &TrajectoryRecord) -> Result<Absorption> {
    let alpha = polarizability(record, &fourier_options(s, record))?;
    let sigma = cross_section(&alpha);
    Ok(Absorption { alpha, sigma })
}

/// Strongest maximum of `values` within `lo..=hi`, as (omega, value).
pub fn global_peak(spec: &RealSpectrum, lo: f64, hi: f64) -> Option<(f64, f64)> {
    let r = spec.window(lo, hi);
    let start = r.start;
    spec.values[r]
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, &v)| (spec.omega[start + i], v))
}

/// Local maxima within `lo..=hi` sorted by height, highest first.
pub fn local_peaks(spec: &RealSpectrum, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let r = spec.window(lo, hi);
    let v = &spec.values;
    let mut peaks: Vec<(f64, f64)> = (r.start.max(1)..r.end.min(v.len() - 1))
        .filter(|&i| v[i] > v[i - 1] && v[i] >= v[i + 1])
        .map(|i| (spec.omega[i], v[i]))
        .collect();
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
    peaks
}

fn push_fit(summary: &mut Summary, prefix: &str, fit: &LineshapeFit) {
    summary.push(format!("{prefix}center_ev"), fit.center);
    summary.push(format!("{prefix}fwhm_ev"), fit.fwhm);
    summary.push(format!("{prefix}gamma_ev"), fit.gamma);
    if let Some(f) = fit.fit_fwhm {
        summary.push(format!("{prefix}fit_gamma_ev"), 0.5 * f);
    }
    summary.push(
        format!("{prefix}fit_disagreement"),
        f64::from(u8::from(fit.disagreement)),
    );
}

/// Linewidth of the cross-section around the bare resonance.
pub fn sigma_linewidth(s: &Scenario, model: &Model, sigma: &RealSpectrum) -> Result<LineshapeFit> {
    let w0 = model.omega_eg;
    fwhm(
        sigma,
        (w0 - s.analysis.window, w0 + s.analysis.window),
        s.analysis.fit_level,
    )
}

/// Run one scenario, writing its outputs into `out`.
pub fn run_scenario(s: &Scenario, out: &Path) -> Result<Summary> {
    s.validate()?;
    let model = Model::new(s)?;
    // build everything that can fail on input before computing
    build_environment(s, s.environment.inv_area)?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    write_file(&out.join("resolved.cfg"), &emit(s))?;
    let mut summary = Summary::default();
    summary.push("omega_eg_ev", model.omega_eg * HARTREE_EV);
    summary.push("r_eg_au", model.r_eg);
    match s.kind {
        ScenarioKind::Absorption => run_absorption(s, &model, out, &mut summary)?,
        ScenarioKind::Decay => run_decay(s, &model, out, &mut summary)?,
        ScenarioKind::Stimulated => run_stimulated(s, &model, out, &mut summary)?,
        ScenarioKind::Eit => run_eit(s, &model, out, &mut summary)?,
        ScenarioKind::Hhg => run_hhg(s, &model, out, &mut summary)?,
        ScenarioKind::FwhmSweep => run_fwhm_sweep(s, &model, out, &mut summary)?,
        ScenarioKind::BathConvergence => run_bath_convergence(s, &model, out, &mut summary)?,
        ScenarioKind::Superradiance => run_superradiance(s, &model, out, &mut summary)?,
        ScenarioKind::LambShift => run_lamb_shift(s, &model, out, &mut summary)?,
        ScenarioKind::Theory => run_theory(s, &model, out, &mut summary)?,
    }
    write_file(&out.join("summary.txt"), &summary.to_text(s.kind))?;
    Ok(summary)
}

fn spectrum_limit(model: &Model) -> f64 {
    (3.0 * model.omega_eg).max(1.0)
}

fn run_absorption(s: &Scenario, model: &Model, out: &Path, summary: &mut Summary) -> Result<()> {
    let inv_area = s.environment.inv_area;
    let data = model.two_level(inv_area, s.environment.pol);
    let gamma = gamma_rr(&data) * s.n_emitters as f64;
    let record = plan(s, model, inv_area, linewidth_run_time(s, gamma))?.execute()?;
    write_trajectory(&out.join("trajectory.csv"), &record)?;
    let abs = absorption(s, &record)?;
    write_spectrum(
        &out.join("spectrum.csv"),
        &abs.alpha,
        &abs.sigma,
        spectrum_limit(model),
    )?;
    summary.push("run_time_au", record.t.last().copied().unwrap_or(0.0));
    summary.push("max_norm_drift", record.max_norm_drift);
    if let Some((w, v)) = global_peak(&abs.sigma, 0.05, spectrum_limit(model)) {
        summary.push("peak_ev", w * HARTREE_EV);
        summary.push("peak_sigma_a2", bohr2_to_angstrom2(v));
    }
    summary.push("gamma_rr_ev", gamma * HARTREE_EV);
    match sigma_linewidth(s, model, &abs.sigma) {
        Ok(fit) => {
            push_fit(summary, "", &fit);
            if gamma > 0.0 {
                summary.push("gamma_ratio", fit.gamma / (gamma * HARTREE_EV));
            }
        }
        Err(e) => summary.note(format!("linewidth not extracted: {e}")),
    }
    Ok(())
}

/// End of the external drive for energy bookkeeping.
fn drive_off_time(s: &Scenario, model: &Model) -> f64 {
    build_drive(s, model).end_time().unwrap_or(f64::INFINITY)
}

fn run_decay(s: &Scenario, model: &Model, out: &Path, summary: &mut Summary) -> Result<()> {
    let record = plan(s, model, s.environment.inv_area, s.propagation.total_time)?.execute()?;
    write_trajectory(&out.join("trajectory.csv"), &record)?;
    let t_off = drive_off_time(s, model);
    let e0 = record.e_e[0];
    summary.push("e_initial", e0);
    summary.push("e_max", record.e_e.iter().copied().fold(f64::MIN, f64::max));
    summary.push("e_final", *record.e_e.last().unwrap());
    summary.push("de_rr_final", *record.de_rr.last().unwrap());
    summary.push("max_norm_drift", record.max_norm_drift);
    summary.push("t_off", t_off);
    match energy_ledger(&record, t_off) {
        Ok(ledger) => {
            let i = record.t.partition_point(|&t| t < t_off);
            summary.push("deposited", record.e_e[i] + record.de_rr[i] - e0);
            summary.push("closure_residual", ledger.residual);
            summary.push("de_rr_monotone", f64::from(u8::from(ledger.monotone)));
        }
        Err(e) => summary.note(format!("energy ledger not evaluated: {e}")),
    }
    Ok(())
}

fn run_stimulated(s: &Scenario, model: &Model, out: &Path, summary: &mut Summary) -> Result<()> {
    let e1 = model.eigen.energies[1];
    let inv_area = s.environment.inv_area;
    let driven = plan(s, model, inv_area, s.propagation.total_time)?;
    let mut undriven = plan(s, model, inv_area, s.propagation.total_time)?;
    undriven.drive = Drive::None;
    let mut detuned = plan(s, model, inv_area, s.propagation.total_time)?;
    let cw = s.cw(model.omega_eg);
    detuned.drive = Drive::Cw(crate::drive::CwSpec {
        omega: 0.5 * cw.omega,
        ramp: 2.0 * cw.ramp,
        ..cw
    });
    let runs: Vec<Result<TrajectoryRecord>> = vec![driven, undriven, detuned]
        .into_iter()
        .map(RunPlan::execute)
        .collect();
    let names = [
        "trajectory.csv",
        "trajectory_undriven.csv",
        "trajectory_detuned.csv",
    ];
    let labels = ["resonant", "undriven", "detuned"];
    for ((run, name), label) in runs.into_iter().zip(names).zip(labels) {
        let record = run?;
        write_trajectory(&out.join(name), &record)?;
        let last = *record.e_e.last().unwrap();
        let min = record.e_e.iter().copied().fold(f64::MAX, f64::min);
        summary.push(format!("{label}_e_final_minus_e1"), last - e1);
        summary.push(format!("{label}_e_min_minus_e1"), min - e1);
        summary.push(
            format!("{label}_de_rr_final"),
            *record.de_rr.last().unwrap(),
        );
    }
    Ok(())
}

fn run_eit(s: &Scenario, model: &Model, out: &Path, summary: &mut Summary) -> Result<()> {
    let inv_area = s.environment.inv_area;
    let total = s.propagation.total_time;
    let coupled = plan(s, model, inv_area, total)?;
    let mut reference = plan(s, model, inv_area, total)?;
    reference.environment = {
        let mut bare = s.clone();
        bare.environment.cavity_omega = None;
        build_environment(&bare, inv_area)?
    };
    let records: Vec<Result<TrajectoryRecord>> = vec![coupled, reference]
        .into_iter()
        .map(RunPlan::execute)
        .collect();
    let mut it = records.into_iter();
    let main = it.next().unwrap()?;
    let refr = it.next().unwrap()?;
    write_trajectory(&out.join("trajectory.csv"), &main)?;
    let a = absorption(s, &main)?;
    let b = absorption(s, &refr)?;
    let limit = spectrum_limit(model);
    write_spectrum(&out.join("spectrum.csv"), &a.alpha, &a.sigma, limit)?;
    write_spectrum(
        &out.join("spectrum_reference.csv"),
        &b.alpha,
        &b.sigma,
        limit,
    )?;

    let wc = s.environment.cavity_omega.unwrap_or(model.omega_eg);
    let g = s.environment.g_over_omega * wc;
    let half = s.analysis.window.max(3.0 * g);
    let (_, ref_peak) = global_peak(&b.sigma, wc - half, wc + half)
        .ok_or(Error::InsufficientResolution("no reference peak".into()))?;
    summary.push("cavity_omega_ev", wc * HARTREE_EV);
    summary.push("g_ev", g * HARTREE_EV);
    summary.push("reference_peak_sigma_a2", bohr2_to_angstrom2(ref_peak));
    summary.push("sigma_at_cavity_ratio", a.sigma.at(wc) / ref_peak);
    summary.push("sigma_at_bare_ratio", a.sigma.at(model.omega_eg) / ref_peak);
    let peaks = local_peaks(&a.sigma, wc - half, wc + half);
    if peaks.len() >= 2 {
        let (lo, hi) = if peaks[0].0 < peaks[1].0 {
            (peaks[0], peaks[1])
        } else {
            (peaks[1], peaks[0])
        };
        summary.push("lower_peak_ev", lo.0 * HARTREE_EV);
        summary.push("upper_peak_ev", hi.0 * HARTREE_EV);
        summary.push("splitting_ev", (hi.0 - lo.0) * HARTREE_EV);
        if g > 0.0 {
            summary.push("splitting_over_2g", (hi.0 - lo.0) / (2.0 * g));
        }
    } else {
        summary.note("fewer than two peaks near the cavity frequency");
    }
    Ok(())
}

fn run_hhg(s: &Scenario, model: &Model, out: &Path, summary: &mut Summary) -> Result<()> {
    let record = plan(s, model, s.environment.inv_area, s.propagation.total_time)?.execute()?;
    write_trajectory(&out.join("trajectory.csv"), &record)?;
    let omega_l = s.drive.pulse.omega;
    let hhg = hhg_spectrum(
        &record,
        omega_l,
        s.analysis.max_harmonic,
        &fourier_options(s, &record),
    )?;
    write_hhg(out, &hhg, s.analysis.max_harmonic)?;
    summary.push("omega_l_ev", omega_l * HARTREE_EV);
    summary.push("max_norm_drift", record.max_norm_drift);
    for n in (3..=s.analysis.max_harmonic).step_by(2) {
        if let (Some(odd), Some(lo), Some(hi)) =
            (hhg.harmonic(n), hhg.harmonic(n - 1), hhg.harmonic(n + 1))
        {
            summary.push(
                format!("h{n}_local_max"),
                f64::from(u8::from(odd.local_max)),
            );
            summary.push(
                format!("h{n}_over_even"),
                odd.intensity / lo.intensity.max(hi.intensity),
            );
        }
    }
    Ok(())
}

pub fn write_hhg(out: &Path, hhg: &HhgSpectrum, max_order: usize) -> Result<()> {
    let limit = (max_order as f64 + 1.0) * hhg.omega_l;
    let spec = &hhg.spectrum;
    write_csv(
        &out.join("hhg_spectrum.csv"),
        &["omega_au", "omega_ev", "intensity", "log10_intensity"],
        (0..spec.omega.len())
            .filter(|&i| spec.omega[i] <= limit)
            .map(|i| {
                let v = spec.values[i];
                vec![
                    spec.omega[i],
                    spec.omega[i] * HARTREE_EV,
                    v,
                    v.max(1e-300).log10(),
                ]
            }),
    )?;
    write_csv(
        &out.join("harmonics.csv"),
        &[
            "order",
            "omega_au",
            "omega_ev",
            "intensity",
            "log10_intensity",
            "local_max",
        ],
        hhg.harmonics.iter().map(|h| {
            vec![
                h.order as f64,
                h.omega,
                h.omega * HARTREE_EV,
                h.intensity,
                h.intensity.max(1e-300).log10(),
                f64::from(u8::from(h.local_max)),
            ]
        }),
    )
}

/// Worker pool honoring [`WORKERS_ENV`].
pub fn worker_pool() -> Result<rayon::ThreadPool> {
    let n = match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "{WORKERS_ENV} must be a positive integer, got '{v}'"
                ))
            })?,
        Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))
}

/// Cross-section linewidth of one run with the given coupling and ensemble size.
fn linewidth_point(
    s: &Scenario,
    model: &Model,
    inv_area: f64,
    n_emitters: usize,
) -> Result<(LineshapeFit, f64)> {
    let mut sc = s.clone();
    sc.n_emitters = n_emitters;
    let gamma = gamma_rr(&model.two_level(inv_area, s.environment.pol)) * n_emitters as f64;
    let record = plan(&sc, model, inv_area, linewidth_run_time(s, gamma))?.execute()?;
    let abs = absorption(s, &record)?;
    Ok((
        sigma_linewidth(s, model, &abs.sigma)?,
        record.t.last().copied().unwrap_or(0.0),
    ))
}

fn run_fwhm_sweep(s: &Scenario, model: &Model, out: &Path, summary: &mut Summary) -> Result<()> {
    let pool = worker_pool()?;
    let results: Vec<Result<(LineshapeFit, f64)>> = pool.install(|| {
        s.sweep
            .inv_area
            .par_iter()
            .map(|&a| linewidth_point(s, model, a, s.n_emitters))
            .collect()
    });
    let mut rows = Vec::new();
    for (&a, r) in s.sweep.inv_area.iter().zip(&results) {
        let data = model.two_level(a, s.environment.pol);
        let g_rr = gamma_rr(&data) * HARTREE_EV;
        let g_ww = gamma_ww_1d(&data) * HARTREE_EV;
        match r {
            Ok((fit, t)) => {
                rows.push(vec![
                    a,
                    fit.gamma,
                    g_rr,
                    g_ww,
                    fit.gamma / g_rr,
                    fit.fit_fwhm.map_or(f64::NAN, |f| 0.5 * f),
                    fit.center,
                    *t,
                    1.0,
                ]);
                summary.push(format!("gamma_ratio[{a:?}]"), fit.gamma / g_rr);
            }
            Err(e) => {
                rows.push(vec![
                    a,
                    f64::NAN,
                    g_rr,
                    g_ww,
                    f64::NAN,
                    f64::NAN,
                    f64::NAN,
                    f64::NAN,
                    0.0,
                ]);
                summary.note(format!("inv_area {a:?}: {e}"));
            }
        }
    }
    write_csv(
        &out.join("fwhm.csv"),
        &[
            "inv_area",
            "gamma_sim_ev",
            "gamma_rr_ev",
            "gamma_ww_ev",
            "ratio",
            "fit_gamma_ev",
            "center_ev",
            "run_time_au",
            "ok",
        ],
        rows,
    )
}

fn run_superradiance(s: &Scenario, model: &Model, out: &Path, summary: &mut Summary) -> Result<()> {
    let inv_area = s.environment.inv_area;
    let pool = worker_pool()?;
    let results: Vec<Result<(LineshapeFit, f64)>> = pool.install(|| {
        s.sweep
            .n_emitters
            .par_iter()
            .map(|&n| linewidth_point(s, model, inv_area, n))
            .collect()
    });
    let g1 = gamma_rr(&model.two_level(inv_area, s.environment.pol)) * HARTREE_EV;
    let base = s
        .sweep
        .n_emitters
        .iter()
        .zip(&results)
        .find(|(&n, r)| n == 1 && r.is_ok())
        .and_then(|(_, r)| r.as_ref().ok().map(|(f, _)| f.gamma));
    let mut rows = Vec::new();
    for (&n, r) in s.sweep.n_emitters.iter().zip(&results) {
        match r {
            Ok((fit, _)) => {
                let ratio = base.map_or(f64::NAN, |b| fit.gamma / b);
                rows.push(vec![n as f64, fit.gamma, ratio, n as f64 * g1, fit.center]);
                summary.push(format!("gamma_ratio[{n}]"), ratio);
            }
            Err(e) => {
                rows.push(vec![n as f64, f64::NAN, f64::NAN, n as f64 * g1, f64::NAN]);
                summary.note(format!("n_emitters {n}: {e}"));
            }
        }
    }
    summary.push("gamma_single_theory_ev", g1);
    write_csv(
        &out.join("linewidth_vs_n.csv"),
        &[
            "n_emitters",
            "gamma_ev",
            "ratio_to_single",
            "gamma_theory_ev",
            "center_ev",
        ],
        rows,
    )
}

fn run_bath_convergence(
    s: &Scenario,
    model: &Model,
    out: &Path,
    summary: &mut Summary,
) -> Result<()> {
    let inv_area = s.environment.inv_area;
    let total = s.propagation.total_time;
    let mut waveguide_only = s.clone();
    waveguide_only.environment.bath_modes = 0;
    let reference = plan(&waveguide_only, model, inv_area, total)?.execute()?;
    write_trajectory(&out.join("trajectory.csv"), &reference)?;
    let amplitude = reference.r.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let pool = worker_pool()?;
    let runs: Vec<Result<(ModeBath, TrajectoryRecord)>> = pool.install(|| {
        s.sweep
            .n_modes
            .par_iter()
            .map(|&n| {
                let mut sc = s.clone();
                sc.environment.bath_modes = n;
                let p = plan(&sc, model, inv_area, total)?;
                let bath = ModeBath::waveguide_with_modes(inv_area, n, s.environment.bath_cutoff)?;
                Ok((bath, p.execute()?))
            })
            .collect()
    });
    let mut rows = Vec::new();
    let mut previous = f64::INFINITY;
    let mut monotone = true;
    for (&n, r) in s.sweep.n_modes.iter().zip(runs) {
        let (bath, rec) = r?;
        let err = rec
            .r
            .iter()
            .zip(&reference.r)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        monotone &= err < previous;
        previous = err;
        rows.push(vec![
            n as f64,
            bath.box_length,
            bath.recurrence_time(),
            err,
            err / amplitude,
        ]);
        summary.push(format!("relative_error[{n}]"), err / amplitude);
    }
    summary.push("dipole_amplitude", amplitude);
    summary.push("monotone", f64::from(u8::from(monotone)));
    write_csv(
        &out.join("bath_convergence.csv"),
        &[
            "n_modes",
            "box_length",
            "recurrence_time",
            "max_abs_dr",
            "relative_error",
        ],
        rows,
    )
}

fn run_lamb_shift(s: &Scenario, model: &Model, out: &Path, summary: &mut Summary) -> Result<()> {
    let a = s.environment.inv_area;
    let couplings = [a, 0.0, 0.5 * a];
    let records: Vec<Result<TrajectoryRecord>> = couplings
        .iter()
        .map(|&c| plan(s, model, c, s.propagation.total_time).and_then(RunPlan::execute))
        .collect();
    let mut spectra = Vec::new();
    for (r, name) in records.into_iter().zip(["on", "off", "half"]) {
        let rec = r?;
        let abs = absorption(s, &rec)?;
        write_spectrum(
            &out.join(format!("spectrum_{name}.csv")),
            &abs.alpha,
            &abs.sigma,
            spectrum_limit(model),
        )?;
        spectra.push(abs);
    }
    let w0 = model.omega_eg;
    let win = (w0 - s.analysis.window, w0 + s.analysis.window);
    let im: Vec<RealSpectrum> = spectra.iter().map(|x| x.alpha.imag()).collect();
    let on = peak_shift(&im[0], &im[1], win)?;
    let half = peak_shift(&im[2], &im[1], win)?;
    summary.push("shift_mev", on);
    summary.push("shift_half_mev", half);
    summary.push("quarter_ratio", on / half);
    summary.push(
        "sigma_shift_mev",
        peak_shift(&spectra[0].sigma, &spectra[1].sigma, win)?,
    );
    summary.push(
        "sigma_shift_half_mev",
        peak_shift(&spectra[2].sigma, &spectra[1].sigma, win)?,
    );
    summary.push(
        "two_level_pole_shift_mev",
        pole_shift(&model.two_level(a, s.environment.pol)) * HARTREE_EV * 1e3,
    );
    Ok(())
}

fn run_theory(s: &Scenario, model: &Model, out: &Path, summary: &mut Summary) -> Result<()> {
    let mut values = vec![s.environment.inv_area];
    values.extend(s.sweep.inv_area.iter().copied());
    let rows: Vec<Vec<f64>> = values
        .iter()
        .map(|&a| {
            let t = summarize(&model.two_level(a, s.environment.pol));
            vec![
                a,
                t.x,
                t.pole_re_ev,
                t.pole_im_ev,
                t.shift_mev,
                t.gamma_rr_ev,
                t.gamma_ww_1d_ev,
                t.gamma_rr_3d_ev,
                t.gamma_ww_3d_ev,
                f64::from(u8::from(t.overdamped)),
            ]
        })
        .collect();
    let t = summarize(&model.two_level(s.environment.inv_area, s.environment.pol));
    summary.push("x", t.x);
    summary.push("shift_mev", t.shift_mev);
    summary.push("gamma_rr_ev", t.gamma_rr_ev);
    summary.push("gamma_ww_1d_ev", t.gamma_ww_1d_ev);
    write_csv(&out.join("theory.csv"), &THEORY_HEADER, rows)
}

pub const THEORY_HEADER: [&str; 10] = [
    "inv_area",
    "x",
    "pole_re_ev",
    "pole_im_ev",
    "shift_mev",
    "gamma_rr_ev",
    "gamma_ww_1d_ev",
    "gamma_rr_3d_ev",
    "gamma_ww_3d_ev",
    "overdamped",
];

/// Keys that may be swept from the command line.
pub const SWEEPABLE: [&str; 4] = ["inv_area", "n_emitters", "g_over_omega", "n_modes"];

/// Copy of `s` with one sweepable key set.
pub fn with_parameter(s: &Scenario, param: &str, value: f64) -> Result<Scenario> {
    let mut out = s.clone();
    let as_count = |v: f64| -> Result<usize> {
        if v >= 0.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(Error::InvalidParameter(format!(
                "{param} needs integer values, got {v}"
            )))
        }
    };
    match param {
        "inv_area" => out.environment.inv_area = value,
        "n_emitters" => out.n_emitters = as_count(value)?,
        "g_over_omega" => out.environment.g_over_omega = value,
        "n_modes" => out.environment.bath_modes = as_count(value)?,
        other => {
            return Err(Error::InvalidParameter(format!(
                "'{other}' is not sweepable (expected one of {})",
                SWEEPABLE.join(", ")
            )))
        }
    }
    out.validate()?;
    Ok(out)
}

/// Result of one sweep point.
#[derive(Debug)]
pub struct SweepRow {
    pub value: f64,
    pub dir: PathBuf,
    pub result: Result<Summary>,
}

/// Run `s` once per value of `param`, concurrently, each into its own
/// subdirectory of `out`, and merge the summaries into `sweep.csv`.
pub fn sweep(s: &Scenario, param: &str, values: &[f64], out: &Path) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep needs at least one value".into(),
        ));
    }
    // validate every point before computing any
    let scenarios: Vec<Scenario> = values
        .iter()
        .map(|&v| with_parameter(s, param, v))
        .collect::<Result<_>>()?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let pool = worker_pool()?;
    let rows: Vec<SweepRow> = pool.install(|| {
        scenarios
            .par_iter()
            .zip(values.par_iter())
            .map(|(sc, &v)| {
                let dir = out.join(format!("{param}_{v:?}"));
                SweepRow {
                    value: v,
                    result: run_scenario(sc, &dir),
                    dir,
                }
            })
            .collect()
    });

    let keys: Vec<String> = rows
        .iter()
        .find_map(|r| r.result.as_ref().ok())
        .map(|s| s.values.iter().map(|(k, _)| k.clone()).collect())
        .unwrap_or_default();
    let mut text = format!("{param},status");
    for k in &keys {
        text.push(',');
        text.push_str(k);
    }
    text.push('\n');
    for r in &rows {
        text.push_str(&fmt_num(r.value));
        match &r.result {
            Ok(summary) => {
                text.push_str(",ok");
                for k in &keys {
                    text.push(',');
                    text.push_str(&summary.get(k).map_or_else(String::new, fmt_num));
                }
            }
            Err(e) => {
                let _ = write!(text, ",error {}", exit_code(e));
                for _ in &keys {
                    text.push(',');
                }
            }
        }
        text.push('\n');
    }
    write_file(&out.join("sweep.csv"), &text)?;
    Ok(rows)
}
