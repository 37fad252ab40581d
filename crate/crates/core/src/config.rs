//! Scenario configuration files.
//!
//! The format is line based: `[section]` headers, `key = value` pairs and
//! `#` comments. Dimensioned values accept a unit suffix (`eV`, `meV`, `fs`,
//! `A` for angstrom, or `au`) and are converted to atomic units on parse.
//! Every key is validated; unknown keys, duplicates and malformed values are
//! reported with their line number. [`emit`] writes a fully resolved file
//! that parses back to the same [`Scenario`].

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::drive::{CwSpec, KickSpec, PulseSpec};
use crate::error::{Error, Result};
use crate::units::{angstrom_to_bohr, ev_to_hartree, fs_to_au};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    Decay,
    Stimulated,
    Absorption,
    Eit,
    Hhg,
    FwhmSweep,
    BathConvergence,
    Superradiance,
    LambShift,
    Theory,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 10] = [
        ScenarioKind::Decay,
        ScenarioKind::Stimulated,
        ScenarioKind::Absorption,
        ScenarioKind::Eit,
        ScenarioKind::Hhg,
        ScenarioKind::FwhmSweep,
        ScenarioKind::BathConvergence,
        ScenarioKind::Superradiance,
        ScenarioKind::LambShift,
        ScenarioKind::Theory,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Decay => "decay",
            ScenarioKind::Stimulated => "stimulated",
            ScenarioKind::Absorption => "absorption",
            ScenarioKind::Eit => "eit",
            ScenarioKind::Hhg => "hhg",
            ScenarioKind::FwhmSweep => "fwhm_sweep",
            ScenarioKind::BathConvergence => "bath_convergence",
            ScenarioKind::Superradiance => "superradiance",
            ScenarioKind::LambShift => "lamb_shift",
            ScenarioKind::Theory => "theory",
        }
    }
}

impl FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = ScenarioKind::ALL.iter().map(|k| k.name()).collect();
                format!(
                    "unknown scenario '{s}' (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    Ground,
    Excited,
    /// `(phi0 + phi1) / sqrt(2)`
    Superposition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveKind {
    None,
    Kick,
    Pulse,
    Cw,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub points: usize,
    pub spacing: f64,
    pub softening: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationConfig {
    pub dt: f64,
    pub total_time: f64,
    pub corrector_iterations: usize,
    pub stride: usize,
    pub record_history: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentConfig {
    /// Waveguide `1/A`; zero disables the waveguide.
    pub inv_area: f64,
    pub pol: f64,
    pub switch_on: f64,
    /// Emitter position between cavity mirrors for edge emission.
    pub edge_z: Option<f64>,
    /// Harmonic Abraham-Lorentz closure frequency (3D free space).
    pub al_omega: Option<f64>,
    pub kernel_file: Option<String>,
    pub cavity_omega: Option<f64>,
    pub g_over_omega: f64,
    /// Explicit waveguide mode bath; zero modes means none.
    pub bath_modes: usize,
    pub bath_cutoff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriveConfig {
    pub kind: DriveKind,
    pub kick: KickSpec,
    pub pulse: PulseSpec,
    /// Carrier of the CW drive; `None` means the bare transition frequency.
    pub cw_omega: Option<f64>,
    pub cw_amplitude: f64,
    pub cw_ramp: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    /// Minimum FFT length (zero padding).
    pub pad_to: usize,
    /// Half-width of the line-fit window around the resonance (a.u.).
    pub window: f64,
    pub fit_level: f64,
    /// Linewidth runs last at least this many predicted decay times.
    pub decay_lengths: f64,
    /// Highest harmonic order annotated in HHG output.
    pub max_harmonic: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub inv_area: Vec<f64>,
    pub n_emitters: Vec<usize>,
    pub n_modes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub initial: InitialState,
    pub n_emitters: usize,
    /// Output directory; the command line may override it.
    pub output: Option<String>,
    pub grid: GridConfig,
    pub propagation: PropagationConfig,
    pub environment: EnvironmentConfig,
    pub drive: DriveConfig,
    pub analysis: AnalysisConfig,
    pub sweep: SweepConfig,
}

/// Bare transition frequency of the default model, used for resonant defaults.
pub const HYDROGEN_OMEGA_EV: f64 = 10.746;

impl Scenario {
    /// Defaults for one scenario kind.
    pub fn defaults(kind: ScenarioKind) -> Self {
        let omega_eg = ev_to_hartree(HYDROGEN_OMEGA_EV);
        let mut s = Scenario {
            kind,
            initial: InitialState::Ground,
            n_emitters: 1,
            output: None,
            grid: GridConfig {
                points: 301,
                spacing: 0.1,
                softening: 1.0,
            },
            propagation: PropagationConfig {
                dt: 1e-2,
                total_time: 4000.0,
                corrector_iterations: 1,
                stride: 5,
                record_history: false,
            },
            environment: EnvironmentConfig {
                inv_area: 0.1,
                pol: 1.0,
                switch_on: 2.0,
                edge_z: None,
                al_omega: None,
                kernel_file: None,
                cavity_omega: None,
                g_over_omega: 0.0,
                bath_modes: 0,
                bath_cutoff: 40.0,
            },
            drive: DriveConfig {
                kind: DriveKind::Kick,
                kick: KickSpec::default(),
                pulse: PulseSpec {
                    amplitude: 0.01,
                    omega: omega_eg,
                    center: 60.0,
                    width: 20.0,
                },
                cw_omega: None,
                cw_amplitude: 1e-3,
                cw_ramp: None,
            },
            analysis: AnalysisConfig {
                pad_to: 1 << 20,
                window: 0.1,
                fit_level: 0.5,
                decay_lengths: 6.0,
                max_harmonic: 15,
            },
            sweep: SweepConfig {
                inv_area: vec![1e-3, 1e-2, 1e-1, 1.0],
                n_emitters: vec![1, 2, 4, 8],
                n_modes: Vec::new(),
            },
        };
        match kind {
            ScenarioKind::Absorption | ScenarioKind::Theory => {}
            ScenarioKind::Decay => {
                s.drive.kind = DriveKind::Pulse;
                s.environment.inv_area = 1.0;
                s.environment.switch_on = 0.0;
                s.propagation.total_time = 600.0;
                s.propagation.stride = 1;
            }
            ScenarioKind::Stimulated => {
                s.initial = InitialState::Excited;
                s.drive.kind = DriveKind::Cw;
                s.environment.inv_area = 1.0;
                s.environment.switch_on = 0.0;
                s.propagation.total_time = 600.0;
                s.propagation.stride = 1;
            }
            ScenarioKind::Eit => {
                s.environment.inv_area = 1.0;
                s.environment.cavity_omega = Some(omega_eg);
                s.environment.g_over_omega = 0.01;
                // a cavity switched on after the kick starts out of equilibrium
                s.environment.switch_on = 0.0;
                s.propagation.total_time = 20000.0;
                s.analysis.window = 0.05;
            }
            ScenarioKind::Hhg => {
                s.grid.points = 601;
                s.grid.spacing = 0.05;
                s.propagation.dt = 5e-3;
                s.propagation.total_time = 12000.0;
                s.propagation.stride = 10;
                s.environment.inv_area = 0.1;
                s.environment.switch_on = 0.0;
                s.drive.kind = DriveKind::Pulse;
                s.drive.pulse = PulseSpec {
                    amplitude: 0.02,
                    omega: ev_to_hartree(1.166),
                    center: fs_to_au(72.57),
                    width: fs_to_au(24.19),
                };
            }
            ScenarioKind::FwhmSweep => {
                s.propagation.stride = 20;
            }
            ScenarioKind::BathConvergence => {
                s.initial = InitialState::Superposition;
                s.drive.kind = DriveKind::None;
                s.environment.inv_area = 1.0;
                s.environment.switch_on = 0.0;
                s.propagation.total_time = 150.0;
                s.propagation.stride = 1;
                s.sweep.n_modes = vec![955, 1910, 3820, 7640];
            }
            ScenarioKind::Superradiance => {
                s.environment.inv_area = 0.025;
                s.propagation.stride = 10;
            }
            ScenarioKind::LambShift => {
                s.environment.inv_area = 1.0;
                s.analysis.window = 0.05;
                // 2^21 samples of 0.05 a.u. give 1.6 meV bins
                s.analysis.pad_to = 1 << 21;
            }
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        let g = &self.grid;
        if g.points < 3 || g.points.is_multiple_of(2) {
            return bad(format!(
                "grid.points must be odd and >= 3, got {}",
                g.points
            ));
        }
        if !(g.spacing > 0.0) || !(g.softening > 0.0) {
            return bad("grid.spacing and grid.softening must be positive".into());
        }
        let p = &self.propagation;
        if !(p.dt > 0.0) || !(p.total_time >= 0.0) || p.stride == 0 {
            return bad("propagation needs dt > 0, total_time >= 0, stride >= 1".into());
        }
        if self.n_emitters == 0 {
            return bad("n_emitters must be at least 1".into());
        }
        let e = &self.environment;
        if !(e.inv_area >= 0.0) || !(-1.0..=1.0).contains(&e.pol) {
            return bad("environment needs inv_area >= 0 and -1 <= pol <= 1".into());
        }
        if let Some(z) = e.edge_z {
            if !(z > 0.0 && z < 1.0) {
                return bad(format!("environment.edge_z must lie in (0, 1), got {z}"));
            }
        }
        if matches!(e.al_omega, Some(w) if !(w > 0.0))
            || matches!(e.cavity_omega, Some(w) if !(w > 0.0))
        {
            return bad("environment frequencies must be positive".into());
        }
        if e.bath_modes > 0 && !(e.bath_cutoff > 0.0) {
            return bad("environment.bath_cutoff must be positive".into());
        }
        let a = &self.analysis;
        if !(a.window > 0.0)
            || !(a.fit_level > 0.0 && a.fit_level < 1.0)
            || !(a.decay_lengths >= 0.0)
        {
            return bad("analysis needs window > 0, 0 < fit_level < 1, decay_lengths >= 0".into());
        }
        let d = &self.drive;
        if !(d.kick.width2 > 0.0) || !(d.pulse.width > 0.0) {
            return bad("drive widths must be positive".into());
        }
        if self.kind == ScenarioKind::BathConvergence && self.sweep.n_modes.is_empty() {
            return bad("bath_convergence needs sweep.n_modes".into());
        }
        if self.kind == ScenarioKind::FwhmSweep && self.sweep.inv_area.is_empty() {
            return bad("fwhm_sweep needs sweep.inv_area".into());
        }
        if self.kind == ScenarioKind::Superradiance && self.sweep.n_emitters.is_empty() {
            return bad("superradiance needs sweep.n_emitters".into());
        }
        Ok(())
    }

    /// CW drive built from the configuration.
    pub fn cw(&self, omega_eg: f64) -> CwSpec {
        let omega = self.drive.cw_omega.unwrap_or(omega_eg);
        let mut cw = CwSpec::new(self.drive.cw_amplitude, omega);
        if let Some(r) = self.drive.cw_ramp {
            cw.ramp = r;
        }
        cw
    }
}

#[derive(Debug, Clone, Copy)]
enum Dim {
    Plain,
    Energy,
    Time,
    Length,
}

fn parse_quantity(text: &str, dim: Dim) -> std::result::Result<f64, String> {
    let t = text.trim();
    let (num, unit) = match t.split_once(char::is_whitespace) {
        Some((n, u)) => (n, u.trim()),
        None => {
            let split = t.trim_end_matches(|c: char| c.is_ascii_alphabetic()).len();
            t.split_at(split)
        }
    };
    let value: f64 = num.parse().map_err(|_| format!("'{t}' is not a number"))?;
    if !value.is_finite() {
        return Err(format!("'{t}' is not finite"));
    }
    let converted = match (dim, unit) {
        (_, "" | "au") => value,
        (Dim::Energy, "eV") => ev_to_hartree(value),
        (Dim::Energy, "meV") => ev_to_hartree(value * 1e-3),
        (Dim::Energy, "Ha") => value,
        (Dim::Time, "fs") => fs_to_au(value),
        (Dim::Length, "A") => angstrom_to_bohr(value),
        _ => {
            let allowed = match dim {
                Dim::Plain => "au",
                Dim::Energy => "eV, meV, Ha, au",
                Dim::Time => "fs, au",
                Dim::Length => "A, au",
            };
            return Err(format!(
                "unit '{unit}' not allowed here (expected {allowed})"
            ));
        }
    };
    Ok(converted)
}

fn parse_usize(text: &str) -> std::result::Result<usize, String> {
    text.trim()
        .parse()
        .map_err(|_| format!("'{}' is not a non-negative integer", text.trim()))
}

fn parse_bool(text: &str) -> std::result::Result<bool, String> {
    match text.trim() {
        "true" | "yes" | "on" => Ok(true),
        "false" | "no" | "off" => Ok(false),
        other => Err(format!("'{other}' is not a boolean")),
    }
}

fn parse_option(text: &str, dim: Dim) -> std::result::Result<Option<f64>, String> {
    if text.trim() == "none" {
        Ok(None)
    } else {
        parse_quantity(text, dim).map(Some)
    }
}

fn parse_list<T>(
    text: &str,
    f: impl Fn(&str) -> std::result::Result<T, String>,
) -> std::result::Result<Vec<T>, String> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(',').map(|v| f(v.trim())).collect()
}

fn set_key(
    s: &mut Scenario,
    section: &str,
    key: &str,
    value: &str,
) -> std::result::Result<(), String> {
    use Dim::*;
    let q = |d| parse_quantity(value, d);
    match (section, key) {
        ("scenario", "name") => {
            let kind: ScenarioKind = value.trim().parse()?;
            if kind != s.kind {
                return Err("scenario.name may only be given once, first".into());
            }
        }
        ("scenario", "initial") => {
            s.initial = match value.trim() {
                "ground" => InitialState::Ground,
                "excited" => InitialState::Excited,
                "superposition" => InitialState::Superposition,
                other => return Err(format!("unknown initial state '{other}'")),
            }
        }
        ("scenario", "n_emitters") => s.n_emitters = parse_usize(value)?,
        ("scenario", "output") => {
            let v = value.trim();
            s.output = (v != "none").then(|| v.to_string());
        }
        ("grid", "points") => s.grid.points = parse_usize(value)?,
        ("grid", "spacing") => s.grid.spacing = q(Length)?,
        ("grid", "softening") => s.grid.softening = q(Plain)?,
        ("propagation", "dt") => s.propagation.dt = q(Time)?,
        ("propagation", "total_time") => s.propagation.total_time = q(Time)?,
        ("propagation", "corrector_iterations") => {
            s.propagation.corrector_iterations = parse_usize(value)?
        }
        ("propagation", "stride") => s.propagation.stride = parse_usize(value)?,
        ("propagation", "record_history") => s.propagation.record_history = parse_bool(value)?,
        ("environment", "inv_area") => s.environment.inv_area = q(Plain)?,
        ("environment", "pol") => s.environment.pol = q(Plain)?,
        ("environment", "switch_on") => s.environment.switch_on = q(Time)?,
        ("environment", "edge_z") => s.environment.edge_z = parse_option(value, Plain)?,
        ("environment", "al_omega") => s.environment.al_omega = parse_option(value, Energy)?,
        ("environment", "kernel_file") => {
            let v = value.trim();
            s.environment.kernel_file = (v != "none").then(|| v.to_string());
        }
        ("environment", "cavity_omega") => {
            s.environment.cavity_omega = parse_option(value, Energy)?
        }
        ("environment", "g_over_omega") => s.environment.g_over_omega = q(Plain)?,
        ("environment", "bath_modes") => s.environment.bath_modes = parse_usize(value)?,
        ("environment", "bath_cutoff") => s.environment.bath_cutoff = q(Energy)?,
        ("drive", "kind") => {
            s.drive.kind = match value.trim() {
                "none" => DriveKind::None,
                "kick" => DriveKind::Kick,
                "pulse" => DriveKind::Pulse,
                "cw" => DriveKind::Cw,
                other => return Err(format!("unknown drive kind '{other}'")),
            }
        }
        ("drive", "kick_strength") => s.drive.kick.strength = q(Plain)?,
        ("drive", "kick_center") => s.drive.kick.center = q(Time)?,
        ("drive", "kick_width2") => s.drive.kick.width2 = q(Plain)?,
        ("drive", "amplitude") => s.drive.pulse.amplitude = q(Plain)?,
        ("drive", "omega") => s.drive.pulse.omega = q(Energy)?,
        ("drive", "t0") => s.drive.pulse.center = q(Time)?,
        ("drive", "sigma") => s.drive.pulse.width = q(Time)?,
        ("drive", "cw_omega") => s.drive.cw_omega = parse_option(value, Energy)?,
        ("drive", "cw_amplitude") => s.drive.cw_amplitude = q(Plain)?,
        ("drive", "cw_ramp") => s.drive.cw_ramp = parse_option(value, Time)?,
        ("analysis", "pad_to") => s.analysis.pad_to = parse_usize(value)?,
        ("analysis", "window") => s.analysis.window = q(Energy)?,
        ("analysis", "fit_level") => s.analysis.fit_level = q(Plain)?,
        ("analysis", "decay_lengths") => s.analysis.decay_lengths = q(Plain)?,
        ("analysis", "max_harmonic") => s.analysis.max_harmonic = parse_usize(value)?,
        ("sweep", "inv_area") => {
            s.sweep.inv_area = parse_list(value, |v| parse_quantity(v, Plain))?
        }
        ("sweep", "n_emitters") => s.sweep.n_emitters = parse_list(value, parse_usize)?,
        ("sweep", "n_modes") => s.sweep.n_modes = parse_list(value, parse_usize)?,
        _ => return Err(format!("unknown key '{key}' in section [{section}]")),
    }
    Ok(())
}

struct Entry<'a> {
    line: usize,
    section: &'a str,
    key: &'a str,
    value: &'a str,
}

fn tokenize<'a>(text: &'a str, path: &str) -> Result<Vec<Entry<'a>>> {
    let err = |line: usize, message: String| Error::Config {
        path: path.to_string(),
        line,
        message,
    };
    let mut section = "";
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| err(line, format!("malformed section header '{content}'")))?
                .trim();
            const SECTIONS: [&str; 7] = [
                "scenario",
                "grid",
                "propagation",
                "environment",
                "drive",
                "analysis",
                "sweep",
            ];
            if !SECTIONS.contains(&name) {
                return Err(err(line, format!("unknown section [{name}]")));
            }
            section = name;
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected 'key = value', got '{content}'")))?;
        if section.is_empty() {
            return Err(err(line, "key outside of any [section]".into()));
        }
        out.push(Entry {
            line,
            section,
            key: key.trim(),
            value: value.trim(),
        });
    }
    Ok(out)
}

/// Parse and fully validate a scenario. `path` only labels error messages.
pub fn parse_config_named(text: &str, path: &str) -> Result<Scenario> {
    let entries = tokenize(text, path)?;
    let err = |line: usize, message: String| Error::Config {
        path: path.to_string(),
        line,
        message,
    };
    let name = entries
        .iter()
        .find(|e| e.section == "scenario" && e.key == "name")
        .ok_or_else(|| err(0, "missing required key scenario.name".into()))?;
    let kind: ScenarioKind = name.value.parse().map_err(|m| err(name.line, m))?;
    let mut scenario = Scenario::defaults(kind);
    let mut seen = HashSet::new();
    for e in &entries {
        if !seen.insert((e.section, e.key)) {
            return Err(err(
                e.line,
                format!("duplicate key {}.{}", e.section, e.key),
            ));
        }
        set_key(&mut scenario, e.section, e.key, e.value)
            .map_err(|m| err(e.line, format!("{}.{}: {m}", e.section, e.key)))?;
    }
    scenario.validate().map_err(|e| err(0, e.to_string()))?;
    Ok(scenario)
}

pub fn parse_config(text: &str) -> Result<Scenario> {
    parse_config_named(text, "<config>")
}

pub fn load_config(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_named(&text, &path.display().to_string())
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| format!("{x:?}"))
}

fn list<T: std::fmt::Debug>(v: &[T]) -> String {
    v.iter()
        .map(|x| format!("{x:?}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Fully resolved configuration text, all values in atomic units.
pub fn emit(s: &Scenario) -> String {
    let mut o = String::new();
    let initial = match s.initial {
        InitialState::Ground => "ground",
        InitialState::Excited => "excited",
        InitialState::Superposition => "superposition",
    };
    let drive = match s.drive.kind {
        DriveKind::None => "none",
        DriveKind::Kick => "kick",
        DriveKind::Pulse => "pulse",
        DriveKind::Cw => "cw",
    };
    let e = &s.environment;
    // writeln! into a String cannot fail
    let _ = writeln!(o, "# resolved configuration, atomic units");
    let _ = writeln!(
        o,
        "[scenario]\nname = {}\ninitial = {initial}\nn_emitters = {}\noutput = {}",
        s.kind.name(),
        s.n_emitters,
        s.output.as_deref().unwrap_or("none")
    );
    let _ = writeln!(
        o,
        "\n[grid]\npoints = {}\nspacing = {:?}\nsoftening = {:?}",
        s.grid.points, s.grid.spacing, s.grid.softening
    );
    let p = &s.propagation;
    let _ = writeln!(
        o,
        "\n[propagation]\ndt = {:?}\ntotal_time = {:?}\ncorrector_iterations = {}\nstride = {}\nrecord_history = {}",
        p.dt, p.total_time, p.corrector_iterations, p.stride, p.record_history
    );
    let _ = writeln!(
        o,
        "\n[environment]\ninv_area = {:?}\npol = {:?}\nswitch_on = {:?}\nedge_z = {}\nal_omega = {}\nkernel_file = {}\ncavity_omega = {}\ng_over_omega = {:?}\nbath_modes = {}\nbath_cutoff = {:?}",
        e.inv_area,
        e.pol,
        e.switch_on,
        opt(e.edge_z),
        opt(e.al_omega),
        e.kernel_file.as_deref().unwrap_or("none"),
        opt(e.cavity_omega),
        e.g_over_omega,
        e.bath_modes,
        e.bath_cutoff
    );
    let d = &s.drive;
    let _ = writeln!(
        o,
        "\n[drive]\nkind = {drive}\nkick_strength = {:?}\nkick_center = {:?}\nkick_width2 = {:?}\namplitude = {:?}\nomega = {:?}\nt0 = {:?}\nsigma = {:?}\ncw_omega = {}\ncw_amplitude = {:?}\ncw_ramp = {}",
        d.kick.strength,
        d.kick.center,
        d.kick.width2,
        d.pulse.amplitude,
        d.pulse.omega,
        d.pulse.center,
        d.pulse.width,
        opt(d.cw_omega),
        d.cw_amplitude,
        opt(d.cw_ramp)
    );
    let a = &s.analysis;
    let _ = writeln!(
        o,
        "\n[analysis]\npad_to = {}\nwindow = {:?}\nfit_level = {:?}\ndecay_lengths = {:?}\nmax_harmonic = {}",
        a.pad_to, a.window, a.fit_level, a.decay_lengths, a.max_harmonic
    );
    let _ = writeln!(
        o,
        "\n[sweep]\ninv_area = {}\nn_emitters = {}\nn_modes = {}",
        list(&s.sweep.inv_area),
        list(&s.sweep.n_emitters),
        list(&s.sweep.n_modes)
    );
    o
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantities_with_units() {
        assert_eq!(parse_quantity("0.01", Dim::Time).unwrap(), 0.01);
        assert_eq!(parse_quantity("1e-3 au", Dim::Time).unwrap(), 1e-3);
        assert!((parse_quantity("10.746 eV", Dim::Energy).unwrap() - 0.394909).abs() < 1e-6);
        assert!((parse_quantity("10746meV", Dim::Energy).unwrap() - 0.394909).abs() < 1e-6);
        assert!((parse_quantity("24.19 fs", Dim::Time).unwrap() - 1000.05).abs() < 0.01);
        assert!((parse_quantity("0.529177 A", Dim::Length).unwrap() - 1.0).abs() < 1e-12);
        assert!(parse_quantity("3 fs", Dim::Energy).is_err());
        assert!(parse_quantity("abc", Dim::Plain).is_err());
        assert!(parse_quantity("1e-4", Dim::Plain).unwrap() == 1e-4);
    }

    #[test]
    fn name_only_gives_defaults() {
        let s = parse_config("[scenario]\nname = absorption\n").unwrap();
        assert_eq!(s, Scenario::defaults(ScenarioKind::Absorption));
        assert_eq!(s.grid.points, 301);
        assert_eq!(s.grid.spacing, 0.1);
        assert_eq!(s.propagation.dt, 0.01);
        assert_eq!(s.propagation.total_time, 4000.0);
        assert_eq!(s.drive.kick.strength, 1e-6);
        assert_eq!(s.environment.switch_on, 2.0);
        assert!(s.environment.inv_area > 0.0);
    }

    #[test]
    fn eit_defaults() {
        let s = parse_config("[scenario]\nname = eit").unwrap();
        assert_eq!(s.propagation.total_time, 5.0 * 4000.0);
        let w = s.environment.cavity_omega.unwrap();
        assert!((w - ev_to_hartree(10.746)).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_config("[scenario]\nname = decay\n\n[propagation]\ndt = abc\n").unwrap_err();
        let msg = e.to_string();
        assert!(matches!(e, Error::Config { line: 5, .. }), "{msg}");
        assert!(msg.contains("dt"), "{msg}");
        let e = parse_config("[scenario]\nname = decay\n[grid]\nwidth = 3\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 4, .. }));
        let e = parse_config("[grid]\npoints = 301\n").unwrap_err();
        assert!(e.to_string().contains("scenario.name"));
        let e =
            parse_config("[scenario]\nname = hhg\n[grid]\npoints = 3\npoints = 5\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 5, .. }));
        let e = parse_config("[scenario]\nname = hhg\n[grid]\npoints = 300\n").unwrap_err();
        assert!(e.is_validation());
    }

    #[test]
    fn emit_roundtrip_every_kind() {
        for kind in ScenarioKind::ALL {
            let mut s = Scenario::defaults(kind);
            s.environment.edge_z = Some(0.75);
            s.drive.cw_ramp = Some(1.0 / 3.0);
            s.sweep.inv_area = vec![1e-3, 0.1 + 0.2];
            let text = emit(&s);
            assert_eq!(parse_config(&text).unwrap(), s, "{text}");
        }
    }
}
