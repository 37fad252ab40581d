use proptest::prelude::*;
use rrsim::config::{emit, parse_config, DriveKind, InitialState, Scenario, ScenarioKind};
use rrsim::scenario::{exit_code, run_scenario, sweep, with_parameter};
use rrsim::units::ev_to_hartree;
use rrsim::Error;

fn quick(kind: ScenarioKind) -> Scenario {
    let mut s = Scenario::defaults(kind);
    s.propagation.total_time = 60.0;
    s.propagation.stride = 2;
    s.analysis.pad_to = 1 << 14;
    s.analysis.window = 0.3;
    s.analysis.decay_lengths = 0.0;
    s.environment.inv_area = 1.0;
    s
}

fn kind_strategy() -> impl Strategy<Value = ScenarioKind> {
    prop::sample::select(ScenarioKind::ALL.to_vec())
}

proptest! {
    #[test]
    fn emit_parses_back(
        kind in kind_strategy(),
        dt in 1e-4f64..0.1,
        inv_area in 0.0f64..10.0,
        g in 0.0f64..0.5,
        stride in 1usize..50,
        emitters in 1usize..9,
        cw in prop::option::of(0.1f64..1.0),
        modes in prop::collection::vec(1usize..10_000, 1..5),
        initial in prop::sample::select(vec![InitialState::Ground, InitialState::Excited, InitialState::Superposition]),
        drive in prop::sample::select(vec![DriveKind::None, DriveKind::Kick, DriveKind::Pulse, DriveKind::Cw]),
    ) {
        let mut s = Scenario::defaults(kind);
        s.propagation.dt = dt;
        s.propagation.stride = stride;
        s.environment.inv_area = inv_area;
        s.environment.g_over_omega = g;
        s.environment.cavity_omega = Some(0.39 + g);
        s.n_emitters = emitters;
        s.drive.cw_omega = cw;
        s.drive.kind = drive;
        s.initial = initial;
        s.sweep.n_modes = modes;
        s.output = Some(format!("runs/{}", kind.name()));
        prop_assert_eq!(parse_config(&emit(&s)).unwrap(), s);
    }
}

#[test]
fn bad_value_names_key_and_line() {
    let err =
        parse_config("[scenario]\nname = absorption\n\n[propagation]\ndt = abc\n").unwrap_err();
    let text = err.to_string();
    assert!(text.contains(":5:"), "{text}");
    assert!(text.contains("dt"), "{text}");
    assert_eq!(exit_code(&err), 2);
}

#[test]
fn unknown_and_missing_keys_are_rejected() {
    let unknown =
        parse_config("[scenario]\nname = decay\n[grid]\npoints = 301\nwidth = 3\n").unwrap_err();
    assert!(unknown.to_string().contains(":5:"), "{unknown}");
    assert!(parse_config("[grid]\npoints = 301\n").is_err());
    assert!(parse_config("").is_err());
}

#[test]
fn units_convert_on_parse() {
    let s = parse_config("[scenario]\nname = hhg\n[drive]\nomega = 1.5 eV\nt0 = 10fs\n").unwrap();
    assert!((s.drive.pulse.omega - ev_to_hartree(1.5)).abs() < 1e-15);
    assert!((s.drive.pulse.center - 10.0 / 0.02418884).abs() < 1e-9);
}

#[test]
fn absorption_default_matches_reference_setup() {
    let s = parse_config("[scenario]\nname = absorption\n").unwrap();
    assert_eq!(s.grid.points, 301);
    assert_eq!(s.grid.spacing, 0.1);
    assert_eq!(s.propagation.dt, 1e-2);
    assert_eq!(s.propagation.total_time, 4000.0);
    assert_eq!(s.drive.kick.strength, 1e-6);
    assert_eq!(s.environment.switch_on, 2.0);
    let eit = Scenario::defaults(ScenarioKind::Eit);
    assert_eq!(eit.propagation.total_time, 5.0 * 4000.0);
    assert!((eit.environment.cavity_omega.unwrap() - ev_to_hartree(10.746)).abs() < 1e-15);
}

#[test]
fn sweep_rejects_bad_input_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let s = quick(ScenarioKind::Absorption);
    let empty = sweep(&s, "inv_area", &[], dir.path()).unwrap_err();
    assert!(matches!(empty, Error::InvalidParameter(_)));
    assert!(sweep(&s, "dt", &[0.1], dir.path()).is_err());
    assert!(with_parameter(&s, "n_emitters", 1.5).is_err());
    assert!(with_parameter(&s, "inv_area", -1.0).is_err());
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn absorption_outputs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let s = quick(ScenarioKind::Absorption);
    run_scenario(&s, a.path()).unwrap();
    run_scenario(&s, b.path()).unwrap();
    for name in [
        "trajectory.csv",
        "spectrum.csv",
        "summary.txt",
        "resolved.cfg",
    ] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{name}");
    }
    let traj = std::fs::read_to_string(a.path().join("trajectory.csv")).unwrap();
    let mut lines = traj.lines();
    assert_eq!(lines.next().unwrap(), "t,R,Rdot,E_drive,E_r,E_e,dE_rr");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 7);
    // 17 significant digits
    assert_eq!(first[0], "0.0000000000000000e0");
    assert!(!traj.contains('\r'));
    let resolved = std::fs::read_to_string(a.path().join("resolved.cfg")).unwrap();
    assert_eq!(parse_config(&resolved).unwrap(), s);
}

#[test]
fn sweep_merges_rows_in_value_order() {
    let dir = tempfile::tempdir().unwrap();
    let s = quick(ScenarioKind::Absorption);
    let rows = sweep(&s, "inv_area", &[1.0, 0.5], dir.path()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.result.is_ok()));
    let merged = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = merged.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("inv_area,status,"));
    assert!(lines[1].starts_with("1.0000000000000000e0,ok"));
    assert!(lines[2].starts_with("5.0000000000000000e-1,ok"));
    assert!(dir.path().join("inv_area_1.0").join("summary.txt").exists());
}

#[test]
fn failed_sweep_point_is_marked() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = quick(ScenarioKind::Absorption);
    // far too short to resolve a line: the fit fails, the run itself succeeds
    s.propagation.total_time = 4.0;
    s.kind = ScenarioKind::LambShift;
    let rows = sweep(&s, "inv_area", &[1.0], dir.path()).unwrap();
    assert!(rows[0].result.is_err());
    let merged = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(
        merged.lines().nth(1).unwrap().contains("error 3"),
        "{merged}"
    );
}

#[test]
fn theory_scenario_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let summary = run_scenario(&Scenario::defaults(ScenarioKind::Theory), dir.path()).unwrap();
    assert!((summary.get("x").unwrap() - 0.0100700).abs() < 1e-6);
    let table = std::fs::read_to_string(dir.path().join("theory.csv")).unwrap();
    assert_eq!(table.lines().count(), 6);
}

#[test]
fn decay_run_reports_energy_closure() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = Scenario::defaults(ScenarioKind::Decay);
    s.propagation.total_time = 250.0;
    let summary = run_scenario(&s, dir.path()).unwrap();
    assert!(
        summary.get("closure_residual").unwrap() < 1e-4 * summary.get("e_initial").unwrap().abs()
    );
    assert_eq!(summary.get("de_rr_monotone"), Some(1.0));
    assert!(summary.get("deposited").unwrap() > 0.0);
}
