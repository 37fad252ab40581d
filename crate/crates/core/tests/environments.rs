use num_complex::Complex64;
use rrsim::drive::Drive;
use rrsim::environment::{
    kernel_field, rr_slope_1d, Environment, EnvironmentState, KernelTable, ModeBath, WaveguideSpec,
};
use rrsim::propagate::{run, PropagatorConfig, TrajectoryRecord};
use rrsim::quantum::{eigenstates, soft_coulomb, Grid1D, Wavefunction};
use rrsim::units::{waveguide_coupling, SPEED_OF_LIGHT};

fn superposition_run(env: EnvironmentState, total_time: f64) -> TrajectoryRecord {
    let pot = soft_coulomb(Grid1D::new(301, 0.1).unwrap(), 1.0).unwrap();
    let eig = eigenstates(&pot, 2).unwrap();
    let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let psi = Wavefunction::superposition(&[(&eig.states[0], c), (&eig.states[1], c)]).unwrap();
    let config = PropagatorConfig {
        dt: 1e-2,
        total_time,
        stride: 1,
        ..PropagatorConfig::default()
    };
    run(pot, Drive::None, config, psi, env).unwrap()
}

#[test]
fn mode_bath_converges_to_local_recoil() {
    let (inv_area, total, cutoff) = (1.0, 40.0, 20.0);
    let reference = superposition_run(
        EnvironmentState::new(
            vec![Environment::waveguide(WaveguideSpec::new(inv_area))],
            0.0,
        ),
        total,
    );
    let mut errors = Vec::new();
    for n in [128, 256, 512, 1024] {
        let bath = ModeBath::waveguide_with_modes(inv_area, n, cutoff).unwrap();
        let rec = superposition_run(
            EnvironmentState::new(vec![Environment::Bath(bath)], 0.0),
            total,
        );
        let err = rec
            .r
            .iter()
            .zip(&reference.r)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        errors.push(err);
    }
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    let amplitude = reference.r.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    assert!(errors[3] < 0.05 * amplitude, "{errors:?}");
}

#[test]
fn mode_sum_kernel_approaches_delta() {
    let (dt, cutoff, inv_area) = (1e-2, 20.0, 1.0);
    // a pulse that fits inside every memory window below
    let n = (400.0 / dt) as usize;
    let history: Vec<f64> = (0..=n)
        .map(|i| {
            let s = (i as f64 - n as f64) * dt;
            (-(s / 6.0).powi(2)).exp() * (0.4 * s + 1.0).sin()
        })
        .collect();
    let now = *history.last().unwrap();
    let target = rr_slope_1d(now, &WaveguideSpec::new(inv_area), 0.0);
    assert!((target + waveguide_coupling(inv_area) * now).abs() < 1e-15);
    let mut errors = Vec::new();
    for tau_max in [25.0, 50.0, 100.0, 200.0] {
        // memory of half the recurrence time of the box
        let bath = ModeBath::waveguide(inv_area, 2.0 * SPEED_OF_LIGHT * tau_max, cutoff).unwrap();
        let modes: Vec<(f64, f64)> = bath
            .modes
            .iter()
            .map(|m| (m.omega, m.lambda * m.lambda))
            .collect();
        let table = KernelTable::from_modes(&modes, dt, tau_max).unwrap();
        let field = kernel_field(&history, &table, dt).unwrap();
        errors.push((field - target) / target.abs());
    }
    // finite boxes miss half of the zero-frequency mode, an error falling as 1/L
    for w in errors.windows(3) {
        let ratio = (w[1] - w[0]) / (w[2] - w[1]);
        assert!((1.8..=2.2).contains(&ratio), "{errors:?}");
    }
    let limit = 2.0 * errors[3] - errors[2];
    assert!(limit.abs() < 0.01, "{errors:?}");
}
