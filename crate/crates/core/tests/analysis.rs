use proptest::prelude::*;
use rrsim::analysis::{
    cross_section, cumulative_emission, fourier, fourier_with, fwhm, hhg_spectrum, peak_shift,
    polarizability, FourierOptions, RealSpectrum,
};
use rrsim::drive::{Drive, KickSpec};
use rrsim::environment::{Environment, EnvironmentState, WaveguideSpec};
use rrsim::propagate::{run, PropagatorConfig, TrajectoryRecord};
use rrsim::quantum::{eigenstates, soft_coulomb, Grid1D};
use rrsim::units::HARTREE_EV;

fn lorentzian(center: f64, gamma: f64, d_omega: f64, n: usize) -> RealSpectrum {
    let omega: Vec<f64> = (0..n).map(|i| i as f64 * d_omega).collect();
    let values = omega
        .iter()
        .map(|w| gamma * gamma / ((w - center).powi(2) + gamma * gamma))
        .collect();
    RealSpectrum { omega, values }
}

fn record_from(r: Vec<f64>, e_drive: Vec<f64>, dt: f64) -> TrajectoryRecord {
    let n = r.len();
    TrajectoryRecord {
        dt,
        stride: 1,
        t: (0..n).map(|i| i as f64 * dt).collect(),
        r,
        r_dot: vec![0.0; n],
        e_drive,
        e_r: vec![0.0; n],
        e_e: vec![0.0; n],
        de_rr: vec![0.0; n],
        e_env: vec![0.0; n],
        r_dot_history: Vec::new(),
        steps: n.saturating_sub(1),
        max_norm_drift: 0.0,
    }
}

proptest! {
    #[test]
    fn parseval_holds(series in prop::collection::vec(-1.0f64..1.0, 2..300), dt in 0.01f64..1.0) {
        let f = fourier(&series, dt).unwrap();
        let time: f64 = series.iter().map(|x| x * x).sum::<f64>() * dt;
        let dw = f.omega[1] - f.omega[0];
        let freq: f64 = f.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dw / (2.0 * std::f64::consts::PI);
        prop_assert!((time - freq).abs() <= 1e-10 * time.max(1e-300));
    }

    #[test]
    fn real_series_have_hermitian_spectra(series in prop::collection::vec(-1.0f64..1.0, 4..200)) {
        let f = fourier_with(&series, 0.1, &FourierOptions::padded(256)).unwrap();
        let n = f.len();
        let zero = n / 2;
        prop_assert_eq!(f.omega[zero], 0.0);
        for k in 1..zero {
            let a = f.values[zero + k];
            let b = f.values[zero - k];
            prop_assert!((a - b.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn lorentzian_width_is_unbiased(bins in 5.0f64..40.0, offset in 0.0f64..1.0) {
        let d_omega = 1e-3;
        let gamma = bins * d_omega;
        let center = 0.4 + offset * d_omega;
        let spec = lorentzian(center, gamma, d_omega, 1000);
        let fit = fwhm(&spec, (center - 0.15, center + 0.15), 0.5).unwrap();
        let expected = gamma * HARTREE_EV;
        prop_assert!((fit.gamma - expected).abs() < 0.02 * expected, "{} vs {}", fit.gamma, expected);
        prop_assert!((fit.center - center * HARTREE_EV).abs() < 0.02 * expected);
    }
}

#[test]
fn damped_cosine_gives_lorentzian() {
    let (w0, g, dt) = (0.4, 0.01, 0.05);
    let series: Vec<f64> = (0..40_000)
        .map(|n| {
            let t = n as f64 * dt;
            (-g * t).exp() * (w0 * t).cos()
        })
        .collect();
    let f = fourier_with(&series, dt, &FourierOptions::padded(1 << 18)).unwrap();
    let re = f.map_real(|_, v| v.re);
    let fit = fwhm(&re, (w0 - 0.1, w0 + 0.1), 0.5).unwrap();
    assert!((fit.center / HARTREE_EV - w0).abs() < 1e-4);
    assert!((fit.gamma / HARTREE_EV - g).abs() < 0.02 * g);
}

#[test]
fn peak_shift_of_identical_spectra_is_zero() {
    let s = lorentzian(0.4, 0.01, 1e-3, 1000);
    assert_eq!(peak_shift(&s, &s, (0.3, 0.5)).unwrap(), 0.0);
    let moved = lorentzian(0.401, 0.01, 1e-3, 1000);
    let shift = peak_shift(&moved, &s, (0.3, 0.5)).unwrap();
    assert!((shift - 1e-3 * HARTREE_EV * 1e3).abs() < 0.01 * 27.2);
}

#[test]
fn narrow_line_is_an_error() {
    let s = lorentzian(0.4, 0.5e-3, 1e-3, 1000);
    assert!(fwhm(&s, (0.3, 0.5), 0.5).is_err());
}

#[test]
fn zero_velocity_emits_nothing() {
    let e = cumulative_emission(&[0.0; 50], &[0.0; 50], 0.1);
    assert!(e.iter().all(|&v| v == 0.0));
}

#[test]
fn polarizability_of_damped_oscillator() {
    // R responds to an impulse p as p sin(w t) exp(-g t) / w, so
    // alpha = 1 / (w^2 + g^2 - omega^2 - 2 i g omega)
    let (w, g, dt, p) = (0.4, 0.02, 0.05, 1e-3);
    let n = 20_000;
    let r: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 * dt;
            p * (w * t).sin() * (-g * t).exp() / w
        })
        .collect();
    let mut e = vec![0.0; n];
    e[0] = p / dt;
    let alpha = polarizability(&record_from(r, e, dt), &FourierOptions::padded(1 << 16)).unwrap();
    for (i, &omega) in alpha.omega.iter().enumerate() {
        if omega > 0.2 && omega < 0.6 {
            let exact =
                1.0 / num_complex::Complex64::new(w * w + g * g - omega * omega, -2.0 * g * omega);
            assert!((alpha.values[i] - exact).norm() < 0.02 * exact.norm());
        }
    }
}

#[test]
fn odd_harmonics_are_found() {
    let (wl, dt) = (0.05, 0.1);
    let n = 200_000;
    let r: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 * dt;
            let env = (-((t - 10_000.0) / 3000.0).powi(2)).exp();
            env * ((wl * t).sin() + 1e-2 * (3.0 * wl * t).sin() + 1e-4 * (5.0 * wl * t).sin())
        })
        .collect();
    let mut rec = record_from(r.clone(), vec![0.0; n], dt);
    // use R as the radiated field directly
    rec.e_r = r;
    let h = hhg_spectrum(&rec, wl, 6, &FourierOptions::default()).unwrap();
    for order in [1, 3, 5] {
        let odd = h.harmonic(order).unwrap();
        let even = h.harmonic(order + 1).unwrap();
        assert!(odd.local_max, "order {order}");
        assert!(odd.intensity > 10.0 * even.intensity, "order {order}");
    }
}

#[test]
fn kick_cross_section_is_nonnegative_at_resonance() {
    let pot = soft_coulomb(Grid1D::new(301, 0.1).unwrap(), 1.0).unwrap();
    let eig = eigenstates(&pot, 2).unwrap();
    let env = EnvironmentState::new(
        vec![Environment::waveguide(
            WaveguideSpec::new(1.0).switched_on_at(2.0),
        )],
        2.0,
    );
    let config = PropagatorConfig {
        dt: 1e-2,
        total_time: 400.0,
        stride: 5,
        ..PropagatorConfig::default()
    };
    let rec = run(
        pot,
        Drive::Kick(KickSpec::default()),
        config,
        eig.states[0].clone(),
        env,
    )
    .unwrap();
    let sigma = cross_section(&polarizability(&rec, &FourierOptions::padded(1 << 16)).unwrap());
    let w0 = eig.excitation(1);
    let range = sigma.window(w0 - 0.1, w0 + 0.1);
    let peak = sigma.values[range.clone()]
        .iter()
        .copied()
        .fold(f64::MIN, f64::max);
    let low = sigma.values[range].iter().copied().fold(f64::MAX, f64::min);
    assert!(peak > 0.0);
    assert!(low >= -0.01 * peak, "min {low} vs peak {peak}");
}
