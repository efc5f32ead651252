use std::f64::consts::PI;

use landau_core::echo::{high_packet_symbol, EchoChainConfig};
use landau_core::linear::{duhamel_rate, VolterraKernel};
use landau_core::nonlinear::{
    conserved_quantities, initial_state, integrate, linear_reference, rhs_profile, run_echo_experiment, step,
    time_reversal_probe, ExperimentConfig, ModelOptions, NonlinearState,
};
use landau_core::norms::norm_hsm;
use landau_core::spectral::{
    make_grid, sample_density, BackgroundProfile, DistributionSpectrum, FrequencyMesh, PotentialLaw,
};
use landau_core::Complex64;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn packet(mesh: FrequencyMesh, k0: i64, amp: f64, centre: f64) -> DistributionSpectrum {
    DistributionSpectrum::from_fn(mesh, 0.0, |k, eta| {
        if k == k0 {
            Complex64::new(
                amp * (-(eta - centre) * (eta - centre) / 8.0).exp(),
                0.3 * amp * (-(eta - centre).powi(2) / 4.0).exp(),
            )
        } else if k == -k0 {
            Complex64::new(
                amp * (-(eta + centre) * (eta + centre) / 8.0).exp(),
                -0.3 * amp * (-(eta + centre).powi(2) / 4.0).exp(),
            )
        } else {
            zero()
        }
    })
}

#[test]
fn equilibrium_has_zero_rate() {
    let mesh = FrequencyMesh::new(3, 30.0, 601).unwrap();
    let state = NonlinearState::new(
        DistributionSpectrum::zeros(mesh, 0.0),
        Some(BackgroundProfile::lorentzian(0.3).unwrap()),
        PotentialLaw::coulomb(1.0).unwrap(),
    );
    for t in [0.0, 1.7, 4.0] {
        let out = rhs_profile(&state, t).unwrap();
        assert!(out.rate.values().iter().all(|v| *v == zero()));
    }
}

#[test]
fn single_mode_couples_only_to_its_harmonic() {
    let mesh = FrequencyMesh::new(3, 40.0, 801).unwrap();
    let g = packet(mesh, 1, 0.2, 0.5);
    let state = NonlinearState::new(g, None, PotentialLaw::coulomb(1.0).unwrap());
    let rate = rhs_profile(&state, 0.5).unwrap().rate;
    let max_row = |k: i64| rate.row(k).iter().fold(0.0f64, |m, v| m.max(v.norm()));
    assert!(max_row(2) > 0.0);
    assert!(max_row(0) > 0.0);
    assert_eq!(max_row(3), 0.0);
    assert_eq!(max_row(-3), 0.0);
}

#[test]
fn linearized_rate_matches_duhamel_update() {
    let mesh = FrequencyMesh::new(3, 40.0, 1601).unwrap();
    let bg = BackgroundProfile::lorentzian(0.2).unwrap();
    let w = PotentialLaw::power(-1.0, 2.0).unwrap();
    let mut g = packet(mesh, 1, 0.3, 2.0);
    g.axpy(1.0, &packet(mesh, 2, 0.1, -3.0));
    let state = NonlinearState::new(g, Some(bg), w)
        .with_options(ModelOptions { self_interaction: false, ..Default::default() });
    let kernel = VolterraKernel::new(w, bg);
    let t = 1.3;
    let rate = rhs_profile(&state, t).unwrap().rate;
    let scale = rate.max_abs();
    assert!(scale > 0.0);
    for k in mesh.modes() {
        let rho = if k == 0 { zero() } else { sample_density(&state.g, t, k).unwrap() };
        for (j, v) in rate.row(k).iter().enumerate() {
            let expect = duhamel_rate(&kernel, k, rho, t, mesh.eta(j)).unwrap();
            assert!((v - expect).norm() <= 1e-10 * scale, "k {k} eta {}", mesh.eta(j));
        }
    }
}

#[test]
fn zero_field_step_only_advances_time() {
    let mesh = FrequencyMesh::new(2, 20.0, 401).unwrap();
    // A homogeneous (k = 0) perturbation carries no density.
    let g =
        DistributionSpectrum::from_fn(
            mesh,
            0.0,
            |k, eta| {
                if k == 0 {
                    Complex64::new((-eta * eta).exp(), 0.0)
                } else {
                    zero()
                }
            },
        );
    let mut state = NonlinearState::new(g.clone(), None, PotentialLaw::coulomb(1.0).unwrap());
    let l2 = conserved_quantities(&state).unwrap().l2;
    for _ in 0..10 {
        step(&mut state, 0.25).unwrap();
    }
    assert_eq!(state.g.values(), g.values());
    assert!((state.time() - 2.5).abs() < 1e-15);
    assert_eq!(conserved_quantities(&state).unwrap().l2, l2);
}

#[test]
fn steps_keep_hermitian_symmetry() {
    let mesh = FrequencyMesh::new(3, 60.0, 1201).unwrap();
    let mut g = packet(mesh, 1, 0.5, 1.0);
    g.axpy(1.0, &packet(mesh, 2, 0.3, -2.0));
    let mut state =
        NonlinearState::new(g, Some(BackgroundProfile::lorentzian(0.1).unwrap()), PotentialLaw::gravitational());
    for _ in 0..40 {
        step(&mut state, 0.05).unwrap();
        assert!(state.g.hermitian_defect() <= 1e-10 * (1.0 + state.g.max_abs()));
    }
}

#[test]
fn oversized_step_is_rejected() {
    let mesh = FrequencyMesh::new(2, 40.0, 801).unwrap();
    let mut state = NonlinearState::new(packet(mesh, 1, 5.0, 0.0), None, PotentialLaw::coulomb(1.0).unwrap());
    assert!(step(&mut state, 50.0).is_err());
}

#[test]
fn time_reversal_round_trip() {
    let mesh = FrequencyMesh::new(3, 60.0, 2401).unwrap();
    let mut g = packet(mesh, 1, 0.4, 1.0);
    g.axpy(1.0, &packet(mesh, 2, 0.2, -2.0));
    let state =
        NonlinearState::new(g, Some(BackgroundProfile::lorentzian(0.1).unwrap()), PotentialLaw::gravitational());
    let probe = time_reversal_probe(&state, 0.05, 100).unwrap();
    assert!(probe.truncation > 0.0);
    assert!(probe.round_trip <= 10.0 * probe.truncation, "{probe:?}");
}

#[test]
fn unperturbed_experiment_is_frozen() {
    let grid = make_grid(3, 3.0 * 42.0 + 10.0, 2721, 0.05, 42.0).unwrap();
    let mut chain = EchoChainConfig::new(0.0, 0.0, 2, 40.0, grid);
    chain.k_trunc = 3;
    let cfg = ExperimentConfig { snapshot_every: Some(200), ..ExperimentConfig::new(chain) };
    let out = run_echo_experiment(&cfg).unwrap();
    assert!(out.traces.iter().all(|tr| tr.max_abs() == 0.0));
    for s in &out.snapshots {
        assert!(s.values().iter().all(|v| *v == zero()));
    }
}

/// Short-time experiment with the echo data from t = 0 on `[0, 10]`.
fn short_run(eps: f64) -> (f64, f64, f64) {
    let grid = make_grid(4, 100.0, 8001, 0.05, 10.0).unwrap();
    let mut chain = EchoChainConfig::new(eps, eps * eps, 3, 60.0, grid);
    chain.t_in = 0.0;
    chain.k_trunc = 4;
    let cfg = ExperimentConfig::new(chain);
    let mut state = initial_state(&cfg).unwrap();
    let log = integrate(&mut state, 10.0, 0.05, 1, None).unwrap();
    let lin = linear_reference(&cfg.chain, 0.0, 10.0, 0.05).unwrap();
    let mut err = 0.0f64;
    for (a, b) in log.traces.iter().zip(&lin) {
        for (x, y) in a.values.iter().zip(&b.values) {
            err = err.max((x - y).norm());
        }
    }
    let c0 = log.conservation.first().unwrap();
    let mass_drift = log.conservation.iter().fold(0.0f64, |m, c| m.max((c.mass - c0.mass).abs() / c0.mass));
    let l2_drift = log.conservation.iter().fold(0.0f64, |m, c| m.max((c.l2 - c0.l2).abs() / c0.l2));
    (err, mass_drift, l2_drift)
}

#[test]
fn short_time_deviation_from_linear_theory_is_quadratic() {
    let (e1, m1, l1) = short_run(0.02);
    let (e2, m2, l2) = short_run(0.01);
    let c1 = e1 / (0.02 * 0.02 * 10.0);
    let c2 = e2 / (0.01 * 0.01 * 10.0);
    let slope = (e1 / e2).log2();
    assert!((slope - 2.0).abs() <= 0.2, "slope {slope} (C = {c1}, {c2})");
    for m in [m1, m2] {
        assert!(m <= 1e-8, "mass drift {m}");
    }
    for l in [l1, l2] {
        assert!(l <= 1e-6, "L2 drift {l}");
    }
}

#[test]
fn linearized_run_matches_volterra() {
    let eps = 0.02;
    let grid = make_grid(4, 100.0, 8001, 0.05, 10.0).unwrap();
    let mut chain = EchoChainConfig::new(eps, 0.01, 3, 60.0, grid);
    chain.t_in = 0.0;
    chain.k_trunc = 4;
    let mut cfg = ExperimentConfig::new(chain);
    cfg.options.self_interaction = false;
    let mut state = initial_state(&cfg).unwrap();
    let log = integrate(&mut state, 10.0, 0.05, 1, None).unwrap();
    let lin = linear_reference(&cfg.chain, 0.0, 10.0, 0.05).unwrap();
    let scale = lin.iter().fold(0.0f64, |m, tr| m.max(tr.max_abs()));
    let mut worst = 0.0f64;
    for (a, b) in log.traces.iter().zip(&lin) {
        for (x, y) in a.values.iter().zip(&b.values) {
            worst = worst.max((x - y).norm());
        }
    }
    assert!(worst <= 1e-8 * scale, "{worst} vs {scale}");
}

#[test]
fn high_packet_norm_matches_closed_form() {
    // ||<v> f||^2 = sum_k \int |f^|^2 + |d_eta f^|^2 deta for the packet
    // amp (pi/8) (e^{-|eta - eta0|/2} + e^{-|eta + eta0|/2}) on k = +-k0 gives
    // amp^2 pi^2 (1/8 + 1/32).
    let eps = 0.05;
    let (k0, eta0) = (3i64, 50.0);
    let mesh = FrequencyMesh::new(3, 120.0, 48_001).unwrap();
    for sigma in [0.0, 1.0, 2.0] {
        let amp = eps / (1.0 + (k0 * k0) as f64 + eta0 * eta0).powf(0.5 * sigma);
        let f = DistributionSpectrum::from_fn(mesh, 0.0, |k, eta| high_packet_symbol(amp, k0, eta0, k, eta));
        let value = norm_hsm(&f, sigma, 1);
        let closed = eps * PI * (5.0f64 / 32.0).sqrt();
        assert!((value - closed).abs() <= 0.02 * closed, "sigma {sigma}: {value} vs {closed}");
    }
    let amp = eps;
    let f = DistributionSpectrum::from_fn(mesh, 0.0, |k, eta| high_packet_symbol(amp, k0, eta0, k, eta));
    let closed = eps * PI * (5.0f64 / 32.0).sqrt();
    assert!((norm_hsm(&f, 0.0, 1) - closed).abs() <= 1e-3 * closed);
}

#[test]
fn maxwellian_energy_is_nearly_conserved() {
    let mesh = FrequencyMesh::new(3, 40.0, 3201).unwrap();
    let g = packet(mesh, 1, 0.02, 0.0);
    let mut state =
        NonlinearState::new(g, Some(BackgroundProfile::maxwellian(1.0).unwrap()), PotentialLaw::coulomb(1.0).unwrap());
    let c0 = conserved_quantities(&state).unwrap();
    assert!(!c0.infinite_moment);
    let log = integrate(&mut state, 6.0, 0.02, 10, None).unwrap();
    let scale = log.conservation.iter().fold(0.0f64, |m, c| m.max(c.potential.abs()));
    assert!(scale > 0.0);
    for c in &log.conservation {
        assert!((c.energy - c0.energy).abs() <= 1e-2 * scale, "t {}: {} vs {}", c.time, c.energy, c0.energy);
        assert!((c.mass - c0.mass).abs() <= 1e-12 * c0.mass);
    }
}

#[test]
fn lorentzian_energy_is_flagged() {
    let mesh = FrequencyMesh::new(1, 10.0, 201).unwrap();
    let state = NonlinearState::new(
        DistributionSpectrum::zeros(mesh, 0.0),
        Some(BackgroundProfile::lorentzian(0.1).unwrap()),
        PotentialLaw::coulomb(1.0).unwrap(),
    );
    let c = conserved_quantities(&state).unwrap();
    assert!(c.infinite_moment);
    assert_eq!(c.potential, 0.0);
    assert_eq!(c.kinetic, 0.0);
    assert!((c.mass - 2.0 * PI * BackgroundProfile::lorentzian(0.1).unwrap().mass()).abs() < 1e-15);
}
