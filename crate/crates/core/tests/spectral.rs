use std::f64::consts::PI;

use landau_core::quadrature::{composite, gauss_legendre};
use landau_core::spectral::{
    make_grid, sample_density, snapshot, BackgroundProfile, DistributionSpectrum, FrequencyMesh, PotentialLaw,
};
use landau_core::Complex64;

/// `(1/2pi) \int 4 pi delta / (1 + v^2) e^{-i v eta} dv` by quadrature.
fn lorentzian_transform(delta: f64, eta: f64) -> f64 {
    let rule = gauss_legendre(20);
    let integral = if eta == 0.0 {
        // v = tan(theta) turns the integrand into a constant.
        composite(&rule, -0.5 * PI, 0.5 * PI, 8, |_th: f64| 1.0)
    } else {
        // Even integrand; stop where sin(eta L) = 0 so the leading tail term vanishes.
        let a = eta.abs();
        let l = 2.0 * PI * 4000.0 / a;
        let body: f64 = composite(&rule, 0.0, l, 64_000, |v: f64| (v * a).cos() / (1.0 + v * v));
        // Integrating the tail by parts twice leaves 2 L / (a^2 (1 + L^2)^2).
        let tail = 2.0 * l / (a * a * (1.0 + l * l).powi(2));
        2.0 * (body + tail)
    };
    4.0 * PI * delta * integral / (2.0 * PI)
}

#[test]
fn grid_spacing_and_endpoints() {
    let g = make_grid(4, 200.0, 4001, 0.01, 50.0).unwrap();
    assert!((g.d_eta() - 0.1).abs() < 1e-15);

    let err = make_grid(4, 100.0, 1001, 0.01, 50.0).unwrap_err();
    assert!(err.to_string().contains("eta_max < k_max·t_final"), "{err}");

    let g = make_grid(1, 10.0, 3, 0.1, 10.0).unwrap();
    assert_eq!(g.mesh().etas(), vec![-10.0, 0.0, 10.0]);
}

#[test]
fn grid_values_reproducible_from_fields() {
    let a = FrequencyMesh::new(3, 17.25, 1235).unwrap();
    let b = FrequencyMesh::new(3, 17.25, 1235).unwrap();
    assert_eq!(a.etas(), b.etas());
    let etas = a.etas();
    for j in 0..etas.len() {
        assert_eq!(etas[j], -etas[etas.len() - 1 - j]);
    }
}

#[test]
fn lorentzian_symbol_matches_quadrature() {
    let bg = BackgroundProfile::lorentzian(0.01).unwrap();
    let at0 = lorentzian_transform(0.01, 0.0);
    assert!((bg.symbol(0.0) - 2.0 * PI * 0.01).abs() < 1e-15);
    assert!((bg.symbol(0.0) - at0).abs() <= 1e-8, "{} vs {}", bg.symbol(0.0), at0);
    let at1 = lorentzian_transform(0.01, 1.0);
    assert!((bg.symbol(1.0) - at1).abs() <= 1e-8, "{} vs {}", bg.symbol(1.0), at1);
    assert!((at1 / at0 - (-1.0f64).exp()).abs() <= 1e-6);
    for eta in [0.3, 1.0, 7.5] {
        assert_eq!(bg.symbol(eta), bg.symbol(-eta));
    }
}

#[test]
fn maxwellian_symbol_has_unit_mass() {
    let bg = BackgroundProfile::maxwellian(0.7).unwrap();
    // 2 pi f^(0) is the velocity integral.
    assert!((2.0 * PI * bg.symbol(0.0) - 1.0).abs() < 1e-14);
    assert!(bg.symbol(2.0) < bg.symbol(1.0));
    assert_eq!(bg.symbol(1.3), bg.symbol(-1.3));
}

#[test]
fn potential_symbols() {
    assert_eq!(PotentialLaw::coulomb(1.0).unwrap().symbol(2).unwrap(), 0.25);
    let p = PotentialLaw::power(-1.0, 2.0).unwrap().symbol(3).unwrap();
    assert!((p + 1.0 / 9.0).abs() < 1e-16);
    assert_eq!(PotentialLaw::shielded(1.0, 1.0).unwrap().symbol(0).unwrap(), 1.0);
    assert!(PotentialLaw::coulomb(1.0).unwrap().symbol(0).is_err());
    assert!(PotentialLaw::power(1.0, 3.0).unwrap().symbol(0).is_err());
}

#[test]
fn symbols_are_pure() {
    let w = PotentialLaw::shifted_power(-1.0, 2.5).unwrap();
    let bg = BackgroundProfile::maxwellian(0.3).unwrap();
    for k in 1..20 {
        assert_eq!(w.symbol(k).unwrap().to_bits(), w.symbol(k).unwrap().to_bits());
        assert_eq!(w.symbol(k).unwrap(), w.symbol(-k).unwrap());
        let e = k as f64 * 0.37;
        assert_eq!(bg.symbol(e).to_bits(), bg.symbol(e).to_bits());
    }
}

#[test]
fn density_at_critical_time() {
    let eta0 = 12.3;
    let mesh = FrequencyMesh::new(1, 40.0, 801).unwrap();
    let f = DistributionSpectrum::from_fn(mesh, 0.0, |k, e| match k {
        1 => Complex64::new((-(e - eta0).abs()).exp(), 0.0),
        -1 => Complex64::new((-(e + eta0).abs()).exp(), 0.0),
        _ => Complex64::new(0.0, 0.0),
    });
    // eta0 is not a node; the cubic read is close, and exact on a node.
    let rho = sample_density(&f, eta0, 1).unwrap();
    assert!((rho.re - 2.0 * PI).abs() < 0.05 && rho.im.abs() < 1e-15);
    let node = mesh.eta(mesh.mid() + 123);
    let f = DistributionSpectrum::from_fn(mesh, 0.0, |k, e| match k {
        1 => Complex64::new((-(e - node).abs()).exp(), 0.0),
        -1 => Complex64::new((-(e + node).abs()).exp(), 0.0),
        _ => Complex64::new(0.0, 0.0),
    });
    assert_eq!(sample_density(&f, node, 1).unwrap(), Complex64::new(2.0 * PI, 0.0));
}

fn gaussian_error(n_eta: usize) -> f64 {
    let mesh = FrequencyMesh::new(1, 10.0, n_eta).unwrap();
    let f = DistributionSpectrum::from_fn(mesh, 0.0, |k, e| {
        if k.abs() == 1 {
            Complex64::new((-e * e).exp(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    // Off-node time so the sampling line falls between nodes.
    let t = 2.0 + 0.0123;
    (sample_density(&f, t, 1).unwrap() - 2.0 * PI * (-t * t).exp()).norm()
}

#[test]
fn gaussian_density_sample() {
    let mesh = FrequencyMesh::new(1, 10.0, 401).unwrap();
    assert!(mesh.d_eta() <= 0.05);
    let f = DistributionSpectrum::from_fn(mesh, 0.0, |k, e| {
        if k.abs() == 1 {
            Complex64::new((-e * e).exp(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let rho = sample_density(&f, 2.0, 1).unwrap();
    assert!((rho - 2.0 * PI * (-4.0f64).exp()).norm() <= 1e-6);
}

#[test]
fn cubic_sampling_converges() {
    let coarse = gaussian_error(401);
    let fine = gaussian_error(801);
    assert!(coarse / fine >= 8.0, "ratio {}", coarse / fine);
}

#[test]
fn sampling_off_grid_is_an_error() {
    let mesh = FrequencyMesh::new(2, 10.0, 101).unwrap();
    let f = DistributionSpectrum::zeros(mesh, 0.0);
    assert!(sample_density(&f, 6.0, 2).is_err());
    assert_eq!(sample_density(&f, 5.0, 2).unwrap(), Complex64::new(0.0, 0.0));
}

#[test]
fn snapshot_layout_and_round_trip() {
    let mesh = FrequencyMesh::new(2, 3.0, 7).unwrap();
    let f = DistributionSpectrum::from_fn(mesh, 1.25, |k, e| Complex64::new(k as f64 + e, k as f64 * e * 0.5));
    let bytes = snapshot::encode(&f);
    assert_eq!(&bytes[..4], b"VEL1");
    assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 2);
    assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 7);
    assert_eq!(f64::from_le_bytes(bytes[12..20].try_into().unwrap()), 3.0);
    assert_eq!(f64::from_le_bytes(bytes[20..28].try_into().unwrap()), 1.25);
    assert_eq!(bytes.len(), 28 + 16 * 5 * 7);
    // First value is (k = -2, eta = -3).
    assert_eq!(f64::from_le_bytes(bytes[28..36].try_into().unwrap()), -5.0);
    assert_eq!(f64::from_le_bytes(bytes[36..44].try_into().unwrap()), 3.0);
    let back = snapshot::decode(&bytes).unwrap();
    assert_eq!(back, f);
    assert!(snapshot::decode(&bytes[..bytes.len() - 1]).is_err());
}
