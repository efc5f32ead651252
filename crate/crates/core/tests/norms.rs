use landau_core::echo::{solve_echo_chain, solve_gtoy, EchoChainConfig};
use landau_core::free_transport::{density_free, AnalyticInitialDatum};
use landau_core::linear::DensityTrace;
use landau_core::norms::{
    apply_multiplier, bootstrap_monitor, density_weighted_norm, norm_hsm, BootstrapReport, BootstrapSpecs,
    MultiplierKind, MultiplierSpec, TimeProfile, WeightPolicy,
};
use landau_core::spectral::{make_grid, DistributionSpectrum, FrequencyMesh};
use landau_core::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gaussian_field(n_eta: usize) -> DistributionSpectrum {
    let mesh = FrequencyMesh::new(2, 12.0, n_eta).unwrap();
    DistributionSpectrum::from_fn(mesh, 0.0, |k, e| {
        let c = k as f64;
        Complex64::new((-(e - c) * (e - c) / 2.0).exp(), 0.2 * c * (-(e * e) / 3.0).exp())
    })
}

#[test]
fn norm_refinement_consistency() {
    for (s, m) in [(0.0, 0), (1.5, 0), (1.0, 1), (2.0, 2)] {
        let coarse = norm_hsm(&gaussian_field(241), s, m);
        let fine = norm_hsm(&gaussian_field(481), s, m);
        assert!((coarse - fine).abs() < 0.01 * fine, "s {s} m {m}: {coarse} vs {fine}");
    }
}

#[test]
fn velocity_weight_adds_derivatives() {
    // A pure k = 0 Gaussian e^{-eta^2/2}: ||f||^2 = sqrt(pi), ||f'||^2 = sqrt(pi)/2.
    let mesh = FrequencyMesh::new(1, 12.0, 2401).unwrap();
    let f = DistributionSpectrum::from_fn(mesh, 0.0, |k, e| {
        Complex64::new(if k == 0 { (-(e * e) / 2.0).exp() } else { 0.0 }, 0.0)
    });
    let pi_sqrt = std::f64::consts::PI.sqrt();
    let m1 = norm_hsm(&f, 0.0, 1);
    assert!((m1 * m1 - 1.5 * pi_sqrt).abs() < 1e-4, "{}", m1 * m1);
    let m2 = norm_hsm(&f, 0.0, 2);
    // + ||f''||^2 = 3 sqrt(pi) / 4, with C(2,1) = 2 on the first derivative.
    assert!((m2 * m2 - (1.0 + 1.0 + 0.75) * pi_sqrt).abs() < 1e-3, "{}", m2 * m2);
}

fn orr_trace(dt: f64) -> DensityTrace {
    let d = AnalyticInitialDatum::orr_packet(0.5, 20.0, 1).unwrap();
    let n = (40.0 / dt).round() as usize;
    let times: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
    let values = times.iter().map(|&t| density_free(&d, t, 1)).collect();
    DensityTrace { k: 1, times, values }
}

#[test]
fn density_norm_of_orr_trace_is_stable() {
    for sigma in [0.0, 1.0, 2.0] {
        let a = density_weighted_norm(&orr_trace(0.1), sigma);
        let b = density_weighted_norm(&orr_trace(0.05), sigma);
        assert!(a.is_finite() && b > 0.0);
        assert!((a - b).abs() < 0.01 * b, "sigma {sigma}: {a} vs {b}");
    }
    // sigma = 0: |rho|^2 = 4 pi^2 e^{-|t - 20|} integrates to 8 pi^2 (1 - e^{-20}).
    let exact = (8.0 * std::f64::consts::PI.powi(2) * (1.0 - (-20.0f64).exp())).sqrt();
    assert!((density_weighted_norm(&orr_trace(0.01), 0.0) - exact).abs() < 1e-3 * exact);
}

fn specs(eps: f64, weight: WeightPolicy) -> BootstrapSpecs {
    BootstrapSpecs {
        a: MultiplierSpec::new(
            MultiplierKind::BigA { beta: 4.0, mu: TimeProfile::Constant(1.0), k_const: 10.0, r: 0.1, weight },
            eps,
        ),
        b: MultiplierSpec::new(MultiplierKind::BigB { gamma: 1.0, nu: TimeProfile::Constant(0.5), k_const: 10.0 }, eps),
        epsilon: eps,
        sigma: 2.0,
    }
}

fn toy_monitors(eps: f64, eta0: f64, weight: WeightPolicy) -> BootstrapReport {
    let t_final = 1.05 * eta0;
    let grid = make_grid(3, 3.0 * t_final + 10.0, 12001, 0.05, t_final).unwrap();
    let mut c = EchoChainConfig::new(eps, 0.0, 3, eta0, grid);
    c.t_in = 0.0;
    c.k_trunc = 3;
    let (run, _) = solve_echo_chain(&c).unwrap();
    let fields = solve_gtoy(&c, &run.traces, 20).unwrap();
    bootstrap_monitor(&fields, &run.traces, &specs(eps, weight))
}

fn at(rep: &BootstrapReport, curve: &[f64], t: f64) -> f64 {
    let i = rep.times.iter().position(|s| (s - t).abs() < 1e-6).unwrap();
    curve[i]
}

#[test]
fn mid_monitor_is_uniform_in_epsilon() {
    let a = toy_monitors(0.02, 60.0, WeightPolicy::Unit);
    let b = toy_monitors(0.01, 60.0, WeightPolicy::Unit);
    assert!(!a.saturated && !b.saturated);
    let fa = *a.mid_density_integral.last().unwrap();
    let fb = *b.mid_density_integral.last().unwrap();
    assert!(fa > 0.0 && fb > 0.0);
    let ratio = fa / fb;
    assert!((0.25..=4.0).contains(&ratio), "{fa} vs {fb}");
}

#[test]
fn high_monitor_grows_across_echoes_while_low_is_flat() {
    let eta0 = 60.0;
    let rep = toy_monitors(0.05, eta0, WeightPolicy::EchoWindow { amplification: 3.0, max_echoes: 3 });
    assert!(!rep.saturated);
    // Undo the <t>^{5/2} allowance to see the norm itself.
    let high: Vec<f64> = rep.times.iter().zip(&rep.high).map(|(t, h)| h * (1.0 + t * t).powf(1.25)).collect();
    for k in 1..=3 {
        let (before, after) = (eta0 / (k + 1) as f64, eta0 / k as f64);
        let growth = at(&rep, &high, after) / at(&rep, &high, before);
        assert!(growth > 1.5, "window ending at {after}: {growth}");
    }
    let lo = rep.low.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = rep.low.iter().cloned().fold(0.0f64, f64::max);
    // The last echo lands on k = 1 itself and nudges the low norm; it stays
    // within 25% while the high norm grows by more than a decade.
    assert!(hi / lo < 1.25, "low monitor spread {lo}..{hi}");
    let total = high.last().unwrap() / high[0];
    assert!(total > 10.0, "high growth {total}");
}

fn gevrey(lambda: f64, s: f64) -> MultiplierSpec {
    MultiplierSpec::new(MultiplierKind::Gevrey { lambda: TimeProfile::Constant(lambda), s }, 0.0)
}

fn random_field(seed: u64) -> DistributionSpectrum {
    let mesh = FrequencyMesh::new(2, 8.0, 81).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..mesh.n_modes() * mesh.n_eta())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    DistributionSpectrum::from_values(mesh, values, 0.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gevrey_norm_monotone_in_lambda(l1 in 0.0f64..2.0, dl in 0.0f64..1.0, s in 0.1f64..1.0, seed in any::<u64>()) {
        let f = random_field(seed);
        let (a, _) = apply_multiplier(&gevrey(l1, s), &f, 0.0);
        let (b, _) = apply_multiplier(&gevrey(l1 + dl, s), &f, 0.0);
        prop_assert!(norm_hsm(&a, 0.0, 0) <= norm_hsm(&b, 0.0, 0));
    }

    #[test]
    fn composition_commutes(lambda in 0.0f64..1.0, s in 0.0f64..3.0, t in 0.0f64..50.0, seed in any::<u64>()) {
        let f = random_field(seed);
        let p = gevrey(lambda, 1.0 / 3.0);
        let q = MultiplierSpec::new(MultiplierKind::Sobolev { s, m: 0 }, 0.0);
        let r = MultiplierSpec::new(MultiplierKind::DensityWeight { sigma: s }, 0.0);
        let (pq, _) = apply_multiplier(&p.compose(&q).compose(&r), &f, t);
        let (qp, _) = apply_multiplier(&r.compose(&q.compose(&p)), &f, t);
        prop_assert_eq!(pq, qp);
    }

    #[test]
    fn plain_norm_is_quadrature(seed in any::<u64>()) {
        let f = random_field(seed);
        prop_assert_eq!(norm_hsm(&f, 0.0, 0).to_bits(), f.l2_quadrature().to_bits());
    }

    #[test]
    fn basic_symbols_at_least_one(lambda in 0.0f64..2.0, s in 0.0f64..3.0, k in -20i64..20, eta in -500.0f64..500.0) {
        let (g, _) = gevrey(lambda, s).symbol(0.0, k as f64, eta);
        let (h, _) = MultiplierSpec::new(MultiplierKind::Sobolev { s, m: 0 }, 0.0).symbol(0.0, k as f64, eta);
        prop_assert!(g >= 1.0 && h >= 1.0);
    }

    #[test]
    fn big_a_dominates_big_b(
        beta in 1.0f64..5.0, dg in 0.0f64..1.0, mu in 0.5f64..2.0, dn in 0.0f64..0.5, r in 0.0f64..0.5,
        t in 0.0f64..100.0, k in -20i64..20, eta in -500.0f64..500.0,
    ) {
        let eps = 0.05;
        let a = MultiplierSpec::new(MultiplierKind::BigA {
            beta, mu: TimeProfile::Constant(mu), k_const: 10.0, r,
            weight: WeightPolicy::EchoWindow { amplification: 4.0, max_echoes: 8 },
        }, eps);
        let b = MultiplierSpec::new(MultiplierKind::BigB { gamma: beta - dg, nu: TimeProfile::Constant(mu - dn), k_const: 10.0 }, eps);
        prop_assert!(a.log_symbol(t, k as f64, eta) >= b.log_symbol(t, k as f64, eta));
    }
}
