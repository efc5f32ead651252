use crate::linear::DensityTrace;
use crate::spectral::{binomial, bracket2, eta_derivative, DistributionSpectrum};

use super::multiplier::SATURATION_EXPONENT;

/// `( sum_{j<=m} C(m,j) || d_eta^j (S g) ||^2 )^{1/2}` for the symbol
/// `S = exp(log_symbol)`; the velocity weight `<v>^m` acts as
/// `eta`-derivatives. Returns the norm and the saturation flag.
pub fn weighted_norm<L>(f: &DistributionSpectrum, log_symbol: L, m: u32) -> (f64, bool)
where
    L: Fn(f64, f64) -> f64,
{
    let mesh = *f.mesh();
    let mut saturated = false;
    let mut weighted = f.clone();
    for k in mesh.modes() {
        for (j, v) in weighted.row_mut(k).iter_mut().enumerate() {
            let l = log_symbol(k as f64, mesh.eta(j));
            let l = if l > SATURATION_EXPONENT {
                saturated = true;
                SATURATION_EXPONENT
            } else {
                l
            };
            if l != 0.0 {
                *v *= l.exp();
            }
        }
    }
    (weighted_sum(weighted, m).sqrt(), saturated)
}

fn weighted_sum(mut g: DistributionSpectrum, m: u32) -> f64 {
    let mut total = 0.0;
    for j in 0..=m {
        if j > 0 {
            let d_eta = g.mesh().d_eta();
            let mesh = *g.mesh();
            for k in mesh.modes() {
                let d = eta_derivative(g.row(k), d_eta);
                g.row_mut(k).copy_from_slice(&d);
            }
        }
        total += binomial(m, j) * g.l2_squared();
    }
    total
}

/// `||<v>^m <k, eta>^s g||` on the grid. With `s = 0, m = 0` this is exactly
/// [`DistributionSpectrum::l2_quadrature`].
pub fn norm_hsm(f: &DistributionSpectrum, s: f64, m: u32) -> f64 {
    if s == 0.0 {
        return weighted_sum(f.clone(), m).sqrt();
    }
    weighted_norm(f, |k, eta| s * bracket2(k, eta).ln(), m).0
}

/// `( \int |<k, t k>^sigma rho^(t, k)|^2 dt )^{1/2}` by the trapezoid rule.
pub fn density_weighted_norm(trace: &DensityTrace, sigma: f64) -> f64 {
    let k = trace.k as f64;
    let w = |t: f64, v: num_complex::Complex64| bracket2(k, t * k).powf(2.0 * sigma) * v.norm_sqr();
    let mut acc = 0.0;
    for i in 1..trace.len() {
        let (t0, t1) = (trace.times[i - 1], trace.times[i]);
        acc += 0.5 * (t1 - t0) * (w(t0, trace.values[i - 1]) + w(t1, trace.values[i]));
    }
    acc.sqrt()
}
