use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::free_transport::AnalyticInitialDatum;

/// Transform of `f^L = 8 pi eps cos(z) / (1 + v^2)`: `4 pi^2 eps e^{-|eta|}` on `k = +-1`.
#[inline]
pub fn low_mode_symbol(epsilon: f64, k: i64, eta: f64) -> Complex64 {
    if k.abs() == 1 {
        Complex64::new(4.0 * PI * PI * epsilon * (-eta.abs()).exp(), 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Transform of `amplitude cos(k0 z) cos(eta0 v) / (1 + 4 v^2)`:
/// `amplitude (pi/8) (e^{-|eta-eta0|/2} + e^{-|eta+eta0|/2})` on `k = +-k0`.
#[inline]
pub fn high_packet_symbol(amplitude: f64, k0: i64, eta0: f64, k: i64, eta: f64) -> Complex64 {
    if k.abs() == k0.abs() {
        let v = (-0.5 * (eta - eta0).abs()).exp() + (-0.5 * (eta + eta0).abs()).exp();
        Complex64::new(amplitude * PI / 8.0 * v, 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

pub fn low_mode_datum(epsilon: f64) -> AnalyticInitialDatum {
    AnalyticInitialDatum::custom(vec![1], Arc::new(move |k, eta| low_mode_symbol(epsilon, k, eta)))
        .expect("low mode has zero mean")
}

pub fn high_packet_datum(amplitude: f64, k0: i64, eta0: f64) -> AnalyticInitialDatum {
    AnalyticInitialDatum::custom(vec![k0], Arc::new(move |k, eta| high_packet_symbol(amplitude, k0, eta0, k, eta)))
        .expect("packet mode is nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{composite, gauss_legendre};

    /// (1/2pi) \int\int e^{-izk - iv eta} f(z, v) dz dv for f = a cos(k0 z) p(v):
    /// the z-integral gives pi at k = +-k0.
    fn transform(profile: impl Fn(f64) -> f64, eta: f64) -> f64 {
        let rule = gauss_legendre(16);
        let l = 4000.0;
        let body: f64 = composite(&rule, 0.0, l, 40_000, |v| 2.0 * profile(v) * (v * eta).cos());
        body * PI / (2.0 * PI)
    }

    #[test]
    fn low_mode_transform() {
        let eps = 0.05;
        for &eta in &[0.0, 0.7, 2.0] {
            // Tail of \int 2 cos(v eta)/(1+v^2) beyond L is O(1/L); weight 8 pi eps.
            let q = transform(|v| 8.0 * PI * eps / (1.0 + v * v), eta);
            let tail = if eta == 0.0 { 2.0 * 8.0 * PI * eps / 4000.0 * 0.5 } else { 0.0 };
            let v = low_mode_symbol(eps, 1, eta).re;
            assert!((q + tail - v).abs() < 2e-3 * v.max(1e-3), "eta {eta}: {q} vs {v}");
        }
    }

    #[test]
    fn packet_transform() {
        let (amp, eta0) = (0.2, 3.0);
        for &eta in &[0.0, 2.5, 3.0, 5.0] {
            let q = transform(|v| amp * (eta0 * v).cos() / (1.0 + 4.0 * v * v), eta);
            let v = high_packet_symbol(amp, 2, eta0, 2, eta).re;
            assert!((q - v).abs() < 1e-4, "eta {eta}: {q} vs {v}");
        }
    }

    #[test]
    fn data_are_real_and_even() {
        for &e in &[-7.0, -0.3, 4.0] {
            assert_eq!(low_mode_symbol(0.1, -1, -e), low_mode_symbol(0.1, 1, e));
            assert_eq!(high_packet_symbol(1.0, 3, 10.0, -3, -e), high_packet_symbol(1.0, 3, 10.0, 3, e));
        }
        assert_eq!(high_packet_symbol(1.0, 3, 10.0, 2, 10.0), Complex64::new(0.0, 0.0));
    }
}
