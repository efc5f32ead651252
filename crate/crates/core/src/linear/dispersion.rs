use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::kernel::VolterraKernel;
use crate::error::{Error, Result};
use crate::quadrature::{composite, gauss_legendre};
use crate::spectral::BackgroundProfile;

const DEFAULT_SAMPLES: usize = 4096;
const MAX_SAMPLES: usize = 1 << 21;
const TAIL_TARGET: f64 = 1e-12;
const TAIL_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub k: i64,
    pub stable: bool,
    /// Number of zeros of `D(k, .)` in the unstable half-plane `Im xi < 0`.
    pub winding_number: i64,
    /// Largest real part of the Laplace-variable roots `p = i xi`
    /// (closed-form Lorentzian only).
    pub nearest_root_real_part: Option<f64>,
}

/// `D(k, xi) = 1 + \int_0^inf K(k, s) e^{-i xi s} ds`.
pub fn dispersion_function(kernel: &VolterraKernel, k: i64, xi: Complex64) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match *kernel {
        VolterraKernel::Zero => Ok(one),
        VolterraKernel::Constant { c } => {
            if xi.im >= 0.0 && xi.norm() == 0.0 {
                return Err(Error::domain("constant kernel transform is singular at xi = 0"));
            }
            Ok(one + c / (i * xi))
        }
        VolterraKernel::Plasma { potential, background } => {
            if k == 0 {
                return Ok(one);
            }
            let kf = k as f64;
            let w = potential.symbol_or_zero(k);
            match background {
                BackgroundProfile::Lorentzian { delta } => {
                    // \int_0^inf s e^{-(|k| + i xi) s} ds = (|k| + i xi)^{-2}
                    let z = kf.abs() + i * xi;
                    if z.norm() == 0.0 {
                        return Err(Error::domain("xi sits on the pole i|k|"));
                    }
                    Ok(one + delta * w * kf * kf / (z * z))
                }
                BackgroundProfile::Maxwellian { theta } => {
                    if xi.im > 0.0 {
                        return Err(Error::domain("quadrature dispersion needs Im xi <= 0"));
                    }
                    maxwellian_dispersion(w * kf * kf / (4.0 * PI * PI), 0.5 * theta * kf * kf, xi)
                }
            }
        }
    }
}

/// `1 + \int_0^inf c s e^{-a s^2} e^{-i xi s} ds` by composite Gauss-Legendre.
fn maxwellian_dispersion(c: f64, a: f64, xi: Complex64) -> Result<Complex64> {
    // |tail beyond S| <= |c| e^{-a S^2} / (2a) when Im xi <= 0
    let s_max = ((c.abs() / (2.0 * a * TAIL_TARGET)).max(1.0).ln() / a).sqrt().max(1.0 / a.sqrt());
    let tail = c.abs() * (-a * s_max * s_max).exp() / (2.0 * a);
    if tail > TAIL_LIMIT {
        return Err(Error::NonConvergence { tail });
    }
    let width = (1.0 / (1.0 + xi.re.abs())).min(0.25 / a.sqrt());
    let panels = (s_max / width).ceil().max(4.0) as usize;
    let rule = gauss_legendre(16);
    let minus_i_xi = Complex64::new(0.0, -1.0) * xi;
    let integral: Complex64 =
        composite(&rule, 0.0, s_max, panels, |s| (minus_i_xi * s).exp() * (c * s * (-a * s * s).exp()));
    Ok(Complex64::new(1.0, 0.0) + integral)
}

/// Bound `B` with `|D(k, xi) - 1| <= B / |xi|^2` on the real line
/// (two integrations by parts; `K(0) = 0`).
fn large_xi_bound(kernel: &VolterraKernel, k: i64) -> f64 {
    let n = 20_000;
    let kf = (k as f64).abs().max(1e-300);
    let s_end = match *kernel {
        VolterraKernel::Plasma { background: BackgroundProfile::Maxwellian { theta }, .. } => {
            12.0 / (theta.sqrt() * kf)
        }
        _ => 60.0 / kf,
    };
    let h = s_end / n as f64;
    let f = |s: f64| kernel.evaluate(k, s);
    let d1_0 = (f(h) - f(0.0)) / h;
    let mut total = 0.0;
    for j in 1..n {
        let s = j as f64 * h;
        total += ((f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h)).abs() * h;
    }
    d1_0.abs() + total
}

pub fn penrose_check(kernel: &VolterraKernel, k: i64) -> Result<StabilityVerdict> {
    penrose_check_with(kernel, k, DEFAULT_SAMPLES)
}

/// Argument principle along the real `xi` line, sampled as `xi = tan(theta)`,
/// doubling the sample count until every increment is below `pi/2`.
pub fn penrose_check_with(kernel: &VolterraKernel, k: i64, samples: usize) -> Result<StabilityVerdict> {
    let closed_form =
        !matches!(kernel, VolterraKernel::Plasma { background: BackgroundProfile::Maxwellian { .. }, .. });
    // Beyond |xi| = xi_cap the curve stays in |D - 1| <= 1/2, so joining it to
    // D(inf) = 1 with a principal-value increment is exact.
    let theta_cap = if closed_form { 0.5 * PI } else { (2.0 * large_xi_bound(kernel, k)).sqrt().max(1.0).atan() };
    let mut n = samples.max(16);
    loop {
        let mut pts = Vec::with_capacity(n + 1);
        pts.push(Complex64::new(1.0, 0.0));
        let interior: Vec<Result<Complex64>> = (1..n)
            .into_par_iter()
            .map(|i| {
                let theta = -theta_cap + 2.0 * theta_cap * i as f64 / n as f64;
                dispersion_function(kernel, k, Complex64::new(theta.tan(), 0.0))
            })
            .collect();
        for d in interior {
            pts.push(d?);
        }
        pts.push(Complex64::new(1.0, 0.0));

        let mut total = 0.0;
        let mut worst = 0.0f64;
        for w in pts.windows(2) {
            if w[0].norm() == 0.0 || w[1].norm() == 0.0 {
                return Err(Error::domain("dispersion function vanishes on the real axis"));
            }
            let step = (w[1] / w[0]).arg();
            worst = worst.max(step.abs());
            total += step;
        }
        if worst <= 0.5 * PI {
            let winding_number = -(total / (2.0 * PI)).round() as i64;
            return Ok(StabilityVerdict {
                k,
                stable: winding_number == 0,
                winding_number,
                nearest_root_real_part: lorentzian_growth_rate(kernel, k),
            });
        }
        if n >= MAX_SAMPLES {
            return Err(Error::Resolution { jump: worst, samples: n });
        }
        n *= 2;
    }
}

/// Roots `p = -|k| +- |k| sqrt(-delta W)` of the Lorentzian dispersion relation.
fn lorentzian_growth_rate(kernel: &VolterraKernel, k: i64) -> Option<f64> {
    match *kernel {
        VolterraKernel::Plasma { potential, background: BackgroundProfile::Lorentzian { delta } } if k != 0 => {
            let ka = (k as f64).abs();
            let r = Complex64::new(-delta * potential.symbol_or_zero(k), 0.0).sqrt();
            Some(-ka + ka * r.re.abs())
        }
        _ => None,
    }
}
