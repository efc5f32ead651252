use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::kernel::VolterraKernel;
use super::volterra::{solve_linear_volterra, InstabilityAlert};
use crate::error::{Error, Result};
use crate::free_transport::{density_free, AnalyticInitialDatum};
use crate::norms::norm_hsm;
use crate::spectral::{DistributionSpectrum, SpectralGrid};

const DEFAULT_SAMPLES: usize = 64;

/// Profile rate of the linearized equation,
/// `d_t g^(k, eta) = -(1/4pi^2) k W(k) rho^(t, k) (eta - k t) f0^(eta - k t)`.
pub fn duhamel_rate(kernel: &VolterraKernel, k: i64, rho: Complex64, t: f64, eta: f64) -> Result<Complex64> {
    match *kernel {
        VolterraKernel::Zero => Ok(Complex64::new(0.0, 0.0)),
        VolterraKernel::Constant { .. } => Err(Error::domain("constant kernel has no profile dynamics")),
        VolterraKernel::Plasma { potential, background } => {
            if k == 0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let kf = k as f64;
            let x = eta - kf * t;
            Ok(rho * (-kf * potential.symbol_or_zero(k) * x * background.symbol(x) / (4.0 * PI * PI)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatteringReport {
    /// `g^(t_final)`, the estimate of the scattering state.
    #[serde(skip)]
    pub h_infty: DistributionSpectrum,
    pub times: Vec<f64>,
    /// `||g(t) - g(t_final)||_{H^{0,1}}` at `times`.
    pub decay_m1: Vec<f64>,
    /// Same in `H^{0,2}`.
    pub decay_m2: Vec<f64>,
    /// `||g(t_final/2) - g(t_final)||_{H^{0,1}}`, bounding the remaining change.
    pub tail_bound: f64,
    pub alert: Option<InstabilityAlert>,
}

pub fn linear_profile_scattering(
    datum: &AnalyticInitialDatum,
    kernel: &VolterraKernel,
    grid: &SpectralGrid,
) -> Result<ScatteringReport> {
    linear_profile_scattering_with(datum, kernel, grid, DEFAULT_SAMPLES)
}

/// Solves the density equation for every positive mode, rebuilds the profile
/// by trapezoidal Duhamel integration and reports convergence to `g(t_final)`.
pub fn linear_profile_scattering_with(
    datum: &AnalyticInitialDatum,
    kernel: &VolterraKernel,
    grid: &SpectralGrid,
    samples: usize,
) -> Result<ScatteringReport> {
    let mesh = *grid.mesh();
    let dt = grid.dt();
    let steps = grid.steps_from(0.0);
    let stride = (steps / samples.max(1)).max(1);
    let sample_steps: Vec<usize> = (0..=steps).filter(|n| n % stride == 0 || *n == steps).collect();
    let etas = mesh.etas();
    let forcing = |k: i64, t: f64| density_free(datum, t, k);

    // Per positive mode: snapshots of the row at the sample steps.
    type ModeOut = (Vec<Vec<Complex64>>, Option<InstabilityAlert>);
    let per_mode: Vec<ModeOut> = (1..=mesh.k_max() as i64)
        .into_par_iter()
        .map(|k| -> Result<ModeOut> {
            let run = solve_linear_volterra(kernel, forcing, grid, k)?;
            let mut row: Vec<Complex64> = etas.iter().map(|&e| datum.evaluate(k, e)).collect();
            let mut snaps = Vec::with_capacity(sample_steps.len());
            let rate = |n: usize, out: &mut Vec<Complex64>| -> Result<()> {
                let t = n as f64 * dt;
                let rho = run.trace.values[n];
                for (o, &e) in out.iter_mut().zip(&etas) {
                    *o = duhamel_rate(kernel, k, rho, t, e)?;
                }
                Ok(())
            };
            let mut r0 = vec![Complex64::new(0.0, 0.0); etas.len()];
            let mut r1 = r0.clone();
            let available = run.trace.len() - 1;
            rate(0, &mut r0)?;
            let mut next_sample = 0;
            for n in 0..=steps {
                if n > 0 && n <= available {
                    rate(n, &mut r1)?;
                    for ((g, a), b) in row.iter_mut().zip(&r0).zip(&r1) {
                        *g += (a + b) * (0.5 * dt);
                    }
                    std::mem::swap(&mut r0, &mut r1);
                }
                if next_sample < sample_steps.len() && sample_steps[next_sample] == n {
                    snaps.push(row.clone());
                    next_sample += 1;
                }
            }
            Ok((snaps, run.alert))
        })
        .collect::<Result<_>>()?;

    let build = |s: usize| {
        let mut f = DistributionSpectrum::zeros(mesh, sample_steps[s] as f64 * dt);
        let n = mesh.n_eta();
        for (i, (snaps, _)) in per_mode.iter().enumerate() {
            let k = i as i64 + 1;
            f.row_mut(k).copy_from_slice(&snaps[s]);
            let neg: Vec<Complex64> = (0..n).map(|j| snaps[s][n - 1 - j].conj()).collect();
            f.row_mut(-k).copy_from_slice(&neg);
        }
        f
    };
    let last = sample_steps.len() - 1;
    let h_infty = build(last);
    let mut decay_m1 = Vec::with_capacity(sample_steps.len());
    let mut decay_m2 = Vec::with_capacity(sample_steps.len());
    for s in 0..sample_steps.len() {
        let mut diff = build(s);
        diff.axpy(-1.0, &h_infty);
        decay_m1.push(norm_hsm(&diff, 0.0, 1));
        decay_m2.push(norm_hsm(&diff, 0.0, 2));
    }
    let half = sample_steps.iter().position(|&n| n as f64 * dt >= 0.5 * grid.t_final()).unwrap_or(last);
    let alert = per_mode.iter().filter_map(|(_, a)| *a).next();
    Ok(ScatteringReport {
        h_infty,
        times: sample_steps.iter().map(|&n| n as f64 * dt).collect(),
        tail_bound: decay_m1[half],
        decay_m1,
        decay_m2,
        alert,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{make_grid, BackgroundProfile, PotentialLaw};

    #[test]
    fn zero_kernel_keeps_profile_fixed() {
        let grid = make_grid(2, 60.0, 601, 0.1, 20.0).unwrap();
        let d = AnalyticInitialDatum::orr_packet(0.5, 10.0, 1).unwrap();
        let rep = linear_profile_scattering(&d, &VolterraKernel::Zero, &grid).unwrap();
        assert!(rep.decay_m1.iter().all(|&v| v == 0.0));
        assert!(rep.decay_m2.iter().all(|&v| v == 0.0));
        assert_eq!(rep.h_infty, d.to_spectrum(*grid.mesh(), rep.h_infty.time()));
    }

    #[test]
    fn rate_reproduces_volterra_kernel() {
        // 2 pi * (rate integrated along eta = k t) equals -K(k, t - tau) rho(tau).
        let w = PotentialLaw::coulomb(1.0).unwrap();
        let kern = VolterraKernel::new(w, BackgroundProfile::lorentzian(0.01).unwrap());
        let (k, t, tau) = (2i64, 3.0, 1.25);
        let rho = Complex64::new(0.7, -0.2);
        let r = duhamel_rate(&kern, k, rho, tau, k as f64 * t).unwrap() * (2.0 * PI);
        let expect = -rho * kern.evaluate(k, t - tau);
        assert!((r - expect).norm() < 1e-15);
    }
}
