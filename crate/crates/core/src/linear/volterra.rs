use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::kernel::VolterraKernel;
use crate::error::{Error, Result};
use crate::spectral::SpectralGrid;

/// Magnitude at which marching stops and an instability alert is raised.
pub const ALERT_THRESHOLD: f64 = 1e12;

/// Kernel samples below this fraction of the peak are dropped from the memory sum.
const KERNEL_CUTOFF: f64 = 1e-20;

/// Time series `rho^(t, k)` for one mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityTrace {
    pub k: i64,
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl DensityTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }

    /// Trace of mode `-k` (complex conjugate).
    pub fn mirrored(&self) -> Self {
        Self { k: -self.k, times: self.times.clone(), values: self.values.iter().map(|v| v.conj()).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InstabilityAlert {
    pub k: i64,
    pub time: f64,
    pub magnitude: f64,
}

/// A trace plus the alert that truncated it, if any.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearRun {
    pub trace: DensityTrace,
    pub alert: Option<InstabilityAlert>,
}

/// Product-trapezoid marching of `rho(t) = F(k, t) - \int_0^t K(k, t - tau) rho(tau) dtau`
/// on `[0, t_final]` with the grid's step.
pub fn solve_linear_volterra<F>(kernel: &VolterraKernel, forcing: F, grid: &SpectralGrid, k: i64) -> Result<LinearRun>
where
    F: Fn(i64, f64) -> Complex64,
{
    solve_linear_volterra_on(kernel, forcing, k, 0.0, grid.dt(), grid.t_final())
}

/// As [`solve_linear_volterra`] on `[t0, t_final]` with memory starting at `t0`.
pub fn solve_linear_volterra_on<F>(
    kernel: &VolterraKernel,
    forcing: F,
    k: i64,
    t0: f64,
    dt: f64,
    t_final: f64,
) -> Result<LinearRun>
where
    F: Fn(i64, f64) -> Complex64,
{
    if !(dt > 0.0 && t_final > t0) {
        return Err(Error::domain("need dt > 0 and t_final > t0"));
    }
    let steps = ((t_final - t0) / dt - 1e-9).ceil() as usize;
    let kern: Vec<f64> = (0..=steps).map(|m| kernel.evaluate(k, m as f64 * dt)).collect();
    let peak = kern.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let reach = kern.iter().rposition(|v| v.abs() > KERNEL_CUTOFF * peak).unwrap_or(0);
    let diag = 1.0 + 0.5 * dt * kern[0];
    if diag == 0.0 {
        return Err(Error::domain("singular implicit step (1 + dt K(0)/2 = 0)"));
    }

    let mut times = Vec::with_capacity(steps + 1);
    let mut values: Vec<Complex64> = Vec::with_capacity(steps + 1);
    let mut alert = None;
    for n in 0..=steps {
        let t = t0 + n as f64 * dt;
        let mut mem = Complex64::new(0.0, 0.0);
        if n > 0 && reach > 0 {
            if n <= reach {
                mem += values[0] * (0.5 * kern[n]);
            }
            let lo = if n > reach { n - reach } else { 1 };
            for j in lo..n {
                mem += values[j] * kern[n - j];
            }
        }
        // The memory integral is empty at t0.
        let rho = if n == 0 { forcing(k, t) } else { (forcing(k, t) - mem * dt) / diag };
        times.push(t);
        values.push(rho);
        if !(rho.norm() <= ALERT_THRESHOLD) {
            alert = Some(InstabilityAlert { k, time: t, magnitude: rho.norm() });
            break;
        }
    }
    Ok(LinearRun { trace: DensityTrace { k, times, values }, alert })
}

/// Independent modes solved in parallel; output order follows `modes`.
pub fn solve_linear_modes<F>(
    kernel: &VolterraKernel,
    forcing: F,
    grid: &SpectralGrid,
    modes: &[i64],
) -> Result<Vec<LinearRun>>
where
    F: Fn(i64, f64) -> Complex64 + Sync,
{
    modes.par_iter().map(|&k| solve_linear_volterra(kernel, &forcing, grid, k)).collect()
}
