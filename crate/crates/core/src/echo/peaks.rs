use serde::Serialize;

use super::config::DEFAULT_FIT_BOUND;
use crate::error::{Error, Result};
use crate::linear::DensityTrace;

/// Peaks below this fraction of the forcing scale are not counted as echoes.
const RESOLUTION_FLOOR: f64 = 1e-12;

/// `[eta0/k for k = k_max..=1]`.
pub fn critical_times(eta0: f64, k_max: usize) -> Vec<f64> {
    (1..=k_max).rev().map(|k| eta0 / k as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub t_peak: f64,
    pub amplitude: f64,
    pub index: usize,
    /// False when the maximum sits on the first or last sample.
    pub interior: bool,
}

/// Global maximum of `|values|` (earliest on ties), refined by a parabola
/// through the maximum and its two neighbours.
pub fn extract_peak(times: &[f64], values: &[num_complex::Complex64]) -> Option<Peak> {
    if values.is_empty() {
        return None;
    }
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if v.norm() > values[best].norm() {
            best = i;
        }
    }
    let y0 = values[best].norm();
    if best == 0 || best + 1 >= values.len() {
        return Some(Peak { t_peak: times[best], amplitude: y0, index: best, interior: false });
    }
    let (ym, yp) = (values[best - 1].norm(), values[best + 1].norm());
    let curv = ym - 2.0 * y0 + yp;
    let (offset, amp) = if curv < 0.0 {
        let d = 0.5 * (ym - yp) / curv;
        (d, y0 - 0.25 * (ym - yp) * d)
    } else {
        (0.0, y0)
    };
    let h = times[best + 1] - times[best];
    Some(Peak { t_peak: times[best] + offset * h, amplitude: amp, index: best, interior: true })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModePeak {
    pub k: i64,
    pub t_peak: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EchoChainReport {
    /// Resolved echoes for `k = k0, k0-1, ..., 1`.
    pub per_mode: Vec<ModePeak>,
    /// Slope of `log amplitude` against `(eps t_peak)^{1/3}`; `None` when the
    /// fit failed (fewer than three echoes or residual over the bound).
    pub fitted_c: Option<f64>,
    pub fit_residual: Option<f64>,
}

/// Collects resolved peaks of modes `k0..=1` from positive-mode traces.
pub fn echo_report(traces: &[DensityTrace], k0: i64, epsilon: f64, scale: f64, fit_bound: f64) -> EchoChainReport {
    let mut per_mode = Vec::new();
    for k in (1..=k0).rev() {
        let Some(tr) = traces.iter().find(|t| t.k == k) else { continue };
        if let Some(p) = extract_peak(&tr.times, &tr.values) {
            if p.interior && p.amplitude > RESOLUTION_FLOOR * scale {
                per_mode.push(ModePeak { k, t_peak: p.t_peak, amplitude: p.amplitude });
            }
        }
    }
    let mut report = EchoChainReport { per_mode, fitted_c: None, fit_residual: None };
    if let Ok((c, r)) = fit_growth_exponent_bounded(&report, epsilon, fit_bound) {
        report.fitted_c = Some(c);
        report.fit_residual = Some(r);
    }
    report
}

pub fn fit_growth_exponent(report: &EchoChainReport, epsilon: f64) -> Result<(f64, f64)> {
    fit_growth_exponent_bounded(report, epsilon, DEFAULT_FIT_BOUND)
}

/// Least squares `log a_k = a + c (eps t_k)^{1/3}`; returns `c` and the RMS residual.
pub fn fit_growth_exponent_bounded(report: &EchoChainReport, epsilon: f64, bound: f64) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = report
        .per_mode
        .iter()
        .filter(|p| p.amplitude > 0.0)
        .map(|p| ((epsilon * p.t_peak).cbrt(), p.amplitude.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Fit(format!("{} resolved echoes, need at least 3", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::Fit("degenerate peak times".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let c = sxy / sxx;
    let a = my - c * mx;
    let residual = (pts.iter().map(|p| (p.1 - a - c * p.0).powi(2)).sum::<f64>() / n).sqrt();
    if residual > bound {
        return Err(Error::Fit(format!("residual {residual:.3e} exceeds bound {bound}")));
    }
    Ok((c, residual))
}
