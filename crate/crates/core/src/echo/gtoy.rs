use std::f64::consts::PI;

use num_complex::Complex64;

use super::config::EchoChainConfig;
use super::data::high_packet_symbol;
use crate::error::{Error, Result};
use crate::linear::DensityTrace;
use crate::spectral::DistributionSpectrum;

const WINDOW: f64 = 45.0;

/// Rate of the distribution-side toy model at trace sample `n`:
/// `d_t g^(k,eta) = -(eps/2pi) sum_{l=k+-1} rho^(t,l) W(l) l (eta - k t) e^{-|eta - l t|}`.
/// Sampling `2 pi g(t, k, k t)` of its solution reproduces the density toy system.
pub fn gtoy_rate(cfg: &EchoChainConfig, traces: &[DensityTrace], n: usize) -> Result<DistributionSpectrum> {
    let mesh = *cfg.grid.mesh();
    let first = traces.first().ok_or_else(|| Error::domain("no density traces"))?;
    let t = first.times[n];
    let mut out = DistributionSpectrum::zeros(mesh, t);
    let d_eta = mesh.d_eta();
    let rho = |l: i64| -> Complex64 {
        let v = traces.iter().find(|tr| tr.k == l.abs()).map_or(Complex64::new(0.0, 0.0), |tr| tr.values[n]);
        if l < 0 {
            v.conj()
        } else {
            v
        }
    };
    let km = mesh.k_max() as i64;
    for k in -km..=km {
        for l in [k - 1, k + 1] {
            if l == 0 {
                continue;
            }
            let r = rho(l);
            let c = -cfg.epsilon / (2.0 * PI) * cfg.potential.symbol_or_zero(l) * l as f64;
            if r.norm() == 0.0 || c == 0.0 {
                continue;
            }
            let centre = l as f64 * t;
            if centre.abs() > mesh.eta_max() {
                return Err(Error::OutOfGrid { eta: centre, eta_max: mesh.eta_max() });
            }
            let lo = mesh.position(centre - WINDOW).ceil().max(0.0) as usize;
            let hi = (mesh.position(centre + WINDOW).floor() as usize).min(mesh.n_eta() - 1);
            let row = out.row_mut(k);
            for (j, v) in row.iter_mut().enumerate().take(hi + 1).skip(lo) {
                let eta = (j as f64 - mesh.mid() as f64) * d_eta;
                *v += r * (c * (eta - k as f64 * t) * (-(eta - centre).abs()).exp());
            }
        }
    }
    Ok(out)
}

/// Integrates the distribution-side toy model from the packet datum at
/// `t_in` along the trace times (trapezoid rule) and records every
/// `record_every` samples, including the first and last.
pub fn solve_gtoy(
    cfg: &EchoChainConfig,
    traces: &[DensityTrace],
    record_every: usize,
) -> Result<Vec<DistributionSpectrum>> {
    let mesh = *cfg.grid.mesh();
    let first = traces.first().ok_or_else(|| Error::domain("no density traces"))?;
    let (amp, k0, eta0) = (cfg.packet_amplitude(), cfg.k0, cfg.eta0);
    let mut g = DistributionSpectrum::from_fn(mesh, first.times[0], |k, eta| high_packet_symbol(amp, k0, eta0, k, eta));
    let every = record_every.max(1);
    let mut series = vec![g.clone()];
    let mut r0 = gtoy_rate(cfg, traces, 0)?;
    let last = first.len() - 1;
    for n in 1..=last {
        let r1 = gtoy_rate(cfg, traces, n)?;
        let h = first.times[n] - first.times[n - 1];
        g.axpy(0.5 * h, &r0);
        g.axpy(0.5 * h, &r1);
        g.set_time(first.times[n]);
        r0 = r1;
        if n % every == 0 || n == last {
            series.push(g.clone());
        }
    }
    Ok(series)
}
