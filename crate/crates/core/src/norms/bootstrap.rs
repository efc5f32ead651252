use serde::Serialize;

use super::multiplier::{MultiplierKind, MultiplierSpec};
use super::norm::weighted_norm;
use crate::linear::DensityTrace;
use crate::spectral::{bracket2, DistributionSpectrum};

/// Multipliers and scales for the bootstrap monitors.
#[derive(Debug, Clone)]
pub struct BootstrapSpecs {
    pub a: MultiplierSpec,
    pub b: MultiplierSpec,
    pub epsilon: f64,
    pub sigma: f64,
}

/// Monitor curves, each divided by its postulated bound shape.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapReport {
    pub times: Vec<f64>,
    /// `||<v> <grad>^3 A g|| / (eps^2 <t>^{5/2})`
    pub high: Vec<f64>,
    /// `||<k, t k>^2 A rho||_{L^2_t} / eps^2`
    pub high_density: Vec<f64>,
    /// `||<v> A g|| / eps^2`
    pub mid: Vec<f64>,
    /// `||B rho||_{L^2_t} / eps^{sigma/5}`
    pub low_density: Vec<f64>,
    /// `||<v> B g|| / eps^{sigma/5}`
    pub low: Vec<f64>,
    /// `\int ||A rho||^2 dtau / eps^2`
    pub mid_density_integral: Vec<f64>,
    pub saturated: bool,
}

/// Evaluates the monitors at the snapshot times from recorded fields and
/// positive-mode density traces (negative modes count through symmetry).
pub fn bootstrap_monitor(
    fields: &[DistributionSpectrum],
    traces: &[DensityTrace],
    specs: &BootstrapSpecs,
) -> BootstrapReport {
    let eps = specs.epsilon;
    let low_scale = eps.powf(specs.sigma / 5.0);
    let cube = MultiplierSpec::new(MultiplierKind::Bracket { power: 3.0 }, eps);
    let high_spec = specs.a.compose(&cube);
    let mut saturated = false;

    // Running time integrals of the weighted densities over the trace times.
    let density_integrals = |spec: &MultiplierSpec, extra: f64, sat: &mut bool| -> Vec<(f64, f64)> {
        let Some(first) = traces.first() else { return Vec::new() };
        let mut out = Vec::with_capacity(first.len());
        let mut acc = 0.0;
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..first.len() {
            let t = first.times[i];
            let mut v = 0.0;
            for tr in traces {
                let k = tr.k as f64;
                let (s, flag) = spec.symbol(t, k, k * t);
                *sat |= flag;
                v += 2.0 * (bracket2(k, t * k).powf(extra) * s * tr.values[i].norm()).powi(2);
            }
            if let Some((tp, vp)) = prev {
                acc += 0.5 * (t - tp) * (v + vp);
            }
            prev = Some((t, v));
            out.push((t, acc));
        }
        out
    };
    let a_int = density_integrals(&specs.a, 2.0, &mut saturated);
    let a_plain = density_integrals(&specs.a, 0.0, &mut saturated);
    let b_int = density_integrals(&specs.b, 0.0, &mut saturated);
    let upto = |series: &[(f64, f64)], t: f64| -> f64 {
        series.iter().take_while(|(s, _)| *s <= t + 1e-9).last().map_or(0.0, |x| x.1)
    };

    let mut rep = BootstrapReport {
        times: Vec::new(),
        high: Vec::new(),
        high_density: Vec::new(),
        mid: Vec::new(),
        low_density: Vec::new(),
        low: Vec::new(),
        mid_density_integral: Vec::new(),
        saturated: false,
    };
    for f in fields {
        let t = f.time();
        let norm_of = |spec: &MultiplierSpec, sat: &mut bool| {
            let (v, s) = weighted_norm(f, |k, e| spec.log_symbol(t, k, e), 1);
            *sat |= s;
            v
        };
        let bracket_t = bracket2(0.0, t);
        rep.times.push(t);
        rep.high.push(norm_of(&high_spec, &mut saturated) / (eps * eps * bracket_t.powf(2.5)));
        rep.mid.push(norm_of(&specs.a, &mut saturated) / (eps * eps));
        rep.low.push(norm_of(&specs.b, &mut saturated) / low_scale);
        rep.high_density.push(upto(&a_int, t).sqrt() / (eps * eps));
        rep.low_density.push(upto(&b_int, t).sqrt() / low_scale);
        rep.mid_density_integral.push(upto(&a_plain, t) / (eps * eps));
    }
    rep.saturated = saturated;
    rep
}
