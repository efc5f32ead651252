use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::conservation::Conserved;
use super::state::{ModelOptions, NonlinearState};
use super::stepper::{integrate, RunLog};
use crate::echo::{
    echo_report, high_packet_symbol, low_mode_symbol, solve_echo_chain, ChainRun, EchoChainConfig, EchoChainReport,
};
use crate::error::{Error, Result};
use crate::linear::{solve_linear_volterra_on, DensityTrace, VolterraKernel};
use crate::spectral::{BackgroundProfile, DistributionSpectrum};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub enum Integrator {
    #[default]
    Rk4,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub chain: EchoChainConfig,
    pub integrator: Integrator,
    pub record_every: usize,
    pub snapshot_every: Option<usize>,
    #[serde(skip)]
    pub options: ModelOptions,
    /// Also solve the truncated echo chain and report the deviation.
    pub compare_reduced: bool,
}

impl ExperimentConfig {
    pub fn new(chain: EchoChainConfig) -> Self {
        Self {
            chain,
            integrator: Integrator::Rk4,
            record_every: 1,
            snapshot_every: None,
            options: ModelOptions::default(),
            compare_reduced: true,
        }
    }

    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = self.chain.validate()?;
        if self.record_every == 0 {
            return Err(Error::domain("record_every must be at least 1"));
        }
        if self.snapshot_every == Some(0) {
            return Err(Error::domain("snapshot_every must be at least 1"));
        }
        let k0 = self.chain.k0 as f64;
        if k0 > 1.0 {
            let gap = self.chain.eta0 / (k0 * (k0 - 1.0));
            if self.record_every as f64 * self.chain.grid.dt() > gap {
                return Err(Error::Domain(format!(
                    "record interval {} exceeds the smallest critical-time gap {gap}",
                    self.record_every as f64 * self.chain.grid.dt()
                )));
            }
        }
        let km = self.chain.grid.k_max();
        if self.chain.k0 as usize > km {
            return Err(Error::Domain(format!("k0 = {} exceeds the mesh k_max = {km}", self.chain.k0)));
        }
        if self.compare_reduced && self.chain.k_trunc != km {
            warnings.push(format!("chain truncation {} differs from mesh k_max {km}", self.chain.k_trunc));
        }
        Ok(warnings)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentOutcome {
    /// Full `rho^(t, k)`, `k = 1..=k_max`.
    pub traces: Vec<DensityTrace>,
    /// `traces` with the linear response to the low mode removed from `k = 1`.
    pub echo_traces: Vec<DensityTrace>,
    pub report: EchoChainReport,
    pub reduced: Option<ChainRun>,
    /// `sup |echo trace - chain trace| / sup |chain trace|` over shared modes.
    pub error_vs_reduced: Option<f64>,
    pub conservation: Vec<Conserved>,
    #[serde(skip)]
    pub snapshots: Vec<DistributionSpectrum>,
    pub aliasing: bool,
    pub warnings: Vec<String>,
}

/// Low mode plus the high packet at `t_in`, around a Lorentzian background
/// of size `delta` (none when `delta = 0`).
pub fn initial_state(cfg: &ExperimentConfig) -> Result<NonlinearState> {
    let c = &cfg.chain;
    let amp = c.packet_amplitude();
    let (eps, k0, eta0) = (c.epsilon, c.k0, c.eta0);
    let g = DistributionSpectrum::from_fn(*c.grid.mesh(), c.t_in, |k, eta| {
        low_mode_symbol(eps, k, eta) + high_packet_symbol(amp, k0, eta0, k, eta)
    });
    let background = if c.delta > 0.0 { Some(BackgroundProfile::lorentzian(c.delta)?) } else { None };
    Ok(NonlinearState::new(g, background, c.potential).with_options(cfg.options))
}

fn self_kernel(c: &EchoChainConfig) -> Result<VolterraKernel> {
    Ok(if c.delta > 0.0 {
        VolterraKernel::new(c.potential, BackgroundProfile::lorentzian(c.delta)?)
    } else {
        VolterraKernel::Zero
    })
}

/// Marches the experiment's data at `t_in` backward to `t_target < t_in`
/// with the same stepper and a negated step.
pub fn solve_backward(cfg: &ExperimentConfig, t_target: f64) -> Result<(NonlinearState, RunLog)> {
    cfg.validate()?;
    if !(t_target < cfg.chain.t_in && t_target >= 0.0) {
        return Err(Error::domain("backward target must lie in [0, t_in)"));
    }
    let mut state = initial_state(cfg)?;
    let log = integrate(&mut state, t_target, -cfg.chain.grid.dt(), cfg.record_every, cfg.snapshot_every)?;
    Ok((state, log))
}

/// Densities of the linearized problem with the same data, from the
/// density Volterra equation, for `k = 1..=k_max` on `[t_start, t_end]`.
pub fn linear_reference(c: &EchoChainConfig, t_start: f64, t_end: f64, dt: f64) -> Result<Vec<DensityTrace>> {
    let kernel = self_kernel(c)?;
    let amp = c.packet_amplitude();
    let (eps, k0, eta0) = (c.epsilon, c.k0, c.eta0);
    let forcing = move |k: i64, t: f64| {
        let eta = k as f64 * t;
        (low_mode_symbol(eps, k, eta) + high_packet_symbol(amp, k0, eta0, k, eta)) * (2.0 * PI)
    };
    (1..=c.grid.k_max() as i64)
        .map(|k| Ok(solve_linear_volterra_on(&kernel, forcing, k, t_start, dt, t_end)?.trace))
        .collect()
}

/// Piecewise linear reading of a trace at `t`, or `None` outside its span.
fn trace_at(tr: &DensityTrace, t: f64) -> Option<Complex64> {
    let (first, last) = (*tr.times.first()?, *tr.times.last()?);
    let tol = 1e-9 * (1.0 + t.abs());
    if t < first - tol || t > last + tol {
        return None;
    }
    let i = tr.times.partition_point(|&s| s < t);
    if i < tr.times.len() && (tr.times[i] - t).abs() <= tol {
        return Some(tr.values[i]);
    }
    if i == 0 {
        return Some(tr.values[0]);
    }
    if i >= tr.times.len() {
        return Some(*tr.values.last()?);
    }
    let (t0, t1) = (tr.times[i - 1], tr.times[i]);
    let w = (t - t0) / (t1 - t0);
    Some(tr.values[i - 1] * (1.0 - w) + tr.values[i] * w)
}

fn relative_deviation(full: &[DensityTrace], reduced: &[DensityTrace]) -> Option<f64> {
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for r in reduced {
        let Some(f) = full.iter().find(|f| f.k == r.k) else { continue };
        den = den.max(r.max_abs());
        for (t, v) in f.times.iter().zip(&f.values) {
            if let Some(w) = trace_at(r, *t) {
                num = num.max((v - w).norm());
            }
        }
    }
    (den > 0.0).then(|| num / den)
}

/// Runs the full nonlinear two-packet experiment from `t_in` to `t_final`.
pub fn run_echo_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let mut warnings = cfg.validate()?;
    let c = &cfg.chain;
    let mut state = initial_state(cfg)?;
    let log = integrate(&mut state, c.grid.t_final(), c.grid.dt(), cfg.record_every, cfg.snapshot_every)?;
    if log.aliasing {
        warnings.push("aliasing: content reached the eta boundary; enlarge eta_max".to_string());
    }

    // The low mode alone evolves by the linear Volterra equation.
    let kernel = self_kernel(c)?;
    let eps = c.epsilon;
    let low = solve_linear_volterra_on(
        &kernel,
        move |k: i64, t: f64| low_mode_symbol(eps, k, k as f64 * t) * (2.0 * PI),
        1,
        c.t_in,
        c.grid.dt(),
        c.grid.t_final(),
    )?
    .trace;
    let mut echo_traces = log.traces.clone();
    if let Some(tr) = echo_traces.iter_mut().find(|tr| tr.k == 1) {
        for (t, v) in tr.times.iter().zip(tr.values.iter_mut()) {
            *v -= trace_at(&low, *t).ok_or_else(|| Error::domain("low-mode reference does not cover the run"))?;
        }
    }
    let report = echo_report(&echo_traces, c.k0, c.epsilon, 2.0 * PI * c.packet_amplitude(), c.fit_bound);

    let (reduced, error_vs_reduced) = if cfg.compare_reduced {
        let (run, _) = solve_echo_chain(c)?;
        let err = relative_deviation(&echo_traces, &run.traces);
        (Some(run), err)
    } else {
        (None, None)
    };

    Ok(ExperimentOutcome {
        traces: log.traces,
        echo_traces,
        report,
        reduced,
        error_vs_reduced,
        conservation: log.conservation,
        snapshots: log.snapshots,
        aliasing: log.aliasing,
        warnings,
    })
}
