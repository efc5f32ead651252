use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::config::EchoChainConfig;
use super::data::high_packet_symbol;
use super::peaks::{echo_report, EchoChainReport};
use crate::error::Result;
use crate::linear::{DensityTrace, InstabilityAlert, VolterraKernel, ALERT_THRESHOLD};
use crate::spectral::{BackgroundProfile, PotentialLaw};

/// Coupling terms with `|k t - l tau|` beyond this are dropped (`e^{-45} ~ 3e-20`).
const COUPLING_WINDOW: f64 = 45.0;
const KERNEL_CUTOFF: f64 = 1e-20;

/// Positive-mode traces `k = 1..=k_trunc` (mode `-k` is the conjugate).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainRun {
    pub traces: Vec<DensityTrace>,
    pub alert: Option<InstabilityAlert>,
}

impl ChainRun {
    pub fn trace(&self, k: i64) -> Option<&DensityTrace> {
        self.traces.iter().find(|t| t.k == k)
    }
}

struct System<'a> {
    k_trunc: usize,
    epsilon: f64,
    potential: PotentialLaw,
    self_kernel: VolterraKernel,
    forcing: &'a dyn Fn(i64, f64) -> Complex64,
    t0: f64,
    dt: f64,
    steps: usize,
}

/// Marches
/// ```text
/// rho(t,k) = F_k(t) - \int K(k, t-tau) rho(tau,k) dtau
///     - eps sum_{l = k+-1} \int rho(tau,l) W(l) l k (t - tau) e^{-|k t - l tau|} dtau
/// ```
/// with the product trapezoid rule. Every memory term vanishes at `tau = t`,
/// so each step is explicit.
fn march(sys: &System) -> ChainRun {
    let kt = sys.k_trunc;
    let dt = sys.dt;
    let time = |j: usize| sys.t0 + j as f64 * dt;

    let kernels: Vec<(Vec<f64>, usize)> = (1..=kt as i64)
        .map(|k| {
            let v: Vec<f64> = (0..=sys.steps).map(|m| sys.self_kernel.evaluate(k, m as f64 * dt)).collect();
            let peak = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            let reach = v.iter().rposition(|x| x.abs() > KERNEL_CUTOFF * peak).unwrap_or(0);
            (v, reach)
        })
        .collect();
    let diag: Vec<f64> = kernels.iter().map(|(v, _)| 1.0 + 0.5 * dt * v[0]).collect();
    let coupling =
        |k: usize, l: usize| -> f64 { sys.epsilon * sys.potential.symbol_or_zero(l as i64) * l as f64 * k as f64 };

    let mut values: Vec<Vec<Complex64>> = vec![Vec::with_capacity(sys.steps + 1); kt];
    let mut times = Vec::with_capacity(sys.steps + 1);
    let mut alert = None;

    'outer: for n in 0..=sys.steps {
        let t = time(n);
        times.push(t);
        let mut new = Vec::with_capacity(kt);
        for k in 1..=kt {
            let mut mem = Complex64::new(0.0, 0.0);
            if n > 0 {
                let (kern, reach) = &kernels[k - 1];
                let hist = &values[k - 1];
                if *reach > 0 {
                    if n <= *reach {
                        mem += hist[0] * (0.5 * kern[n]);
                    }
                    let lo = if n > *reach { n - reach } else { 1 };
                    for j in lo..n {
                        mem += hist[j] * kern[n - j];
                    }
                }
                for l in [k.wrapping_sub(1), k + 1] {
                    if l == 0 || l > kt {
                        continue;
                    }
                    let c = coupling(k, l);
                    if c == 0.0 {
                        continue;
                    }
                    let lf = l as f64;
                    let x = k as f64 * t;
                    let lo_t = (x - COUPLING_WINDOW) / lf;
                    let hi_t = (x + COUPLING_WINDOW) / lf;
                    let j_lo = (((lo_t - sys.t0) / dt).ceil().max(0.0)) as usize;
                    let j_hi = (((hi_t - sys.t0) / dt).floor().min((n - 1) as f64)) as isize;
                    if j_hi < j_lo as isize {
                        continue;
                    }
                    let hist = &values[l - 1];
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in j_lo..=j_hi as usize {
                        let tau = time(j);
                        let w = if j == 0 { 0.5 } else { 1.0 };
                        acc += hist[j] * (w * (t - tau) * (-(x - lf * tau).abs()).exp());
                    }
                    mem += acc * c;
                }
            }
            let f = (sys.forcing)(k as i64, t);
            let rho = if n == 0 { f } else { (f - mem * dt) / diag[k - 1] };
            new.push(rho);
        }
        for (k, rho) in new.into_iter().enumerate() {
            values[k].push(rho);
            if alert.is_none() && !(rho.norm() <= ALERT_THRESHOLD) {
                alert = Some(InstabilityAlert { k: k as i64 + 1, time: t, magnitude: rho.norm() });
            }
        }
        if alert.is_some() {
            break 'outer;
        }
    }

    let traces = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| DensityTrace { k: i as i64 + 1, times: times.clone(), values: v })
        .collect();
    ChainRun { traces, alert }
}

fn packet_forcing(cfg: &EchoChainConfig) -> impl Fn(i64, f64) -> Complex64 {
    let (amp, k0, eta0) = (cfg.packet_amplitude(), cfg.k0, cfg.eta0);
    move |k, t| high_packet_symbol(amp, k0, eta0, k, k as f64 * t) * (2.0 * PI)
}

fn steps(cfg: &EchoChainConfig) -> usize {
    ((cfg.grid.t_final() - cfg.t_in) / cfg.grid.dt() - 1e-9).ceil() as usize
}

/// Density toy system: nearest-neighbour echo coupling only, forced by the
/// free streaming of the packet.
pub fn solve_toy_rho(cfg: &EchoChainConfig, potential: &PotentialLaw) -> Result<ChainRun> {
    cfg.validate()?;
    let forcing = packet_forcing(cfg);
    Ok(march(&System {
        k_trunc: cfg.k_trunc,
        epsilon: cfg.epsilon,
        potential: *potential,
        self_kernel: VolterraKernel::Zero,
        forcing: &forcing,
        t0: cfg.t_in,
        dt: cfg.grid.dt(),
        steps: steps(cfg),
    }))
}

/// Truncated echo chain: the toy coupling plus the Lorentzian background
/// self-interaction of size `delta`. Returns the run and its echo report.
pub fn solve_echo_chain(cfg: &EchoChainConfig) -> Result<(ChainRun, EchoChainReport)> {
    cfg.validate()?;
    let self_kernel = if cfg.delta > 0.0 {
        VolterraKernel::new(cfg.potential, BackgroundProfile::lorentzian(cfg.delta)?)
    } else {
        VolterraKernel::Zero
    };
    let forcing = packet_forcing(cfg);
    let run = march(&System {
        k_trunc: cfg.k_trunc,
        epsilon: cfg.epsilon,
        potential: cfg.potential,
        self_kernel,
        forcing: &forcing,
        t0: cfg.t_in,
        dt: cfg.grid.dt(),
        steps: steps(cfg),
    });
    let scale = 2.0 * PI * cfg.packet_amplitude();
    let report = echo_report(&run.traces, cfg.k0, cfg.epsilon, scale, cfg.fit_bound);
    Ok((run, report))
}
