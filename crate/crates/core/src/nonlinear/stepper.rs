use num_complex::Complex64;
use serde::Serialize;

use super::conservation::{conserved_quantities, Conserved};
use super::rhs::RhsContext;
use super::state::NonlinearState;
use crate::error::{Error, Result};
use crate::linear::DensityTrace;
use crate::spectral::{sample_density, DistributionSpectrum};

/// Allowed hermitian defect after a step, relative to `1 + max|g|`.
const SYMMETRY_TOL: f64 = 1e-10;

/// Largest `|dt|` for which RK4 is stable on the linearization at time `t`:
/// `2 / ((eta_max + k_max |t|) sum_l |a_l|)`.
pub fn stability_bound(state: &NonlinearState, t: f64) -> Result<f64> {
    let ctx = RhsContext::new(state);
    bound_from(&ctx, state.g.values(), t)
}

fn bound_from(ctx: &RhsContext, g: &[Complex64], t: f64) -> Result<f64> {
    let a = ctx.field(g, t)?;
    let sum: f64 = 2.0 * a.iter().map(|c| c.norm()).sum::<f64>();
    if sum == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(2.0 / (ctx.eta_reach(t) * sum))
}

fn combine(out: &mut [Complex64], y: &[Complex64], h: f64, k: &[Complex64]) {
    for ((o, a), b) in out.iter_mut().zip(y).zip(k) {
        *o = a + b * h;
    }
}

/// One classical RK4 step of size `dt` (negative to march backward).
/// Returns the aliasing flag of the stage evaluations.
pub fn step(state: &mut NonlinearState, dt: f64) -> Result<bool> {
    let ctx = RhsContext::new(state);
    step_with(&ctx, state, dt)
}

fn step_with(ctx: &RhsContext, state: &mut NonlinearState, dt: f64) -> Result<bool> {
    let t0 = state.time();
    let bound = bound_from(ctx, state.g.values(), t0)?;
    if dt.abs() > bound {
        return Err(Error::StabilityBound { dt, bound });
    }
    let y = state.g.values();
    let len = y.len();
    let zero = Complex64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4) = (vec![zero; len], vec![zero; len], vec![zero; len], vec![zero; len]);
    let mut tmp = vec![zero; len];
    let mut alias = ctx.eval(y, t0, &mut k1)?;
    combine(&mut tmp, y, 0.5 * dt, &k1);
    alias |= ctx.eval(&tmp, t0 + 0.5 * dt, &mut k2)?;
    combine(&mut tmp, y, 0.5 * dt, &k2);
    alias |= ctx.eval(&tmp, t0 + 0.5 * dt, &mut k3)?;
    combine(&mut tmp, y, dt, &k3);
    alias |= ctx.eval(&tmp, t0 + dt, &mut k4)?;
    let h = dt / 6.0;
    for (i, v) in state.g.values_mut().iter_mut().enumerate() {
        *v += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * h;
    }
    state.g.set_time(t0 + dt);
    let defect = state.g.hermitian_defect();
    if defect > SYMMETRY_TOL * (1.0 + state.g.max_abs()) {
        return Err(Error::Symmetry(defect));
    }
    Ok(alias)
}

/// Densities, conserved quantities and snapshots collected by [`integrate`].
#[derive(Debug, Clone, Serialize)]
pub struct RunLog {
    /// `rho^(t, k)` for `k = 1..=k_max` at the recorded times.
    pub traces: Vec<DensityTrace>,
    pub conservation: Vec<Conserved>,
    #[serde(skip)]
    pub snapshots: Vec<DistributionSpectrum>,
    pub aliasing: bool,
    pub steps: usize,
}

/// Marches `state` to `t_end` with uniform steps of size close to `|dt|`
/// (adjusted so the last step lands on `t_end`). Records every
/// `record_every` steps and at the end; keeps a snapshot every
/// `snapshot_every` steps when given.
pub fn integrate(
    state: &mut NonlinearState,
    t_end: f64,
    dt: f64,
    record_every: usize,
    snapshot_every: Option<usize>,
) -> Result<RunLog> {
    if record_every == 0 || snapshot_every == Some(0) {
        return Err(Error::domain("record and snapshot intervals must be at least one step"));
    }
    if !(dt != 0.0 && dt.is_finite()) {
        return Err(Error::domain("dt must be finite and nonzero"));
    }
    let t0 = state.time();
    let span = t_end - t0;
    let steps = ((span.abs() / dt.abs()) - 1e-9).ceil().max(0.0) as usize;
    let h = if steps > 0 { span / steps as f64 } else { 0.0 };
    let km = state.g.mesh().k_max() as i64;
    let ctx = RhsContext::new(state);

    let mut log = RunLog {
        traces: (1..=km).map(|k| DensityTrace { k, times: Vec::new(), values: Vec::new() }).collect(),
        conservation: Vec::new(),
        snapshots: Vec::new(),
        aliasing: false,
        steps,
    };
    let record = |state: &NonlinearState, log: &mut RunLog| -> Result<()> {
        let t = state.time();
        for tr in log.traces.iter_mut() {
            tr.times.push(t);
            tr.values.push(sample_density(&state.g, t, tr.k)?);
        }
        log.conservation.push(conserved_quantities(state)?);
        Ok(())
    };
    record(state, &mut log)?;
    if snapshot_every.is_some() {
        log.snapshots.push(state.g.clone());
    }
    for n in 1..=steps {
        log.aliasing |= step_with(&ctx, state, h)?;
        if n == steps {
            // Remove the rounding drift of repeated additions.
            state.g.set_time(t_end);
        }
        if n % record_every == 0 || n == steps {
            record(state, &mut log)?;
        }
        if let Some(every) = snapshot_every {
            if n % every == 0 || n == steps {
                log.snapshots.push(state.g.clone());
            }
        }
    }
    Ok(log)
}

/// Result of [`time_reversal_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeReversal {
    /// `|| g after marching forward and back - g_0 ||`.
    pub round_trip: f64,
    /// Step-doubling estimate of the error of one forward step.
    pub truncation: f64,
    pub steps: usize,
}

/// Marches `steps` steps of `dt` forward and the same number back, and
/// compares the round-trip error with the local error of a single step.
pub fn time_reversal_probe(state: &NonlinearState, dt: f64, steps: usize) -> Result<TimeReversal> {
    let ctx = RhsContext::new(state);
    let mut fwd = state.clone();
    for _ in 0..steps {
        step_with(&ctx, &mut fwd, dt)?;
    }
    for _ in 0..steps {
        step_with(&ctx, &mut fwd, -dt)?;
    }
    let mut one = state.clone();
    step_with(&ctx, &mut one, dt)?;
    let mut halves = state.clone();
    step_with(&ctx, &mut halves, 0.5 * dt)?;
    step_with(&ctx, &mut halves, 0.5 * dt)?;
    let diff_norm = |a: &DistributionSpectrum, b: &DistributionSpectrum| {
        let s: f64 = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm_sqr()).sum();
        (s * a.mesh().d_eta()).sqrt()
    };
    Ok(TimeReversal {
        round_trip: diff_norm(&fwd.g, &state.g),
        truncation: diff_norm(&one.g, &halves.g) * 16.0 / 15.0,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{BackgroundProfile, FrequencyMesh, PotentialLaw};

    fn packet_state() -> NonlinearState {
        let mesh = FrequencyMesh::new(2, 60.0, 1201).unwrap();
        let g = DistributionSpectrum::from_fn(mesh, 0.0, |k, eta| {
            if k.abs() == 1 {
                Complex64::new(0.5 * (-eta * eta / 4.0).exp(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        NonlinearState::new(g, Some(BackgroundProfile::lorentzian(0.05).unwrap()), PotentialLaw::gravitational())
    }

    #[test]
    fn rk4_converges_at_fourth_order() {
        let base = packet_state();
        let run = |dt: f64| {
            let mut s = base.clone();
            integrate(&mut s, 2.0, dt, 1000, None).unwrap();
            s.g
        };
        let (a, b, c) = (run(0.2), run(0.1), run(0.05));
        let d = |x: &DistributionSpectrum, y: &DistributionSpectrum| {
            x.values().iter().zip(y.values()).fold(0.0f64, |m, (p, q)| m.max((p - q).norm()))
        };
        let ratio = d(&a, &b) / d(&b, &c);
        assert!(ratio > 16.0 * 0.7 && ratio < 16.0 * 1.3, "ratio {ratio}");
    }

    #[test]
    fn oversized_step_is_rejected() {
        let mut s = packet_state();
        let bound = stability_bound(&s, 0.0).unwrap();
        assert!(bound.is_finite());
        match step(&mut s, 1.5 * bound) {
            Err(Error::StabilityBound { .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_interval_records_once() {
        let mut s = packet_state();
        let log = integrate(&mut s, 0.0, 0.1, 1, None).unwrap();
        assert_eq!(log.steps, 0);
        assert_eq!(log.traces[0].len(), 1);
        assert!(integrate(&mut s, 1.0, 0.1, 0, None).is_err());
    }
}
