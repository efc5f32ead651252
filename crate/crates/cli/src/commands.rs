use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::path::Path;

use landau_core::echo::{solve_echo_chain, EchoChainConfig};
use landau_core::free_transport::{decay_certificate, density_free, AnalyticInitialDatum};
use landau_core::linear::{penrose_check_with, solve_linear_volterra_on, DensityTrace, VolterraKernel};
use landau_core::nonlinear::{run_echo_experiment, ExperimentConfig};
use landau_core::norms::{weighted_norm, MultiplierKind, MultiplierSpec};
use landau_core::spectral::{make_grid, snapshot, BackgroundProfile, PotentialLaw};
use landau_core::Error as CoreError;
use serde::Serialize;
use serde_json::json;

use crate::config::Value;
use crate::output::{fmt_f64, Output};
use crate::schema::Subcommand;

#[derive(Debug)]
pub enum CmdError {
    /// Bad parameter values; exit 1.
    Usage(String),
    /// The solver refused or failed; exit 2.
    Solver(String),
    Io(io::Error),
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmdError::Usage(m) | CmdError::Solver(m) => f.write_str(m),
            CmdError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<io::Error> for CmdError {
    fn from(e: io::Error) -> Self {
        CmdError::Io(e)
    }
}

impl From<CoreError> for CmdError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::StabilityBound { .. }
            | CoreError::Symmetry(_)
            | CoreError::NonConvergence { .. }
            | CoreError::Resolution { .. } => CmdError::Solver(e.to_string()),
            _ => CmdError::Usage(e.to_string()),
        }
    }
}

/// How a completed run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Alert,
    Saturated,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Alert | Status::Saturated => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Alert => "alert",
            Status::Saturated => "saturated",
        }
    }
}

/// Resolved parameters; derived values are written back so the manifest echoes them.
pub struct Params<'a>(pub &'a mut BTreeMap<String, Value>);

impl Params<'_> {
    fn real(&self, key: &str) -> f64 {
        match self.0.get(key) {
            Some(Value::Real(v)) => *v,
            Some(Value::Int(v)) => *v as f64,
            other => panic!("parameter {key} is not real: {other:?}"),
        }
    }

    fn int(&self, key: &str) -> i64 {
        match self.0.get(key) {
            Some(Value::Int(v)) => *v,
            other => panic!("parameter {key} is not an integer: {other:?}"),
        }
    }

    fn string(&self, key: &str) -> &str {
        match self.0.get(key) {
            Some(Value::Str(v)) => v,
            other => panic!("parameter {key} is not a string: {other:?}"),
        }
    }

    fn boolean(&self, key: &str) -> bool {
        match self.0.get(key) {
            Some(Value::Bool(v)) => *v,
            other => panic!("parameter {key} is not a bool: {other:?}"),
        }
    }

    fn real_or(&mut self, key: &str, derived: impl FnOnce(&Self) -> f64) -> f64 {
        if self.0.contains_key(key) {
            return self.real(key);
        }
        let v = derived(self);
        self.0.insert(key.to_string(), Value::Real(v));
        v
    }

    fn int_or(&mut self, key: &str, derived: impl FnOnce(&Self) -> i64) -> i64 {
        if self.0.contains_key(key) {
            return self.int(key);
        }
        let v = derived(self);
        self.0.insert(key.to_string(), Value::Int(v));
        v
    }

    fn positive_int(&self, key: &str) -> Result<usize, CmdError> {
        let v = self.int(key);
        usize::try_from(v)
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| CmdError::Usage(format!("{key} must be positive, got {v}")))
    }
}

fn usage(msg: impl Into<String>) -> CmdError {
    CmdError::Usage(msg.into())
}

fn numbers(args: &str, count: usize, what: &str) -> Result<Vec<f64>, CmdError> {
    let vals: Result<Vec<f64>, _> = args.split(',').map(|s| s.trim().parse::<f64>()).collect();
    match vals {
        Ok(v) if v.len() == count => Ok(v),
        _ => Err(usage(format!("{what}: expected {count} comma-separated numbers, got '{args}'"))),
    }
}

pub fn parse_background(text: &str) -> Result<BackgroundProfile, CmdError> {
    let (kind, args) =
        text.split_once(':').ok_or_else(|| usage(format!("background '{text}': expected KIND:VALUE")))?;
    let v = numbers(args, 1, "background")?[0];
    Ok(match kind.trim() {
        "lorentzian" => BackgroundProfile::lorentzian(v)?,
        "maxwellian" => BackgroundProfile::maxwellian(v)?,
        other => return Err(usage(format!("unknown background '{other}'"))),
    })
}

pub fn parse_potential(text: &str) -> Result<PotentialLaw, CmdError> {
    let (kind, args) = text.split_once(':').unwrap_or((text, ""));
    Ok(match kind.trim() {
        "gravitational" if args.is_empty() => PotentialLaw::gravitational(),
        "coulomb" => PotentialLaw::coulomb(numbers(args, 1, "coulomb")?[0])?,
        "shielded" => {
            let v = numbers(args, 2, "shielded")?;
            PotentialLaw::shielded(v[0], v[1])?
        }
        "power" => {
            let v = numbers(args, 2, "power")?;
            PotentialLaw::power(v[0], v[1])?
        }
        "shifted_power" => {
            let v = numbers(args, 2, "shifted_power")?;
            PotentialLaw::shifted_power(v[0], v[1])?
        }
        other => return Err(usage(format!("unknown potential '{other}'"))),
    })
}

fn datum(p: &Params, k0: i64) -> Result<AnalyticInitialDatum, CmdError> {
    Ok(match p.string("datum") {
        "orr" => AnalyticInitialDatum::orr_packet(p.real("lambda"), p.real("eta0"), k0)?,
        "gaussian" => AnalyticInitialDatum::gaussian(p.real("width"))?,
        other => return Err(usage(format!("unknown datum '{other}' (orr | gaussian)"))),
    })
}

fn time_samples(dt: f64, t_final: f64) -> Result<Vec<f64>, CmdError> {
    if !(dt > 0.0 && t_final >= 0.0) {
        return Err(usage("need dt > 0 and t_final >= 0"));
    }
    let n = (t_final / dt).round() as usize;
    Ok((0..=n).map(|i| i as f64 * dt).collect())
}

pub fn dispatch(sub: Subcommand, params: &mut BTreeMap<String, Value>, out: &mut Output) -> Result<Status, CmdError> {
    let mut p = Params(params);
    match sub {
        Subcommand::Free => free(&mut p, out),
        Subcommand::Linear => linear(&mut p, out),
        Subcommand::Penrose => penrose(&mut p, out),
        Subcommand::EchoChain => echo_chain(&mut p, out),
        Subcommand::Nonlinear => nonlinear(&mut p, out),
        Subcommand::Norms => norms(&mut p, out),
        Subcommand::Sweep => Err(usage("sweep is not a run section")),
    }
}

fn free(p: &mut Params, out: &mut Output) -> Result<Status, CmdError> {
    let d = datum(p, p.int("k0"))?;
    let ts = time_samples(p.real("dt"), p.real("t_final"))?;
    let traces: Vec<DensityTrace> = d
        .active_modes()
        .into_iter()
        .map(|k| DensityTrace { k, times: ts.clone(), values: ts.iter().map(|&t| density_free(&d, t, k)).collect() })
        .collect();
    out.traces("density.csv", &traces)?;

    let cert = decay_certificate(&d, p.real("sigma"), p.real("decay_rate"), &ts);
    let rows =
        cert.samples.iter().map(|s| vec![fmt_f64(s.t), s.k.to_string(), fmt_f64(s.poly_ratio), fmt_f64(s.exp_ratio)]);
    out.csv("certificate.csv", &["t", "k", "poly_ratio", "exp_ratio"], rows)?;
    out.ndjson(
        "certificate.ndjson",
        &[json!({
            "sigma": p.real("sigma"),
            "decay_rate": p.real("decay_rate"),
            "max_ratio": cert.max_ratio,
            "max_exp_ratio": cert.max_exp_ratio,
        })],
    )?;
    Ok(Status::Ok)
}

fn linear(p: &mut Params, out: &mut Output) -> Result<Status, CmdError> {
    let kernel =
        VolterraKernel::new(parse_potential(p.string("potential"))?, parse_background(p.string("background"))?);
    let k = p.int("k");
    if k == 0 {
        return Err(usage("k must be nonzero"));
    }
    let d = datum(p, k)?;
    let (dt, t_final) = (p.real("dt"), p.real("t_final"));
    time_samples(dt, t_final)?;
    let run = solve_linear_volterra_on(&kernel, |k, t| density_free(&d, t, k), k, 0.0, dt, t_final)?;
    out.traces("trace.csv", std::slice::from_ref(&run.trace))?;
    let (record, status) = match run.alert {
        Some(a) => (json!({"event": "alert", "k": a.k, "time": a.time, "magnitude": a.magnitude}), Status::Alert),
        None => (json!({"event": "complete", "k": k, "max_abs": run.trace.max_abs()}), Status::Ok),
    };
    out.ndjson("events.ndjson", &[record])?;
    Ok(status)
}

fn penrose(p: &mut Params, out: &mut Output) -> Result<Status, CmdError> {
    let kernel =
        VolterraKernel::new(parse_potential(p.string("potential"))?, parse_background(p.string("background"))?);
    let k_max = p.positive_int("k_max")? as i64;
    let samples = p.positive_int("samples")?;
    let verdicts = (1..=k_max).map(|k| penrose_check_with(&kernel, k, samples)).collect::<Result<Vec<_>, _>>()?;
    out.ndjson("verdicts.ndjson", &verdicts)?;
    Ok(Status::Ok)
}

fn chain_config(p: &mut Params, k_max: usize, eta_max: f64, n_eta: usize) -> Result<EchoChainConfig, CmdError> {
    let eps = p.real("epsilon");
    let eta0 = p.real("eta0");
    let k0 = p.int("k0");
    if k0 <= 0 {
        return Err(usage("k0 must be positive"));
    }
    let delta = p.real_or("delta", |p| p.real("epsilon").powi(2));
    let t_final = p.real_or("t_final", |p| 1.05 * p.real("eta0"));
    let t_in = p.real_or("t_in", |p| if p.real("epsilon") > 0.0 { p.real("epsilon").powf(-0.5) } else { 0.0 });
    let sign = p.int("potential_sign");
    if sign != 1 && sign != -1 {
        return Err(usage(format!("potential_sign must be +1 or -1, got {sign}")));
    }
    let dt = p.real("dt");
    let eta_max = if eta_max > 0.0 { eta_max } else { k_max as f64 * t_final };
    let grid = make_grid(k_max, eta_max, n_eta, dt, t_final)?;
    let mut c = EchoChainConfig::new(eps, delta, k0, eta0, grid);
    c.sigma = p.real("sigma");
    c.t_in = t_in;
    c.potential = PotentialLaw::power(sign as f64, p.real("gamma0"))?;
    Ok(c)
}

#[derive(Serialize)]
struct Event<'a> {
    event: &'a str,
    message: &'a str,
}

fn echo_chain(p: &mut Params, out: &mut Output) -> Result<Status, CmdError> {
    let k_trunc = p.int_or("k_trunc", |p| 2 * p.int("k0").max(1));
    let k_trunc = usize::try_from(k_trunc).ok().filter(|&k| k > 0).ok_or_else(|| usage("k_trunc must be positive"))?;
    let mut c = chain_config(p, 1, 0.0, 3)?;
    c.k_trunc = k_trunc;
    let warnings = c.validate()?;
    let (run, report) = solve_echo_chain(&c)?;
    out.traces("traces.csv", &run.traces)?;
    let mut records = vec![serde_json::to_value(&report).expect("report serializes")];
    if let Some(a) = run.alert {
        records.push(json!({"event": "alert", "k": a.k, "time": a.time, "magnitude": a.magnitude}));
    }
    for w in &warnings {
        records.push(serde_json::to_value(Event { event: "warning", message: w }).expect("event serializes"));
    }
    out.ndjson("report.ndjson", &records)?;
    Ok(if run.alert.is_some() { Status::Alert } else { Status::Ok })
}

fn nonlinear(p: &mut Params, out: &mut Output) -> Result<Status, CmdError> {
    let k_max = p.int_or("k_max", |p| 2 * p.int("k0").max(1));
    let k_max = usize::try_from(k_max).ok().filter(|&k| k > 0).ok_or_else(|| usage("k_max must be positive"))?;
    let k_trunc = p.int_or("k_trunc", |_| k_max as i64);
    let k_trunc = usize::try_from(k_trunc).ok().filter(|&k| k > 0).ok_or_else(|| usage("k_trunc must be positive"))?;
    let t_final = p.real_or("t_final", |p| 1.05 * p.real("eta0"));
    let eta_max = p.real_or("eta_max", |_| k_max as f64 * t_final + 60.0);
    let n_eta = p.positive_int("n_eta")?;
    let mut chain = chain_config(p, k_max, eta_max, n_eta)?;
    chain.k_trunc = k_trunc;
    let mut cfg = ExperimentConfig::new(chain);
    cfg.record_every = p.positive_int("record_every")?;
    let snap = p.int("snapshot_every");
    cfg.snapshot_every = match snap {
        0 => None,
        s if s > 0 => Some(s as usize),
        s => return Err(usage(format!("snapshot_every must be >= 0, got {s}"))),
    };
    cfg.compare_reduced = p.boolean("compare_reduced");
    cfg.options.self_interaction = p.boolean("self_interaction");

    let outcome = run_echo_experiment(&cfg)?;
    out.traces("traces.csv", &outcome.traces)?;
    out.traces("echo_traces.csv", &outcome.echo_traces)?;
    let rows = outcome.conservation.iter().map(|c| {
        vec![
            fmt_f64(c.time),
            fmt_f64(c.mass),
            fmt_f64(c.l2),
            fmt_f64(c.perturbation_l2),
            fmt_f64(c.kinetic),
            fmt_f64(c.potential),
            fmt_f64(c.energy),
        ]
    });
    out.csv("conservation.csv", &["t", "mass", "l2", "perturbation_l2", "kinetic", "potential", "energy"], rows)?;
    for (i, s) in outcome.snapshots.iter().enumerate() {
        out.snapshot(&format!("snapshots/snapshot_{i:05}.vel"), s)?;
    }
    let alert = outcome.reduced.as_ref().and_then(|r| r.alert);
    let mut records = vec![json!({
        "report": outcome.report,
        "error_vs_reduced": outcome.error_vs_reduced,
        "aliasing": outcome.aliasing,
    })];
    if let Some(a) = alert {
        records.push(json!({"event": "alert", "k": a.k, "time": a.time, "magnitude": a.magnitude}));
    }
    for w in &outcome.warnings {
        records.push(serde_json::to_value(Event { event: "warning", message: w }).expect("event serializes"));
    }
    out.ndjson("report.ndjson", &records)?;
    Ok(if alert.is_some() { Status::Alert } else { Status::Ok })
}

fn norms(p: &mut Params, out: &mut Output) -> Result<Status, CmdError> {
    let spec: MultiplierSpec = p.string("spec").parse()?;
    let path = p.string("snapshot_in").to_string();
    let f = snapshot::read(Path::new(&path))?;
    let m = match spec.kind {
        MultiplierKind::Sobolev { m, .. } if m > 0 => m,
        _ => u32::try_from(p.int("m")).ok().filter(|&m| m <= 2).ok_or_else(|| usage("m must be 0, 1 or 2"))?,
    };
    let t = f.time();
    let (value, saturated) = weighted_norm(&f, |k, eta| spec.log_symbol(t, k, eta), m);
    out.ndjson(
        "norms.ndjson",
        &[json!({"spec": p.string("spec"), "time": t, "m": m, "norm_value": value, "saturated": saturated})],
    )?;
    Ok(if saturated { Status::Saturated } else { Status::Ok })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_strings() {
        assert_eq!(parse_potential("coulomb:2").unwrap(), PotentialLaw::coulomb(2.0).unwrap());
        assert_eq!(parse_potential("power:-1,2").unwrap(), PotentialLaw::gravitational());
        assert_eq!(parse_potential("gravitational").unwrap(), PotentialLaw::gravitational());
        assert_eq!(parse_potential("shielded:1, 0.5").unwrap(), PotentialLaw::shielded(1.0, 0.5).unwrap());
        assert!(parse_potential("coulomb").is_err());
        assert!(parse_potential("yukawa:1").is_err());
        assert!(parse_potential("power:1").is_err());
    }

    #[test]
    fn background_strings() {
        assert_eq!(parse_background("lorentzian:0.01").unwrap(), BackgroundProfile::lorentzian(0.01).unwrap());
        assert_eq!(parse_background("maxwellian:2").unwrap(), BackgroundProfile::maxwellian(2.0).unwrap());
        assert!(parse_background("lorentzian:-1").is_err());
        assert!(parse_background("lorentzian").is_err());
    }
}
