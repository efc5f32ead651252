use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Subcommand {
    Free,
    Linear,
    Penrose,
    EchoChain,
    Nonlinear,
    Norms,
    Sweep,
}

impl Subcommand {
    pub const RUNNABLE: [Subcommand; 6] =
        [Self::Free, Self::Linear, Self::Penrose, Self::EchoChain, Self::Nonlinear, Self::Norms];

    pub fn name(self) -> &'static str {
        match self {
            Self::Free => "free",
            Self::Linear => "linear",
            Self::Penrose => "penrose",
            Self::EchoChain => "echo-chain",
            Self::Nonlinear => "nonlinear",
            Self::Norms => "norms",
            Self::Sweep => "sweep",
        }
    }

    pub fn about(self) -> &'static str {
        match self {
            Self::Free => "Free transport of an analytic datum: density traces and decay certificate",
            Self::Linear => "Linearized density response (Volterra equation) at one mode",
            Self::Penrose => "Penrose stability verdicts per mode",
            Self::EchoChain => "Reduced echo chain of coupled density equations",
            Self::Nonlinear => "Full nonlinear echo experiment",
            Self::Norms => "Multiplier norm of a stored spectrum",
            Self::Sweep => "Run a config over the cartesian product of its [sweep] values",
        }
    }

    pub fn params(self) -> &'static [Param] {
        match self {
            Self::Free => FREE,
            Self::Linear => LINEAR,
            Self::Penrose => PENROSE,
            Self::EchoChain => ECHO_CHAIN,
            Self::Nonlinear => NONLINEAR,
            Self::Norms => NORMS,
            Self::Sweep => &[],
        }
    }

    pub fn param(self, key: &str) -> Option<&'static Param> {
        self.params().iter().find(|p| p.key == key)
    }
}

impl FromStr for Subcommand {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [Self::Free, Self::Linear, Self::Penrose, Self::EchoChain, Self::Nonlinear, Self::Norms, Self::Sweep]
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown section '{s}'"))
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Int,
    Real,
    Str,
    Bool,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Int => "integer",
            Kind::Real => "real",
            Kind::Str => "string",
            Kind::Bool => "bool",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Need {
    Required,
    Default(&'static str),
    /// Optional; the command derives a value from other keys when absent.
    Derived,
}

#[derive(Debug)]
pub struct Param {
    pub key: &'static str,
    pub kind: Kind,
    pub need: Need,
    pub help: &'static str,
}

const fn p(key: &'static str, kind: Kind, need: Need, help: &'static str) -> Param {
    Param { key, kind, need, help }
}

use Kind::*;
use Need::*;

const OUTPUT: Param = p("output_dir", Str, Default("out"), "Output directory");

const FREE: &[Param] = &[
    p("datum", Str, Required, "orr | gaussian"),
    p("lambda", Real, Default("0.5"), "Orr packet decay rate"),
    p("width", Real, Default("1.0"), "Gaussian width"),
    p("eta0", Real, Default("0.0"), "Orr packet centre"),
    p("k0", Int, Default("1"), "Orr packet mode"),
    p("sigma", Real, Default("0.0"), "Polynomial weight of the decay certificate"),
    p("decay_rate", Real, Default("0.0"), "Exponential rate of the decay certificate"),
    p("dt", Real, Default("0.01"), "Sampling step"),
    p("t_final", Real, Required, "Final time"),
    OUTPUT,
];

const LINEAR: &[Param] = &[
    p("background", Str, Required, "lorentzian:DELTA | maxwellian:THETA"),
    p(
        "potential",
        Str,
        Default("coulomb:1"),
        "coulomb:C | shielded:C,ALPHA | power:SIGN,GAMMA | shifted_power:SIGN,GAMMA | gravitational",
    ),
    p("k", Int, Default("1"), "Mode"),
    p("datum", Str, Default("orr"), "Forcing datum: orr | gaussian"),
    p("lambda", Real, Default("0.5"), "Orr packet decay rate"),
    p("width", Real, Default("1.0"), "Gaussian width"),
    p("eta0", Real, Default("20.0"), "Orr packet centre"),
    p("dt", Real, Default("0.05"), "Time step"),
    p("t_final", Real, Required, "Final time"),
    OUTPUT,
];

const PENROSE: &[Param] = &[
    p("background", Str, Required, "lorentzian:DELTA | maxwellian:THETA"),
    p("potential", Str, Default("coulomb:1"), "Interaction potential, as for `linear`"),
    p("k_max", Int, Default("4"), "Check modes 1..=k_max"),
    p("samples", Int, Default("4096"), "Contour samples"),
    OUTPUT,
];

const ECHO_CHAIN: &[Param] = &[
    p("epsilon", Real, Required, "Perturbation size"),
    p("delta", Real, Derived, "Background strength (default epsilon^2)"),
    p("k0", Int, Required, "Packet mode"),
    p("eta0", Real, Required, "Packet frequency"),
    p("sigma", Real, Default("0.0"), "Packet regularity exponent"),
    p("k_trunc", Int, Derived, "Chain truncation (default 2 k0)"),
    p("t_in", Real, Derived, "Start time (default epsilon^-1/2)"),
    p("potential_sign", Int, Default("-1"), "+1 repulsive, -1 attractive power law"),
    p("gamma0", Real, Default("2.0"), "Power-law exponent"),
    p("dt", Real, Default("0.05"), "Time step"),
    p("t_final", Real, Derived, "Final time (default 1.05 eta0)"),
    OUTPUT,
];

const NONLINEAR: &[Param] = &[
    p("epsilon", Real, Required, "Perturbation size"),
    p("delta", Real, Derived, "Background strength (default epsilon^2)"),
    p("k0", Int, Required, "Packet mode"),
    p("eta0", Real, Required, "Packet frequency"),
    p("sigma", Real, Default("0.0"), "Packet regularity exponent"),
    p("k_trunc", Int, Derived, "Reduced-chain truncation (default k_max)"),
    p("t_in", Real, Derived, "Start time (default epsilon^-1/2)"),
    p("potential_sign", Int, Default("-1"), "+1 repulsive, -1 attractive power law"),
    p("gamma0", Real, Default("2.0"), "Power-law exponent"),
    p("dt", Real, Default("0.05"), "Time step"),
    p("t_final", Real, Derived, "Final time (default 1.05 eta0)"),
    p("k_max", Int, Derived, "Mesh modes (default 2 k0)"),
    p("eta_max", Real, Derived, "Mesh half-width (default k_max t_final + 60)"),
    p("n_eta", Int, Default("8001"), "Mesh points (odd)"),
    p("record_every", Int, Default("1"), "Density sampling stride in steps"),
    p("snapshot_every", Int, Default("0"), "Snapshot stride in steps (0 = none)"),
    p("compare_reduced", Bool, Default("true"), "Also solve the reduced chain"),
    p("self_interaction", Bool, Default("true"), "Keep the g-g interaction"),
    OUTPUT,
];

const NORMS: &[Param] = &[
    p("spec", Str, Required, "Multiplier, e.g. gevrey:lambda=0.3,s=0.333"),
    p("snapshot_in", Str, Required, "Spectrum snapshot file"),
    p("m", Int, Default("0"), "Velocity weight order (0..=2)"),
    OUTPUT,
];
