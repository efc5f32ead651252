//! Sobolev, Gevrey and time-dependent echo multipliers, weighted norms and
//! bootstrap monitors.

mod bootstrap;
mod multiplier;
mod norm;

pub use bootstrap::{bootstrap_monitor, BootstrapReport, BootstrapSpecs};
pub use multiplier::{
    apply_multiplier, MultiplierKind, MultiplierSpec, TimeProfile, WeightPolicy, SATURATION_EXPONENT,
};
pub use norm::{density_weighted_norm, norm_hsm, weighted_norm};
