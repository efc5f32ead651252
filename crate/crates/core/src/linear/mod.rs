//! Linearized Vlasov dynamics: the density Volterra equation, its marching
//! solver, the dispersion function and Penrose-type stability checks.

mod dispersion;
mod kernel;
mod scattering;
mod volterra;

pub use dispersion::{dispersion_function, penrose_check, penrose_check_with, StabilityVerdict};
pub use kernel::VolterraKernel;
pub use scattering::{duhamel_rate, linear_profile_scattering, linear_profile_scattering_with, ScatteringReport};
pub use volterra::{
    solve_linear_modes, solve_linear_volterra, solve_linear_volterra_on, DensityTrace, InstabilityAlert, LinearRun,
    ALERT_THRESHOLD,
};
