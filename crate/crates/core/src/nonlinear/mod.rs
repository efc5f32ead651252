//! Full nonlinear profile equation on `T x R`, the two-packet echo
//! experiment and conservation diagnostics.

mod conservation;
mod experiment;
mod rhs;
mod state;
mod stepper;

pub use conservation::{conserved_quantities, Conserved};
pub use experiment::{
    initial_state, linear_reference, run_echo_experiment, solve_backward, ExperimentConfig, ExperimentOutcome,
    Integrator,
};
pub use rhs::{rhs_profile, RhsOutput};
pub use state::{ModelOptions, NonlinearState};
pub use stepper::{integrate, stability_bound, step, time_reversal_probe, RunLog, TimeReversal};
