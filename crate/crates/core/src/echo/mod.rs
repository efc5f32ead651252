//! Echo cascades: the density toy system, the truncated echo chain with the
//! background self-interaction, its distribution-side counterpart, echo peak
//! extraction and the Gevrey-3 growth fit.

mod backsub;
mod chain;
mod config;
mod data;
mod gtoy;
mod peaks;

pub use backsub::backsub_toy;
pub use chain::{solve_echo_chain, solve_toy_rho, ChainRun};
pub use config::{EchoChainConfig, DEFAULT_FIT_BOUND};
pub use data::{high_packet_datum, high_packet_symbol, low_mode_datum, low_mode_symbol};
pub use gtoy::{gtoy_rate, solve_gtoy};
pub use peaks::{
    critical_times, echo_report, extract_peak, fit_growth_exponent, fit_growth_exponent_bounded, EchoChainReport,
    ModePeak, Peak,
};
