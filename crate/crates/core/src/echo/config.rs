use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{bracket2, PotentialLaw, SpectralGrid};

/// Residual bound (RMS of log-amplitude residuals) used by the growth fit.
pub const DEFAULT_FIT_BOUND: f64 = 0.5;

#[derive(Debug, Clone, Serialize)]
pub struct EchoChainConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub k0: i64,
    pub eta0: f64,
    pub sigma: f64,
    pub t_in: f64,
    pub k_trunc: usize,
    pub grid: SpectralGrid,
    pub potential: PotentialLaw,
    /// `p` in the hypothesis `delta <= eps^p`; only used for warnings.
    pub delta_exponent: Option<f64>,
    pub fit_bound: f64,
}

impl EchoChainConfig {
    /// Defaults: `sigma = 0`, `t_in = eps^{-1/2}`, `k_trunc = 2 k0`,
    /// attractive `-|k|^{-2}` potential.
    pub fn new(epsilon: f64, delta: f64, k0: i64, eta0: f64, grid: SpectralGrid) -> Self {
        Self {
            epsilon,
            delta,
            k0,
            eta0,
            sigma: 0.0,
            t_in: if epsilon > 0.0 { epsilon.powf(-0.5) } else { 0.0 },
            k_trunc: (2 * k0.unsigned_abs() as usize).max(1),
            grid,
            potential: PotentialLaw::gravitational(),
            delta_exponent: None,
            fit_bound: DEFAULT_FIT_BOUND,
        }
    }

    /// `eps / <k0, eta0>^sigma`.
    pub fn packet_amplitude(&self) -> f64 {
        self.epsilon / bracket2(self.k0 as f64, self.eta0).powf(self.sigma)
    }

    /// Checks the configuration; returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::domain("epsilon must be nonnegative"));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::domain("delta must be nonnegative"));
        }
        if self.k0 <= 0 {
            return Err(Error::domain("k0 must be positive"));
        }
        if self.k0 as usize > self.k_trunc {
            return Err(Error::Domain(format!("k0 = {} exceeds k_trunc = {}", self.k0, self.k_trunc)));
        }
        if !(self.eta0 > 0.0) {
            return Err(Error::domain("eta0 must be positive"));
        }
        if self.eta0 > self.grid.t_final() {
            return Err(Error::Domain(format!(
                "t_final = {} does not reach the last echo at eta0 = {}",
                self.grid.t_final(),
                self.eta0
            )));
        }
        if !(self.t_in >= 0.0 && self.t_in < self.grid.t_final()) {
            return Err(Error::domain("t_in must lie in [0, t_final)"));
        }
        let mut warnings = Vec::new();
        if let Some(p) = self.delta_exponent {
            if self.delta > self.epsilon.powf(p) {
                warnings.push(format!("delta = {} exceeds eps^p = {}", self.delta, self.epsilon.powf(p)));
            }
        }
        if self.t_in > self.eta0 / self.k0 as f64 {
            warnings.push("t_in is past the first critical time eta0/k0".to_string());
        }
        Ok(warnings)
    }
}
