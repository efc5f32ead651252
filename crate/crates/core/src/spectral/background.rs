use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Homogeneous equilibrium `f0(v)` with a closed-form velocity transform.
///
/// * `Lorentzian { delta }`: `f0 = 4 pi delta / (1 + v^2)`, symbol `2 pi delta e^{-|eta|}`.
/// * `Maxwellian { theta }`: unit-mass Gaussian of temperature `theta`,
///   symbol `(1/2pi) e^{-theta eta^2 / 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BackgroundProfile {
    Lorentzian { delta: f64 },
    Maxwellian { theta: f64 },
}

impl BackgroundProfile {
    pub fn lorentzian(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::domain("lorentzian delta must be positive"));
        }
        Ok(Self::Lorentzian { delta })
    }

    pub fn maxwellian(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::domain("maxwellian theta must be positive"));
        }
        Ok(Self::Maxwellian { theta })
    }

    /// `f0^(eta)`.
    #[inline]
    pub fn symbol(&self, eta: f64) -> f64 {
        match *self {
            Self::Lorentzian { delta } => 2.0 * PI * delta * (-eta.abs()).exp(),
            Self::Maxwellian { theta } => (-0.5 * theta * eta * eta).exp() / (2.0 * PI),
        }
    }

    /// Total mass `\int f0 dv = 2 pi f0^(0)`.
    pub fn mass(&self) -> f64 {
        2.0 * PI * self.symbol(0.0)
    }

    /// `\int v^2 f0 dv`, or `None` when the moment diverges.
    pub fn second_moment(&self) -> Option<f64> {
        match *self {
            Self::Lorentzian { .. } => None,
            Self::Maxwellian { theta } => Some(theta),
        }
    }

    /// Radius beyond which the symbol is below `floor`.
    pub fn support_radius(&self, floor: f64) -> f64 {
        let peak = self.symbol(0.0);
        if floor <= 0.0 || peak <= floor {
            return if floor <= 0.0 { f64::INFINITY } else { 0.0 };
        }
        let ratio = (peak / floor).ln();
        match *self {
            Self::Lorentzian { .. } => ratio,
            Self::Maxwellian { theta } => (2.0 * ratio / theta).sqrt(),
        }
    }
}
