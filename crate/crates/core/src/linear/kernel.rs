use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::spectral::{BackgroundProfile, PotentialLaw};

/// Memory kernel `K(k, s)` of the density equation
/// `rho(t) = F(t) - \int_0^t K(k, t - tau) rho(tau) dtau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VolterraKernel {
    /// `K(k, s) = (1/2pi) W(k) k^2 s f0^(k s)`.
    Plasma { potential: PotentialLaw, background: BackgroundProfile },
    /// `K = c`, used to check the marching scheme.
    Constant { c: f64 },
    /// Free transport.
    Zero,
}

impl VolterraKernel {
    pub fn new(potential: PotentialLaw, background: BackgroundProfile) -> Self {
        Self::Plasma { potential, background }
    }

    #[inline]
    pub fn evaluate(&self, k: i64, s: f64) -> f64 {
        match *self {
            Self::Plasma { potential, background } => {
                if k == 0 {
                    return 0.0;
                }
                let kf = k as f64;
                potential.symbol_or_zero(k) * kf * kf * s * background.symbol(kf * s) / (2.0 * PI)
            }
            Self::Constant { c } => c,
            Self::Zero => 0.0,
        }
    }
}
