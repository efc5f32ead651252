use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interaction potential through its Fourier symbol `W^(k)`.
///
/// `sign = +1` is repulsive (electrostatic), `sign = -1` attractive (gravitational).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialLaw {
    Coulomb { c_w: f64 },
    Shielded { c_w: f64, alpha: f64 },
    Power { sign: f64, gamma0: f64 },
    ShiftedPower { sign: f64, gamma0: f64 },
}

impl PotentialLaw {
    pub fn coulomb(c_w: f64) -> Result<Self> {
        finite("C_W", c_w)?;
        Ok(Self::Coulomb { c_w })
    }

    pub fn shielded(c_w: f64, alpha: f64) -> Result<Self> {
        finite("C_W", c_w)?;
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::domain("shielding alpha must be positive"));
        }
        Ok(Self::Shielded { c_w, alpha })
    }

    pub fn power(sign: f64, gamma0: f64) -> Result<Self> {
        check_power(sign, gamma0)?;
        Ok(Self::Power { sign, gamma0 })
    }

    pub fn shifted_power(sign: f64, gamma0: f64) -> Result<Self> {
        check_power(sign, gamma0)?;
        Ok(Self::ShiftedPower { sign, gamma0 })
    }

    /// Attractive `-|k|^{-2}`, the default for echo experiments.
    pub fn gravitational() -> Self {
        Self::Power { sign: -1.0, gamma0: 2.0 }
    }

    pub fn symbol(&self, k: i64) -> Result<f64> {
        let ka = k.unsigned_abs() as f64;
        match *self {
            Self::Coulomb { c_w } => {
                if k == 0 {
                    return Err(Error::domain("coulomb symbol is singular at k = 0"));
                }
                Ok(c_w / (ka * ka))
            }
            Self::Shielded { c_w, alpha } => Ok(c_w / (alpha + ka * ka)),
            Self::Power { sign, gamma0 } => {
                if k == 0 {
                    return Err(Error::domain("power-law symbol is singular at k = 0"));
                }
                Ok(sign * ka.powf(-gamma0))
            }
            Self::ShiftedPower { sign, gamma0 } => Ok(sign * (1.0 + ka).powf(-gamma0)),
        }
    }

    /// Symbol for `k != 0`; zero at `k = 0` where the mean-zero density kills it.
    pub fn symbol_or_zero(&self, k: i64) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.symbol(k).unwrap_or(0.0)
        }
    }

    pub fn is_attractive(&self) -> bool {
        match *self {
            Self::Coulomb { c_w } | Self::Shielded { c_w, .. } => c_w < 0.0,
            Self::Power { sign, .. } | Self::ShiftedPower { sign, .. } => sign < 0.0,
        }
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite")))
    }
}

fn check_power(sign: f64, gamma0: f64) -> Result<()> {
    if sign != 1.0 && sign != -1.0 {
        return Err(Error::domain("power-law sign must be +1 or -1"));
    }
    if !(gamma0.is_finite() && gamma0 >= 2.0) {
        return Err(Error::domain("power-law exponent gamma0 must be >= 2"));
    }
    Ok(())
}
