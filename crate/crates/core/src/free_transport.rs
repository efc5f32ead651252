//! Free streaming `d_t h + v d_x h = 0`: exact solutions, Orr unmixing and
//! the decay estimates it implies for the density.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{binomial, bracket, eta_derivative, DistributionSpectrum, FrequencyMesh, SpectralGrid};

pub type SymbolFn = Arc<dyn Fn(i64, f64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum DatumKind {
    /// `h_in(+-k0, eta) = e^{-lambda |eta -+ eta0|}`.
    OrrPacket {
        lambda: f64,
        eta0: f64,
        k0: i64,
    },
    /// `h_in(+-1, eta) = e^{-eta^2 / width^2}`.
    Gaussian {
        width: f64,
    },
    /// User symbol together with the positive modes it occupies.
    Custom {
        modes: Vec<i64>,
        symbol: SymbolFn,
    },
    Zero,
}

impl fmt::Debug for DatumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::OrrPacket { lambda, eta0, k0 } => {
                f.debug_struct("OrrPacket").field("lambda", lambda).field("eta0", eta0).field("k0", k0).finish()
            }
            Self::Gaussian { width } => f.debug_struct("Gaussian").field("width", width).finish(),
            Self::Custom { modes, .. } => f.debug_struct("Custom").field("modes", modes).finish_non_exhaustive(),
            Self::Zero => f.write_str("Zero"),
        }
    }
}

/// Initial datum `h_in` given by its transform in closed form.
#[derive(Debug, Clone)]
pub struct AnalyticInitialDatum {
    kind: DatumKind,
}

impl AnalyticInitialDatum {
    pub fn orr_packet(lambda: f64, eta0: f64, k0: i64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::domain("packet lambda must be positive"));
        }
        if k0 == 0 {
            return Err(Error::domain("packet mode k0 must be nonzero (mean-zero datum)"));
        }
        Ok(Self { kind: DatumKind::OrrPacket { lambda, eta0, k0: k0.abs() } })
    }

    pub fn gaussian(width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::domain("gaussian width must be positive"));
        }
        Ok(Self { kind: DatumKind::Gaussian { width } })
    }

    /// A custom symbol. It must vanish at `(0, 0)` (mean zero); Hermitian
    /// symmetry is the caller's responsibility.
    pub fn custom(modes: Vec<i64>, symbol: SymbolFn) -> Result<Self> {
        if symbol(0, 0.0).norm() > 1e-14 {
            return Err(Error::domain("custom datum must have zero mean (h^(0,0) = 0)"));
        }
        let mut modes: Vec<i64> = modes.into_iter().map(i64::abs).filter(|&k| k != 0).collect();
        modes.sort_unstable();
        modes.dedup();
        Ok(Self { kind: DatumKind::Custom { modes, symbol } })
    }

    pub fn zero() -> Self {
        Self { kind: DatumKind::Zero }
    }

    pub fn kind(&self) -> &DatumKind {
        &self.kind
    }

    /// Always true: every constructor enforces `\int h = 0`.
    pub fn mean_zero(&self) -> bool {
        true
    }

    /// `h_in^(k, eta)`.
    pub fn evaluate(&self, k: i64, eta: f64) -> Complex64 {
        match &self.kind {
            DatumKind::OrrPacket { lambda, eta0, k0 } => {
                if k == *k0 {
                    Complex64::new((-lambda * (eta - eta0).abs()).exp(), 0.0)
                } else if k == -*k0 {
                    Complex64::new((-lambda * (eta + eta0).abs()).exp(), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            DatumKind::Gaussian { width } => {
                if k.abs() == 1 {
                    Complex64::new((-(eta * eta) / (width * width)).exp(), 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            DatumKind::Custom { symbol, .. } => symbol(k, eta),
            DatumKind::Zero => Complex64::new(0.0, 0.0),
        }
    }

    /// Positive modes carrying the datum.
    pub fn active_modes(&self) -> Vec<i64> {
        match &self.kind {
            DatumKind::OrrPacket { k0, .. } => vec![*k0],
            DatumKind::Gaussian { .. } => vec![1],
            DatumKind::Custom { modes, .. } => modes.clone(),
            DatumKind::Zero => Vec::new(),
        }
    }

    /// `h_in(x, -v)`, whose transform is `h_in^(k, -eta)`.
    pub fn velocity_flip(&self) -> Self {
        let inner = self.clone();
        let modes = self.active_modes();
        Self { kind: DatumKind::Custom { modes, symbol: Arc::new(move |k, eta| inner.evaluate(k, -eta)) } }
    }

    /// Samples of the datum on a mesh.
    pub fn to_spectrum(&self, mesh: FrequencyMesh, time: f64) -> DistributionSpectrum {
        DistributionSpectrum::from_fn(mesh, time, |k, eta| self.evaluate(k, eta))
    }
}

/// `h^(t, k, eta) = h_in^(k, eta + k t)`.
pub fn evolve_free(datum: &AnalyticInitialDatum, t: f64, k: i64, eta: f64) -> Complex64 {
    datum.evaluate(k, eta + k as f64 * t)
}

/// `rho^(t, k) = 2 pi h_in^(k, k t)`.
pub fn density_free(datum: &AnalyticInitialDatum, t: f64, k: i64) -> Complex64 {
    datum.evaluate(k, k as f64 * t) * (2.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateSample {
    pub t: f64,
    pub k: i64,
    pub poly_ratio: f64,
    pub exp_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayCertificate {
    pub samples: Vec<CertificateSample>,
    pub max_ratio: f64,
    pub max_exp_ratio: f64,
}

/// Dense `eta` grid used for the supremum in the certificate denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupGrid {
    pub half_width: Option<f64>,
    pub points: usize,
}

impl Default for SupGrid {
    fn default() -> Self {
        Self { half_width: None, points: 40_001 }
    }
}

/// Ratios `|rho^(t,k)| <kt>^sigma / sup_eta <eta>^sigma |h_in^(k,eta)|` and the
/// analogue with weight `e^{lambda |eta|}`.
pub fn decay_certificate(datum: &AnalyticInitialDatum, sigma: f64, lambda: f64, t_samples: &[f64]) -> DecayCertificate {
    decay_certificate_with(datum, sigma, lambda, t_samples, SupGrid::default())
}

pub fn decay_certificate_with(
    datum: &AnalyticInitialDatum,
    sigma: f64,
    lambda: f64,
    t_samples: &[f64],
    sup_grid: SupGrid,
) -> DecayCertificate {
    let poly = |eta: f64| bracket(eta).powf(sigma);
    let expo = |eta: f64| (lambda * eta.abs()).exp();
    let mut samples = Vec::new();
    for k in datum.active_modes() {
        let kf = k as f64;
        let t_reach = t_samples.iter().fold(0.0f64, |m, t| m.max((kf * t).abs()));
        let r = sup_grid.half_width.unwrap_or(1.5 * t_reach + 50.0);
        let n = sup_grid.points.max(3);
        // The sample points themselves are part of the sup set.
        let eta_set: Vec<f64> =
            (0..n).map(|i| -r + 2.0 * r * i as f64 / (n - 1) as f64).chain(t_samples.iter().map(|t| kf * t)).collect();
        let (sup_p, sup_e) = eta_set
            .par_iter()
            .map(|&eta| {
                let a = datum.evaluate(k, eta).norm();
                (poly(eta) * a, expo(eta) * a)
            })
            .reduce(|| (0.0, 0.0), |x, y| (x.0.max(y.0), x.1.max(y.1)));
        let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
        samples.extend(t_samples.iter().map(|&t| {
            let eta = kf * t;
            let a = datum.evaluate(k, eta).norm();
            CertificateSample { t, k, poly_ratio: ratio(a * poly(eta), sup_p), exp_ratio: ratio(a * expo(eta), sup_e) }
        }));
    }
    let max_ratio = samples.iter().fold(0.0f64, |m, s| m.max(s.poly_ratio));
    let max_exp_ratio = samples.iter().fold(0.0f64, |m, s| m.max(s.exp_ratio));
    DecayCertificate { samples, max_ratio, max_exp_ratio }
}

/// Velocity-averaging check: returns
/// `lhs = ( (1/2pi) sum_k |k| \int_0^T |rho^(t,k)|^2 dt )^{1/2}` for the free
/// evolution of `h_in` and `rhs = ( sum_j C(m,j) ||d_eta^j h_in^||^2 )^{1/2}`.
pub fn velocity_averaging_check(h_in: &DistributionSpectrum, grid: &SpectralGrid, m: u32) -> Result<(f64, f64)> {
    if m < 1 {
        return Err(Error::domain("velocity averaging needs m >= 1"));
    }
    let mesh = h_in.mesh();
    let t_final = grid.t_final();
    let reach = mesh.k_max() as f64 * t_final;
    if reach > mesh.eta_max() * (1.0 + 1e-12) {
        return Err(Error::OutOfGrid { eta: reach, eta_max: mesh.eta_max() });
    }
    let steps = grid.steps_from(0.0);
    let dt = grid.dt();
    let times: Vec<f64> = (0..=steps).map(|j| (j as f64 * dt).min(t_final)).collect();

    let per_mode: Vec<f64> = (1..=mesh.k_max() as i64)
        .into_par_iter()
        .map(|k| -> Result<f64> {
            let mut integral = 0.0;
            let mut prev: Option<(f64, f64)> = None;
            for &t in &times {
                let rho = h_in.value_at(k, (k as f64 * t).min(mesh.eta_max()))? * (2.0 * PI);
                let v = rho.norm_sqr();
                if let Some((tp, vp)) = prev {
                    integral += 0.5 * (t - tp) * (v + vp);
                }
                prev = Some((t, v));
            }
            // Modes -k contribute the same amount by Hermitian symmetry.
            Ok(2.0 * k as f64 * integral)
        })
        .collect::<Result<_>>()?;
    let lhs = (per_mode.iter().sum::<f64>() / (2.0 * PI)).sqrt();

    let d_eta = mesh.d_eta();
    let mut rhs2 = 0.0;
    for k in mesh.modes() {
        let mut row = h_in.row(k).to_vec();
        for j in 0..=m {
            if j > 0 {
                row = eta_derivative(&row, d_eta);
            }
            rhs2 += binomial(m, j) * row.iter().map(|v| v.norm_sqr()).sum::<f64>() * d_eta;
        }
    }
    Ok((lhs, rhs2.sqrt()))
}
