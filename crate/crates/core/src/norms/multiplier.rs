use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::{bracket, bracket2, DistributionSpectrum};

/// Exponents above this are capped and flagged.
pub const SATURATION_EXPONENT: f64 = 700.0;

/// A scalar function of time such as `mu(t)` or `lambda(t)`.
#[derive(Clone)]
pub enum TimeProfile {
    Constant(f64),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl TimeProfile {
    #[inline]
    pub fn at(&self, t: f64) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Custom(f) => f(t),
        }
    }
}

impl fmt::Debug for TimeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Policy for the weight `w(t, eta) <= 1` of the high-norm multiplier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightPolicy {
    /// `w = 1`.
    Unit,
    /// Reconstruction: `w` drops by the factor `amplification` across each echo
    /// window `[|eta|/(k+1), |eta|/k]`, for `k <= min(|eta|, max_echoes)`,
    /// linearly in `log w`.
    EchoWindow { amplification: f64, max_echoes: u32 },
}

impl WeightPolicy {
    /// `log w(t, eta)`, always `<= 0`.
    pub fn log_weight(&self, t: f64, eta: f64) -> f64 {
        match *self {
            Self::Unit => 0.0,
            Self::EchoWindow { amplification, max_echoes } => {
                let a = eta.abs();
                let top = (a.floor() as u64).min(max_echoes as u64);
                let mut passed = 0.0;
                for k in 1..=top {
                    let (lo, hi) = (a / (k + 1) as f64, a / k as f64);
                    passed += ((t - lo) / (hi - lo)).clamp(0.0, 1.0);
                }
                -amplification.max(1.0).ln() * passed
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum MultiplierKind {
    /// `<k, eta>^s`; `m` is the velocity-weight order used by norms, not part of the symbol.
    Sobolev { s: f64, m: u32 },
    /// `e^{lambda(t) <k, eta>^s}`.
    Gevrey { lambda: TimeProfile, s: f64 },
    /// `<xi>^beta e^{mu(t) c <xi>^{1/3}} (e^{r c <eta>^{1/3}} / w + e^{r c <k>^{1/3}})`, `c = (K eps)^{1/3}`.
    BigA { beta: f64, mu: TimeProfile, k_const: f64, r: f64, weight: WeightPolicy },
    /// `<xi>^gamma e^{nu(t) c <xi>^{1/3}}`.
    BigB { gamma: f64, nu: TimeProfile, k_const: f64 },
    /// `<k, t k>^sigma`.
    DensityWeight { sigma: f64 },
    /// `<xi>^p`.
    Bracket { power: f64 },
    /// Pointwise product of the factors.
    Product(Vec<MultiplierSpec>),
}

#[derive(Debug, Clone)]
pub struct MultiplierSpec {
    pub kind: MultiplierKind,
    pub epsilon: f64,
}

impl MultiplierSpec {
    pub fn new(kind: MultiplierKind, epsilon: f64) -> Self {
        Self { kind, epsilon }
    }

    pub fn identity() -> Self {
        Self::new(MultiplierKind::Sobolev { s: 0.0, m: 0 }, 0.0)
    }

    /// Natural log of the symbol at `(t, k, eta)`.
    pub fn log_symbol(&self, t: f64, k: f64, eta: f64) -> f64 {
        let radius = |kc: f64| (kc * self.epsilon).cbrt();
        match &self.kind {
            MultiplierKind::Sobolev { s, .. } => s * bracket2(k, eta).ln(),
            MultiplierKind::Gevrey { lambda, s } => lambda.at(t) * bracket2(k, eta).powf(*s),
            MultiplierKind::BigA { beta, mu, k_const, r, weight } => {
                let c = radius(*k_const);
                let xi = bracket2(k, eta);
                let a = r * c * bracket(eta).cbrt() - weight.log_weight(t, eta);
                let b = r * c * bracket(k).cbrt();
                beta * xi.ln() + mu.at(t) * c * xi.cbrt() + log_sum_exp(a, b)
            }
            MultiplierKind::BigB { gamma, nu, k_const } => {
                let xi = bracket2(k, eta);
                gamma * xi.ln() + nu.at(t) * radius(*k_const) * xi.cbrt()
            }
            MultiplierKind::DensityWeight { sigma } => sigma * bracket2(k, t * k).ln(),
            MultiplierKind::Bracket { power } => power * bracket2(k, eta).ln(),
            MultiplierKind::Product(parts) => {
                // Sorted summation makes the product independent of factor order.
                let mut logs: Vec<f64> = parts.iter().map(|p| p.log_symbol(t, k, eta)).collect();
                logs.sort_by(f64::total_cmp);
                logs.iter().sum()
            }
        }
    }

    /// Symbol value and whether it was capped.
    #[inline]
    pub fn symbol(&self, t: f64, k: f64, eta: f64) -> (f64, bool) {
        let l = self.log_symbol(t, k, eta);
        if l > SATURATION_EXPONENT {
            (SATURATION_EXPONENT.exp(), true)
        } else {
            (l.exp(), false)
        }
    }

    /// Product multiplier `self * other`; nested products are flattened.
    pub fn compose(&self, other: &MultiplierSpec) -> MultiplierSpec {
        let mut parts = Vec::new();
        for s in [self, other] {
            match &s.kind {
                MultiplierKind::Product(p) => parts.extend(p.iter().cloned()),
                _ => parts.push(s.clone()),
            }
        }
        MultiplierSpec::new(MultiplierKind::Product(parts), self.epsilon)
    }
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Pointwise multiplication by the symbol at time `t`. Returns the product
/// and the saturation flag.
pub fn apply_multiplier(spec: &MultiplierSpec, f: &DistributionSpectrum, t: f64) -> (DistributionSpectrum, bool) {
    let mut out = f.clone();
    let mesh = *f.mesh();
    let n = mesh.n_eta();
    let mut saturated = false;
    for k in mesh.modes() {
        let row = out.row_mut(k);
        for (j, v) in row.iter_mut().enumerate() {
            let (s, sat) = spec.symbol(t, k as f64, mesh.eta(j));
            saturated |= sat;
            *v *= s;
        }
        debug_assert_eq!(row.len(), n);
    }
    (out, saturated)
}

impl FromStr for MultiplierSpec {
    type Err = Error;

    /// `kind:key=value,...` with kinds `sobolev` (s, m), `gevrey` (lambda, s),
    /// `big_a` (beta, mu, K, r, eps, amplification), `big_b` (gamma, nu, K, eps),
    /// `density_weight` (sigma).
    fn from_str(text: &str) -> Result<Self> {
        let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
        let mut params = std::collections::BTreeMap::new();
        for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) =
                item.split_once('=').ok_or_else(|| Error::Domain(format!("expected key=value, got '{item}'")))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::Domain(format!("'{v}' is not a number")))?;
            params.insert(k.trim().to_string(), v);
        }
        let allowed: &[&str] = match kind.trim() {
            "sobolev" => &["s", "m"],
            "gevrey" => &["lambda", "s"],
            "big_a" => &["beta", "mu", "K", "r", "eps", "amplification"],
            "big_b" => &["gamma", "nu", "K", "eps"],
            "density_weight" => &["sigma"],
            other => return Err(Error::Domain(format!("unknown multiplier kind '{other}'"))),
        };
        if let Some(bad) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::Domain(format!("unknown parameter '{bad}' for {kind}")));
        }
        let get = |k: &str, d: f64| params.get(k).copied().unwrap_or(d);
        let eps = get("eps", 0.0);
        let kind = match kind.trim() {
            "sobolev" => MultiplierKind::Sobolev { s: get("s", 0.0), m: get("m", 0.0) as u32 },
            "gevrey" => {
                MultiplierKind::Gevrey { lambda: TimeProfile::Constant(get("lambda", 0.0)), s: get("s", 1.0 / 3.0) }
            }
            "big_a" => {
                let amp = get("amplification", 1.0);
                MultiplierKind::BigA {
                    beta: get("beta", 0.0),
                    mu: TimeProfile::Constant(get("mu", 0.0)),
                    k_const: get("K", 1.0),
                    r: get("r", 0.0),
                    weight: if amp > 1.0 {
                        WeightPolicy::EchoWindow { amplification: amp, max_echoes: 64 }
                    } else {
                        WeightPolicy::Unit
                    },
                }
            }
            "big_b" => MultiplierKind::BigB {
                gamma: get("gamma", 0.0),
                nu: TimeProfile::Constant(get("nu", 0.0)),
                k_const: get("K", 1.0),
            },
            _ => MultiplierKind::DensityWeight { sigma: get("sigma", 0.0) },
        };
        Ok(MultiplierSpec::new(kind, eps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::FrequencyMesh;
    use num_complex::Complex64;

    fn field() -> DistributionSpectrum {
        let mesh = FrequencyMesh::new(2, 6.0, 61).unwrap();
        DistributionSpectrum::from_fn(mesh, 0.0, |k, e| Complex64::new((-e * e / 4.0).exp(), 0.1 * k as f64 * e))
    }

    #[test]
    fn sobolev_zero_is_identity() {
        let f = field();
        let (g, sat) = apply_multiplier(&MultiplierSpec::identity(), &f, 0.0);
        assert_eq!(g, f);
        assert!(!sat);
    }

    #[test]
    fn gevrey_single_mode() {
        let (lambda, s) = (0.3, 0.5);
        let spec = MultiplierSpec::new(MultiplierKind::Gevrey { lambda: TimeProfile::Constant(lambda), s }, 0.0);
        let (v, _) = spec.symbol(0.0, 1.0, 2.0);
        let expect = (lambda * 6f64.powf(s / 2.0)).exp();
        assert!((v - expect).abs() < 1e-14 * expect);
    }

    #[test]
    fn big_a_collapses_without_weight() {
        let mu = 0.8;
        let a = MultiplierSpec::new(
            MultiplierKind::BigA {
                beta: 2.0,
                mu: TimeProfile::Constant(mu),
                k_const: 4.0,
                r: 0.0,
                weight: WeightPolicy::Unit,
            },
            0.05,
        );
        let c = (4.0f64 * 0.05).cbrt();
        for &(k, e) in &[(1.0, 2.0), (0.0, 0.0), (-3.0, 17.5)] {
            let xi = bracket2(k, e);
            let expect = 2.0 * xi.powi(2) * (mu * c * xi.cbrt()).exp();
            let (v, _) = a.symbol(1.0, k, e);
            assert!((v - expect).abs() < 1e-13 * expect);
        }
    }

    #[test]
    fn saturation_is_flagged() {
        let spec = MultiplierSpec::new(MultiplierKind::Gevrey { lambda: TimeProfile::Constant(10.0), s: 1.0 }, 0.0);
        let (v, sat) = spec.symbol(0.0, 1.0, 100.0);
        assert!(sat && v.is_finite());
        let (_, sat) = apply_multiplier(&spec, &field(), 0.0);
        assert!(!sat);
    }

    #[test]
    fn echo_window_weight_decreases() {
        let w = WeightPolicy::EchoWindow { amplification: 3.0, max_echoes: 10 };
        let mut last = 0.0;
        for i in 0..400 {
            let v = w.log_weight(i as f64 * 0.5, 50.0);
            assert!(v <= last + 1e-15 && v <= 0.0);
            last = v;
        }
        assert!((last + 10.0 * 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn parse_spec_strings() {
        let s: MultiplierSpec = "gevrey:lambda=0.3,s=0.333".parse().unwrap();
        assert!(matches!(s.kind, MultiplierKind::Gevrey { s, .. } if s == 0.333));
        assert!("gevrey:bogus=1".parse::<MultiplierSpec>().is_err());
        assert!("nope".parse::<MultiplierSpec>().is_err());
        assert!("sobolev:s=x".parse::<MultiplierSpec>().is_err());
    }
}
