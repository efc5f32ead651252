use std::f64::consts::PI;

use num_complex::Complex64;

use super::grid::FrequencyMesh;
use super::interp::interpolate_line;
use crate::error::{Error, Result};

/// Complex field `g^(k, eta)` on a [`FrequencyMesh`], stored k-major with
/// row 0 holding `k = -k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSpectrum {
    mesh: FrequencyMesh,
    values: Vec<Complex64>,
    time: f64,
}

impl DistributionSpectrum {
    pub fn zeros(mesh: FrequencyMesh, time: f64) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); mesh.n_modes() * mesh.n_eta()];
        Self { mesh, values, time }
    }

    pub fn from_fn<F>(mesh: FrequencyMesh, time: f64, f: F) -> Self
    where
        F: Fn(i64, f64) -> Complex64,
    {
        let mut out = Self::zeros(mesh, time);
        let n = mesh.n_eta();
        for k in mesh.modes() {
            let r = mesh.row(k);
            for j in 0..n {
                out.values[r * n + j] = f(k, mesh.eta(j));
            }
        }
        out
    }

    pub fn from_values(mesh: FrequencyMesh, values: Vec<Complex64>, time: f64) -> Result<Self> {
        if values.len() != mesh.n_modes() * mesh.n_eta() {
            return Err(Error::Domain(format!(
                "expected {} values, got {}",
                mesh.n_modes() * mesh.n_eta(),
                values.len()
            )));
        }
        Ok(Self { mesh, values, time })
    }

    pub fn mesh(&self) -> &FrequencyMesh {
        &self.mesh
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }
    pub fn time(&self) -> f64 {
        self.time
    }
    pub fn set_time(&mut self, time: f64) {
        self.time = time;
    }

    pub fn row(&self, k: i64) -> &[Complex64] {
        let n = self.mesh.n_eta();
        let r = self.mesh.row(k);
        &self.values[r * n..(r + 1) * n]
    }

    pub fn row_mut(&mut self, k: i64) -> &mut [Complex64] {
        let n = self.mesh.n_eta();
        let r = self.mesh.row(k);
        &mut self.values[r * n..(r + 1) * n]
    }

    #[inline]
    pub fn get(&self, k: i64, j: usize) -> Complex64 {
        self.values[self.mesh.row(k) * self.mesh.n_eta() + j]
    }

    /// `g^(k, eta)` by interpolation along the row.
    pub fn value_at(&self, k: i64, eta: f64) -> Result<Complex64> {
        if !self.mesh.contains_mode(k) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        interpolate_line(self.row(k), &self.mesh, eta)
    }

    /// `max |g(-k, -eta) - conj g(k, eta)|` over the grid.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.mesh.n_eta();
        let mut worst = 0.0f64;
        for k in 0..=self.mesh.k_max() as i64 {
            let a = self.row(k);
            let b = self.row(-k);
            for j in 0..n {
                worst = worst.max((b[n - 1 - j] - a[j].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }

    /// Rectangle-rule `sum_k sum_j |g|^2 d_eta`.
    pub fn l2_squared(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        s * self.mesh.d_eta()
    }

    /// Plain `L^2` quadrature norm of the spectrum.
    pub fn l2_quadrature(&self) -> f64 {
        self.l2_squared().sqrt()
    }

    /// `self += a * other` on a shared mesh.
    pub fn axpy(&mut self, a: f64, other: &Self) {
        debug_assert_eq!(self.mesh, other.mesh);
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x += y * a;
        }
    }
}

/// `rho^(t, k) = 2 pi g^(k, k t)` read off the critical line.
pub fn sample_density(f: &DistributionSpectrum, t: f64, k: i64) -> Result<Complex64> {
    if !f.mesh().contains_mode(k) {
        return Err(Error::Domain(format!("mode {k} outside the mesh")));
    }
    Ok(f.value_at(k, k as f64 * t)? * (2.0 * PI))
}
