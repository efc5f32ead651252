use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interpolation order used when reading a spectrum off-node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Interpolation {
    Linear,
    #[default]
    Cubic,
}

/// The `(k, eta)` lattice: modes `-k_max..=k_max` and a uniform, symmetric
/// `eta` grid of `n_eta` points on `[-eta_max, eta_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyMesh {
    k_max: usize,
    eta_max: f64,
    n_eta: usize,
    interpolation: Interpolation,
}

impl FrequencyMesh {
    pub fn new(k_max: usize, eta_max: f64, n_eta: usize) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::domain("k_max must be positive"));
        }
        if !(eta_max.is_finite() && eta_max > 0.0) {
            return Err(Error::domain("eta_max must be positive and finite"));
        }
        if n_eta < 3 {
            return Err(Error::domain("n_eta < 3"));
        }
        if n_eta.is_multiple_of(2) {
            return Err(Error::domain("n_eta must be odd so that eta = 0 is a node"));
        }
        if n_eta > u32::MAX as usize || k_max > (u32::MAX as usize - 1) / 2 {
            return Err(Error::domain("grid dimensions exceed u32 range"));
        }
        Ok(Self { k_max, eta_max, n_eta, interpolation: Interpolation::Cubic })
    }

    pub fn with_interpolation(mut self, interpolation: Interpolation) -> Self {
        self.interpolation = interpolation;
        self
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }
    pub fn eta_max(&self) -> f64 {
        self.eta_max
    }
    pub fn n_eta(&self) -> usize {
        self.n_eta
    }
    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }
    pub fn n_modes(&self) -> usize {
        2 * self.k_max + 1
    }

    pub fn d_eta(&self) -> f64 {
        2.0 * self.eta_max / (self.n_eta - 1) as f64
    }

    /// Index of the `eta = 0` node.
    pub fn mid(&self) -> usize {
        (self.n_eta - 1) / 2
    }

    /// Node `j`, computed as `(j - mid) * d_eta` so the grid is exactly
    /// antisymmetric and `eta(mid) == 0`.
    #[inline]
    pub fn eta(&self, j: usize) -> f64 {
        (j as f64 - self.mid() as f64) * self.d_eta()
    }

    pub fn etas(&self) -> Vec<f64> {
        (0..self.n_eta).map(|j| self.eta(j)).collect()
    }

    /// Row index of mode `k` in k-major storage.
    #[inline]
    pub fn row(&self, k: i64) -> usize {
        debug_assert!(k.unsigned_abs() as usize <= self.k_max);
        (k + self.k_max as i64) as usize
    }

    pub fn contains_mode(&self, k: i64) -> bool {
        k.unsigned_abs() as usize <= self.k_max
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        let k = self.k_max as i64;
        -k..=k
    }

    /// Fractional node position of `eta`.
    #[inline]
    pub fn position(&self, eta: f64) -> f64 {
        eta / self.d_eta() + self.mid() as f64
    }
}

/// Mesh plus time stepping parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    mesh: FrequencyMesh,
    dt: f64,
    t_final: f64,
}

impl SpectralGrid {
    pub fn new(mesh: FrequencyMesh, dt: f64, t_final: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::domain("dt must be positive"));
        }
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::domain("t_final must be positive"));
        }
        let need = mesh.k_max() as f64 * t_final;
        if mesh.eta_max() < need {
            return Err(Error::Domain(format!("eta_max < k_max·t_final ({} < {})", mesh.eta_max(), need)));
        }
        Ok(Self { mesh, dt, t_final })
    }

    pub fn mesh(&self) -> &FrequencyMesh {
        &self.mesh
    }
    pub fn dt(&self) -> f64 {
        self.dt
    }
    pub fn t_final(&self) -> f64 {
        self.t_final
    }
    pub fn k_max(&self) -> usize {
        self.mesh.k_max()
    }
    pub fn eta_max(&self) -> f64 {
        self.mesh.eta_max()
    }
    pub fn n_eta(&self) -> usize {
        self.mesh.n_eta()
    }
    pub fn d_eta(&self) -> f64 {
        self.mesh.d_eta()
    }

    /// Number of steps needed to reach `t_final` from `t0`.
    pub fn steps_from(&self, t0: f64) -> usize {
        let n = ((self.t_final - t0) / self.dt - 1e-9).ceil();
        n.max(0.0) as usize
    }

    pub fn with_dt(self, dt: f64) -> Result<Self> {
        Self::new(self.mesh, dt, self.t_final)
    }

    pub fn with_interpolation(mut self, interpolation: Interpolation) -> Self {
        self.mesh = self.mesh.with_interpolation(interpolation);
        self
    }
}

pub fn make_grid(k_max: usize, eta_max: f64, n_eta: usize, dt: f64, t_final: f64) -> Result<SpectralGrid> {
    SpectralGrid::new(FrequencyMesh::new(k_max, eta_max, n_eta)?, dt, t_final)
}
