use num_complex::Complex64;

use super::grid::{FrequencyMesh, Interpolation};
use crate::error::{Error, Result};

/// Positions closer than this (in node units) to a node use the node value.
const NODE_SNAP: f64 = 1e-9;

/// Interpolation weights for a fractional node position. Node `base + i`
/// carries `weights[i]` for `i < len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub base: isize,
    pub weights: [f64; 4],
    pub len: usize,
}

impl Stencil {
    pub fn at(position: f64, order: Interpolation) -> Self {
        let nearest = position.round();
        if (position - nearest).abs() <= NODE_SNAP {
            return Self { base: nearest as isize, weights: [1.0, 0.0, 0.0, 0.0], len: 1 };
        }
        let floor = position.floor();
        let f = position - floor;
        match order {
            Interpolation::Linear => Self { base: floor as isize, weights: [1.0 - f, f, 0.0, 0.0], len: 2 },
            Interpolation::Cubic => Self { base: floor as isize - 1, weights: cubic_weights(f + 1.0), len: 4 },
        }
    }

    /// Same weights, stencil moved by `offset` nodes.
    #[inline]
    pub fn shifted(&self, offset: isize) -> Self {
        Self { base: self.base + offset, ..*self }
    }

    /// Apply to `values`, treating nodes outside the slice as zero.
    #[inline]
    pub fn apply_zero_extended(&self, values: &[Complex64]) -> Complex64 {
        let n = values.len() as isize;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.len {
            let j = self.base + i as isize;
            if j >= 0 && j < n {
                acc += values[j as usize] * self.weights[i];
            }
        }
        acc
    }

    /// Whether every node of the stencil lies in `0..n`.
    #[inline]
    pub fn inside(&self, n: usize) -> bool {
        self.base >= 0 && self.base + self.len as isize <= n as isize
    }
}

/// Lagrange weights on nodes 0, 1, 2, 3 at local coordinate `x`.
fn cubic_weights(x: f64) -> [f64; 4] {
    let (a, b, c, d) = (x, x - 1.0, x - 2.0, x - 3.0);
    [-b * c * d / 6.0, a * c * d / 2.0, -a * b * d / 2.0, a * b * c / 6.0]
}

/// Interpolate one `eta` line at `eta`. Near the grid edges the stencil is
/// moved inward so no extrapolation beyond the data happens.
pub fn interpolate_line(values: &[Complex64], mesh: &FrequencyMesh, eta: f64) -> Result<Complex64> {
    let n = mesh.n_eta();
    let p = mesh.position(eta);
    if !(p >= -NODE_SNAP && p <= (n - 1) as f64 + NODE_SNAP) {
        return Err(Error::OutOfGrid { eta, eta_max: mesh.eta_max() });
    }
    let mut st = Stencil::at(p, mesh.interpolation());
    if st.len == 1 {
        let j = st.base.clamp(0, n as isize - 1) as usize;
        return Ok(values[j]);
    }
    if !st.inside(n) {
        // Recompute the weights for a stencil pinned to the edge.
        let len = st.len.min(n);
        let base = st.base.clamp(0, (n - len) as isize);
        let x = p - base as f64;
        st = match len {
            4 => Stencil { base, weights: cubic_weights(x), len },
            _ => Stencil { base, weights: [1.0 - x, x, 0.0, 0.0], len: 2 },
        };
    }
    Ok(st.apply_zero_extended(values))
}
