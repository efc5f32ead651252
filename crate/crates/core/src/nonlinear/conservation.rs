use std::f64::consts::PI;

use serde::Serialize;

use super::state::NonlinearState;
use crate::error::Result;
use crate::spectral::sample_density;

/// Invariants of the full equation evaluated on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Conserved {
    pub time: f64,
    /// `\int\int (f0 + g) dz dv`.
    pub mass: f64,
    /// `|| f0 + g ||_{L^2(dz dv)}` (a Casimir).
    pub l2: f64,
    /// `|| g ||_{L^2}`, not conserved when `f0` is present.
    pub perturbation_l2: f64,
    /// `(1/2) \int\int v^2 g`.
    pub kinetic: f64,
    /// `(1/2) \int rho (W * rho)`.
    pub potential: f64,
    /// `kinetic + potential`, plus the background kinetic energy when finite.
    pub energy: f64,
    /// The background has no second moment; `energy` omits its (infinite,
    /// constant) kinetic part.
    pub infinite_moment: bool,
}

pub fn conserved_quantities(state: &NonlinearState) -> Result<Conserved> {
    let g = &state.g;
    let mesh = g.mesh();
    let n = mesh.n_eta();
    let mid = mesh.mid();
    let d = mesh.d_eta();
    let t = g.time();
    let bg = state.background;

    let row0 = g.row(0);
    let bg_mass = bg.map_or(0.0, |b| 2.0 * PI * b.mass());
    let mass = bg_mass + 2.0 * PI * row0[mid].re;

    let mut l2sq = 0.0;
    for k in mesh.modes() {
        let row = g.row(k);
        for (j, v) in row.iter().enumerate() {
            let w = match (k, bg) {
                (0, Some(b)) => v + 2.0 * PI * b.symbol(mesh.eta(j)),
                _ => *v,
            };
            l2sq += w.norm_sqr();
        }
    }
    let l2 = (l2sq * d).sqrt();

    let second = if n >= 3 { (row0[mid + 1] + row0[mid - 1] - row0[mid] * 2.0).re / (d * d) } else { 0.0 };
    let kinetic = -PI * second;
    let mut potential = 0.0;
    for k in 1..=mesh.k_max() as i64 {
        let w = state.potential.symbol_or_zero(k);
        if w != 0.0 {
            // Modes k and -k contribute equally.
            potential += 2.0 * w * sample_density(g, t, k)?.norm_sqr() / (16.0 * PI * PI * PI);
        }
    }
    let (bg_kinetic, infinite_moment) = match bg.map(|b| b.second_moment()) {
        Some(Some(m2)) => (PI * m2, false),
        Some(None) => (0.0, true),
        None => (0.0, false),
    };
    Ok(Conserved {
        time: t,
        mass,
        l2,
        perturbation_l2: g.l2_quadrature(),
        kinetic,
        potential,
        energy: bg_kinetic + kinetic + potential,
        infinite_moment,
    })
}
