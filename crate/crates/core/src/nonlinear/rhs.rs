use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::state::{ModelOptions, NonlinearState};
use crate::error::Result;
use crate::spectral::{interpolate_line, BackgroundProfile, DistributionSpectrum, FrequencyMesh, Stencil};

/// Profile equation
/// `d_t g^(k, eta) = -sum_{l != 0} a_l (eta - k t) [g^(k - l, eta - l t) + 2pi f0^(eta - k t) delta_{kl}]`
/// with `a_l = (1/8pi^3) l W^(l) rho^_l(t)` and `rho^_l = 2pi g^(l, l t)`.
#[derive(Debug, Clone)]
pub struct RhsOutput {
    pub rate: DistributionSpectrum,
    /// Set when some row carries content up to the `eta` boundary.
    pub aliasing: bool,
}

pub fn rhs_profile(state: &NonlinearState, t: f64) -> Result<RhsOutput> {
    let ctx = RhsContext::new(state);
    let mut out = vec![Complex64::new(0.0, 0.0); state.g.values().len()];
    let aliasing = ctx.eval(state.g.values(), t, &mut out)?;
    let rate = DistributionSpectrum::from_values(*state.g.mesh(), out, t)?;
    Ok(RhsOutput { rate, aliasing })
}

#[derive(Debug, Clone, Copy)]
struct Support {
    lo: usize,
    hi: usize,
    max: f64,
}

pub(crate) struct RhsContext {
    mesh: FrequencyMesh,
    /// `W^(l)` for `l = 1..=k_max`.
    w: Vec<f64>,
    background: Option<BackgroundProfile>,
    options: ModelOptions,
}

impl RhsContext {
    pub(crate) fn new(state: &NonlinearState) -> Self {
        let mesh = *state.g.mesh();
        let w = (1..=mesh.k_max() as i64).map(|l| state.potential.symbol_or_zero(l)).collect();
        Self { mesh, w, background: state.background, options: state.options }
    }

    /// Field coefficients `(l W^(l) rho^_l) / (8 pi^3)` for `l = 1..=k_max`.
    /// The coefficient of `-l` is the negative conjugate.
    pub(crate) fn field(&self, g: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        let n = self.mesh.n_eta();
        let c = 1.0 / (8.0 * PI * PI * PI);
        (1..=self.mesh.k_max())
            .map(|l| {
                let r = self.mesh.row(l as i64);
                let rho = interpolate_line(&g[r * n..(r + 1) * n], &self.mesh, l as f64 * t)? * (2.0 * PI);
                Ok(rho * (l as f64 * self.w[l - 1] * c))
            })
            .collect()
    }

    /// Largest `|eta - k t|` reachable on the grid at time `t`.
    pub(crate) fn eta_reach(&self, t: f64) -> f64 {
        self.mesh.eta_max() + self.mesh.k_max() as f64 * t.abs()
    }

    /// Writes the right-hand side into `out`; returns the aliasing flag.
    pub(crate) fn eval(&self, g: &[Complex64], t: f64, out: &mut [Complex64]) -> Result<bool> {
        let mesh = &self.mesh;
        let n = mesh.n_eta();
        let km = mesh.k_max() as i64;
        let a = self.field(g, t)?;
        let coeff = |l: i64| if l > 0 { a[(l - 1) as usize] } else { -a[(-l - 1) as usize].conj() };

        let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        let bg_peak = self.background.map_or(0.0, |b| 2.0 * PI * b.symbol(0.0));
        let floor_abs = self.options.floor * gmax.max(bg_peak);
        let supports: Vec<Option<Support>> = g
            .chunks(n)
            .map(|row| {
                let lo = row.iter().position(|v| v.norm() > floor_abs)?;
                let hi = row.iter().rposition(|v| v.norm() > floor_abs)?;
                let max = row[lo..=hi].iter().fold(0.0f64, |m, v| m.max(v.norm()));
                Some(Support { lo, hi, max })
            })
            .collect();
        let aliasing = supports.iter().flatten().any(|s| s.lo <= 1 || s.hi + 2 >= n);
        let reach = self.eta_reach(t);
        let bg_radius = self.background.map(|b| b.support_radius(floor_abs / (2.0 * PI)));

        // Stencils for reading g^(., eta_j - l t), per l.
        let stencils: Vec<Stencil> =
            (-km..=km).map(|l| Stencil::at(-(l as f64) * t / mesh.d_eta(), mesh.interpolation())).collect();

        let mid = mesh.mid();
        let d_eta = mesh.d_eta();
        let start = mesh.row(0) * n;
        let (neg, nonneg) = out.split_at_mut(start);

        nonneg.par_chunks_mut(n).enumerate().for_each(|(ki, row_out)| {
            let k = ki as i64;
            let kt = k as f64 * t;
            let j_min = if k == 0 { mid } else { 0 };
            row_out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            for l in -km..=km {
                if l == 0 {
                    continue;
                }
                let al = coeff(l);
                let an = al.norm();
                if an == 0.0 {
                    continue;
                }
                if self.options.self_interaction {
                    let s = k - l;
                    if s.abs() <= km {
                        let rs = mesh.row(s);
                        if let Some(sup) = supports[rs] {
                            if an * reach * sup.max >= floor_abs {
                                let src = &g[rs * n..(rs + 1) * n];
                                let st = stencils[(l + km) as usize];
                                accumulate(row_out, src, st, sup, j_min, al, kt, mid, d_eta);
                            }
                        }
                    }
                }
                if l == k {
                    if let (Some(bg), Some(radius)) = (self.background, bg_radius) {
                        let lo = mesh.position(kt - radius).ceil().max(j_min as f64) as usize;
                        let hi = mesh.position(kt + radius).floor().min((n - 1) as f64);
                        if hi >= lo as f64 {
                            for j in lo..=hi as usize {
                                let x = (j as f64 - mid as f64) * d_eta - kt;
                                row_out[j] -= al * (x * 2.0 * PI * bg.symbol(x));
                            }
                        }
                    }
                }
            }
        });

        // Hermitian completion: out(-k, -eta) = conj out(k, eta).
        let row0 = &mut nonneg[..n];
        for j in 0..mid {
            row0[j] = row0[n - 1 - j].conj();
        }
        for k in 1..=km as usize {
            let src = &nonneg[k * n..(k + 1) * n];
            let r = (km as usize - k) * n;
            let dst = &mut neg[r..r + n];
            for j in 0..n {
                dst[j] = src[n - 1 - j].conj();
            }
        }
        Ok(aliasing)
    }
}

/// `row_out[j] -= a (eta_j - k t) (S g)(j)` where `S` reads `src` through `st`
/// shifted to `j`, zero outside the grid.
#[allow(clippy::too_many_arguments)]
#[inline]
fn accumulate(
    row_out: &mut [Complex64],
    src: &[Complex64],
    st: Stencil,
    sup: Support,
    j_min: usize,
    a: Complex64,
    kt: f64,
    mid: usize,
    d_eta: f64,
) {
    let n = row_out.len() as isize;
    let len = st.len as isize;
    let b = st.base;
    // Stencil at j touches nodes b + j .. b + j + len - 1.
    let j_lo = (sup.lo as isize - b - (len - 1)).max(j_min as isize);
    let j_hi = (sup.hi as isize - b).min(n - 1);
    if j_hi < j_lo {
        return;
    }
    let in_lo = (-b).max(j_lo);
    let in_hi = (n - len - b).min(j_hi);
    let x0 = -(mid as f64) * d_eta - kt;
    let edge = |j: isize, out: &mut [Complex64]| {
        let v = st.shifted(j).apply_zero_extended(src);
        let x = x0 + j as f64 * d_eta;
        out[j as usize] -= a * x * v;
    };
    if in_hi < in_lo {
        for j in j_lo..=j_hi {
            edge(j, row_out);
        }
        return;
    }
    for j in j_lo..in_lo {
        edge(j, row_out);
    }
    let w = st.weights;
    match st.len {
        1 => {
            for j in in_lo..=in_hi {
                let x = x0 + j as f64 * d_eta;
                row_out[j as usize] -= a * (x * src[(j + b) as usize]);
            }
        }
        2 => {
            for j in in_lo..=in_hi {
                let p = (j + b) as usize;
                let v = src[p] * w[0] + src[p + 1] * w[1];
                let x = x0 + j as f64 * d_eta;
                row_out[j as usize] -= a * (v * x);
            }
        }
        _ => {
            for j in in_lo..=in_hi {
                let p = (j + b) as usize;
                let v = src[p] * w[0] + src[p + 1] * w[1] + src[p + 2] * w[2] + src[p + 3] * w[3];
                let x = x0 + j as f64 * d_eta;
                row_out[j as usize] -= a * (v * x);
            }
        }
    }
    for j in (in_hi + 1)..=j_hi {
        edge(j, row_out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::PotentialLaw;

    fn mesh() -> FrequencyMesh {
        FrequencyMesh::new(3, 40.0, 801).unwrap()
    }

    #[test]
    fn zero_profile_has_zero_rate() {
        let g = DistributionSpectrum::zeros(mesh(), 0.0);
        let st =
            NonlinearState::new(g, Some(BackgroundProfile::lorentzian(0.1).unwrap()), PotentialLaw::gravitational());
        let r = rhs_profile(&st, 1.0).unwrap();
        assert_eq!(r.rate.max_abs(), 0.0);
        assert!(!r.aliasing);
    }

    /// Direct evaluation of the sum at one node with interpolated reads.
    fn brute(st: &NonlinearState, t: f64, k: i64, j: usize) -> Complex64 {
        let m = st.g.mesh();
        let eta = m.eta(j);
        let mut acc = Complex64::new(0.0, 0.0);
        for l in -(m.k_max() as i64)..=m.k_max() as i64 {
            if l == 0 {
                continue;
            }
            let rho = st.g.value_at(l, l as f64 * t).unwrap() * (2.0 * PI);
            let a = rho * (l as f64 * st.potential.symbol(l).unwrap() / (8.0 * PI * PI * PI));
            let src = st.g.value_at(k - l, eta - l as f64 * t).unwrap_or_default();
            let bg = if l == k { 2.0 * PI * st.background.unwrap().symbol(eta - k as f64 * t) } else { 0.0 };
            acc -= a * (eta - k as f64 * t) * (src + bg);
        }
        acc
    }

    #[test]
    fn matches_direct_sum_away_from_edges() {
        let m = mesh();
        let g = DistributionSpectrum::from_fn(m, 0.0, |k, eta| {
            let e = (-(eta - k as f64).powi(2) / 8.0).exp();
            Complex64::new(e, 0.1 * k as f64 * e)
        });
        // Hermitian: g(-k,-eta) = conj g(k,eta) holds for this symbol.
        assert!(g.hermitian_defect() < 1e-15);
        let st = NonlinearState::new(
            g,
            Some(BackgroundProfile::lorentzian(0.2).unwrap()),
            PotentialLaw::coulomb(1.0).unwrap(),
        );
        let t = 0.73;
        let r = rhs_profile(&st, t).unwrap();
        for k in -3..=3i64 {
            for j in (300..500).step_by(7) {
                let want = brute(&st, t, k, j);
                let got = r.rate.get(k, j);
                assert!((got - want).norm() <= 1e-12 * (1.0 + want.norm()), "k={k} j={j}: {got} vs {want}");
            }
        }
        assert!(r.rate.hermitian_defect() == 0.0);
    }

    #[test]
    fn linear_mode_drops_self_interaction() {
        let m = mesh();
        let g = DistributionSpectrum::from_fn(m, 0.0, |k, eta| {
            if k.abs() == 1 {
                Complex64::new((-eta.abs()).exp(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let mut st = NonlinearState::new(g, None, PotentialLaw::gravitational());
        st.options.self_interaction = false;
        let r = rhs_profile(&st, 0.5).unwrap();
        assert_eq!(r.rate.max_abs(), 0.0);
        st.options.self_interaction = true;
        let r = rhs_profile(&st, 0.5).unwrap();
        assert!(r.rate.max_abs() > 0.0);
        // Only k = 0, +-2 are produced from +-1 interacting with itself.
        assert_eq!(r.rate.row(1).iter().fold(0.0f64, |m, v| m.max(v.norm())), 0.0);
    }
}
