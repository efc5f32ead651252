//! Grids, spectra, equilibria, interaction potentials and density sampling.

mod background;
mod grid;
mod interp;
mod potential;
pub mod snapshot;
mod spectrum;

pub use background::BackgroundProfile;
pub use grid::{make_grid, FrequencyMesh, Interpolation, SpectralGrid};
pub use interp::{interpolate_line, Stencil};
pub use potential::PotentialLaw;
pub use spectrum::{sample_density, DistributionSpectrum};

/// Japanese bracket `<x> = (1 + x^2)^{1/2}`.
#[inline]
pub fn bracket(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// `<k, eta> = (1 + k^2 + eta^2)^{1/2}`.
#[inline]
pub fn bracket2(k: f64, eta: f64) -> f64 {
    (1.0 + k * k + eta * eta).sqrt()
}

/// First `eta`-derivative of one row: centered differences inside,
/// one-sided (second order) at the two ends.
pub fn eta_derivative(row: &[num_complex::Complex64], d_eta: f64) -> Vec<num_complex::Complex64> {
    let n = row.len();
    let mut out = vec![num_complex::Complex64::new(0.0, 0.0); n];
    if n < 3 {
        return out;
    }
    let h2 = 0.5 / d_eta;
    for j in 1..n - 1 {
        out[j] = (row[j + 1] - row[j - 1]) * h2;
    }
    out[0] = (row[0] * -3.0 + row[1] * 4.0 - row[2]) * h2;
    out[n - 1] = (row[n - 1] * 3.0 - row[n - 2] * 4.0 + row[n - 3]) * h2;
    out
}

/// Binomial coefficient for the small orders used by the weighted norms.
pub fn binomial(m: u32, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}
