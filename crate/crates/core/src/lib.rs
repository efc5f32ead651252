//! Spectral toolkit for phase mixing, linear Landau damping and nonlinear
//! plasma echoes in the one-dimensional Vlasov equation on `T x R`.
//!
//! Everything is expressed in the Fourier variables `(k, eta)` of the profile
//! `g(t, z, v) = h(t, z + t v, v)`, with the convention
//! `g^(k, eta) = (1/2pi) \int\int e^{-i z k - i v eta} g dz dv`.
//! The density is read off the critical line: `rho^(t, k) = 2pi g^(t, k, k t)`.

pub mod echo;
pub mod error;
pub mod free_transport;
pub mod linear;
pub mod nonlinear;
pub mod norms;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
