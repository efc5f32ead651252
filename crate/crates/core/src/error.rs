use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("sampling point eta = {eta} lies outside the grid (eta_max = {eta_max})")]
    OutOfGrid { eta: f64, eta_max: f64 },

    #[error("quadrature tail estimate {tail:.3e} exceeds 1e-10")]
    NonConvergence { tail: f64 },

    #[error("argument jump of {jump:.3} rad with {samples} contour samples; refine sampling")]
    Resolution { jump: f64, samples: usize },

    #[error("time step {dt} exceeds the stability bound {bound:.6e}")]
    StabilityBound { dt: f64, bound: f64 },

    #[error("hermitian symmetry defect {0:.3e} exceeds tolerance")]
    Symmetry(f64),

    #[error("growth fit failed: {0}")]
    Fit(String),

    #[error("snapshot format: {0}")]
    Snapshot(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
