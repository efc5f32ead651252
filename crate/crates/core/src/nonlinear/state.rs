use crate::spectral::{BackgroundProfile, DistributionSpectrum, PotentialLaw};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelOptions {
    /// Keep the `g`-`g` interaction; `false` gives the linearized equation.
    pub self_interaction: bool,
    /// Values below `floor * max|g|` are treated as zero when reading sources.
    pub floor: f64,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self { self_interaction: true, floor: 1e-22 }
    }
}

/// Profile `g^(t, k, eta)` around the equilibrium `f0` (absent when `None`).
#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearState {
    pub g: DistributionSpectrum,
    pub background: Option<BackgroundProfile>,
    pub potential: PotentialLaw,
    pub options: ModelOptions,
}

impl NonlinearState {
    pub fn new(g: DistributionSpectrum, background: Option<BackgroundProfile>, potential: PotentialLaw) -> Self {
        Self { g, background, potential, options: ModelOptions::default() }
    }

    pub fn with_options(mut self, options: ModelOptions) -> Self {
        self.options = options;
        self
    }

    pub fn time(&self) -> f64 {
        self.g.time()
    }
}
