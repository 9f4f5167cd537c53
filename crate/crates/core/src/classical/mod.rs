//! Classical electromagnetic potentials and the phase field they induce on
//! the de Sitter hyperboloid.
//!
//! Potentials are in Gaussian units unless a [`UnitSystem`] says otherwise,
//! so a charge at rest has `A⁰ = q/r` and `x·A = q tanh ψ` on the hyperboloid.

mod coulomb;
mod homogeneous;
mod phase;
mod retarded;

use serde::{Deserialize, Serialize};

pub use coulomb::{boosted_coulomb, bremsstrahlung_momentum, PointCharge};
pub use homogeneous::{
    extract_homogeneous, homogeneous_sampler, validate_scalar_homogeneity, wick_homogeneity_partitions,
    ExtractOptions, ExtractionReport, ScaleFit,
};
pub use phase::{
    mode_decompose, phase_on_hyperboloid, read_decomposition_csv, DecompositionResult, ModeCoefficient,
    PhaseField, PhaseSample, MIN_PSI_EXTENT,
};
pub use retarded::{retarded_potential, Axis, CurrentGrid};

/// Default coupling `e` used for the phase `S = -e x·A`.
pub const DEFAULT_E: f64 = 1.0;

/// Unit convention for retarded integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitSystem {
    /// `A = ∫ j / |x - x₁| d³x₁`, so `A⁰ = q/r` at rest.
    #[default]
    Gaussian,
    /// `A = (1/4π) ∫ j / |x - x₁| d³x₁`.
    Heaviside,
}

impl UnitSystem {
    /// Prefactor multiplying `∫ j / |x - x₁| d³x₁`.
    pub fn prefactor(self) -> f64 {
        match self {
            UnitSystem::Gaussian => 1.0,
            UnitSystem::Heaviside => 1.0 / (4.0 * std::f64::consts::PI),
        }
    }
}
