//! One discrete level coupled to a continuum in the one-excitation sector.
//!
//! Conventions: poles are written `z₀ = ω₀′ − iγ` with `γ` the amplitude
//! decay rate, so survival probability decays at `2γ`.

mod model;
mod pole;
mod self_energy;
mod survival;

pub use model::{FormFactor, FormFactorFamily, FriedrichsModel};
pub use pole::{characteristic_times, exact_pole, perturbative_pole, CharTime, ResonancePole};
pub use self_energy::{boundary_self_energy, self_energy, Sheet};
pub use survival::{
    pole_background_split, spectral_density, spectral_norm, survival_amplitude, PoleBackground, SpectralOptions,
    SurvivalSeries,
};

use thiserror::Error;

use crate::numerics::{NumericsError, C64};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FriedrichsError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("coupling is zero: the spectral density is a delta function")]
    CouplingZero,
    #[error("self-energy vanishes on the real axis at ω = {omega}")]
    EtaVanishedOnAxis { omega: f64 },
    #[error("form factor has no analytic continuation to the second sheet")]
    ContinuationUnavailable,
    #[error("level at ω₀ = {omega0} does not decay")]
    NonDecaying { omega0: f64 },
    #[error("root search left the lower half plane (z = {z})")]
    PoleOnWrongSheet { z: C64 },
    #[error("rate must be positive, got {0}")]
    NonPositiveRate(f64),
    #[error("spectral density at omega_max = {omega_max} is {density:.3e}, too large to truncate")]
    TruncationTooShort { omega_max: f64, density: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, FriedrichsError>;
