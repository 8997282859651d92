//! Superpositions of two coherent states of the dressed oscillator, evolved
//! under `H_eff = z₀ N`. Level `n` evolves with `zₙ = n z₀`, so coherent
//! states stay coherent and only shrink.

mod density;
pub mod fock;

pub use density::{
    basis_convergence, moving_basis, preferred_density, reduced_density, BasisReport, MovingBasis, ReducedDensity,
};

use thiserror::Error;

use crate::multipole::{Mode, ModeSum, MultipoleError};
use crate::numerics::{NumericsError, C64};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LeeFriedrichsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid effective model: {0}")]
    InvalidModel(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("closed forms require alpha1 = 0, got {alpha1}")]
    ConventionViolation { alpha1: C64 },
    #[error("n_max = {n_max} is below the required cutoff {required}")]
    TruncationTooSmall { n_max: usize, required: usize },
    #[error("alpha1 = alpha2: the state is not a superposition")]
    NoSuperposition,
    #[error("gamma0 = 0: nothing decays")]
    NonDecaying,
    #[error("frame is singular (min Gram eigenvalue {min_eigenvalue:.3e}); alpha1 and alpha2 coincide")]
    GramSingular { min_eigenvalue: f64 },
    #[error(transparent)]
    Multipole(#[from] MultipoleError),
    #[error(transparent)]
    Numerics(NumericsError),
}

impl From<NumericsError> for LeeFriedrichsError {
    fn from(e: NumericsError) -> Self {
        match e {
            NumericsError::GramSingular { min_eigenvalue } => LeeFriedrichsError::GramSingular { min_eigenvalue },
            other => LeeFriedrichsError::Numerics(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, LeeFriedrichsError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentAmplitude {
    pub alpha: C64,
}

impl CoherentAmplitude {
    pub fn new(alpha: C64) -> Self {
        Self { alpha }
    }

    pub fn mean_photons(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    /// `⌈|α|² + 10√(|α|²+1)⌉`.
    pub fn default_cutoff(&self) -> usize {
        required_cutoff(self.mean_photons())
    }
}

fn required_cutoff(mean: f64) -> usize {
    (mean + 10.0 * (mean + 1.0).sqrt()).ceil() as usize
}

fn check_cutoff(mean: f64, n_max: usize) -> Result<()> {
    let required = required_cutoff(mean);
    if n_max < required {
        return Err(LeeFriedrichsError::TruncationTooSmall { n_max, required });
    }
    Ok(())
}

/// `a|α₁⟩ + b|α₂⟩` with `|a|² + |b|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionState {
    pub a: C64,
    pub b: C64,
    pub alpha1: CoherentAmplitude,
    pub alpha2: CoherentAmplitude,
}

impl SuperpositionState {
    /// Rescales `(a, b)` to unit norm.
    pub fn new(a: C64, b: C64, alpha1: C64, alpha2: C64) -> Result<Self> {
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(LeeFriedrichsError::InvalidState("weights a and b must be finite and not both zero".into()));
        }
        if !(alpha1.norm().is_finite() && alpha2.norm().is_finite()) {
            return Err(LeeFriedrichsError::InvalidState("coherent amplitudes must be finite".into()));
        }
        Ok(Self {
            a: a / norm,
            b: b / norm,
            alpha1: CoherentAmplitude::new(alpha1),
            alpha2: CoherentAmplitude::new(alpha2),
        })
    }

    /// A packet at the origin superposed with one displaced by `L₀`:
    /// `α₁ = 0`, `α₂ = √(mω/2)·L₀`.
    pub fn displaced(a: C64, b: C64, mass: f64, omega: f64, l0: f64) -> Result<Self> {
        if !(mass > 0.0 && omega > 0.0) || !(l0 >= 0.0) || !(mass * omega * l0).is_finite() {
            return Err(LeeFriedrichsError::InvalidState(format!(
                "need mass > 0, omega > 0, L0 >= 0; got {mass}, {omega}, {l0}"
            )));
        }
        Self::new(a, b, C64::new(0.0, 0.0), C64::new((0.5 * mass * omega).sqrt() * l0, 0.0))
    }

    fn require_convention(&self) -> Result<()> {
        if self.alpha1.alpha != C64::new(0.0, 0.0) {
            return Err(LeeFriedrichsError::ConventionViolation { alpha1: self.alpha1.alpha });
        }
        Ok(())
    }
}

/// `H_eff = z₀ N` with `z₀ = ω₀′ − iγ₀`. `γ₀ = 0` is admitted as the unitary limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveModel {
    pub z0: C64,
}

impl EffectiveModel {
    pub fn new(z0: C64) -> Result<Self> {
        if !(z0.im <= 0.0) || !z0.re.is_finite() || !z0.im.is_finite() {
            return Err(LeeFriedrichsError::InvalidModel(format!("need finite z0 with Im z0 <= 0, got {z0}")));
        }
        Ok(Self { z0 })
    }

    pub fn omega_prime(&self) -> f64 {
        self.z0.re
    }

    pub fn gamma0(&self) -> f64 {
        -self.z0.im
    }

    pub fn z_n(&self, n: usize) -> C64 {
        self.z0 * n as f64
    }
}

/// `⟨α|β⟩ = exp(−(|α|² + |β|²)/2 + ᾱβ)`.
pub fn overlap(alpha: C64, beta: C64) -> C64 {
    (-0.5 * (alpha.norm_sqr() + beta.norm_sqr()) + alpha.conj() * beta).exp()
}

/// `e^{−iH_eff t}|α⟩ = e^{log_norm} |α e^{−iz₀t}⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolvedCoherent {
    pub alpha_t: C64,
    pub log_norm: f64,
}

pub fn evolve_coherent(alpha0: C64, em: &EffectiveModel, t: f64) -> Result<EvolvedCoherent> {
    check_time(t)?;
    let alpha_t = alpha0 * (C64::new(0.0, -t) * em.z0).exp();
    Ok(EvolvedCoherent { alpha_t, log_norm: 0.5 * (alpha_t.norm_sqr() - alpha0.norm_sqr()) })
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(LeeFriedrichsError::InvalidArgument(format!("t must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// `ab̄·exp(−|α₂|²(1 − e^{i z̄₀ t}))`.
pub fn offdiagonal_closed(state: &SuperpositionState, em: &EffectiveModel, t: f64) -> Result<C64> {
    state.require_convention()?;
    check_time(t)?;
    let lambda = state.alpha2.mean_photons();
    let decay = (C64::new(0.0, t) * em.z0.conj()).exp();
    Ok(state.a * state.b.conj() * (-lambda * (1.0 - decay)).exp())
}

/// The off-diagonal element as a Poisson-weighted mode sum: level `n`
/// carries weight `ab̄ e^{−|α₂|²}|α₂|²ⁿ/n!`, frequency `−nω₀′` and rate `nγ₀`.
/// The `n = 0` term is kept as a non-decaying mode.
pub fn offdiagonal_modes(state: &SuperpositionState, em: &EffectiveModel, n_max: usize) -> Result<ModeSum> {
    state.require_convention()?;
    let lambda = state.alpha2.mean_photons();
    check_cutoff(lambda, n_max)?;
    let ab = state.a * state.b.conj();
    let modes = fock::poisson_weights(lambda, n_max)
        .into_iter()
        .enumerate()
        .map(|(n, p)| {
            let z = em.z_n(n);
            Mode::new(ab * p, -z.re, -z.im)
        })
        .collect();
    Ok(ModeSum::new(C64::new(0.0, 0.0), modes)?)
}

pub fn offdiagonal_series(state: &SuperpositionState, em: &EffectiveModel, t: f64, n_max: usize) -> Result<C64> {
    check_time(t)?;
    Ok(crate::multipole::full_expectation(&offdiagonal_modes(state, em, n_max)?, t))
}

/// Poisson average of `γₙ = nγ₀`, summed up to the default cutoff.
pub fn gamma_eff_lf(state: &SuperpositionState, em: &EffectiveModel) -> Result<f64> {
    gamma_eff_lf_truncated(state, em, state.alpha2.default_cutoff())
}

pub fn gamma_eff_lf_truncated(state: &SuperpositionState, em: &EffectiveModel, n_max: usize) -> Result<f64> {
    state.require_convention()?;
    let lambda = state.alpha2.mean_photons();
    check_cutoff(lambda, n_max)?;
    let mean: f64 = fock::poisson_weights(lambda, n_max).iter().enumerate().map(|(n, p)| p * n as f64).sum();
    Ok(mean * em.gamma0())
}

/// Amplitude-level rates; the coherence probability `|ρ₁₂|²` decays at
/// `probability_rate = 2 γ_eff`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceTimes {
    pub t_d: f64,
    pub t_r: f64,
    pub gamma_eff: f64,
    pub probability_rate: f64,
}

/// `t_D = 1/(γ₀|α₂|²)`, `t_R = 1/γ₀`.
pub fn decoherence_time_lf(state: &SuperpositionState, em: &EffectiveModel) -> Result<DecoherenceTimes> {
    state.require_convention()?;
    let lambda = state.alpha2.mean_photons();
    if lambda == 0.0 {
        return Err(LeeFriedrichsError::NoSuperposition);
    }
    let gamma0 = em.gamma0();
    if !(gamma0 > 0.0) {
        return Err(LeeFriedrichsError::NonDecaying);
    }
    let gamma_eff = gamma0 * lambda;
    Ok(DecoherenceTimes { t_d: 1.0 / gamma_eff, t_r: 1.0 / gamma0, gamma_eff, probability_rate: 2.0 * gamma_eff })
}
