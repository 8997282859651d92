use std::f64::consts::{PI, SQRT_2};

use super::{FriedrichsError, Result};
#[cfg(test)]
use crate::numerics::C64;

/// Coupling shape of the continuum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormFactorFamily {
    /// `λ(ω) = g·ω^{1/4} / (1 + (ω/ω_c)²)`, so that `λ²` carries a `√ω`
    /// threshold and extends analytically off the real axis.
    ThresholdLorentzian,
    /// `λ(ω) = g` on `[0, ω_c]` and zero above. No second sheet.
    FlatCutoff,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormFactor {
    pub family: FormFactorFamily,
    pub g: f64,
    pub omega_c: f64,
}

impl FormFactor {
    pub fn new(family: FormFactorFamily, g: f64, omega_c: f64) -> Result<Self> {
        if !(g >= 0.0) || !g.is_finite() {
            return Err(FriedrichsError::InvalidModel(format!("coupling g must be finite and >= 0, got {g}")));
        }
        if !(omega_c > 0.0) || !omega_c.is_finite() {
            return Err(FriedrichsError::InvalidModel(format!("cutoff omega_c must be finite and > 0, got {omega_c}")));
        }
        Ok(Self { family, g, omega_c })
    }

    pub fn threshold_lorentzian(g: f64, omega_c: f64) -> Result<Self> {
        Self::new(FormFactorFamily::ThresholdLorentzian, g, omega_c)
    }

    pub fn flat_cutoff(g: f64, omega_c: f64) -> Result<Self> {
        Self::new(FormFactorFamily::FlatCutoff, g, omega_c)
    }

    pub fn lambda(&self, omega: f64) -> f64 {
        self.lambda_sq(omega).sqrt()
    }

    pub fn lambda_sq(&self, omega: f64) -> f64 {
        if omega < 0.0 {
            return 0.0;
        }
        let g2 = self.g * self.g;
        match self.family {
            FormFactorFamily::ThresholdLorentzian => {
                let c2 = self.omega_c * self.omega_c;
                let q = c2 + omega * omega;
                g2 * omega.sqrt() * c2 * c2 / (q * q)
            }
            FormFactorFamily::FlatCutoff => {
                if omega <= self.omega_c {
                    g2
                } else {
                    0.0
                }
            }
        }
    }

    /// `∫₀^∞ λ²(ω) dω` in closed form.
    pub fn total_weight(&self) -> f64 {
        let g2 = self.g * self.g;
        match self.family {
            // ∫ √ω c⁴/(c²+ω²)² dω = c^{3/2} · (π√2/8)
            FormFactorFamily::ThresholdLorentzian => g2 * self.omega_c.powf(1.5) * PI * SQRT_2 / 8.0,
            FormFactorFamily::FlatCutoff => g2 * self.omega_c,
        }
    }
}

/// One discrete level at `omega0` coupled to a continuum on `[0, ∞)` with a
/// constant mode density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FriedrichsModel {
    pub omega0: f64,
    pub form_factor: FormFactor,
    pub mode_density: f64,
}

// ∫₀^∞ x^{-1/2} (1 + x²)^{-2} dx
const THRESHOLD_BINDING: f64 = 3.0 * PI * SQRT_2 / 8.0;

impl FriedrichsModel {
    pub fn new(omega0: f64, form_factor: FormFactor) -> Result<Self> {
        Self::with_mode_density(omega0, form_factor, 1.0)
    }

    /// The mode density must be a constant: the closed-form continuation of
    /// `n·λ²` relies on it.
    pub fn with_mode_density(omega0: f64, form_factor: FormFactor, mode_density: f64) -> Result<Self> {
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(FriedrichsError::InvalidModel(format!("omega0 must be finite and > 0, got {omega0}")));
        }
        if !(mode_density > 0.0) || !mode_density.is_finite() {
            return Err(FriedrichsError::InvalidModel(format!("mode_density must be finite and > 0, got {mode_density}")));
        }
        let model = Self { omega0, form_factor, mode_density };
        match form_factor.family {
            FormFactorFamily::ThresholdLorentzian => {
                // η(0⁻) < 0 rules out a bound state below threshold.
                let eta_at_threshold = -omega0 + model.strength() * form_factor.omega_c.sqrt() * THRESHOLD_BINDING;
                if eta_at_threshold >= 0.0 {
                    return Err(FriedrichsError::InvalidModel(format!(
                        "coupling g = {} binds a state below threshold for omega0 = {omega0}",
                        form_factor.g
                    )));
                }
            }
            FormFactorFamily::FlatCutoff => {
                if omega0 >= form_factor.omega_c {
                    return Err(FriedrichsError::InvalidModel(format!(
                        "omega0 = {omega0} lies outside the band [0, {}]",
                        form_factor.omega_c
                    )));
                }
            }
        }
        Ok(model)
    }

    pub fn is_free(&self) -> bool {
        self.strength() == 0.0
    }

    /// `G = n·g²`, the overall scale of `n·λ²`.
    pub(crate) fn strength(&self) -> f64 {
        self.mode_density * self.form_factor.g * self.form_factor.g
    }

    /// `n·λ²(ω)` on the real axis.
    pub fn coupling_density(&self, omega: f64) -> f64 {
        self.mode_density * self.form_factor.lambda_sq(omega)
    }

    /// Analytic extension of `n·λ²` (principal `√z`). Only defined for the
    /// threshold-Lorentzian family.
    #[cfg(test)]
    pub(crate) fn coupling_density_complex(&self, z: C64) -> Result<C64> {
        match self.form_factor.family {
            FormFactorFamily::ThresholdLorentzian => {
                let c2 = self.form_factor.omega_c.powi(2);
                let q = z * z + c2;
                Ok(z.sqrt() * (self.strength() * c2 * c2) / (q * q))
            }
            FormFactorFamily::FlatCutoff => Err(FriedrichsError::ContinuationUnavailable),
        }
    }
}
