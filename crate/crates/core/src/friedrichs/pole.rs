use std::f64::consts::PI;

use super::model::FriedrichsModel;
use super::self_energy::{boundary_self_energy, self_energy, Sheet};
use super::{FriedrichsError, Result};
use crate::numerics::{find_complex_root, C64};

/// `z₀ = ω₀′ − iγ` together with the residue of `1/η_II` there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonancePole {
    pub omega_prime: f64,
    pub gamma: f64,
    pub residue: C64,
}

impl ResonancePole {
    pub fn z(&self) -> C64 {
        C64::new(self.omega_prime, -self.gamma)
    }

    /// `residue·e^{−i z₀ t}`.
    pub fn pole_term(&self, t: f64) -> C64 {
        self.residue * (C64::new(0.0, -t) * self.z()).exp()
    }
}

/// Second-order pole: `δω = P∫ n λ² / (ω₀ − ω) dω`, `γ = π n λ²(ω₀)`.
pub fn perturbative_pole(model: &FriedrichsModel) -> Result<ResonancePole> {
    if model.is_free() {
        return Err(FriedrichsError::NonDecaying { omega0: model.omega0 });
    }
    // η₊(ω₀) = −δω + iγ.
    let eta = boundary_self_energy(model, model.omega0);
    let gamma = PI * model.coupling_density(model.omega0);
    if !(gamma > 0.0) {
        return Err(FriedrichsError::NonDecaying { omega0: model.omega0 });
    }
    Ok(ResonancePole { omega_prime: model.omega0 - eta.re, gamma, residue: C64::new(1.0, 0.0) })
}

const POLE_TOL: f64 = 1e-13;
const POLE_MAX_ITER: usize = 100;

/// Zero of `η_II` in the lower half plane, seeded by the perturbative pole.
pub fn exact_pole(model: &FriedrichsModel) -> Result<ResonancePole> {
    let seed = perturbative_pole(model)?;
    // Probe the sheet before iterating so flat cutoffs fail with the right error.
    self_energy(model, seed.z(), Sheet::Second)?;
    let eta = |z: C64| {
        if z.im < 0.0 {
            self_energy(model, z, Sheet::Second).unwrap_or(C64::new(f64::NAN, f64::NAN))
        } else {
            C64::new(f64::NAN, f64::NAN)
        }
    };
    let z0 = match find_complex_root(eta, seed.z(), POLE_TOL, POLE_MAX_ITER) {
        Ok(z) => z,
        // The iteration only returns NaN residuals once it leaves the lower half plane.
        Err(crate::numerics::NumericsError::NoConvergence { residual, .. }) if !residual.is_finite() => {
            return Err(FriedrichsError::PoleOnWrongSheet { z: seed.z() })
        }
        Err(e) => return Err(e.into()),
    };
    if !(z0.im < 0.0) {
        return Err(FriedrichsError::PoleOnWrongSheet { z: z0 });
    }
    let h = 1e-6 * z0.norm();
    let derivative = (eta(z0 + h) - eta(z0 - h)) / (2.0 * h);
    Ok(ResonancePole { omega_prime: z0.re, gamma: -z0.im, residue: derivative.inv() })
}

/// A time scale that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CharTime {
    Finite(f64),
    Infinite,
}

impl CharTime {
    pub fn value(&self) -> f64 {
        match self {
            CharTime::Finite(t) => *t,
            CharTime::Infinite => f64::INFINITY,
        }
    }
}

/// Decay times of the single-pole survival structure under the
/// `z₀ = ω₀ − (i/2)γ₀` convention: probability `1/γ₀`, the two
/// interference terms `2/γ₀`, and the non-exponential background, which
/// never decays exponentially.
pub fn characteristic_times(gamma0: f64) -> Result<[CharTime; 4]> {
    if !(gamma0 > 0.0) || !gamma0.is_finite() {
        return Err(FriedrichsError::NonPositiveRate(gamma0));
    }
    Ok([
        CharTime::Finite(1.0 / gamma0),
        CharTime::Finite(2.0 / gamma0),
        CharTime::Finite(2.0 / gamma0),
        CharTime::Infinite,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::friedrichs::model::FormFactor;
    use crate::numerics::principal_value;
    use approx::assert_relative_eq;

    fn lorentzian(g: f64) -> FriedrichsModel {
        FriedrichsModel::new(1.0, FormFactor::threshold_lorentzian(g, 10.0).unwrap()).unwrap()
    }

    #[test]
    fn free_level_does_not_decay() {
        let m = lorentzian(0.0);
        assert!(matches!(perturbative_pole(&m), Err(FriedrichsError::NonDecaying { .. })));
        assert!(matches!(exact_pole(&m), Err(FriedrichsError::NonDecaying { .. })));
    }

    #[test]
    fn flat_cutoff_golden_rule() {
        let m = FriedrichsModel::new(1.0, FormFactor::flat_cutoff(0.2, 5.0).unwrap()).unwrap();
        let p = perturbative_pole(&m).unwrap();
        assert_relative_eq!(p.gamma, PI * 0.04, max_relative = 1e-15);
        assert_relative_eq!(p.omega_prime, 1.0 + 0.04 * (1.0f64 / 4.0).ln(), max_relative = 1e-14);
        assert!(matches!(exact_pole(&m), Err(FriedrichsError::ContinuationUnavailable)));
    }

    #[test]
    fn lorentzian_golden_rule_reference() {
        let p = perturbative_pole(&lorentzian(0.1)).unwrap();
        assert_relative_eq!(p.gamma, PI * 0.01 / (1.01f64 * 1.01), max_relative = 1e-14);
        assert!((p.gamma - 0.03080).abs() < 5e-6);
    }

    #[test]
    fn level_shift_matches_numeric_principal_value() {
        let m = lorentzian(0.2);
        let p = perturbative_pole(&m).unwrap();
        let far = 5000.0;
        let pv = principal_value(|w| m.coupling_density(w), 1.0, 0.0, far, 1e-13).unwrap();
        let tail = crate::numerics::integrate_real(|v| m.coupling_density(1.0 / v) / (1.0 - 1.0 / v) / (v * v), 1e-12, 1.0 / far, 1e-15)
            .unwrap();
        // δω = P∫ F/(ω₀ − ω) = −P∫ F/(ω − ω₀)
        assert_relative_eq!(p.omega_prime - 1.0, tail - pv, max_relative = 1e-9);
    }

    #[test]
    fn exact_pole_is_a_zero_of_second_sheet() {
        let m = lorentzian(0.2);
        let p = exact_pole(&m).unwrap();
        let eta = self_energy(&m, p.z(), Sheet::Second).unwrap();
        assert!(eta.norm() <= 1e-12);
        let pert = perturbative_pole(&m).unwrap();
        assert!((p.gamma - pert.gamma).abs() < 0.1 * pert.gamma);
        assert!(p.residue.norm() > 0.0 && p.residue.norm() <= 1.5);
    }

    #[test]
    fn residue_tends_to_one() {
        let p = exact_pole(&lorentzian(0.05)).unwrap();
        assert!((p.residue - 1.0).norm() < 0.05);
    }

    #[test]
    fn residue_matches_analytic_derivative() {
        // η_II′ = 1 + ∫F/(z−ω)² on the continued sheet; compare the central
        // difference against a Richardson-extrapolated one.
        let m = lorentzian(0.2);
        let p = exact_pole(&m).unwrap();
        let z = p.z();
        let d = |h: f64| {
            (self_energy(&m, z + h, Sheet::Second).unwrap() - self_energy(&m, z - h, Sheet::Second).unwrap()) / (2.0 * h)
        };
        let rich = (4.0 * d(1e-3) - d(2e-3)) / 3.0;
        assert!((p.residue - rich.inv()).norm() < 1e-9);
    }

    #[test]
    fn gap_scales_as_fourth_power() {
        let gaps: Vec<(f64, f64)> = [0.05, 0.1]
            .iter()
            .map(|&g| {
                let m = lorentzian(g);
                (g, (exact_pole(&m).unwrap().z() - perturbative_pole(&m).unwrap().z()).norm())
            })
            .collect();
        let exponent = (gaps[1].1 / gaps[0].1).ln() / (gaps[1].0 / gaps[0].0).ln();
        assert!((exponent - 4.0).abs() < 0.5, "exponent {exponent}");
    }

    #[test]
    fn characteristic_time_table() {
        let to_f = |ts: [CharTime; 4]| ts.map(|t| t.value());
        assert_eq!(to_f(characteristic_times(1.0).unwrap()), [1.0, 2.0, 2.0, f64::INFINITY]);
        assert_eq!(to_f(characteristic_times(0.5).unwrap()), [2.0, 4.0, 4.0, f64::INFINITY]);
        assert_eq!(to_f(characteristic_times(2.0).unwrap()), [0.5, 1.0, 1.0, f64::INFINITY]);
        assert_eq!(characteristic_times(1.0).unwrap()[3], CharTime::Infinite);
        assert!(matches!(characteristic_times(0.0), Err(FriedrichsError::NonPositiveRate(_))));
    }
}
