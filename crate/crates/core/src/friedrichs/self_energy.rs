use std::f64::consts::{FRAC_PI_4, PI};

use super::model::{FormFactorFamily, FriedrichsModel};
use super::{FriedrichsError, Result};
use crate::numerics::C64;

/// Riemann sheet of the self-energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheet {
    First,
    Second,
}

const I: C64 = C64::new(0.0, 1.0);

/// `η(z) = z − ω₀ − ∫ n λ²(ω) / (z − ω) dω`.
///
/// On the second sheet `η_II(z) = η_I(z) + 2πi·n λ²(z)`: the continuation of
/// the boundary value from above the cut into the lower half plane.
pub fn self_energy(model: &FriedrichsModel, z: C64, sheet: Sheet) -> Result<C64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(FriedrichsError::InvalidArgument(format!("non-finite z = {z}")));
    }
    match sheet {
        Sheet::First => {
            if z.im == 0.0 && z.re >= 0.0 {
                return Err(FriedrichsError::InvalidArgument(format!("z = {z} lies on the cut")));
            }
        }
        Sheet::Second => {
            if !(z.im < 0.0) {
                return Err(FriedrichsError::InvalidArgument(format!("second sheet requires Im z < 0, got {z}")));
            }
        }
    }
    let free = z - model.omega0;
    if model.is_free() {
        return Ok(free);
    }
    match (model.form_factor.family, sheet) {
        (FormFactorFamily::ThresholdLorentzian, Sheet::First) => {
            // Root of u² = z in the upper half plane.
            Ok(threshold_eta(model, z, I * (-z).sqrt()))
        }
        (FormFactorFamily::ThresholdLorentzian, Sheet::Second) => Ok(threshold_eta(model, z, z.sqrt())),
        (FormFactorFamily::FlatCutoff, Sheet::First) => {
            let c = model.form_factor.omega_c;
            Ok(free - model.strength() * (z.ln() - (z - c).ln()))
        }
        (FormFactorFamily::FlatCutoff, Sheet::Second) => Err(FriedrichsError::ContinuationUnavailable),
    }
}

/// Boundary value `η₊(ω) = η(ω + i0)` on the real axis.
pub fn boundary_self_energy(model: &FriedrichsModel, omega: f64) -> C64 {
    let z = C64::new(omega, 0.0);
    if model.is_free() {
        return z - model.omega0;
    }
    match model.form_factor.family {
        FormFactorFamily::ThresholdLorentzian => {
            let s = if omega >= 0.0 { C64::new(omega.sqrt(), 0.0) } else { C64::new(0.0, (-omega).sqrt()) };
            let eta = threshold_eta(model, z, s);
            // Exactly real below threshold, exactly π n λ² above.
            let im = if omega > 0.0 { PI * model.coupling_density(omega) } else { 0.0 };
            C64::new(eta.re, im)
        }
        FormFactorFamily::FlatCutoff => {
            let c = model.form_factor.omega_c;
            let shift = (omega.abs() / (omega - c).abs()).ln();
            let im = if omega > 0.0 && omega < c { PI * model.strength() } else { 0.0 };
            C64::new(omega - model.omega0 - model.strength() * shift, im)
        }
    }
}

/// Closed form of the threshold-Lorentzian self-energy.
///
/// With `ω = u²` the level-shift integral becomes
/// `G c⁴ ∫_ℝ u² / ((u⁴ + c²)² (z − u²)) du`, closed in the upper half
/// plane: a simple pole at the root `s` of `u² = z` and double poles at
/// `√c·e^{iπ/4}`, `√c·e^{3iπ/4}`. Choosing `s` selects the sheet. Removable
/// singularities at `z = ±i·c` are not treated specially.
fn threshold_eta(model: &FriedrichsModel, z: C64, s: C64) -> C64 {
    let c = model.form_factor.omega_c;
    let c2 = c * c;
    let q = z * z + c2;
    let mut residues = -s / (2.0 * q * q);
    for angle in [FRAC_PI_4, 3.0 * FRAC_PI_4] {
        let p = C64::from_polar(c.sqrt(), angle);
        let p2 = p * p;
        let d = z - p2;
        let phi = p2 / d;
        let dphi = 2.0 * p * z / (d * d);
        let p6 = p2 * p2 * p2;
        residues += dphi / (16.0 * p6) - 3.0 * phi / (16.0 * p6 * p);
    }
    z - model.omega0 - 2.0 * PI * I * residues * (model.strength() * c2 * c2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::friedrichs::model::FormFactor;
    use crate::numerics::{integrate, principal_value};
    use proptest::prelude::*;

    fn lorentzian(g: f64) -> FriedrichsModel {
        FriedrichsModel::new(1.0, FormFactor::threshold_lorentzian(g, 10.0).unwrap()).unwrap()
    }

    /// Direct quadrature of the level-shift integral; the tail beyond 200 is
    /// mapped onto a finite interval.
    fn quadrature_eta(m: &FriedrichsModel, z: C64) -> C64 {
        let f = |w: f64| m.coupling_density(w) / (z - w);
        let cut = 200.0;
        let body = integrate(f, 0.0, cut, 1e-13).unwrap();
        let tail = integrate(|v: f64| if v == 0.0 { C64::new(0.0, 0.0) } else { f(1.0 / v) / (v * v) }, 0.0, 1.0 / cut, 1e-15)
            .unwrap();
        z - m.omega0 - body - tail
    }

    #[test]
    fn free_theory() {
        let m = lorentzian(0.0);
        for z in [C64::new(1.0, -0.5), C64::new(-2.0, 0.3)] {
            assert_eq!(self_energy(&m, z, Sheet::First).unwrap(), z - 1.0);
        }
        assert_eq!(self_energy(&m, C64::new(3.0, -0.1), Sheet::Second).unwrap(), C64::new(2.0, -0.1));
    }

    #[test]
    fn first_sheet_matches_quadrature() {
        let m = lorentzian(0.2);
        for z in [C64::new(1.0, 0.5), C64::new(0.3, -0.2), C64::new(-1.0, 0.0), C64::new(15.0, 3.0), C64::new(2.0, -0.05)] {
            let closed = self_energy(&m, z, Sheet::First).unwrap();
            let numeric = quadrature_eta(&m, z);
            assert!((closed - numeric).norm() < 1e-10, "z = {z}: {closed} vs {numeric}");
        }
    }

    #[test]
    fn flat_cutoff_first_sheet_matches_quadrature() {
        let m = FriedrichsModel::new(1.0, FormFactor::flat_cutoff(0.3, 4.0).unwrap()).unwrap();
        for z in [C64::new(1.0, 0.5), C64::new(5.0, -0.2), C64::new(-1.0, 0.0)] {
            let closed = self_energy(&m, z, Sheet::First).unwrap();
            let body = integrate(|w| C64::new(0.09, 0.0) / (z - w), 0.0, 4.0, 1e-13).unwrap();
            assert!((closed - (z - 1.0 - body)).norm() < 1e-11);
        }
        let r = self_energy(&m, C64::new(1.0, -0.1), Sheet::Second);
        assert!(matches!(r, Err(FriedrichsError::ContinuationUnavailable)));
    }

    #[test]
    fn boundary_value_matches_principal_value() {
        let m = lorentzian(0.2);
        for w in [0.05, 0.5, 1.0, 3.0, 12.0] {
            let far = 5000.0;
            let pv = principal_value(|x| m.coupling_density(x), w, 0.0, far, 1e-13).unwrap();
            let tail = crate::numerics::integrate_real(|v| m.coupling_density(1.0 / v) / (w - 1.0 / v) / (v * v), 1e-12, 1.0 / far, 1e-15)
                .unwrap();
            // pv is P∫F/(x − ω), tail is ∫F/(ω − x) beyond `far`.
            let expected = C64::new(w - 1.0 + pv - tail, PI * m.coupling_density(w));
            let eta = boundary_self_energy(&m, w);
            assert!((eta - expected).norm() < 1e-9, "ω = {w}: {eta} vs {expected}");
        }
    }

    #[test]
    fn second_sheet_continues_boundary_value() {
        let m = lorentzian(0.2);
        for w in [0.2, 1.0, 5.0] {
            let below = self_energy(&m, C64::new(w, -1e-9), Sheet::Second).unwrap();
            assert!((below - boundary_self_energy(&m, w)).norm() < 1e-8);
            let above = self_energy(&m, C64::new(w, 1e-9), Sheet::First).unwrap();
            assert!((above - boundary_self_energy(&m, w)).norm() < 1e-8);
        }
    }

    #[test]
    fn second_sheet_is_first_plus_discontinuity() {
        let m = lorentzian(0.15);
        for z in [C64::new(1.0, -0.3), C64::new(4.0, -2.0), C64::new(0.2, -0.01)] {
            let one = self_energy(&m, z, Sheet::First).unwrap();
            let two = self_energy(&m, z, Sheet::Second).unwrap();
            let jump = 2.0 * PI * I * m.coupling_density_complex(z).unwrap();
            assert!((two - one - jump).norm() < 1e-12);
        }
    }

    #[test]
    fn domain_errors() {
        let m = lorentzian(0.1);
        assert!(self_energy(&m, C64::new(1.0, 0.0), Sheet::First).is_err());
        assert!(self_energy(&m, C64::new(1.0, 0.1), Sheet::Second).is_err());
    }

    proptest! {
        #[test]
        fn schwarz_reflection(re in -5.0..20.0f64, im in 0.01..5.0f64, g in 0.0..0.25f64) {
            let m = lorentzian(g);
            let z = C64::new(re, im);
            let up = self_energy(&m, z, Sheet::First).unwrap();
            let down = self_energy(&m, z.conj(), Sheet::First).unwrap();
            prop_assert!((down - up.conj()).norm() <= 1e-12 * (1.0 + up.norm()));
        }
    }
}
