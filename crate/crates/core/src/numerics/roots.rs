use super::{NumericsError, Result, C64};

const BACKTRACK_STEPS: usize = 12;

/// Finds a zero of an analytic function by Newton iteration with a
/// central-difference derivative (step `1e-7·max(1, |z|)`).
///
/// When the derivative degenerates the step falls back to the secant
/// through the previous iterate. Steps that increase `|F|` are halved.
pub fn find_complex_root<F: Fn(C64) -> C64>(f: F, z_init: C64, tol: f64, max_iter: usize) -> Result<C64> {
    if !(tol > 0.0) {
        return Err(NumericsError::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let finite = |w: C64| w.re.is_finite() && w.im.is_finite();

    let mut z = z_init;
    let mut fz = f(z);
    let mut previous: Option<(C64, C64)> = None;
    for _ in 0..max_iter {
        if !finite(fz) {
            return Err(NumericsError::NoConvergence { iterations: 0, residual: f64::INFINITY });
        }
        if fz.norm() <= tol {
            return Ok(z);
        }

        let h = 1e-7 * z.norm().max(1.0);
        let derivative = (f(z + h) - f(z - h)) / (2.0 * h);
        let step = if finite(derivative) && derivative.norm() > f64::EPSILON * fz.norm() {
            fz / derivative
        } else {
            match previous {
                Some((zp, fp)) if fz != fp => fz * (z - zp) / (fz - fp),
                _ => return Err(NumericsError::DerivativeVanished(z)),
            }
        };

        let mut scale = 1.0;
        let mut candidate = z - step;
        let mut f_candidate = f(candidate);
        for _ in 0..BACKTRACK_STEPS {
            if finite(f_candidate) && f_candidate.norm() < fz.norm() {
                break;
            }
            scale *= 0.5;
            candidate = z - step * scale;
            f_candidate = f(candidate);
        }

        previous = Some((z, fz));
        z = candidate;
        fz = f_candidate;
    }
    if finite(fz) && fz.norm() <= tol {
        return Ok(z);
    }
    Err(NumericsError::NoConvergence { iterations: max_iter, residual: fz.norm() })
}
