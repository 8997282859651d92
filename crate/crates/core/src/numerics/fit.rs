use super::{NumericsError, Result};

const MIN_SAMPLES: usize = 8;

/// Outcome of a log-linear least-squares fit.
///
/// For exponential fits `rate_or_exponent` is the decay rate (minus the
/// slope of `ln v` against `t`); for power-law fits it is the slope of
/// `ln v` against `ln t`. `residual` is the root-mean-square deviation of
/// the fitted line in log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub rate_or_exponent: f64,
    pub intercept: f64,
    pub residual: f64,
    pub window: (f64, f64),
}

fn windowed(samples: &[(f64, f64)], window: (f64, f64)) -> Result<Vec<(f64, f64)>> {
    let (t_min, t_max) = window;
    if !(t_min < t_max) {
        return Err(NumericsError::InvalidArgument(format!("empty fit window ({t_min}, {t_max})")));
    }
    let inside: Vec<(f64, f64)> = samples.iter().copied().filter(|&(t, _)| t >= t_min && t <= t_max).collect();
    if inside.len() < MIN_SAMPLES {
        return Err(NumericsError::InsufficientSamples { needed: MIN_SAMPLES, found: inside.len() });
    }
    if let Some(&(t, value)) = inside.iter().find(|&&(_, v)| !(v > 0.0)) {
        return Err(NumericsError::NonPositiveValue { t, value });
    }
    Ok(inside)
}

/// Ordinary least squares `y = slope·x + intercept`; returns the RMS residual too.
fn line(points: impl Iterator<Item = (f64, f64)> + Clone) -> (f64, f64, f64) {
    let n = points.clone().count() as f64;
    let (sx, sy) = points.clone().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxx, sxy) = points.clone().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (x - mx), b + (x - mx) * (y - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = points.map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    (slope, intercept, (ss / n).sqrt())
}

/// Fits `v(t) ≈ e^{intercept} e^{-rate·t}` to the samples inside `window`.
pub fn fit_exponential_rate(samples: &[(f64, f64)], window: (f64, f64)) -> Result<FitResult> {
    let inside = windowed(samples, window)?;
    let (slope, intercept, residual) = line(inside.iter().map(|&(t, v)| (t, v.ln())));
    Ok(FitResult { rate_or_exponent: -slope, intercept, residual, window })
}

/// Fits `v(t) ≈ e^{intercept} t^{exponent}` to the samples inside `window`.
pub fn fit_power_law(samples: &[(f64, f64)], window: (f64, f64)) -> Result<FitResult> {
    if !(window.0 > 0.0) {
        return Err(NumericsError::InvalidArgument("power-law window must start at t > 0".into()));
    }
    let inside = windowed(samples, window)?;
    let (slope, intercept, residual) = line(inside.iter().map(|&(t, v)| (t.ln(), v.ln())));
    Ok(FitResult { rate_or_exponent: slope, intercept, residual, window })
}
