use std::f64::consts::PI;

use rayon::prelude::*;

use super::model::{FormFactorFamily, FriedrichsModel};
use super::pole::{exact_pole, perturbative_pole, ResonancePole};
use super::self_energy::boundary_self_energy;
use super::{FriedrichsError, Result};
use crate::numerics::{gauss_legendre_rule, integrate, integrate_with_breaks, C64};

/// Truncation and accuracy settings for spectral integrals over `[0, ω_max]`.
///
/// `tol` is the adaptive quadrature tolerance; `tail_tol` bounds the
/// discarded tail, enforced as `p(ω_max) ≤ tail_tol / 10`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    pub omega_max: f64,
    pub tol: f64,
    pub tail_tol: f64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self { omega_max: 200.0, tol: 1e-10, tail_tol: 1e-8 }
    }
}

/// Survival amplitude on a time grid, optionally split into pole and
/// background parts.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalSeries {
    pub times: Vec<f64>,
    pub amplitude: Vec<C64>,
    pub split: Option<PoleBackground>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleBackground {
    pub pole: ResonancePole,
    pub pole_part: Vec<C64>,
    pub background_part: Vec<C64>,
}

/// `p(ω) = n λ²(ω) / |η₊(ω)|²`.
pub fn spectral_density(model: &FriedrichsModel, omega: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(FriedrichsError::InvalidArgument(format!("spectral density needs ω >= 0, got {omega}")));
    }
    if model.is_free() {
        return Err(FriedrichsError::CouplingZero);
    }
    let f = model.coupling_density(omega);
    if f == 0.0 {
        return Ok(0.0);
    }
    let eta = boundary_self_energy(model, omega);
    if eta.norm() < 1e-13 {
        return Err(FriedrichsError::EtaVanishedOnAxis { omega });
    }
    Ok(f / eta.norm_sqr())
}

fn density_or_nan(model: &FriedrichsModel, omega: f64) -> f64 {
    spectral_density(model, omega).unwrap_or(f64::NAN)
}

fn check_truncation(model: &FriedrichsModel, opts: &SpectralOptions) -> Result<f64> {
    if !(opts.tol > 0.0) || !(opts.tail_tol > 0.0) {
        return Err(FriedrichsError::InvalidArgument("tolerances must be positive".into()));
    }
    let upper = match model.form_factor.family {
        FormFactorFamily::FlatCutoff => model.form_factor.omega_c,
        FormFactorFamily::ThresholdLorentzian => {
            if !(opts.omega_max > 2.0 * model.omega0) {
                return Err(FriedrichsError::InvalidArgument(format!(
                    "omega_max = {} must exceed twice omega0",
                    opts.omega_max
                )));
            }
            let edge = spectral_density(model, opts.omega_max)?;
            if edge > opts.tail_tol / 10.0 {
                return Err(FriedrichsError::TruncationTooShort { omega_max: opts.omega_max, density: edge });
            }
            opts.omega_max
        }
    };
    Ok(upper)
}

fn peak_breaks(centre: f64, gamma: f64, upper: f64) -> Vec<f64> {
    let mut breaks = vec![0.0];
    for k in [-20.0, -3.0, -1.0, 0.0, 1.0, 3.0, 20.0] {
        let x = centre + k * gamma;
        if x > *breaks.last().unwrap() && x < upper {
            breaks.push(x);
        }
    }
    breaks.push(upper);
    breaks
}

/// `∫₀^{ω_max} p(ω) dω`, which must be 1 up to the truncated tail.
pub fn spectral_norm(model: &FriedrichsModel, opts: &SpectralOptions) -> Result<f64> {
    let upper = check_truncation(model, opts)?;
    let pole = perturbative_pole(model)?;
    let breaks = peak_breaks(pole.omega_prime, pole.gamma, upper);
    let value = integrate_with_breaks(|w| C64::new(density_or_nan(model, w), 0.0), &breaks, opts.tol)?;
    Ok(value.re)
}

/// `A(t) = ∫ p(ω) e^{−iωt} dω` at each requested time.
pub fn survival_amplitude(model: &FriedrichsModel, times: &[f64], opts: &SpectralOptions) -> Result<SurvivalSeries> {
    if let Some(&t) = times.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        return Err(FriedrichsError::InvalidArgument(format!("times must be finite and >= 0, got {t}")));
    }
    let amplitude = if model.is_free() {
        times.iter().map(|&t| C64::new(0.0, -model.omega0 * t).exp()).collect()
    } else {
        let upper = check_truncation(model, opts)?;
        let pole = perturbative_pole(model)?;
        match model.form_factor.family {
            FormFactorFamily::ThresholdLorentzian => panel_survival(model, &pole, upper, times)?,
            FormFactorFamily::FlatCutoff => adaptive_survival(model, &pole, upper, times, opts.tol)?,
        }
    };
    Ok(SurvivalSeries { times: times.to_vec(), amplitude, split: None })
}

/// Survival amplitude with `pole_part = r·e^{−iz₀t}` and the remainder as
/// background.
pub fn pole_background_split(model: &FriedrichsModel, times: &[f64], opts: &SpectralOptions) -> Result<SurvivalSeries> {
    let pole = exact_pole(model)?;
    let mut series = survival_amplitude(model, times, opts)?;
    let pole_part: Vec<C64> = times.iter().map(|&t| pole.pole_term(t)).collect();
    let background_part = series.amplitude.iter().zip(&pole_part).map(|(a, p)| a - p).collect();
    series.split = Some(PoleBackground { pole, pole_part, background_part });
    Ok(series)
}

const PANEL_ORDER: usize = 16;

/// Fixed composite Gauss-Legendre panels, built once per octave of `t` and
/// reused for every time in it.
///
/// Panels come from dyadic bisection of `[0, ω_max]`; a panel is accepted
/// once it spans at most one period of `e^{−iωt}` and at most half its
/// distance (or `γ`) from the peak. Dyadic panels `[a, 2a]` keep the `√ω`
/// threshold at a fixed relative distance, and the first panel is mapped
/// with `ω = u²` so the integrand is smooth in `u`.
fn panel_survival(model: &FriedrichsModel, pole: &ResonancePole, upper: f64, times: &[f64]) -> Result<Vec<C64>> {
    let (nodes, weights) = gauss_legendre_rule(PANEL_ORDER)?;
    let octave = |t: f64| if t <= 1.0 { 0 } else { t.log2().ceil() as i32 };

    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
    let mut out = vec![C64::new(0.0, 0.0); times.len()];
    let mut start = 0;
    while start < order.len() {
        let k = octave(times[order[start]]);
        let end = start + order[start..].iter().take_while(|&&i| octave(times[i]) == k).count();
        let t_ref = 2f64.powi(k);
        let grid = panel_grid(pole, upper, t_ref, &nodes, &weights);
        let mass: Vec<(f64, f64)> = grid.iter().map(|&(w, wt)| (w, wt * density_or_nan(model, w))).collect();
        if mass.iter().any(|(_, m)| !m.is_finite()) {
            // Surface the precise failure.
            for &(w, _) in &grid {
                spectral_density(model, w)?;
            }
        }
        let values: Vec<C64> = order[start..end]
            .par_iter()
            .map(|&i| {
                let t = times[i];
                mass.iter().map(|&(w, m)| C64::from_polar(m, -w * t)).sum()
            })
            .collect();
        for (&i, v) in order[start..end].iter().zip(values) {
            out[i] = v;
        }
        start = end;
    }
    Ok(out)
}

fn panel_grid(pole: &ResonancePole, upper: f64, t_ref: f64, nodes: &[f64], weights: &[f64]) -> Vec<(f64, f64)> {
    let cap = (2.0 * PI / t_ref).min(upper / 16.0);
    let centre = pole.omega_prime;
    let accept = |a: f64, b: f64| {
        let width = b - a;
        let dist = if centre < a {
            a - centre
        } else if centre > b {
            centre - b
        } else {
            0.0
        };
        let first_ok = a > 0.0 || b <= 0.25 * centre;
        width <= cap && width <= 0.5 * dist.max(pole.gamma) && first_ok
    };

    let mut panels = Vec::new();
    let mut stack = vec![(0.0, upper)];
    while let Some((a, b)) = stack.pop() {
        if accept(a, b) {
            panels.push((a, b));
        } else {
            let mid = 0.5 * (a + b);
            stack.push((mid, b));
            stack.push((a, mid));
        }
    }

    let mut grid = Vec::with_capacity(panels.len() * nodes.len());
    for (a, b) in panels {
        if a == 0.0 {
            let half = 0.5 * b.sqrt();
            for (x, wx) in nodes.iter().zip(weights) {
                let u = half * (1.0 + x);
                grid.push((u * u, half * wx * 2.0 * u));
            }
        } else {
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            for (x, wx) in nodes.iter().zip(weights) {
                grid.push((mid + half * x, half * wx));
            }
        }
    }
    grid
}

fn adaptive_survival(model: &FriedrichsModel, pole: &ResonancePole, upper: f64, times: &[f64], tol: f64) -> Result<Vec<C64>> {
    let base = peak_breaks(pole.omega_prime, pole.gamma, upper);
    times
        .par_iter()
        .map(|&t| {
            let f = |w: f64| C64::from_polar(density_or_nan(model, w), -w * t);
            if t * upper <= 2.0 * PI {
                return Ok(integrate_with_breaks(f, &base, tol)?);
            }
            // Pre-split into periods so the adaptive rule starts resolved.
            let period = 2.0 * PI / t;
            let mut breaks: Vec<f64> = Vec::new();
            for pair in base.windows(2) {
                let pieces = ((pair[1] - pair[0]) / period).ceil().max(1.0) as usize;
                for j in 0..pieces {
                    breaks.push(pair[0] + (pair[1] - pair[0]) * j as f64 / pieces as f64);
                }
            }
            breaks.push(upper);
            if breaks.len() > 20_000 {
                return Ok(integrate(f, 0.0, upper, tol)?);
            }
            Ok(integrate_with_breaks(f, &breaks, tol)?)
        })
        .collect()
}
