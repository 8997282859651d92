//! Brute-force reference dynamics: the continuum is replaced by `N` discrete
//! modes and the one-excitation Hamiltonian is diagonalized exactly.

use std::f64::consts::PI;

use faer::Mat;
use rayon::prelude::*;
use thiserror::Error;

use crate::friedrichs::{perturbative_pole, FriedrichsError, FriedrichsModel};
use crate::numerics::{fit_exponential_rate, symmetric_eigen, FitResult, Grid1D, NumericsError, C64};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("mode spacing {spacing:.3e} near the level exceeds γ/10 = {limit:.3e}")]
    GridTooCoarse { spacing: f64, limit: f64 },
    #[error(transparent)]
    Friedrichs(#[from] FriedrichsError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, OracleError>;

/// Layout of the discrete modes.
///
/// Panel edges are quantiles of a mixture density on `[0, ω_max]` with
/// three parts, all centred on the expected resonance `ω₀′`:
/// a narrow Cauchy of half-width `peak_width·γ` (share `peak_fraction`),
/// a broad Cauchy of half-width `ω₀′` (share `body_fraction` of the rest)
/// and a uniform density. Each panel carries `order` Gauss-Legendre nodes,
/// so `modes` must be a multiple of `order`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub modes: usize,
    pub omega_max: f64,
    pub order: usize,
    pub peak_fraction: f64,
    pub peak_width: f64,
    pub body_fraction: f64,
}

impl GridSpec {
    pub fn new(modes: usize, omega_max: f64) -> Self {
        Self { modes, omega_max, order: 4, peak_fraction: 0.5, peak_width: 10.0, body_fraction: 0.5 }
    }
}

/// The one-excitation Hamiltonian on a discrete mode grid.
#[derive(Debug, Clone)]
pub struct DiscreteModel {
    pub hamiltonian: Mat<f64>,
    pub grid: Grid1D,
    pub couplings: Vec<f64>,
    /// Times beyond `2π / (largest spacing within ω₀′ ± 20γ)` see recurrences.
    pub recurrence_time: f64,
}

/// Level and its couplings `λ(ωⱼ)·√(n wⱼ)` to modes at the grid points.
pub fn discretize(model: &FriedrichsModel, modes: usize, omega_max: f64) -> Result<DiscreteModel> {
    discretize_with(model, &GridSpec::new(modes, omega_max))
}

pub fn discretize_with(model: &FriedrichsModel, spec: &GridSpec) -> Result<DiscreteModel> {
    if spec.modes < 100 {
        return Err(OracleError::InvalidArgument(format!("need at least 100 modes, got {}", spec.modes)));
    }
    if spec.order == 0 || spec.modes % spec.order != 0 {
        return Err(OracleError::InvalidArgument(format!(
            "modes = {} is not a multiple of the panel order {}",
            spec.modes, spec.order
        )));
    }
    let unit = 0.0..1.0;
    if !unit.contains(&spec.peak_fraction) || !unit.contains(&spec.body_fraction) || !(spec.peak_width > 0.0) {
        return Err(OracleError::InvalidArgument(
            "peak_fraction and body_fraction must lie in [0, 1), peak_width must be positive".into(),
        ));
    }

    let (centre, gamma) = if model.is_free() {
        (model.omega0, 0.0)
    } else {
        let p = perturbative_pole(model)?;
        (p.omega_prime, p.gamma)
    };
    if !(spec.omega_max >= model.omega0 + 20.0 * gamma) {
        return Err(OracleError::InvalidArgument(format!(
            "omega_max = {} must be at least omega0 + 20γ = {}",
            spec.omega_max,
            model.omega0 + 20.0 * gamma
        )));
    }

    let panels = spec.modes / spec.order;
    let width = (spec.peak_width * gamma).max(1e-3 * spec.omega_max);
    let breaks = quantile_breaks(panels, spec, centre, width);
    let grid = Grid1D::composite(&breaks, spec.order)?;

    let points = grid.points();
    let near = |radius: f64| {
        points
            .windows(2)
            .filter(|w| w[1] >= centre - radius && w[0] <= centre + radius)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    };
    if gamma > 0.0 {
        let spacing = near(gamma);
        if spacing > gamma / 10.0 {
            return Err(OracleError::GridTooCoarse { spacing, limit: gamma / 10.0 });
        }
    }
    let wide = near(20.0 * gamma.max(1e-3));
    let recurrence_time = 2.0 * PI / wide;

    let couplings: Vec<f64> =
        points.iter().zip(grid.weights()).map(|(&w, &wt)| (model.coupling_density(w) * wt).sqrt()).collect();
    let n = points.len();
    let hamiltonian = Mat::from_fn(n + 1, n + 1, |i, j| match (i, j) {
        (0, 0) => model.omega0,
        (0, j) => couplings[j - 1],
        (i, 0) => couplings[i - 1],
        (i, j) if i == j => points[i - 1],
        _ => 0.0,
    });
    Ok(DiscreteModel { hamiltonian, grid, couplings, recurrence_time })
}

fn quantile_breaks(panels: usize, spec: &GridSpec, centre: f64, width: f64) -> Vec<f64> {
    let omega_max = spec.omega_max;
    let cauchy = |w: f64| {
        let lo = (-centre / w).atan();
        let hi = ((omega_max - centre) / w).atan();
        move |x: f64| (((x - centre) / w).atan() - lo) / (hi - lo)
    };
    let peak = cauchy(width);
    let body = cauchy(centre);
    let (fp, fb) = (spec.peak_fraction, spec.body_fraction);
    let cdf = |x: f64| (1.0 - fp) * ((1.0 - fb) * x / omega_max + fb * body(x)) + fp * peak(x);
    let mut breaks = Vec::with_capacity(panels + 1);
    breaks.push(0.0);
    for k in 1..panels {
        let target = k as f64 / panels as f64;
        let (mut a, mut b) = (0.0, omega_max);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if cdf(mid) < target {
                a = mid;
            } else {
                b = mid;
            }
            if b - a <= 1e-15 * omega_max {
                break;
            }
        }
        breaks.push(0.5 * (a + b));
    }
    breaks.push(omega_max);
    breaks
}

/// Eigen-energies and their overlap weights `|⟨1|Eₖ⟩|²`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub energies: Vec<f64>,
    pub weights: Vec<f64>,
    pub recurrence_time: f64,
}

impl DiscreteModel {
    pub fn spectrum(&self) -> Result<Spectrum> {
        let eig = symmetric_eigen(&self.hamiltonian)?;
        let weights = (0..eig.values.len()).map(|k| eig.vectors[(0, k)].powi(2)).collect();
        Ok(Spectrum { energies: eig.values, weights, recurrence_time: self.recurrence_time })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSeries {
    pub times: Vec<f64>,
    pub amplitude: Vec<C64>,
    pub beyond_recurrence: Vec<bool>,
}

impl Spectrum {
    /// `A(t) = Σₖ |⟨1|Eₖ⟩|² e^{−iEₖt}`.
    pub fn survival(&self, times: &[f64]) -> OracleSeries {
        let amplitude = times
            .par_iter()
            .map(|&t| self.energies.iter().zip(&self.weights).map(|(&e, &w)| C64::from_polar(w, -e * t)).sum())
            .collect();
        let beyond_recurrence = times.iter().map(|&t| t > self.recurrence_time).collect();
        OracleSeries { times: times.to_vec(), amplitude, beyond_recurrence }
    }
}

pub fn oracle_survival(d: &DiscreteModel, times: &[f64]) -> Result<OracleSeries> {
    if let Some(&t) = times.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        return Err(OracleError::InvalidArgument(format!("times must be finite and >= 0, got {t}")));
    }
    Ok(d.spectrum()?.survival(times))
}

const RATE_SAMPLES: usize = 64;

/// Exponential rate of `|A(t)|²` fitted over `window`.
pub fn oracle_rate(d: &DiscreteModel, window: (f64, f64)) -> Result<FitResult> {
    let (t0, t1) = window;
    if !(t0 >= 0.0 && t0 < t1) {
        return Err(OracleError::InvalidArgument(format!("invalid window ({t0}, {t1})")));
    }
    let times: Vec<f64> = (0..RATE_SAMPLES).map(|k| t0 + (t1 - t0) * k as f64 / (RATE_SAMPLES - 1) as f64).collect();
    let series = oracle_survival(d, &times)?;
    let samples: Vec<(f64, f64)> = times.iter().zip(&series.amplitude).map(|(&t, a)| (t, a.norm_sqr())).collect();
    Ok(fit_exponential_rate(&samples, window)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::friedrichs::FormFactor;
    use crate::numerics::integrate_real;

    fn lorentzian(g: f64) -> FriedrichsModel {
        FriedrichsModel::new(1.0, FormFactor::threshold_lorentzian(g, 10.0).unwrap()).unwrap()
    }

    #[test]
    fn free_model_is_diagonal() {
        let d = discretize(&lorentzian(0.0), 200, 50.0).unwrap();
        for i in 0..=200 {
            for j in 0..=200 {
                if i != j {
                    assert_eq!(d.hamiltonian[(i, j)], 0.0);
                }
            }
        }
        let s = oracle_survival(&d, &[0.0, 3.0]).unwrap();
        assert!((s.amplitude[1] - C64::new(0.0, -3.0).exp()).norm() < 1e-12);
    }

    #[test]
    fn arrowhead_structure() {
        let d = discretize(&lorentzian(0.2), 400, 50.0).unwrap();
        let h = &d.hamiltonian;
        assert_eq!(h[(0, 0)], 1.0);
        for i in 1..=400 {
            assert_eq!(h[(i, i)], d.grid.points()[i - 1]);
            assert_eq!(h[(0, i)], h[(i, 0)]);
            assert_eq!(h[(0, i)], d.couplings[i - 1]);
            if i > 1 {
                assert_eq!(h[(1, i)], 0.0);
            }
        }
    }

    #[test]
    fn coupling_sum_converges_to_integral() {
        let m = lorentzian(0.2);
        let d = discretize(&m, 2000, 50.0).unwrap();
        let sum: f64 = d.couplings.iter().map(|c| c * c).sum();
        let exact = integrate_real(|w| m.coupling_density(w), 0.0, 50.0, 1e-13).unwrap();
        assert!((sum - exact).abs() < 1e-4, "{sum} vs {exact}");
    }

    #[test]
    fn probability_is_conserved() {
        let d = discretize(&lorentzian(0.2), 400, 50.0).unwrap();
        let s = d.spectrum().unwrap();
        let total: f64 = s.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        let a0 = s.survival(&[0.0]).amplitude[0];
        assert!((a0 - 1.0).norm() < 1e-12);
    }

    #[test]
    fn coarse_uniform_grid_is_rejected() {
        let spec = GridSpec { peak_fraction: 0.0, body_fraction: 0.0, ..GridSpec::new(400, 50.0) };
        let r = discretize_with(&lorentzian(0.2), &spec);
        assert!(matches!(r, Err(OracleError::GridTooCoarse { .. })));
    }

    #[test]
    fn recurrence_flag() {
        let d = discretize(&lorentzian(0.2), 400, 50.0).unwrap();
        let s = oracle_survival(&d, &[1.0, 2.0 * d.recurrence_time]).unwrap();
        assert_eq!(s.beyond_recurrence, vec![false, true]);
    }
}
