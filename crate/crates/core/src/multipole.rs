//! Finite sums of decaying modes, `f(t) = Σ cᵢ e^{−iωᵢt} e^{−γᵢt}`, and the
//! time scales and slow/fast split derived from them.

use thiserror::Error;

use crate::friedrichs::CharTime;
use crate::numerics::C64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MultipoleError {
    #[error("invalid mode: {0}")]
    InvalidMode(String),
    #[error("mode sum needs at least one mode")]
    Empty,
    #[error("initial weights sum to zero; the effective rate is undefined")]
    DegenerateInitialCondition,
    #[error("expected exactly two base poles, found {found}")]
    WrongArity { found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, MultipoleError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub c: C64,
    pub omega: f64,
    pub gamma: f64,
}

impl Mode {
    pub fn new(c: C64, omega: f64, gamma: f64) -> Self {
        Self { c, omega, gamma }
    }

    /// `cᵢ e^{−iωᵢt} e^{−γᵢt}`.
    pub fn at(&self, t: f64) -> C64 {
        self.c * C64::new(-self.gamma * t, -self.omega * t).exp()
    }
}

/// Equilibrium value plus modes, sorted by ascending `γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSum {
    equilibrium: C64,
    modes: Vec<Mode>,
}

impl ModeSum {
    pub fn new(equilibrium: C64, mut modes: Vec<Mode>) -> Result<Self> {
        if modes.is_empty() {
            return Err(MultipoleError::Empty);
        }
        for m in &modes {
            if !(m.gamma >= 0.0) || !m.gamma.is_finite() {
                return Err(MultipoleError::InvalidMode(format!("gamma must be finite and >= 0, got {}", m.gamma)));
            }
            if !m.omega.is_finite() || !m.c.re.is_finite() || !m.c.im.is_finite() {
                return Err(MultipoleError::InvalidMode("amplitude and frequency must be finite".into()));
            }
        }
        if !equilibrium.re.is_finite() || !equilibrium.im.is_finite() {
            return Err(MultipoleError::InvalidMode("equilibrium must be finite".into()));
        }
        modes.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
        Ok(Self { equilibrium, modes })
    }

    pub fn equilibrium(&self) -> C64 {
        self.equilibrium
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    fn weight_sum(&self) -> Result<C64> {
        let sum: C64 = self.modes.iter().map(|m| m.c).sum();
        let scale: f64 = self.modes.iter().map(|m| m.c.norm()).sum();
        if !(sum.norm() > 1e-12 * scale) {
            return Err(MultipoleError::DegenerateInitialCondition);
        }
        Ok(sum)
    }
}

/// `f(t)`, the mode sum without the equilibrium value.
pub fn evaluate_f(ms: &ModeSum, t: f64) -> C64 {
    ms.modes.iter().map(|m| m.at(t)).sum()
}

/// Equilibrium plus `f(t)`.
pub fn full_expectation(ms: &ModeSum, t: f64) -> C64 {
    ms.equilibrium + evaluate_f(ms, t)
}

/// `Re(Σ cᵢγᵢ / Σ cᵢ)`.
pub fn gamma_eff(ms: &ModeSum) -> Result<f64> {
    let sum = ms.weight_sum()?;
    let weighted: C64 = ms.modes.iter().map(|m| m.c * m.gamma).sum();
    Ok((weighted / sum).re)
}

/// `f(0)·exp(g′(0)·t)` with `g = ln f`.
pub fn linearized_f(ms: &ModeSum, t: f64) -> Result<C64> {
    let sum = ms.weight_sum()?;
    let slope: C64 = ms.modes.iter().map(|m| m.c * C64::new(-m.gamma, -m.omega)).sum::<C64>() / sum;
    Ok(sum * (slope * t).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimescaleReport {
    pub t_r: CharTime,
    pub gamma_eff: f64,
    pub t_d: CharTime,
    pub slow_count: usize,
    pub fast_count: usize,
}

fn reciprocal(rate: f64) -> CharTime {
    if rate > 0.0 {
        CharTime::Finite(1.0 / rate)
    } else {
        CharTime::Infinite
    }
}

/// Relaxation time from the slowest mode, decoherence time from `γ_eff`.
/// A mode with `γ = 0` never relaxes and yields an infinite `t_R`.
pub fn timescales(ms: &ModeSum) -> Result<TimescaleReport> {
    let geff = gamma_eff(ms)?;
    let slow_count = slow_len(ms, geff);
    Ok(TimescaleReport {
        t_r: reciprocal(ms.modes[0].gamma),
        gamma_eff: geff,
        t_d: reciprocal(geff),
        slow_count,
        fast_count: ms.modes.len() - slow_count,
    })
}

/// Modes are sorted, so the slow set is a prefix: `γᵢ < γ_eff`, or the
/// slowest group alone when that would leave it empty.
fn slow_len(ms: &ModeSum, geff: f64) -> usize {
    let strict = ms.modes.iter().take_while(|m| m.gamma < geff).count();
    if strict > 0 {
        return strict;
    }
    let slowest = ms.modes[0].gamma;
    ms.modes.iter().take_while(|m| m.gamma == slowest).count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub slow: ModeSum,
    pub fast: Option<ModeSum>,
}

/// Splits at `γ_eff`; the equilibrium value stays with the slow part.
pub fn partition(ms: &ModeSum, gamma_eff: f64) -> Result<Partition> {
    if !gamma_eff.is_finite() {
        return Err(MultipoleError::InvalidArgument(format!("gamma_eff must be finite, got {gamma_eff}")));
    }
    let k = slow_len(ms, gamma_eff);
    let slow = ModeSum { equilibrium: ms.equilibrium, modes: ms.modes[..k].to_vec() };
    let fast = (k < ms.modes.len())
        .then(|| ModeSum { equilibrium: C64::new(0.0, 0.0), modes: ms.modes[k..].to_vec() });
    Ok(Partition { slow, fast })
}

/// Equilibrium plus the slow modes only.
pub fn preferred_expectation(ms: &ModeSum, t: f64) -> Result<C64> {
    let p = partition(ms, gamma_eff(ms)?)?;
    Ok(full_expectation(&p.slow, t))
}

/// Expands two base poles into the four products `cᵢ c̄ⱼ` with frequencies
/// `ωᵢ − ωⱼ` and rates `(γᵢ + γⱼ)/2`.
pub fn model2_modes(base: &ModeSum) -> Result<ModeSum> {
    if base.modes.len() != 2 {
        return Err(MultipoleError::WrongArity { found: base.modes.len() });
    }
    let mut modes = Vec::with_capacity(4);
    for a in &base.modes {
        for b in &base.modes {
            modes.push(Mode::new(a.c * b.c.conj(), a.omega - b.omega, 0.5 * (a.gamma + b.gamma)));
        }
    }
    ModeSum::new(base.equilibrium, modes)
}

/// Equilibrium plus the four-product sum built from two base poles.
pub fn model2_offdiagonal(base: &ModeSum, t: f64) -> Result<C64> {
    Ok(full_expectation(&model2_modes(base)?, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn real_modes(cs: &[f64], gammas: &[f64]) -> ModeSum {
        let modes = cs.iter().zip(gammas).map(|(&c, &g)| Mode::new(C64::new(c, 0.0), 0.0, g)).collect();
        ModeSum::new(C64::new(0.0, 0.0), modes).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        let one = real_modes(&[1.0], &[1.0]);
        assert_abs_diff_eq!(evaluate_f(&one, 2.0).re, (-2.0f64).exp(), epsilon = 1e-15);
        let two = real_modes(&[1.0, 1.0], &[0.1, 10.0]);
        assert_eq!(evaluate_f(&two, 0.0), C64::new(2.0, 0.0));
        assert_abs_diff_eq!(evaluate_f(&two, 1.0).re, (-0.1f64).exp() + (-10.0f64).exp(), epsilon = 1e-15);
        assert!((evaluate_f(&two, 1.0).re - 0.90489).abs() < 1e-5);
    }

    #[test]
    fn gamma_eff_examples() {
        assert_eq!(gamma_eff(&real_modes(&[1.0, 1.0], &[1.0, 3.0])).unwrap(), 2.0);
        assert_eq!(gamma_eff(&real_modes(&[3.0, 1.0], &[0.0, 4.0])).unwrap(), 1.0);
        assert_eq!(gamma_eff(&real_modes(&[0.7], &[2.5])).unwrap(), 2.5);
        let r = gamma_eff(&real_modes(&[1.0, -1.0], &[1.0, 3.0]));
        assert!(matches!(r, Err(MultipoleError::DegenerateInitialCondition)));
    }

    #[test]
    fn linearization_examples() {
        let two = real_modes(&[1.0, 1.0], &[0.1, 10.0]);
        assert_eq!(linearized_f(&two, 0.0).unwrap(), evaluate_f(&two, 0.0));
        for k in 1..=10 {
            let t = 0.001 * k as f64;
            let lin = linearized_f(&two, t).unwrap();
            let exact = evaluate_f(&two, t);
            assert!((lin - exact).norm() / exact.norm() < 0.01);
        }
        let single = ModeSum::new(C64::new(0.0, 0.0), vec![Mode::new(C64::new(0.3, 0.4), 2.0, 0.7)]).unwrap();
        for t in [0.0, 0.5, 3.0, 20.0] {
            assert!((linearized_f(&single, t).unwrap() - evaluate_f(&single, t)).norm() < 1e-14);
        }
    }

    #[test]
    fn two_pole_timescales() {
        let r = timescales(&real_modes(&[1.0, 1.0], &[0.1, 10.0])).unwrap();
        assert_eq!(r.t_r, CharTime::Finite(10.0));
        assert_abs_diff_eq!(r.gamma_eff, 5.05, epsilon = 1e-14);
        assert_abs_diff_eq!(r.t_d.value(), 1.0 / 5.05, epsilon = 1e-14);
        assert_eq!((r.slow_count, r.fast_count), (1, 1));
        assert!(r.t_d.value() <= r.t_r.value() / 5.0);
    }

    #[test]
    fn fast_dominated_limit() {
        let r = timescales(&real_modes(&[1e-6, 1.0], &[0.1, 10.0])).unwrap();
        assert_eq!(r.t_r, CharTime::Finite(10.0));
        assert!((r.t_d.value() - 0.1).abs() < 1e-6);
    }

    #[test]
    fn single_mode_timescales_and_partition() {
        let ms = real_modes(&[1.0], &[2.0]);
        let r = timescales(&ms).unwrap();
        assert_eq!(r.t_r, CharTime::Finite(0.5));
        assert_eq!(r.t_d, CharTime::Finite(0.5));
        assert_eq!((r.slow_count, r.fast_count), (1, 0));
        let p = partition(&ms, 2.0).unwrap();
        assert_eq!(p.slow.modes().len(), 1);
        assert!(p.fast.is_none());
        for t in [0.0, 1.0, 5.0] {
            assert_eq!(preferred_expectation(&ms, t).unwrap(), full_expectation(&ms, t));
        }
    }

    #[test]
    fn non_decaying_mode_gives_infinite_relaxation() {
        let r = timescales(&real_modes(&[1.0, 1.0], &[0.0, 2.0])).unwrap();
        assert_eq!(r.t_r, CharTime::Infinite);
        assert_eq!(r.t_d, CharTime::Finite(1.0));
    }

    #[test]
    fn partition_examples() {
        let ms = real_modes(&[1.0, 1.0], &[1.0, 3.0]);
        let p = partition(&ms, 2.0).unwrap();
        assert_eq!(p.slow.modes()[0].gamma, 1.0);
        assert_eq!(p.fast.unwrap().modes()[0].gamma, 3.0);
    }

    #[test]
    fn preferred_examples() {
        let eq = C64::new(0.25, 0.0);
        let modes = vec![Mode::new(C64::new(1.0, 0.0), 0.0, 0.1), Mode::new(C64::new(1.0, 0.0), 0.0, 10.0)];
        let ms = ModeSum::new(eq, modes).unwrap();
        assert_eq!(preferred_expectation(&ms, 0.0).unwrap(), eq + 1.0);
        assert_eq!(full_expectation(&ms, 0.0), eq + 2.0);
        let t = 5.0 / 10.0;
        let gap = (full_expectation(&ms, t) - preferred_expectation(&ms, t).unwrap()).norm();
        assert!(gap < (-5.0f64).exp() * 1.0 + 1e-15);
    }

    #[test]
    fn model2_products() {
        let base = real_modes(&[1.0, 1.0], &[0.1, 10.0]);
        let m2 = model2_modes(&base).unwrap();
        let rates: Vec<f64> = m2.modes().iter().map(|m| m.gamma).collect();
        assert_eq!(rates, vec![0.1, 5.05, 5.05, 10.0]);
        let same = model2_modes(&real_modes(&[1.0, 2.0], &[0.3, 0.3])).unwrap();
        assert!(same.modes().iter().all(|m| m.gamma == 0.3));
        let eq = C64::new(0.5, 0.1);
        let with_eq = ModeSum::new(eq, base.modes().to_vec()).unwrap();
        assert!((model2_offdiagonal(&with_eq, 1e4).unwrap() - eq).norm() < 1e-15);
        let r = model2_modes(&real_modes(&[1.0], &[1.0]));
        assert!(matches!(r, Err(MultipoleError::WrongArity { found: 1 })));
    }

    fn positive_modes() -> impl Strategy<Value = ModeSum> {
        proptest::collection::vec((0.01..5.0f64, -3.0..3.0f64, 0.0..20.0f64), 1..6).prop_map(|v| {
            let modes = v.into_iter().map(|(c, w, g)| Mode::new(C64::new(c, 0.0), w, g)).collect();
            ModeSum::new(C64::new(0.0, 0.0), modes).unwrap()
        })
    }

    proptest! {
        #[test]
        fn mean_bound(ms in positive_modes()) {
            let g = gamma_eff(&ms).unwrap();
            let lo = ms.modes()[0].gamma;
            let hi = ms.modes().last().unwrap().gamma;
            prop_assert!(g >= lo - 1e-12 && g <= hi + 1e-12);
        }

        #[test]
        fn tangency_at_origin(cs in proptest::collection::vec(0.01..5.0f64, 1..6),
                              gs in proptest::collection::vec(0.0..5.0f64, 6)) {
            let ms = real_modes(&cs, &gs[..cs.len()]);
            // The mode sum is entire in t, so a central difference straddling 0 is valid.
            let h = 1e-5;
            let slope = (evaluate_f(&ms, h).norm().ln() - evaluate_f(&ms, -h).norm().ln()) / (2.0 * h);
            let g = gamma_eff(&ms).unwrap();
            prop_assert!((slope + g).abs() <= 1e-6);
        }

        #[test]
        fn partition_reconstructs(ms in positive_modes(), t in 0.0..10.0f64) {
            let p = partition(&ms, gamma_eff(&ms).unwrap()).unwrap();
            let fast = p.fast.as_ref().map_or(C64::new(0.0, 0.0), |f| evaluate_f(f, t));
            prop_assert!((evaluate_f(&p.slow, t) + fast - evaluate_f(&ms, t)).norm() <= 1e-12 * (1.0 + evaluate_f(&ms, t).norm()));
            prop_assert_eq!(p.slow.equilibrium(), ms.equilibrium());
        }

        #[test]
        fn convergence_to_preferred(ms in positive_modes(), t in 0.0..10.0f64) {
            let p = partition(&ms, gamma_eff(&ms).unwrap()).unwrap();
            let bound: f64 = p.fast.as_ref().map_or(0.0, |f| f.modes().iter().map(|m| m.c.norm() * (-m.gamma * t).exp()).sum());
            let gap = (full_expectation(&ms, t) - preferred_expectation(&ms, t).unwrap()).norm();
            prop_assert!(gap <= bound + 1e-12);
        }

        #[test]
        fn ordering_when_fast_dominates(c0 in 0.01..1.0f64, extra in 0.0..2.0f64, g0 in 0.01..1.0f64, ratio in 10.0..100.0f64) {
            let ms = real_modes(&[c0, c0 + extra], &[g0, g0 * ratio]);
            let r = timescales(&ms).unwrap();
            prop_assert!(r.t_d.value() <= r.t_r.value() / 5.0);
        }
    }
}
