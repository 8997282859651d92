//! Truncated Fock-space vectors for a single oscillator mode.

use crate::numerics::C64;

/// `ln n!` for `n = 0..=n_max`.
pub fn ln_factorials(n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut acc = 0.0;
    out.push(acc);
    for n in 1..=n_max {
        acc += (n as f64).ln();
        out.push(acc);
    }
    out
}

/// Poisson probabilities `e^{−λ} λⁿ / n!`, evaluated in log space.
pub fn poisson_weights(lambda: f64, n_max: usize) -> Vec<f64> {
    if lambda == 0.0 {
        let mut w = vec![0.0; n_max + 1];
        w[0] = 1.0;
        return w;
    }
    let ln_lambda = lambda.ln();
    ln_factorials(n_max).iter().enumerate().map(|(n, lf)| (-lambda + n as f64 * ln_lambda - lf).exp()).collect()
}

/// Number-basis coefficients `e^{−|α|²/2} αⁿ / √n!` of a normalized coherent state.
pub fn coherent_fock(alpha: C64, n_max: usize) -> Vec<C64> {
    let r2 = alpha.norm_sqr();
    if r2 == 0.0 {
        let mut v = vec![C64::new(0.0, 0.0); n_max + 1];
        v[0] = C64::new(1.0, 0.0);
        return v;
    }
    let (ln_r, theta) = (alpha.norm().ln(), alpha.arg());
    ln_factorials(n_max)
        .iter()
        .enumerate()
        .map(|(n, lf)| C64::from_polar((-0.5 * r2 + n as f64 * ln_r - 0.5 * lf).exp(), n as f64 * theta))
        .collect()
}

/// Applies `e^{−i n z₀ t}` to each number state.
pub fn propagate(coeffs: &[C64], z0: C64, t: f64) -> Vec<C64> {
    let step = (C64::new(0.0, -t) * z0).exp();
    let mut phase = C64::new(1.0, 0.0);
    coeffs
        .iter()
        .map(|c| {
            let out = c * phase;
            phase *= step;
            out
        })
        .collect()
}

/// `⟨u|v⟩`.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// `|⟨u|v⟩|² / (⟨u|u⟩⟨v|v⟩)`.
pub fn fidelity(u: &[C64], v: &[C64]) -> f64 {
    inner(u, v).norm_sqr() / (inner(u, u).re * inner(v, v).re)
}
