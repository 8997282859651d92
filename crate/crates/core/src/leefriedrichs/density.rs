//! Reduced density of the two-packet superposition in the fixed frame
//! `{|α₁(0)⟩, |α₂(0)⟩}` and its moving eigenbasis.

use faer::Mat;

use super::fock::{coherent_fock, inner, propagate};
use super::{check_cutoff, check_time, overlap, EffectiveModel, Result, SuperpositionState};
use crate::numerics::{generalized_eigen, C64};

/// `ρ = Σᵢⱼ coeffs[i][j] |αᵢ(0)⟩⟨αⱼ(0)|`, normalized so `Tr(coeffs·gram) = 1`.
/// The evolved packets are projected onto the frame span.
#[derive(Debug, Clone)]
pub struct ReducedDensity {
    pub coeffs: Mat<C64>,
    pub gram: Mat<C64>,
    /// Trace before normalization; the non-Hermitian evolution loses norm.
    pub trace_raw: f64,
}

impl ReducedDensity {
    /// Coefficients before trace normalization.
    pub fn raw_coeffs(&self) -> Mat<C64> {
        Mat::from_fn(2, 2, |i, j| self.coeffs[(i, j)] * self.trace_raw)
    }
}

fn frame(state: &SuperpositionState) -> [C64; 2] {
    [state.alpha1.alpha, state.alpha2.alpha]
}

fn gram(state: &SuperpositionState) -> Mat<C64> {
    let f = frame(state);
    Mat::from_fn(2, 2, |i, j| overlap(f[i], f[j]))
}

fn project(state: &SuperpositionState, em: &EffectiveModel, t: f64, n_max: usize, keep_coherence: bool) -> Result<ReducedDensity> {
    check_time(t)?;
    let f = frame(state);
    check_cutoff(f.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max), n_max)?;
    let s = gram(state);
    let s_inv = invert2(&s)?;

    // u[i][k] = ⟨αᵢ(0)|e^{−iH_eff t}|αₖ(0)⟩ as a truncated number-basis sum.
    let frame_vectors: Vec<Vec<C64>> = f.iter().map(|&a| coherent_fock(a, n_max)).collect();
    let evolved: Vec<Vec<C64>> = frame_vectors.iter().map(|v| propagate(v, em.z0, t)).collect();
    let u = Mat::from_fn(2, 2, |i, k| inner(&frame_vectors[i], &evolved[k]));

    let (a, b) = (state.a, state.b);
    let off = if keep_coherence { a * b.conj() } else { C64::new(0.0, 0.0) };
    let d = Mat::from_fn(2, 2, |k, l| match (k, l) {
        (0, 0) => C64::new(a.norm_sqr(), 0.0),
        (1, 1) => C64::new(b.norm_sqr(), 0.0),
        (0, 1) => off,
        _ => off.conj(),
    });
    let m = &u * &d * u.adjoint();
    let c = &s_inv * &m * &s_inv;
    let c = Mat::from_fn(2, 2, |i, j| 0.5 * (c[(i, j)] + c[(j, i)].conj()));
    let trace_raw = (&c * &s).diagonal().column_vector().iter().map(|z| z.re).sum::<f64>();
    if !(trace_raw > 0.0) {
        return Err(super::LeeFriedrichsError::InvalidState(format!("projected trace {trace_raw:.3e} is not positive")));
    }
    Ok(ReducedDensity { coeffs: Mat::from_fn(2, 2, |i, j| c[(i, j)] / trace_raw), gram: s, trace_raw })
}

fn invert2(s: &Mat<C64>) -> Result<Mat<C64>> {
    // Delegate the singularity test to the generalized solver's threshold.
    let det = s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)];
    let min_eigenvalue = 1.0 - s[(0, 1)].norm();
    if !(min_eigenvalue > 1e-13) {
        return Err(super::LeeFriedrichsError::GramSingular { min_eigenvalue });
    }
    Ok(Mat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => s[(1, 1)] / det,
        (1, 1) => s[(0, 0)] / det,
        _ => -s[(i, j)] / det,
    }))
}

/// Full evolved density `|ψ(t)⟩⟨ψ(t)|` in the frame.
pub fn reduced_density(state: &SuperpositionState, em: &EffectiveModel, t: f64, n_max: usize) -> Result<ReducedDensity> {
    project(state, em, t, n_max, true)
}

/// `|a|²|α₁(t)⟩⟨α₁(t)| + |b|²|α₂(t)⟩⟨α₂(t)|` in the frame.
pub fn preferred_density(state: &SuperpositionState, em: &EffectiveModel, t: f64, n_max: usize) -> Result<ReducedDensity> {
    project(state, em, t, n_max, false)
}

/// Eigenpairs of `ρ v = λ v` in frame coordinates, largest first;
/// columns are S-orthonormal.
#[derive(Debug, Clone)]
pub struct MovingBasis {
    pub eigenvalues: Vec<f64>,
    pub vectors: Mat<C64>,
}

pub fn moving_basis(rd: &ReducedDensity) -> Result<MovingBasis> {
    // ρ|v⟩ = λ|v⟩ in frame coordinates reads (S C S) v = λ S v.
    let a = &rd.gram * &rd.coeffs * &rd.gram;
    let a = Mat::from_fn(2, 2, |i, j| 0.5 * (a[(i, j)] + a[(j, i)].conj()));
    let eig = generalized_eigen(&a, &rd.gram)?;
    Ok(MovingBasis { eigenvalues: eig.values, vectors: eig.vectors })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisReport {
    pub times: Vec<f64>,
    pub eigen_overlap: Vec<f64>,
    pub offdiag_mod: Vec<f64>,
}

/// Squared overlap of the dominant eigenvectors of `ρ(t)` and `ρ_P(t)`.
///
/// When the two eigenvalues of `ρ_P` are closer than the frame overlap
/// `2|⟨α₁|α₂⟩|` its eigenvectors are not resolved, and the frame vector
/// with the larger weight stands in (ties go to `|α₁(0)⟩`).
pub fn basis_convergence(
    state: &SuperpositionState,
    em: &EffectiveModel,
    times: &[f64],
    n_max: usize,
) -> Result<BasisReport> {
    let s = gram(state);
    let resolution = 2.0 * s[(0, 1)].norm();
    let mut eigen_overlap = Vec::with_capacity(times.len());
    let mut offdiag_mod = Vec::with_capacity(times.len());
    for &t in times {
        let rho = reduced_density(state, em, t, n_max)?;
        let rho_p = preferred_density(state, em, t, n_max)?;
        let full = moving_basis(&rho)?;
        let pref = moving_basis(&rho_p)?;
        let v = full.vectors.col(0);
        let w: Vec<C64> = if pref.eigenvalues[0] - pref.eigenvalues[1] < resolution {
            let k = if rho_p.coeffs[(1, 1)].re > rho_p.coeffs[(0, 0)].re { 1 } else { 0 };
            // Frame vectors have unit norm, so the unit coordinate vector is S-normalized.
            (0..2).map(|i| C64::new(if i == k { 1.0 } else { 0.0 }, 0.0)).collect()
        } else {
            pref.vectors.col(0).iter().copied().collect()
        };
        let mut proj = C64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                proj += v[i].conj() * s[(i, j)] * w[j];
            }
        }
        eigen_overlap.push(proj.norm_sqr().min(1.0));
        offdiag_mod.push(rho.coeffs[(0, 1)].norm());
    }
    Ok(BasisReport { times: times.to_vec(), eigen_overlap, offdiag_mod })
}
