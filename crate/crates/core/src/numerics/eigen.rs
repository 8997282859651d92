use faer::linalg::triangular_solve::{solve_lower_triangular_in_place, solve_upper_triangular_in_place};
use faer::{Mat, Par, Side};

use super::{NumericsError, Result, C64};

/// Eigenpairs of a Hermitian problem, eigenvalues in descending order and
/// eigenvectors stored as the matching columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Mat<C64>,
}

/// Real symmetric counterpart of [`Eigen`].
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Mat<f64>,
}

fn frobenius(m: &Mat<C64>) -> f64 {
    let mut s = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            s += m[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

fn check_hermitian(m: &Mat<C64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(NumericsError::InvalidArgument(format!("matrix is {}x{}, expected square", m.nrows(), m.ncols())));
    }
    let scale = frobenius(m);
    let mut asymmetry: f64 = 0.0;
    for j in 0..m.ncols() {
        for i in 0..=j {
            asymmetry = asymmetry.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    if asymmetry > 1e-12 * scale {
        return Err(NumericsError::NotHermitian { asymmetry });
    }
    Ok(())
}

fn descending<T: Copy>(values: Vec<f64>, vectors: &Mat<T>) -> (Vec<f64>, Mat<T>) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let sorted = order.iter().map(|&k| values[k]).collect();
    let vecs = Mat::from_fn(vectors.nrows(), n, |i, j| vectors[(i, order[j])]);
    (sorted, vecs)
}

/// Eigendecomposition of a Hermitian matrix.
pub fn hermitian_eigen(m: &Mat<C64>) -> Result<Eigen> {
    check_hermitian(m)?;
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|_| NumericsError::EigenFailure)?;
    let values: Vec<f64> = (0..m.nrows()).map(|k| evd.S().column_vector()[k].re).collect();
    let (values, vectors) = descending(values, &evd.U().to_owned());
    Ok(Eigen { values, vectors })
}

/// Eigendecomposition of a real symmetric matrix (the large dense case).
pub fn symmetric_eigen(m: &Mat<f64>) -> Result<SymmetricEigen> {
    if m.nrows() != m.ncols() {
        return Err(NumericsError::InvalidArgument(format!("matrix is {}x{}, expected square", m.nrows(), m.ncols())));
    }
    let mut scale: f64 = 0.0;
    let mut asymmetry: f64 = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            scale = scale.max(m[(i, j)].abs());
            asymmetry = asymmetry.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if asymmetry > 1e-12 * scale {
        return Err(NumericsError::NotHermitian { asymmetry });
    }
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|_| NumericsError::EigenFailure)?;
    let values: Vec<f64> = (0..m.nrows()).map(|k| evd.S().column_vector()[k]).collect();
    let (values, vectors) = descending(values, &evd.U().to_owned());
    Ok(SymmetricEigen { values, vectors })
}

/// Solves `A v = λ S v` for Hermitian `A` and Hermitian positive-definite
/// `S`. Returned vectors are S-orthonormal (`v† S v = 1`).
pub fn generalized_eigen(a: &Mat<C64>, s: &Mat<C64>) -> Result<Eigen> {
    check_hermitian(a)?;
    check_hermitian(s)?;
    if a.nrows() != s.nrows() {
        return Err(NumericsError::InvalidArgument("A and S differ in size".into()));
    }
    let gram_values = s.self_adjoint_eigenvalues(Side::Lower).map_err(|_| NumericsError::EigenFailure)?;
    let min_eigenvalue = gram_values.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_eigenvalue > 1e-13) {
        return Err(NumericsError::GramSingular { min_eigenvalue });
    }
    let llt = s.llt(Side::Lower).map_err(|_| NumericsError::GramSingular { min_eigenvalue })?;
    let l = llt.L();

    // C = L⁻¹ A L⁻†, built as L⁻¹ (L⁻¹ A)†.
    let mut x = a.clone();
    solve_lower_triangular_in_place(l, x.as_mut(), Par::Seq);
    let mut c = x.adjoint().to_owned();
    solve_lower_triangular_in_place(l, c.as_mut(), Par::Seq);
    // Symmetrize away roundoff before the Hermitian solver.
    let n = c.nrows();
    let c = Mat::from_fn(n, n, |i, j| 0.5 * (c[(i, j)] + c[(j, i)].conj()));

    let inner = hermitian_eigen(&c)?;
    let mut vectors = inner.vectors;
    solve_upper_triangular_in_place(l.adjoint(), vectors.as_mut(), Par::Seq);
    Ok(Eigen { values: inner.values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn real(rows: &[&[f64]]) -> Mat<C64> {
        Mat::from_fn(rows.len(), rows[0].len(), |i, j| C64::new(rows[i][j], 0.0))
    }

    #[test]
    fn identity_and_diagonal() {
        let e = hermitian_eigen(&real(&[&[1.0, 0.0], &[0.0, 1.0]])).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);
        let e = hermitian_eigen(&real(&[&[3.0, 0.0], &[0.0, 1.0]])).unwrap();
        assert_abs_diff_eq!(e.values[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.vectors[(0, 0)].norm(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.vectors[(1, 1)].norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn two_by_two_hand_diagonalization() {
        let e = hermitian_eigen(&real(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap();
        assert_abs_diff_eq!(e.values[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = e.vectors.col(0);
        let phase = v0[0] / v0[0].norm();
        assert_abs_diff_eq!((v0[0] / phase).re, r, epsilon = 1e-14);
        assert_abs_diff_eq!((v0[1] / phase).re, r, epsilon = 1e-14);
        let v1 = e.vectors.col(1);
        let phase = v1[0] / v1[0].norm();
        assert_abs_diff_eq!((v1[1] / phase).re, -r, epsilon = 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let r = hermitian_eigen(&real(&[&[1.0, 2.0], &[0.0, 1.0]]));
        assert!(matches!(r, Err(NumericsError::NotHermitian { .. })));
    }

    #[test]
    fn generalized_examples() {
        let e = generalized_eigen(&real(&[&[2.0, 0.0], &[0.0, 1.0]]), &real(&[&[4.0, 0.0], &[0.0, 1.0]])).unwrap();
        assert_abs_diff_eq!(e.values[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 0.5, epsilon = 1e-14);
        let s = real(&[&[2.0, 0.3], &[0.3, 1.0]]);
        let e = generalized_eigen(&s, &s).unwrap();
        for v in e.values {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn singular_gram_is_reported() {
        let s = real(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let r = generalized_eigen(&real(&[&[1.0, 0.0], &[0.0, 1.0]]), &s);
        assert!(matches!(r, Err(NumericsError::GramSingular { .. })));
    }

    fn hermitian_from(n: usize, entries: &[(f64, f64)]) -> Mat<C64> {
        let mut m = Mat::from_fn(n, n, |_, _| C64::new(0.0, 0.0));
        let mut k = 0;
        for j in 0..n {
            for i in 0..=j {
                let (re, im) = entries[k];
                k += 1;
                if i == j {
                    m[(i, i)] = C64::new(re, 0.0);
                } else {
                    m[(i, j)] = C64::new(re, im);
                    m[(j, i)] = C64::new(re, -im);
                }
            }
        }
        m
    }

    proptest! {
        #[test]
        fn reconstruction(entries in proptest::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 10)) {
            let m = hermitian_from(4, &entries);
            let e = hermitian_eigen(&m).unwrap();
            let n = 4;
            let scale = frobenius(&m).max(1e-300);
            for i in 0..n {
                for j in 0..n {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..n {
                        acc += e.vectors[(i, k)] * e.values[k] * e.vectors[(j, k)].conj();
                    }
                    prop_assert!((acc - m[(i, j)]).norm() <= 1e-10 * scale);
                }
            }
            for w in e.values.windows(2) {
                prop_assert!(w[0] >= w[1]);
            }
        }

        #[test]
        fn generalized_with_identity_matches_plain(entries in proptest::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 6)) {
            let m = hermitian_from(3, &entries);
            let id = Mat::from_fn(3, 3, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
            let plain = hermitian_eigen(&m).unwrap();
            let general = generalized_eigen(&m, &id).unwrap();
            for (a, b) in plain.values.iter().zip(&general.values) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }

        #[test]
        fn generalized_vectors_are_s_orthonormal(entries in proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 3),
                                                 s01 in -0.9..0.9f64) {
            let a = hermitian_from(2, &entries);
            let s = Mat::from_fn(2, 2, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(s01, 0.0) });
            let e = generalized_eigen(&a, &s).unwrap();
            for k in 0..2 {
                let v = e.vectors.col(k);
                let mut norm = C64::new(0.0, 0.0);
                let mut av = [C64::new(0.0, 0.0); 2];
                let mut sv = [C64::new(0.0, 0.0); 2];
                for i in 0..2 {
                    for j in 0..2 {
                        norm += v[i].conj() * s[(i, j)] * v[j];
                        av[i] += a[(i, j)] * v[j];
                        sv[i] += s[(i, j)] * v[j];
                    }
                }
                prop_assert!((norm.re - 1.0).abs() < 1e-12);
                for i in 0..2 {
                    prop_assert!((av[i] - sv[i] * e.values[k]).norm() < 1e-11);
                }
            }
        }
    }
}
