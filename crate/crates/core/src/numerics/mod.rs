//! Numerical kernels shared by the physics modules: adaptive quadrature,
//! Cauchy principal values, complex root finding, small Hermitian and
//! generalized eigenproblems, and log-linear decay fits.

mod eigen;
mod fit;
mod grid;
mod quadrature;
mod roots;

pub use eigen::{generalized_eigen, hermitian_eigen, symmetric_eigen, Eigen, SymmetricEigen};
pub use fit::{fit_exponential_rate, fit_power_law, FitResult};
pub use grid::{gauss_legendre_rule, Grid1D};
pub use quadrature::{integrate, integrate_real, integrate_with_breaks, principal_value};
pub use roots::find_complex_root;

pub use num_complex::Complex64 as C64;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("quadrature did not reach tolerance {tol:.3e} (estimated error {estimate:.3e})")]
    NonConvergence { tol: f64, estimate: f64 },
    #[error("singular point {x0} lies outside the open interval ({a}, {b})")]
    SingularityOutsideRange { x0: f64, a: f64, b: f64 },
    #[error("root search did not converge in {iterations} iterations (|F| = {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("derivative vanished at z = {0}")]
    DerivativeVanished(C64),
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },
    #[error("Gram matrix is numerically singular (smallest eigenvalue {min_eigenvalue:.3e})")]
    GramSingular { min_eigenvalue: f64 },
    #[error("eigendecomposition failed to converge")]
    EigenFailure,
    #[error("need at least {needed} samples inside the fit window, found {found}")]
    InsufficientSamples { needed: usize, found: usize },
    #[error("non-positive sample value {value} at t = {t}")]
    NonPositiveValue { t: f64, value: f64 },
}

pub type Result<T> = std::result::Result<T, NumericsError>;
