//! Complex linear algebra for small multi-particle systems.
//!
//! Matrices are dense and row-major; states are normalized amplitude vectors
//! over an ordered list of particle dimensions with particle 1 owning the
//! most significant index digit. The eigendecomposition sorts eigenvalues
//! ascending and fixes each eigenvector's global phase so results are
//! reproducible bit-for-bit.

pub mod embed;
pub mod matrix;
pub mod sample;
pub mod spectral;
pub mod state;

use thiserror::Error;

pub use embed::{embed_pair, embed_site};
pub use matrix::{pauli_x, pauli_y, pauli_z, CMatrix, Complex64};
pub use sample::{random_hermitian, random_state, random_unitary};
pub use spectral::{basis_change, hermitian_eig, Observable, SpectralDecomposition};
pub use state::{expectation, l2_norm, std_dev, StateVector};

/// Errors raised by linear-algebra constructions and validations.
#[derive(Debug, Error)]
pub enum HilbertError {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),
    #[error("dimension mismatch: expected {0}, got {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (residual {0:.3e})")]
    NotUnitary(f64),
    #[error("spectrum is degenerate (gap {0:.3e}), eigenbasis ambiguous")]
    Degenerate(f64),
    #[error("state norm is {0}, expected 1")]
    NotNormalized(f64),
    #[error("cannot normalize a zero vector")]
    ZeroVector,
    #[error("expectation of a non-Hermitian operator (residue {0:.3e})")]
    NonHermitianObservable(f64),
}

/// Result alias for this module.
pub type Result<T> = std::result::Result<T, HilbertError>;
