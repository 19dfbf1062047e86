//! Hermitian eigendecomposition with deterministic ordering and phases.
//!
//! Eigenvalues are sorted ascending and each eigenvector is rotated so its
//! first component of modulus above the pivot threshold is real positive.
//! This makes decompositions reproducible bit-for-bit and lets basis-change
//! matrices be compared across runs.

use nalgebra::{DMatrix, SymmetricEigen};

use super::matrix::{CMatrix, Complex64};
use super::{HilbertError, Result};
use crate::tol;

/// Sorted, phase-fixed spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors, ordered like the eigenvalues.
    eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvector matrix; column i belongs to eigenvalue i.
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    /// Eigenvector i as an owned amplitude vector.
    pub fn eigenvector(&self, i: usize) -> Vec<Complex64> {
        (0..self.eigenvectors.rows())
            .map(|r| self.eigenvectors.get(r, i))
            .collect()
    }

    /// Smallest gap between adjacent sorted eigenvalues.
    pub fn min_gap(&self) -> f64 {
        self.eigenvalues
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// True when some eigenvalue gap falls below the ambiguity threshold.
    pub fn is_degenerate(&self) -> bool {
        self.min_gap() < tol::DEGENERACY_GAP
    }

    /// Rebuilds the original matrix as V diag(lambda) V†.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.eigenvalues.len();
        let mut d = CMatrix::zeros(n, n);
        for i in 0..n {
            d.set(i, i, Complex64::new(self.eigenvalues[i], 0.0));
        }
        self.eigenvectors.mul(&d).mul(&self.eigenvectors.dagger())
    }
}

/// Decomposes a Hermitian matrix; eigenvalues ascending, phases fixed.
pub fn hermitian_eig(m: &CMatrix) -> Result<SpectralDecomposition> {
    m.require_hermitian()?;
    let n = m.rows();
    let dm = DMatrix::from_fn(n, n, |i, j| m.get(i, j));
    let eig = SymmetricEigen::new(dm);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("eigenvalues are finite")
    });

    let mut eigenvalues = Vec::with_capacity(n);
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        eigenvalues.push(eig.eigenvalues[src]);
        let mut column: Vec<Complex64> = (0..n).map(|r| eig.eigenvectors[(r, src)]).collect();
        fix_phase(&mut column);
        for (r, v) in column.into_iter().enumerate() {
            vectors.set(r, col, v);
        }
    }

    let sd = SpectralDecomposition { eigenvalues, eigenvectors: vectors };
    debug_assert!(sd.reconstruct().max_abs_diff(m) < 1e-9 * (1.0 + norm_scale(m)));
    Ok(sd)
}

fn norm_scale(m: &CMatrix) -> f64 {
    m.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Rotates a vector's global phase so its first component with modulus above
/// the pivot threshold becomes real positive.
fn fix_phase(column: &mut [Complex64]) {
    let pivot = column
        .iter()
        .find(|z| z.norm() > tol::PHASE_PIVOT_MIN)
        .copied()
        .unwrap_or(Complex64::new(1.0, 0.0));
    let phase = pivot.conj() / pivot.norm();
    for z in column.iter_mut() {
        *z *= phase;
    }
}

/// Unitary W with columns of `to` expanded in the eigenbasis of `from`:
/// w[mu][i] = <alpha_mu | beta_i>. Refused when either spectrum has a gap
/// below the degeneracy threshold, because the eigenbasis is then ambiguous.
pub fn basis_change(
    from: &SpectralDecomposition,
    to: &SpectralDecomposition,
) -> Result<CMatrix> {
    if from.eigenvalues.len() != to.eigenvalues.len() {
        return Err(HilbertError::DimensionMismatch(
            from.eigenvalues.len(),
            to.eigenvalues.len(),
        ));
    }
    let gap = from.min_gap().min(to.min_gap());
    if gap < tol::DEGENERACY_GAP {
        return Err(HilbertError::Degenerate(gap));
    }
    let w = from.eigenvectors.dagger().mul(&to.eigenvectors);
    w.require_unitary()?;
    Ok(w)
}

/// Hermitian matrix bundled with its eagerly computed decomposition.
#[derive(Debug, Clone)]
pub struct Observable {
    matrix: CMatrix,
    spectral: SpectralDecomposition,
}

impl Observable {
    /// Validates hermiticity and decomposes the matrix once.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let spectral = hermitian_eig(&matrix)?;
        Ok(Observable { matrix, spectral })
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// The cached decomposition.
    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    /// Dimension of the space the observable acts on.
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}
