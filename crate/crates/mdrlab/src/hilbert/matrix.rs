//! Dense complex matrices in row-major order.
//!
//! Dimensions stay tiny (products of particle dimensions no larger than 8),
//! so the representation favors clarity over blocking or sparsity.

use num_complex::Complex;

use super::{HilbertError, Result};

/// Complex number with 64-bit float components.
pub type Complex64 = Complex<f64>;

/// Dense complex matrix, entries stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl CMatrix {
    /// Builds a matrix from row-major entries; length must equal rows*cols.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        CMatrix { rows, cols, entries }
    }

    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, entries: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    /// Identity matrix of dimension n.
    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        CMatrix {
            rows,
            cols,
            entries: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major entry slice.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Entry at (i, j).
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.cols + j]
    }

    /// Overwrites the entry at (i, j).
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.entries[i * self.cols + j] = value;
    }

    /// Matrix sum; shapes must match.
    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        CMatrix { rows: self.rows, cols: self.cols, entries }
    }

    /// Matrix difference; shapes must match.
    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        CMatrix { rows: self.rows, cols: self.cols, entries }
    }

    /// Scales every entry by a complex factor.
    pub fn scale(&self, factor: Complex64) -> CMatrix {
        let entries = self.entries.iter().map(|a| a * factor).collect();
        CMatrix { rows: self.rows, cols: self.cols, entries }
    }

    /// Matrix product self * other.
    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Matrix-vector product self * v.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "vector length mismatch");
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.get(i, j) * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Plain transpose (no conjugation).
    pub fn transpose(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Kronecker product; the left factor owns the most significant index.
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = CMatrix::zeros(rows, cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.get(i1, j1);
                for i2 in 0..other.rows {
                    for j2 in 0..other.cols {
                        out.set(
                            i1 * other.rows + i2,
                            j1 * other.cols + j2,
                            a * other.get(i2, j2),
                        );
                    }
                }
            }
        }
        out
    }

    /// Largest entry modulus of self - other.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest modulus among entries of self - self†.
    pub fn hermiticity_residual(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "hermiticity needs a square matrix");
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                let r = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(r);
            }
        }
        worst
    }

    /// Largest modulus among entries of self†·self - I.
    pub fn unitarity_residual(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "unitarity needs a square matrix");
        self.dagger().mul(self).max_abs_diff(&CMatrix::identity(self.rows))
    }

    /// Errors unless the matrix is square.
    pub fn require_square(&self) -> Result<()> {
        if self.rows != self.cols {
            return Err(HilbertError::NotSquare(self.rows, self.cols));
        }
        Ok(())
    }

    /// Errors unless self is Hermitian within the construction tolerance.
    pub fn require_hermitian(&self) -> Result<()> {
        self.require_square()?;
        let r = self.hermiticity_residual();
        if r > crate::tol::CONSTRUCTION_TOL {
            return Err(HilbertError::NotHermitian(r));
        }
        Ok(())
    }

    /// Errors unless self is unitary within the algebraic tolerance.
    pub fn require_unitary(&self) -> Result<()> {
        self.require_square()?;
        let r = self.unitarity_residual();
        if r > crate::tol::ALGEBRAIC_TOL {
            return Err(HilbertError::NotUnitary(r));
        }
        Ok(())
    }
}

/// Pauli x matrix.
pub fn pauli_x() -> CMatrix {
    CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

/// Pauli y matrix.
pub fn pauli_y() -> CMatrix {
    CMatrix::new(
        2,
        2,
        vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
        ],
    )
}

/// Pauli z matrix.
pub fn pauli_z() -> CMatrix {
    CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_against_hand_computed_entries() {
        let a = CMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0), c(0.0, -1.0)]);
        let b = CMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let ab = a.mul(&b);
        assert_eq!(ab.get(0, 0), c(0.0, 1.0));
        assert_eq!(ab.get(0, 1), c(1.0, 0.0));
        assert_eq!(ab.get(1, 0), c(0.0, -1.0));
        assert_eq!(ab.get(1, 1), c(2.0, 0.0));
    }

    #[test]
    fn dagger_conjugates_and_transposes() {
        let a = CMatrix::new(2, 2, vec![c(1.0, 2.0), c(3.0, 4.0), c(5.0, 6.0), c(7.0, 8.0)]);
        let d = a.dagger();
        assert_eq!(d.get(0, 1), c(5.0, -6.0));
        assert_eq!(d.get(1, 0), c(3.0, -4.0));
    }

    #[test]
    fn kron_places_blocks_with_left_factor_most_significant() {
        let z = pauli_z();
        let x = pauli_x();
        let zx = z.kron(&x);
        // Upper-left block is +X, lower-right block is -X.
        assert_eq!(zx.get(0, 1), c(1.0, 0.0));
        assert_eq!(zx.get(1, 0), c(1.0, 0.0));
        assert_eq!(zx.get(2, 3), c(-1.0, 0.0));
        assert_eq!(zx.get(3, 2), c(-1.0, 0.0));
        assert_eq!(zx.get(0, 3), c(0.0, 0.0));
    }

    #[test]
    fn kron_matches_elementwise_definition_on_random_shapes() {
        // Independent index-arithmetic oracle for the Kronecker product.
        let a = CMatrix::new(2, 3, (0..6).map(|k| c(k as f64, -(k as f64))).collect());
        let b = CMatrix::new(3, 2, (0..6).map(|k| c(1.0 + k as f64, 0.5 * k as f64)).collect());
        let k = a.kron(&b);
        assert_eq!(k.rows(), 6);
        assert_eq!(k.cols(), 6);
        for i1 in 0..2 {
            for j1 in 0..3 {
                for i2 in 0..3 {
                    for j2 in 0..2 {
                        let expect = a.get(i1, j1) * b.get(i2, j2);
                        let got = k.get(i1 * 3 + i2, j1 * 2 + j2);
                        assert_eq!(got, expect);
                    }
                }
            }
        }
    }

    #[test]
    fn pauli_matrices_are_hermitian_and_unitary() {
        for m in [pauli_x(), pauli_y(), pauli_z()] {
            assert!(m.hermiticity_residual() == 0.0);
            assert!(m.unitarity_residual() == 0.0);
        }
    }

    #[test]
    fn require_hermitian_rejects_asymmetric_matrix() {
        let m = CMatrix::new(2, 2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(m.require_hermitian(), Err(HilbertError::NotHermitian(_))));
    }
}
