//! Pure states of one or more particles.
//!
//! Index convention: particle 1 owns the most significant digit of the
//! amplitude index, so for dims (d1, d2) the basis ket |i1 i2> sits at
//! position i1*d2 + i2.

use super::matrix::{CMatrix, Complex64};
use super::{HilbertError, Result};
use crate::tol;

/// Normalized pure state over an ordered list of particle dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Builds a state, requiring unit norm within the construction tolerance.
    pub fn new(dims: Vec<usize>, amps: Vec<Complex64>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if total != amps.len() || dims.is_empty() {
            return Err(HilbertError::DimensionMismatch(total, amps.len()));
        }
        let norm = l2_norm(&amps);
        if (norm - 1.0).abs() > tol::CONSTRUCTION_TOL {
            return Err(HilbertError::NotNormalized(norm));
        }
        Ok(StateVector { dims, amps })
    }

    /// Builds a state from raw amplitudes, normalizing them first.
    pub fn normalized(dims: Vec<usize>, amps: Vec<Complex64>) -> Result<Self> {
        let norm = l2_norm(&amps);
        if norm < 1e-150 {
            return Err(HilbertError::ZeroVector);
        }
        let scaled = amps.iter().map(|a| a / norm).collect();
        StateVector::new(dims, scaled)
    }

    /// Computational basis state |index> of the composite space.
    pub fn basis_state(dims: Vec<usize>, index: usize) -> Result<Self> {
        let total: usize = dims.iter().product();
        if index >= total {
            return Err(HilbertError::DimensionMismatch(total, index));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); total];
        amps[index] = Complex64::new(1.0, 0.0);
        StateVector::new(dims, amps)
    }

    /// Single-qubit state cos(theta)|0> + sin(theta)|1>.
    pub fn qubit_plane(theta: f64) -> Self {
        StateVector {
            dims: vec![2],
            amps: vec![
                Complex64::new(theta.cos(), 0.0),
                Complex64::new(theta.sin(), 0.0),
            ],
        }
    }

    /// Particle dimensions in order.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Product of all particle dimensions.
    pub fn total_dim(&self) -> usize {
        self.amps.len()
    }

    /// Amplitudes in the index convention of the module.
    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// Tensor product; self's particles precede other's.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        StateVector { dims, amps }
    }

    /// Inner product <self|other>.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        assert_eq!(self.amps.len(), other.amps.len(), "state dimension mismatch");
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Applies a square matrix to the full state, returning raw amplitudes.
    pub fn apply(&self, op: &CMatrix) -> Vec<Complex64> {
        assert_eq!(op.cols(), self.amps.len(), "operator dimension mismatch");
        op.mul_vec(&self.amps)
    }
}

/// Euclidean norm of an amplitude slice.
pub fn l2_norm(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Expectation <psi|M|psi> of a Hermitian operator; errors when the
/// imaginary residue exceeds the algebraic tolerance.
pub fn expectation(state: &StateVector, op: &CMatrix) -> Result<f64> {
    let v = state.apply(op);
    let e: Complex64 = state
        .amps()
        .iter()
        .zip(&v)
        .map(|(a, b)| a.conj() * b)
        .sum();
    if e.im.abs() > tol::ALGEBRAIC_TOL {
        return Err(HilbertError::NonHermitianObservable(e.im.abs()));
    }
    Ok(e.re)
}

/// Standard deviation sqrt(<M^2> - <M>^2), clamping round-off above -1e-12.
pub fn std_dev(state: &StateVector, op: &CMatrix) -> Result<f64> {
    let mean = expectation(state, op)?;
    let second = expectation(state, &op.mul(op))?;
    let var = second - mean * mean;
    if var < -tol::CONSTRUCTION_TOL {
        return Err(HilbertError::NonHermitianObservable(var.abs()));
    }
    Ok(var.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::super::matrix::{pauli_y, pauli_z};
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_unnormalized_amplitudes() {
        let r = StateVector::new(vec![2], vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(r, Err(HilbertError::NotNormalized(_))));
    }

    #[test]
    fn rejects_zero_vector_normalization() {
        let r = StateVector::normalized(vec![2], vec![c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(r, Err(HilbertError::ZeroVector)));
    }

    #[test]
    fn tensor_orders_particle_one_most_significant() {
        let zero = StateVector::basis_state(vec![2], 0).unwrap();
        let one = StateVector::basis_state(vec![2], 1).unwrap();
        let s = one.tensor(&zero); // |1>|0> -> index 2 of 4
        assert_eq!(s.dims(), &[2, 2]);
        assert_eq!(s.amps()[2], c(1.0, 0.0));
        assert_eq!(s.amps().iter().filter(|a| a.norm() > 0.0).count(), 1);
    }

    #[test]
    fn expectation_of_pauli_z_on_basis_states() {
        let zero = StateVector::basis_state(vec![2], 0).unwrap();
        let one = StateVector::basis_state(vec![2], 1).unwrap();
        assert_eq!(expectation(&zero, &pauli_z()).unwrap(), 1.0);
        assert_eq!(expectation(&one, &pauli_z()).unwrap(), -1.0);
    }

    #[test]
    fn sigma_y_eigenstate_has_expectation_minus_one() {
        // (|0> - i|1>)/sqrt(2) is the -1 eigenstate of pauli_y.
        let s = StateVector::new(
            vec![2],
            vec![c(std::f64::consts::FRAC_1_SQRT_2, 0.0), c(0.0, -std::f64::consts::FRAC_1_SQRT_2)],
        )
        .unwrap();
        let e = expectation(&s, &pauli_y()).unwrap();
        assert!((e + 1.0).abs() < 1e-14, "got {e}");
    }

    #[test]
    fn std_dev_vanishes_on_eigenstates_and_peaks_between() {
        let zero = StateVector::basis_state(vec![2], 0).unwrap();
        assert_eq!(std_dev(&zero, &pauli_z()).unwrap(), 0.0);
        let plus = StateVector::qubit_plane(std::f64::consts::FRAC_PI_4);
        let s = std_dev(&plus, &pauli_z()).unwrap();
        assert!((s - 1.0).abs() < 1e-14, "got {s}");
    }

    #[test]
    fn expectation_rejects_non_hermitian_operator() {
        // Raising operator has complex expectation on a superposition.
        let m = CMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let s = StateVector::new(
            vec![2],
            vec![c(0.6, 0.0), c(0.0, 0.8)],
        )
        .unwrap();
        assert!(matches!(
            expectation(&s, &m),
            Err(HilbertError::NonHermitianObservable(_))
        ));
    }
}
