//! Construction of the nonfactorable bipartite state that transfers an
//! observable pair from particle 1 to primed partners on particle 2.
//!
//! Given Hermitian observables A and B with simple spectra, the state
//! `psi12 = (1/sqrt N) sum_i |alpha_i> (x) |alpha'_i>` satisfies the
//! operator-transfer identities `(A (x) I)|psi12> = (I (x) A')|psi12>` and
//! `(B (x) I)|psi12> = (I (x) B')|psi12>` exactly when the unitaries fixing
//! the primed eigenvectors obey a congruence condition `U = W V W^T`, where
//! `W` is the eigenbasis-change matrix of the pair and `^T` is the plain
//! transpose in the A-eigenbasis representation.
//!
//! Array conventions: `V` is supplied (and stored) as the matrix of the
//! B'-defining unitary in the B eigenbasis; `U` is the matrix of the
//! A'-defining unitary in the A eigenbasis. All three of `U`, `V`, `W` are
//! exposed for audit.

use num_complex::Complex;
use thiserror::Error;

use crate::hilbert::{
    basis_change, CMatrix, Complex64, HilbertError, Observable, StateVector,
};

/// Errors raised during state construction.
#[derive(Debug, Error)]
pub enum EntangleError {
    #[error("observables must share one square dimension, got {0}x{0} and {1}x{1}")]
    DimensionMismatch(usize, usize),
    #[error("spectrum of {0} is degenerate (gap {1:.3e}); the construction needs simple spectra")]
    DegenerateSpectrum(&'static str, f64),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

/// Result alias for this module.
pub type Result<T> = std::result::Result<T, EntangleError>;

/// A pair of Hermitian observables with simple spectra and their derived
/// commutator observable C = [A, B]/2i.
#[derive(Debug, Clone)]
pub struct ObservablePair {
    a: Observable,
    b: Observable,
    c: CMatrix,
}

impl ObservablePair {
    /// Validates Hermiticity and spectral simplicity, then derives C.
    pub fn new(a: CMatrix, b: CMatrix) -> Result<Self> {
        if a.rows() != b.rows() {
            return Err(EntangleError::DimensionMismatch(a.rows(), b.rows()));
        }
        let a = Observable::new(a)?;
        let b = Observable::new(b)?;
        for (label, obs) in [("A", &a), ("B", &b)] {
            if obs.spectral().is_degenerate() {
                return Err(EntangleError::DegenerateSpectrum(label, obs.spectral().min_gap()));
            }
        }
        // C = (AB - BA) / 2i = -i/2 (AB - BA).
        let comm = a.matrix().mul(b.matrix()).sub(&b.matrix().mul(a.matrix()));
        let c = comm.scale(Complex::new(0.0, -0.5));
        c.require_hermitian()?;
        Ok(ObservablePair { a, b, c })
    }

    /// The observable A.
    pub fn a(&self) -> &Observable {
        &self.a
    }

    /// The observable B.
    pub fn b(&self) -> &Observable {
        &self.b
    }

    /// The commutator observable C = [A, B]/2i.
    pub fn c_matrix(&self) -> &CMatrix {
        &self.c
    }

    /// Shared dimension of the pair.
    pub fn dim(&self) -> usize {
        self.a.dim()
    }
}

/// The constructed bipartite state together with every matrix needed to
/// audit the transfer identities.
#[derive(Debug, Clone)]
pub struct NonfactorableState {
    pair: ObservablePair,
    psi12: StateVector,
    a_prime: CMatrix,
    b_prime: CMatrix,
    u: CMatrix,
    v: CMatrix,
    w: CMatrix,
}

/// Builds the transfer state with the congruence-matched unitary
/// `U = W V W^T` (the choice Proposition-style transfer requires).
pub fn build_nonfactorable(pair: &ObservablePair, v: &CMatrix) -> Result<NonfactorableState> {
    let w = basis_change(pair.a.spectral(), pair.b.spectral())?;
    let u = w.mul(v).mul(&w.transpose());
    build_with_congruence(pair, v, &u)
}

/// Builds the state from an explicit `U` array instead of the matched
/// `W V W^T`. The A-transfer identity holds for any unitary `U`; the
/// B-transfer and dual-basis identities hold only for the matched choice,
/// which makes this hook the fault injector for validation suites.
pub fn build_with_congruence(
    pair: &ObservablePair,
    v: &CMatrix,
    u: &CMatrix,
) -> Result<NonfactorableState> {
    let n = pair.dim();
    v.require_unitary()?;
    u.require_unitary()?;
    if v.rows() != n || u.rows() != n {
        return Err(EntangleError::DimensionMismatch(n, v.rows().max(u.rows())));
    }
    let w = basis_change(pair.a.spectral(), pair.b.spectral())?;

    let p_a = pair.a.spectral().eigenvectors();
    let p_b = pair.b.spectral().eigenvectors();
    let alpha_prime = p_a.mul(u);
    let a_prime = conjugated_by(pair.a.spectral().eigenvalues(), &alpha_prime);
    let beta_prime = p_b.mul(v);
    let b_prime = conjugated_by(pair.b.spectral().eigenvalues(), &beta_prime);

    // psi12 = (1/sqrt N) sum_i |alpha_i> (x) |alpha'_i>.
    let norm = (n as f64).sqrt().recip();
    let mut amps = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for r1 in 0..n {
            for r2 in 0..n {
                amps[r1 * n + r2] += p_a.get(r1, i) * alpha_prime.get(r2, i) * norm;
            }
        }
    }
    let psi12 = StateVector::new(vec![n, n], amps)?;

    Ok(NonfactorableState {
        pair: pair.clone(),
        psi12,
        a_prime,
        b_prime,
        u: u.clone(),
        v: v.clone(),
        w,
    })
}

/// Reassembles `P diag(vals) P^dagger` from eigenvector columns.
fn conjugated_by(vals: &[f64], p: &CMatrix) -> CMatrix {
    let n = vals.len();
    let mut d = CMatrix::zeros(n, n);
    for i in 0..n {
        d.set(i, i, Complex64::new(vals[i], 0.0));
    }
    p.mul(&d).mul(&p.dagger())
}

impl NonfactorableState {
    /// The bipartite state.
    pub fn psi12(&self) -> &StateVector {
        &self.psi12
    }

    /// The observable pair that seeded the construction.
    pub fn pair(&self) -> &ObservablePair {
        &self.pair
    }

    /// The transferred partner of A on particle 2.
    pub fn a_prime(&self) -> &CMatrix {
        &self.a_prime
    }

    /// The transferred partner of B on particle 2.
    pub fn b_prime(&self) -> &CMatrix {
        &self.b_prime
    }

    /// The A'-defining unitary in the A eigenbasis.
    pub fn u(&self) -> &CMatrix {
        &self.u
    }

    /// The B'-defining unitary in the B eigenbasis.
    pub fn v(&self) -> &CMatrix {
        &self.v
    }

    /// The eigenbasis-change matrix from A's to B's eigenvectors.
    pub fn w(&self) -> &CMatrix {
        &self.w
    }

    /// Local dimension N.
    pub fn dim(&self) -> usize {
        self.pair.dim()
    }
}

/// Residual norms of the two transfer identities,
/// (`||(A (x) I - I (x) A')psi||`, `||(B (x) I - I (x) B')psi||`).
pub fn verify_transfer(state: &NonfactorableState) -> (f64, f64) {
    let ra = transfer_residual(state.pair.a.matrix(), &state.a_prime, &state.psi12);
    let rb = transfer_residual(state.pair.b.matrix(), &state.b_prime, &state.psi12);
    (ra, rb)
}

fn transfer_residual(x1: &CMatrix, x2: &CMatrix, psi: &StateVector) -> f64 {
    let n = x1.rows();
    let id = CMatrix::identity(n);
    let diff = x1.kron(&id).sub(&id.kron(x2));
    crate::hilbert::l2_norm(&diff.mul_vec(psi.amps()))
}

/// Norm distance between psi12 and its re-expansion in the B eigenbasis,
/// `(1/sqrt N) sum_i |beta_i> (x) |beta'_i>`; small only under the matched
/// congruence.
pub fn dual_basis_form(state: &NonfactorableState) -> f64 {
    let n = state.dim();
    let p_b = state.pair.b.spectral().eigenvectors();
    let beta_prime = p_b.mul(&state.v);
    let norm = (n as f64).sqrt().recip();
    let mut amps = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for r1 in 0..n {
            for r2 in 0..n {
                amps[r1 * n + r2] += p_b.get(r1, i) * beta_prime.get(r2, i) * norm;
            }
        }
    }
    let diff: Vec<Complex64> = state
        .psi12
        .amps()
        .iter()
        .zip(&amps)
        .map(|(a, b)| a - b)
        .collect();
    crate::hilbert::l2_norm(&diff)
}

/// Singular values of the N x N amplitude matrix of psi12 (its Schmidt
/// coefficients), descending.
pub fn schmidt_coefficients(psi12: &StateVector) -> Vec<f64> {
    let dims = psi12.dims();
    assert_eq!(dims.len(), 2, "Schmidt split needs a bipartite state");
    let (n1, n2) = (dims[0], dims[1]);
    let m = nalgebra::DMatrix::from_fn(n1, n2, |r, c| psi12.amps()[r * n2 + c]);
    let mut sv: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).expect("singular values are finite"));
    sv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{pauli_x, pauli_y, pauli_z, random_hermitian, random_unitary};

    fn zx_pair() -> ObservablePair {
        ObservablePair::new(pauli_z(), pauli_x()).unwrap()
    }

    fn random_pair(dim: usize, seed: u64) -> ObservablePair {
        ObservablePair::new(random_hermitian(dim, seed), random_hermitian(dim, seed + 1))
            .unwrap()
    }

    #[test]
    fn commutator_of_z_and_x_is_sigma_y() {
        let pair = zx_pair();
        assert!(pair.c_matrix().max_abs_diff(&pauli_y()) < 1e-15);
    }

    #[test]
    fn degenerate_spectrum_is_refused() {
        let err = ObservablePair::new(CMatrix::identity(2), pauli_x()).unwrap_err();
        assert!(matches!(err, EntangleError::DegenerateSpectrum("A", _)));
    }

    #[test]
    fn qubit_zx_default_build_gives_bell_state_with_unchanged_observables() {
        let pair = zx_pair();
        let state = build_nonfactorable(&pair, &CMatrix::identity(2)).unwrap();
        assert!(state.u().max_abs_diff(&CMatrix::identity(2)) < 1e-12, "U should be I");
        assert!(state.a_prime().max_abs_diff(&pauli_z()) < 1e-12);
        assert!(state.b_prime().max_abs_diff(&pauli_x()) < 1e-12);
        let amps = state.psi12().amps();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((amps[0].re - r).abs() < 1e-12 && amps[0].im.abs() < 1e-15);
        assert!((amps[3].re - r).abs() < 1e-12 && amps[3].im.abs() < 1e-15);
        assert!(amps[1].norm() < 1e-15 && amps[2].norm() < 1e-15);
    }

    #[test]
    fn bell_state_transfer_residuals_vanish() {
        let state = build_nonfactorable(&zx_pair(), &CMatrix::identity(2)).unwrap();
        let (ra, rb) = verify_transfer(&state);
        assert!(ra < 1e-14 && rb < 1e-14, "residuals ({ra:.2e}, {rb:.2e})");
        assert!(dual_basis_form(&state) < 1e-10);
    }

    #[test]
    fn random_builds_satisfy_both_identities_across_dims() {
        for dim in 2..=5 {
            for seed in 0..6u64 {
                let pair = random_pair(dim, 100 * dim as u64 + seed);
                let v = random_unitary(dim, 999 + seed);
                let state = build_nonfactorable(&pair, &v).unwrap();
                let (ra, rb) = verify_transfer(&state);
                assert!(ra < 1e-9, "dim {dim} seed {seed}: A residual {ra:.2e}");
                assert!(rb < 1e-9, "dim {dim} seed {seed}: B residual {rb:.2e}");
                assert!(
                    dual_basis_form(&state) < 1e-9,
                    "dim {dim} seed {seed}: dual-basis residual"
                );
            }
        }
    }

    #[test]
    fn primed_observables_keep_the_original_eigenvalues() {
        let pair = random_pair(4, 21);
        let state = build_nonfactorable(&pair, &random_unitary(4, 22)).unwrap();
        let eig_a = crate::hilbert::hermitian_eig(state.a_prime()).unwrap();
        for (x, y) in eig_a.eigenvalues().iter().zip(pair.a().spectral().eigenvalues()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn schmidt_spectrum_is_uniform() {
        for dim in [2usize, 3, 5] {
            let pair = random_pair(dim, 7 * dim as u64);
            let state = build_nonfactorable(&pair, &random_unitary(dim, 77)).unwrap();
            let target = (dim as f64).sqrt().recip();
            for s in schmidt_coefficients(state.psi12()) {
                assert!((s - target).abs() < 1e-10, "dim {dim}: coefficient {s}");
            }
        }
    }

    #[test]
    fn wrong_congruence_breaks_b_transfer_but_not_a_transfer() {
        let pair = random_pair(3, 41);
        let v = random_unitary(3, 42);
        let w = basis_change(pair.a().spectral(), pair.b().spectral()).unwrap();
        // Adjoint in place of transpose: plausible-looking but wrong.
        let u_bad = w.mul(&v).mul(&w.dagger());
        let state = build_with_congruence(&pair, &v, &u_bad).unwrap();
        let (ra, rb) = verify_transfer(&state);
        assert!(ra < 1e-9, "A transfer holds for any unitary, got {ra:.2e}");
        assert!(rb > 1e-3, "B transfer should break, residual only {rb:.2e}");
        assert!(dual_basis_form(&state) > 1e-3);
    }

    #[test]
    fn phase_diagonal_on_u_breaks_the_dual_form() {
        let pair = random_pair(3, 51);
        let v = random_unitary(3, 52);
        let good = build_nonfactorable(&pair, &v).unwrap();
        let mut phases = CMatrix::zeros(3, 3);
        for (i, t) in [0.4f64, 1.3, 2.6].into_iter().enumerate() {
            phases.set(i, i, Complex64::new(t.cos(), t.sin()));
        }
        let u_bad = good.u().mul(&phases);
        let state = build_with_congruence(&pair, &v, &u_bad).unwrap();
        let (ra, rb) = verify_transfer(&state);
        assert!(ra < 1e-9);
        assert!(rb > 1e-3, "B residual only {rb:.2e}");
    }
}
