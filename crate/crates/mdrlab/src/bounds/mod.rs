//! Correlation bounds induced by measurement-disturbance relations on
//! tripartite states.
//!
//! The pipeline: a nonfactorable pair state on particles 1 and 2, a meter
//! (particle 3) coupled to particle 1 by a unitary interaction, and the
//! resulting bound `E(A'_2, A_3) + E(B'_2, B_1) <= (sum of second moments
//! - gamma_q)/2`, where `gamma_q` maximizes the weighted per-branch
//! shortest-distance values over projection bases of particle 2. The
//! submodules add the qubit bounds table, CHSH assembly and monogamy, the
//! invertible-filter generalization, and a brute-force correlation search.

mod appc;
mod chsh;
mod gamma;
mod lambda;
mod theorem;

pub use appc::{
    correlation_operator, max_corr_search, reduced_form, reduced_form_max, MaxCorrReport,
};
pub use chsh::{
    chsh_bound, chsh_bound_kappa, chsh_pair_sum, direction_observable, ChshOperators,
    ChshSettings,
};
pub use gamma::{basis_weighted_f, gamma_q, Certificate, GammaResult, SearchBudget};
pub use lambda::{lambda_generalized_check, LambdaReport};
pub use theorem::{correlation_sum, qm_correlation_sum, theorem_bound, BoundReport};

use thiserror::Error;

use crate::entangle::{build_nonfactorable, EntangleError, NonfactorableState, ObservablePair};
use crate::hilbert::{
    embed_pair, expectation, pauli_x, pauli_z, CMatrix, HilbertError, StateVector,
};
use crate::mdr::MdrError;
use crate::measure::{MeasureError, MeterModel};
use crate::tol;

/// Errors raised while evaluating bounds.
#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("local dimension {0} too large for an exact basis search (max {max})", max = tol::MAX_DIM)]
    DimensionTooLarge(usize),
    #[error("operation requires qubit particles, got dimension {0}")]
    NotQubit(usize),
    #[error("filter is numerically singular (condition number {0:.3e})")]
    Singular(f64),
    #[error("search routes disagree: raw {0:.12e} vs reduced-form {1:.12e}")]
    SearchMismatch(f64, f64),
    #[error("simulated value {0:.12e} deviates from the closed form {1:.12e}")]
    IdentityViolation(f64, f64),
    #[error("dimension mismatch: expected {0}, got {1}")]
    DimensionMismatch(usize, usize),
    #[error("measurement direction has norm {0:.6}, expected a unit vector")]
    InvalidDirection(f64),
    #[error(transparent)]
    Entangle(#[from] EntangleError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Mdr(#[from] MdrError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

/// Result alias for this module.
pub type Result<T> = std::result::Result<T, BoundsError>;

/// A full measurement scenario: pair source, meter state, interaction
/// between particles 1 and 3, readout observable on the meter, and the
/// derived tripartite state.
#[derive(Debug, Clone)]
pub struct TripartiteScenario {
    source: NonfactorableState,
    meter_state: StateVector,
    interaction: CMatrix,
    readout: CMatrix,
    psi123: StateVector,
}

impl TripartiteScenario {
    /// Assembles the scenario and derives `psi123` by applying the
    /// interaction (given on the particle-1 x particle-3 product space) to
    /// `psi12 (x) phi3`.
    pub fn new(
        source: NonfactorableState,
        meter_state: StateVector,
        interaction: CMatrix,
        readout: CMatrix,
    ) -> Result<Self> {
        interaction.require_unitary()?;
        readout.require_hermitian()?;
        let n = source.dim();
        let m = meter_state.total_dim();
        if interaction.rows() != n * m {
            return Err(BoundsError::DimensionMismatch(n * m, interaction.rows()));
        }
        if readout.rows() != m {
            return Err(BoundsError::DimensionMismatch(m, readout.rows()));
        }
        let dims = vec![n, n, m];
        let embedded = embed_pair(&interaction, 0, 2, &dims);
        let product = source.psi12().tensor(&meter_state);
        let amps = embedded.mul_vec(product.amps());
        let psi123 = StateVector::new(dims, amps)?;
        Ok(TripartiteScenario { source, meter_state, interaction, readout, psi123 })
    }

    /// The three-qubit reference scenario: pair (Z, X) with identity V,
    /// meter `cos(theta3)|0> + sin(theta3)|1>`, CNOT interaction with
    /// particle 1 as control and the meter as target, and readout Z.
    pub fn qubit_cnot(theta3: f64) -> Result<Self> {
        let pair = ObservablePair::new(pauli_z(), pauli_x())?;
        let source = build_nonfactorable(&pair, &CMatrix::identity(2))?;
        let meter_state = StateVector::qubit_plane(theta3);
        let interaction = crate::measure::cnot(0, 1, &[2, 2])?;
        TripartiteScenario::new(source, meter_state, interaction, pauli_z())
    }

    /// The pair source.
    pub fn source(&self) -> &NonfactorableState {
        &self.source
    }

    /// The meter state |phi3>.
    pub fn meter_state(&self) -> &StateVector {
        &self.meter_state
    }

    /// The interaction unitary on particles 1 and 3.
    pub fn interaction(&self) -> &CMatrix {
        &self.interaction
    }

    /// The readout observable on the meter.
    pub fn readout(&self) -> &CMatrix {
        &self.readout
    }

    /// The derived tripartite state.
    pub fn psi123(&self) -> &StateVector {
        &self.psi123
    }

    /// The meter model realizing the measurement of A through particle 3.
    pub fn meter_model(&self) -> MeterModel {
        MeterModel::new(self.meter_state.clone(), self.interaction.clone(), self.readout.clone())
            .expect("scenario invariants already validated the meter pieces")
    }

    /// Local dimension of particles 1 and 2.
    pub fn pair_dim(&self) -> usize {
        self.source.dim()
    }

    /// Requires every particle to be a qubit.
    pub fn require_qubits(&self) -> Result<()> {
        for &d in self.psi123.dims() {
            if d != 2 {
                return Err(BoundsError::NotQubit(d));
            }
        }
        Ok(())
    }
}

/// Bipartite correlation `E(X_i, Y_j) = <X_i Y_j>` between two particles of
/// a multipartite state.
pub fn correlation(
    psi: &StateVector,
    x: &CMatrix,
    site_x: usize,
    y: &CMatrix,
    site_y: usize,
) -> Result<f64> {
    assert!(site_x != site_y, "correlation needs two distinct particles");
    let dims = psi.dims();
    let ex = crate::hilbert::embed_site(x, site_x, dims);
    let ey = crate::hilbert::embed_site(y, site_y, dims);
    Ok(expectation(psi, &ex.mul(&ey))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{pauli_y, random_state};

    #[test]
    fn qubit_cnot_state_matches_the_displayed_expansion() {
        // (1/sqrt2)[cos|000> + sin|001> + sin|110> + cos|111>].
        let theta3 = 0.37;
        let s = TripartiteScenario::qubit_cnot(theta3).unwrap();
        let amps = s.psi123().amps();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let (c, sn) = (theta3.cos() * r, theta3.sin() * r);
        for (idx, expect) in [(0, c), (1, sn), (6, sn), (7, c)] {
            assert!((amps[idx].re - expect).abs() < 1e-12 && amps[idx].im.abs() < 1e-15);
        }
        for idx in [2, 3, 4, 5] {
            assert!(amps[idx].norm() < 1e-15);
        }
    }

    #[test]
    fn correlation_on_a_product_state_factorizes() {
        // |0>|0>|0>: E(Z2, Z3) = 1.
        let psi = StateVector::basis_state(vec![2, 2, 2], 0).unwrap();
        let e = correlation(&psi, &pauli_z(), 1, &pauli_z(), 2).unwrap();
        assert!((e - 1.0).abs() < 1e-14);
    }

    #[test]
    fn correlation_matches_elementwise_oracle_on_random_state() {
        // Independent evaluation: loop over index pairs with explicit
        // Pauli action on the middle qubit pair of a (2,2,2) state.
        let psi = random_state(&[2, 2, 2], 99);
        let got = correlation(&psi, &pauli_y(), 1, &pauli_x(), 2).unwrap();
        let mut expect = 0.0;
        let a = psi.amps();
        // <psi| Y_2 X_3 |psi>: Y|0>=i|1>, Y|1>=-i|0>; X flips bit 3.
        for i in 0..8 {
            let (b1, b2, b3) = (i >> 2 & 1, i >> 1 & 1, i & 1);
            let j = (b1 << 2) | ((1 - b2) << 1) | (1 - b3);
            let phase = if b2 == 0 {
                num_complex::Complex::new(0.0, 1.0)
            } else {
                num_complex::Complex::new(0.0, -1.0)
            };
            expect += (a[j].conj() * phase * a[i]).re;
        }
        assert!((got - expect).abs() < 1e-12, "{got} vs {expect}");
    }

    #[test]
    fn scenario_rejects_mismatched_interaction_dimension() {
        let pair = ObservablePair::new(pauli_z(), pauli_x()).unwrap();
        let source = build_nonfactorable(&pair, &CMatrix::identity(2)).unwrap();
        let err = TripartiteScenario::new(
            source,
            StateVector::qubit_plane(0.1),
            CMatrix::identity(8),
            pauli_z(),
        )
        .unwrap_err();
        assert!(matches!(err, BoundsError::DimensionMismatch(4, 8)));
    }
}
