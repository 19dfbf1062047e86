//! Operator-formalism measurement precision and disturbance.
//!
//! A measurement of A on a system is modeled by coupling a meter state
//! through a unitary and reading a meter observable afterwards. Precision
//! and disturbance are root-mean-square operator differences evaluated on
//! the joint system-meter state:
//!
//! * precision:   eps(A)^2 = || (cal_A - A (x) I) |psi>|phi> ||^2 with
//!   cal_A = U^dag (I (x) M) U,
//! * disturbance: eta(B)^2 = || (cal_B - B (x) I) |psi>|phi> ||^2 with
//!   cal_B = U^dag (B (x) I) U.
//!
//! The module also prepares projected ensembles (splitting a bipartite
//! state into weighted branches via a complete basis on particle 2) and
//! checks the weighted-sum identities that tie per-branch errors to
//! tripartite expectations. Particle mapping in tripartite scenarios:
//! system = 1, partner = 2, meter = 3.

use thiserror::Error;

use crate::bounds::TripartiteScenario;
use crate::hilbert::{embed_site, l2_norm, std_dev, CMatrix, Complex64, HilbertError, StateVector};
use crate::mdr::MeasurementContext;
use crate::tol;

/// Errors raised by measurement-model operations.
#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("dimension mismatch: expected {0}, got {1}")]
    DimensionMismatch(usize, usize),
    #[error("projection basis incomplete or non-orthonormal (residual {0:.3e})")]
    IncompleteBasis(f64),
    #[error("weighted-sum identity violated: per-branch route {0:.12e} vs direct route {1:.12e}")]
    IdentityViolation(f64, f64),
    #[error("particle {0} is not a qubit")]
    NotQubit(usize),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

/// Result alias for this module.
pub type Result<T> = std::result::Result<T, MeasureError>;

/// Meter state, coupling unitary, and readout observable.
#[derive(Debug, Clone)]
pub struct MeterModel {
    meter_state: StateVector,
    coupling: CMatrix,
    readout: CMatrix,
    system_dim: usize,
}

impl MeterModel {
    /// Validates the coupling (unitary on system x meter) and readout
    /// (Hermitian on the meter); the system dimension is inferred from the
    /// coupling size.
    pub fn new(meter_state: StateVector, coupling: CMatrix, readout: CMatrix) -> Result<Self> {
        coupling.require_unitary()?;
        readout.require_hermitian()?;
        let meter_dim = meter_state.total_dim();
        if readout.rows() != meter_dim {
            return Err(MeasureError::DimensionMismatch(meter_dim, readout.rows()));
        }
        if coupling.rows() % meter_dim != 0 {
            return Err(MeasureError::DimensionMismatch(coupling.rows(), meter_dim));
        }
        let system_dim = coupling.rows() / meter_dim;
        Ok(MeterModel { meter_state, coupling, readout, system_dim })
    }

    /// The meter state |phi>.
    pub fn meter_state(&self) -> &StateVector {
        &self.meter_state
    }

    /// The coupling unitary on system x meter.
    pub fn coupling(&self) -> &CMatrix {
        &self.coupling
    }

    /// The readout observable on the meter.
    pub fn readout(&self) -> &CMatrix {
        &self.readout
    }

    /// System dimension the coupling expects.
    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    /// Meter dimension.
    pub fn meter_dim(&self) -> usize {
        self.meter_state.total_dim()
    }

    /// The measured observable cal_A = U^dag (I (x) M) U on system x meter.
    pub fn measured_observable(&self) -> CMatrix {
        let lifted = CMatrix::identity(self.system_dim).kron(&self.readout);
        self.coupling.dagger().mul(&lifted).mul(&self.coupling)
    }

    /// The post-interaction image cal_B = U^dag (B (x) I) U of a system
    /// observable.
    pub fn disturbed_observable(&self, b: &CMatrix) -> CMatrix {
        let lifted = b.kron(&CMatrix::identity(self.meter_dim()));
        self.coupling.dagger().mul(&lifted).mul(&self.coupling)
    }
}

fn joint_state(system: &StateVector, meter: &MeterModel) -> Result<StateVector> {
    if system.total_dim() != meter.system_dim() {
        return Err(MeasureError::DimensionMismatch(meter.system_dim(), system.total_dim()));
    }
    Ok(system.tensor(meter.meter_state()))
}

/// Mean-square deviation of the measured observable from the ideal one.
pub fn precision_sq(system: &StateVector, a: &CMatrix, meter: &MeterModel) -> Result<f64> {
    if a.rows() != meter.system_dim() {
        return Err(MeasureError::DimensionMismatch(meter.system_dim(), a.rows()));
    }
    let phi = joint_state(system, meter)?;
    let diff = meter
        .measured_observable()
        .sub(&a.kron(&CMatrix::identity(meter.meter_dim())));
    let image = diff.mul_vec(phi.amps());
    Ok(l2_norm(&image).powi(2))
}

/// Mean-square deviation of the post-interaction observable from B.
pub fn disturbance_sq(system: &StateVector, b: &CMatrix, meter: &MeterModel) -> Result<f64> {
    if b.rows() != meter.system_dim() {
        return Err(MeasureError::DimensionMismatch(meter.system_dim(), b.rows()));
    }
    let phi = joint_state(system, meter)?;
    let diff = meter
        .disturbed_observable(b)
        .sub(&b.kron(&CMatrix::identity(meter.meter_dim())));
    let image = diff.mul_vec(phi.amps());
    Ok(l2_norm(&image).powi(2))
}

/// Standard deviations of the measured and post-interaction observables on
/// the joint state; the raw Hall/Weston inequality inputs.
pub fn measured_std_devs(
    system: &StateVector,
    b: &CMatrix,
    meter: &MeterModel,
) -> Result<MeasurementContext> {
    let phi = joint_state(system, meter)?;
    let delta_ma = std_dev(&phi, &meter.measured_observable())?;
    let delta_mb = std_dev(&phi, &meter.disturbed_observable(b))?;
    Ok(MeasurementContext { delta_ma, delta_mb })
}

/// A complete orthonormal basis on one tensor factor.
#[derive(Debug, Clone)]
pub struct ProjectionBasis {
    vectors: Vec<StateVector>,
}

impl ProjectionBasis {
    /// Validates completeness (count == dimension) and orthonormality.
    pub fn new(vectors: Vec<StateVector>) -> Result<Self> {
        let dim = vectors
            .first()
            .map(|v| v.total_dim())
            .ok_or(MeasureError::IncompleteBasis(1.0))?;
        if vectors.len() != dim {
            return Err(MeasureError::IncompleteBasis(
                (dim as f64 - vectors.len() as f64).abs(),
            ));
        }
        let mut worst: f64 = 0.0;
        for (i, vi) in vectors.iter().enumerate() {
            for (j, vj) in vectors.iter().enumerate() {
                let overlap = vi.inner(vj);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((overlap - Complex64::new(target, 0.0)).norm());
            }
        }
        if worst > tol::ALGEBRAIC_TOL {
            return Err(MeasureError::IncompleteBasis(worst));
        }
        Ok(ProjectionBasis { vectors })
    }

    /// Basis from the columns of a unitary matrix.
    pub fn from_columns(m: &CMatrix) -> Result<Self> {
        m.require_unitary()?;
        let n = m.rows();
        let vectors = (0..n)
            .map(|c| {
                let amps: Vec<Complex64> = (0..n).map(|r| m.get(r, c)).collect();
                StateVector::new(vec![n], amps).map_err(MeasureError::from)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProjectionBasis { vectors })
    }

    /// Qubit basis along the Bloch direction (theta, phi):
    /// |n+> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1> and its
    /// orthogonal partner.
    pub fn qubit_bloch(theta: f64, phi: f64) -> Self {
        let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let e = Complex64::new(phi.cos(), phi.sin());
        let plus = StateVector::normalized(
            vec![2],
            vec![Complex64::new(ct, 0.0), e * st],
        )
        .expect("Bloch vector is never the zero vector");
        let minus = StateVector::normalized(
            vec![2],
            vec![Complex64::new(-st, 0.0), e * ct],
        )
        .expect("Bloch vector is never the zero vector");
        ProjectionBasis { vectors: vec![plus, minus] }
    }

    /// The sigma_y eigenbasis (|0> + i|1>)/sqrt2, (|0> - i|1>)/sqrt2.
    pub fn sigma_y() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let p1 = StateVector::new(
            vec![2],
            vec![Complex64::new(r, 0.0), Complex64::new(0.0, r)],
        )
        .expect("normalized by construction");
        let p2 = StateVector::new(
            vec![2],
            vec![Complex64::new(r, 0.0), Complex64::new(0.0, -r)],
        )
        .expect("normalized by construction");
        ProjectionBasis { vectors: vec![p1, p2] }
    }

    /// Basis vectors.
    pub fn vectors(&self) -> &[StateVector] {
        &self.vectors
    }

    /// Dimension of the projected factor.
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

/// One projected branch: a weight and, unless the weight is negligible,
/// the normalized branch state.
#[derive(Debug, Clone)]
pub struct Branch {
    pub weight: f64,
    pub state: Option<StateVector>,
}

/// The weighted branch ensemble from projecting particle 2.
#[derive(Debug, Clone)]
pub struct ProjectedEnsemble {
    entries: Vec<Branch>,
}

impl ProjectedEnsemble {
    /// All branches, including negligible-weight placeholders.
    pub fn entries(&self) -> &[Branch] {
        &self.entries
    }

    /// Branches that carry weight above the cutoff.
    pub fn active(&self) -> impl Iterator<Item = (f64, &StateVector)> {
        self.entries
            .iter()
            .filter_map(|b| b.state.as_ref().map(|s| (b.weight, s)))
    }
}

/// Projects particle 2 of a bipartite state onto each basis vector,
/// returning normalized branch states and weights |<p_i|psi12>|^2.
pub fn project_particle2(
    psi12: &StateVector,
    basis: &ProjectionBasis,
) -> Result<ProjectedEnsemble> {
    let dims = psi12.dims();
    if dims.len() != 2 {
        return Err(MeasureError::DimensionMismatch(2, dims.len()));
    }
    let (n1, n2) = (dims[0], dims[1]);
    if basis.dim() != n2 {
        return Err(MeasureError::DimensionMismatch(n2, basis.dim()));
    }
    let mut entries = Vec::with_capacity(n2);
    let mut weight_sum = 0.0;
    for p in basis.vectors() {
        let mut branch = vec![Complex64::new(0.0, 0.0); n1];
        for (a, slot) in branch.iter_mut().enumerate() {
            for b in 0..n2 {
                *slot += p.amps()[b].conj() * psi12.amps()[a * n2 + b];
            }
        }
        let weight = branch.iter().map(|z| z.norm_sqr()).sum::<f64>();
        weight_sum += weight;
        let state = if weight < tol::WEIGHT_CUTOFF {
            None
        } else {
            Some(StateVector::normalized(vec![n1], branch)?)
        };
        entries.push(Branch { weight, state });
    }
    if (weight_sum - 1.0).abs() > tol::ALGEBRAIC_TOL {
        return Err(MeasureError::IncompleteBasis((weight_sum - 1.0).abs()));
    }
    Ok(ProjectedEnsemble { entries })
}

/// CNOT between two qubit sites of a multi-particle space, as a full
/// matrix in the product basis (particle 1 = most significant index).
pub fn cnot(control: usize, target: usize, dims: &[usize]) -> Result<CMatrix> {
    assert!(control != target, "control and target must differ");
    assert!(control < dims.len() && target < dims.len(), "site out of range");
    for site in [control, target] {
        if dims[site] != 2 {
            return Err(MeasureError::NotQubit(site));
        }
    }
    let total: usize = dims.iter().product();
    let mut m = CMatrix::zeros(total, total);
    for col in 0..total {
        // Decompose into mixed-radix digits, most significant first.
        let mut digits = vec![0usize; dims.len()];
        let mut rest = col;
        for (slot, &d) in digits.iter_mut().zip(dims).rev() {
            *slot = rest % d;
            rest /= d;
        }
        if digits[control] == 1 {
            digits[target] ^= 1;
        }
        let mut row = 0usize;
        for (digit, &d) in digits.iter().zip(dims) {
            row = row * d + digit;
        }
        m.set(row, col, Complex64::new(1.0, 0.0));
    }
    Ok(m)
}

/// Both routes to the weighted error sums, before any cross-check.
#[derive(Debug, Clone, Copy)]
pub struct ErrorSumRoutes {
    /// sum_i w_i eps_i^2 over projected branches.
    pub eps_sq_branches: f64,
    /// sum_i w_i eta_i^2 over projected branches.
    pub eta_sq_branches: f64,
    /// ||(A3 - A'2) psi123||^2 evaluated on the tripartite state.
    pub eps_sq_direct: f64,
    /// ||(B1 - B'2) psi123||^2 evaluated on the tripartite state.
    pub eta_sq_direct: f64,
}

impl ErrorSumRoutes {
    /// Largest disagreement between the two routes.
    pub fn max_residual(&self) -> f64 {
        let de = (self.eps_sq_branches - self.eps_sq_direct).abs();
        let dn = (self.eta_sq_branches - self.eta_sq_direct).abs();
        de.max(dn)
    }
}

/// Weighted per-branch error sums, computed two ways:
/// (a) projecting particle 2 and running the meter model on each branch,
/// (b) directly as ||(A3 - A'2)psi123||^2 and ||(B1 - B'2)psi123||^2.
/// Returns both routes without judging their agreement, so validation
/// suites can report the residual.
pub fn weighted_error_routes(
    scenario: &TripartiteScenario,
    basis: &ProjectionBasis,
) -> Result<ErrorSumRoutes> {
    let source = scenario.source();
    let pair = source.pair();
    let ensemble = project_particle2(source.psi12(), basis)?;
    let meter = scenario.meter_model();

    let mut eps_sq_branches = 0.0;
    let mut eta_sq_branches = 0.0;
    for (weight, state) in ensemble.active() {
        eps_sq_branches += weight * precision_sq(state, pair.a().matrix(), &meter)?;
        eta_sq_branches += weight * disturbance_sq(state, pair.b().matrix(), &meter)?;
    }

    let psi123 = scenario.psi123();
    let dims = psi123.dims();
    let a3 = embed_site(scenario.readout(), 2, dims);
    let a2p = embed_site(source.a_prime(), 1, dims);
    let b1 = embed_site(pair.b().matrix(), 0, dims);
    let b2p = embed_site(source.b_prime(), 1, dims);
    let eps_sq_direct = l2_norm(&a3.sub(&a2p).mul_vec(psi123.amps())).powi(2);
    let eta_sq_direct = l2_norm(&b1.sub(&b2p).mul_vec(psi123.amps())).powi(2);

    Ok(ErrorSumRoutes {
        eps_sq_branches,
        eta_sq_branches,
        eps_sq_direct,
        eta_sq_direct,
    })
}

/// Weighted per-branch error sums with the two routes cross-checked.
/// Returns the direct-route pair after asserting agreement within 1e-9.
pub fn weighted_error_sums(
    scenario: &TripartiteScenario,
    basis: &ProjectionBasis,
) -> Result<(f64, f64)> {
    let routes = weighted_error_routes(scenario, basis)?;
    if (routes.eps_sq_branches - routes.eps_sq_direct).abs() > tol::ROUTE_AGREEMENT_TOL {
        return Err(MeasureError::IdentityViolation(
            routes.eps_sq_branches,
            routes.eps_sq_direct,
        ));
    }
    if (routes.eta_sq_branches - routes.eta_sq_direct).abs() > tol::ROUTE_AGREEMENT_TOL {
        return Err(MeasureError::IdentityViolation(
            routes.eta_sq_branches,
            routes.eta_sq_direct,
        ));
    }
    Ok((routes.eps_sq_direct, routes.eta_sq_direct))
}
