//! The correlation bound a relation imposes on the tripartite state: the
//! bipartite sum E(A'_2, A_3) + E(B'_2, B_1) cannot exceed half the total
//! second moment minus half of gamma_q.

use super::{
    correlation, gamma_q, BoundsError, GammaResult, Result, SearchBudget, TripartiteScenario,
};
use crate::hilbert::{embed_site, expectation, CMatrix};
use crate::mdr::MdrId;
use crate::tol;

/// Both sides of the correlation bound for one relation.
#[derive(Debug, Clone)]
pub struct BoundReport {
    mdr: MdrId,
    lhs: f64,
    rhs: f64,
    gamma: GammaResult,
}

impl BoundReport {
    /// The relation whose distance function entered the bound.
    pub fn mdr(&self) -> MdrId {
        self.mdr
    }

    /// The bipartite correlation sum.
    pub fn lhs(&self) -> f64 {
        self.lhs
    }

    /// The bound value.
    pub fn rhs(&self) -> f64 {
        self.rhs
    }

    /// rhs - lhs; negative means the bound is violated.
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }

    /// The basis search behind the bound.
    pub fn gamma(&self) -> &GammaResult {
        &self.gamma
    }
}

/// The bipartite correlation sum E(A'_2, A_3) + E(B'_2, B_1) of a scenario.
pub fn correlation_sum(scenario: &TripartiteScenario) -> Result<f64> {
    let source = scenario.source();
    let psi123 = scenario.psi123();
    Ok(correlation(psi123, source.a_prime(), 1, scenario.readout(), 2)?
        + correlation(psi123, source.b_prime(), 1, source.pair().b().matrix(), 0)?)
}

/// Evaluates the correlation bound of one relation on a scenario.
pub fn theorem_bound(
    scenario: &TripartiteScenario,
    mdr: MdrId,
    budget: &SearchBudget,
) -> Result<BoundReport> {
    let source = scenario.source();
    let pair = source.pair();
    let psi123 = scenario.psi123();
    let dims = psi123.dims();

    let lhs = correlation_sum(scenario)?;

    let sq = |m: &CMatrix| m.mul(m);
    let moments = expectation(psi123, &embed_site(&sq(source.a_prime()), 1, dims))?
        + expectation(psi123, &embed_site(&sq(scenario.readout()), 2, dims))?
        + expectation(psi123, &embed_site(&sq(source.b_prime()), 1, dims))?
        + expectation(psi123, &embed_site(&sq(pair.b().matrix()), 0, dims))?;

    let gamma = gamma_q(mdr, source.psi12(), pair, budget)?;
    let rhs = 0.5 * (moments - gamma.value());
    Ok(BoundReport { mdr, lhs, rhs, gamma })
}

/// The correlation sum of the three-qubit CNOT scenario at meter angle
/// theta3, cross-checked against its closed form cos(2 theta3) +
/// sin(2 theta3) before being returned.
pub fn qm_correlation_sum(theta3: f64) -> Result<f64> {
    let scenario = TripartiteScenario::qubit_cnot(theta3)?;
    let lhs = correlation_sum(&scenario)?;
    let closed = (2.0 * theta3).cos() + (2.0 * theta3).sin();
    if (lhs - closed).abs() > tol::ALGEBRAIC_TOL {
        return Err(BoundsError::IdentityViolation(lhs, closed));
    }
    Ok(lhs)
}
