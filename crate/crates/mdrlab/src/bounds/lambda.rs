//! The correlation bound under an invertible filter on particle 2.
//!
//! Filtering deforms the tripartite state to |psi~123> = H2 |psi123>/sqrt(N)
//! with H = Lambda† Lambda and N = ||H2 psi123||^2, and the branch search to
//! gamma~ = ||Lambda2 psi12||^2 * gamma(normalized Lambda2 psi12). The
//! filtered correlation sum is then capped by half the filtered second
//! moments minus gamma~^2 / (2 gamma N), which collapses back to the
//! unfiltered bound whenever Lambda† Lambda is a multiple of the identity.

use nalgebra::DMatrix;

use super::{
    correlation, gamma_q, BoundsError, GammaResult, Result, SearchBudget, TripartiteScenario,
};
use crate::hilbert::{embed_site, expectation, l2_norm, CMatrix, StateVector};
use crate::mdr::MdrId;
use crate::tol;

/// Both sides of the filtered correlation bound, with the quantities that
/// entered it.
#[derive(Debug, Clone)]
pub struct LambdaReport {
    mdr: MdrId,
    lhs: f64,
    rhs: f64,
    gamma_tilde: f64,
    gamma_base: f64,
    norm: f64,
    condition: f64,
}

impl LambdaReport {
    /// The relation whose distance function entered the bound.
    pub fn mdr(&self) -> MdrId {
        self.mdr
    }

    /// The filtered bipartite correlation sum.
    pub fn lhs(&self) -> f64 {
        self.lhs
    }

    /// The filtered bound value.
    pub fn rhs(&self) -> f64 {
        self.rhs
    }

    /// rhs - lhs; negative means the filtered bound is violated.
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }

    /// The filtered branch-search value gamma~.
    pub fn gamma_tilde(&self) -> f64 {
        self.gamma_tilde
    }

    /// The unfiltered gamma entering the denominator.
    pub fn gamma_base(&self) -> f64 {
        self.gamma_base
    }

    /// The filter normalization N = ||H2 psi123||^2.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Singular-value condition number of the filter.
    pub fn condition(&self) -> f64 {
        self.condition
    }
}

/// Evaluates the filtered correlation bound for one relation.
///
/// `gamma_base` lets sweeps reuse one unfiltered search across many
/// filters; when absent it is computed here at the given budget.
pub fn lambda_generalized_check(
    scenario: &TripartiteScenario,
    lambda: &CMatrix,
    mdr: MdrId,
    budget: &SearchBudget,
    gamma_base: Option<&GammaResult>,
) -> Result<LambdaReport> {
    let source = scenario.source();
    let pair = source.pair();
    let n = pair.dim();
    if lambda.rows() != n || lambda.cols() != n {
        return Err(BoundsError::DimensionMismatch(n, lambda.rows()));
    }
    let condition = condition_number(lambda);
    if !condition.is_finite() || condition >= tol::MAX_CONDITION {
        return Err(BoundsError::Singular(condition));
    }

    let owned;
    let base = match gamma_base {
        Some(g) => g,
        None => {
            owned = gamma_q(mdr, source.psi12(), pair, budget)?;
            &owned
        }
    };
    assert!(base.value() > 0.0, "the filtered bound needs a positive unfiltered gamma");

    // Filtered tripartite state.
    let h = lambda.dagger().mul(lambda);
    let psi123 = scenario.psi123();
    let dims123 = psi123.dims().to_vec();
    let filtered = embed_site(&h, 1, &dims123).mul_vec(psi123.amps());
    let norm = l2_norm(&filtered).powi(2);
    let psi_tilde = StateVector::normalized(dims123.clone(), filtered)?;

    // Filtered branch search: weights come from the unnormalized filtered
    // pair state, so the normalized search value is rescaled by its norm.
    let psi12 = source.psi12();
    let filtered_pair = embed_site(lambda, 1, psi12.dims()).mul_vec(psi12.amps());
    let pair_norm_sq = l2_norm(&filtered_pair).powi(2);
    let filtered_pair_state = StateVector::normalized(psi12.dims().to_vec(), filtered_pair)?;
    let gamma_tilde = pair_norm_sq * gamma_q(mdr, &filtered_pair_state, pair, budget)?.value();

    let lhs = correlation(&psi_tilde, source.a_prime(), 1, scenario.readout(), 2)?
        + correlation(&psi_tilde, source.b_prime(), 1, pair.b().matrix(), 0)?;

    let sq = |m: &CMatrix| m.mul(m);
    let moments = expectation(&psi_tilde, &embed_site(&sq(source.a_prime()), 1, &dims123))?
        + expectation(&psi_tilde, &embed_site(&sq(scenario.readout()), 2, &dims123))?
        + expectation(&psi_tilde, &embed_site(&sq(source.b_prime()), 1, &dims123))?
        + expectation(&psi_tilde, &embed_site(&sq(pair.b().matrix()), 0, &dims123))?;

    let rhs = 0.5 * (moments - gamma_tilde * gamma_tilde / (base.value() * norm));
    Ok(LambdaReport {
        mdr,
        lhs,
        rhs,
        gamma_tilde,
        gamma_base: base.value(),
        norm,
        condition,
    })
}

/// Ratio of extreme singular values; infinite when the smallest vanishes.
fn condition_number(m: &CMatrix) -> f64 {
    let dm = DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j));
    let svd = dm.svd(false, false);
    let mut smax = 0.0f64;
    let mut smin = f64::INFINITY;
    for s in svd.singular_values.iter() {
        smax = smax.max(*s);
        smin = smin.min(*s);
    }
    if smin <= 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::theorem_bound;
    use crate::hilbert::Complex64;

    fn scenario() -> TripartiteScenario {
        TripartiteScenario::qubit_cnot(std::f64::consts::FRAC_PI_8).unwrap()
    }

    fn matrix2(entries: [[Complex64; 2]; 2]) -> CMatrix {
        let mut m = CMatrix::zeros(2, 2);
        for (i, row) in entries.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                m.set(i, j, *z);
            }
        }
        m
    }

    #[test]
    fn unitary_filter_reduces_to_the_plain_bound() {
        let s = scenario();
        let budget = SearchBudget::reduced();
        let angle = 0.35f64;
        let rot = matrix2([
            [Complex64::new(angle.cos(), 0.0), Complex64::new(-angle.sin(), 0.0)],
            [Complex64::new(angle.sin(), 0.0), Complex64::new(angle.cos(), 0.0)],
        ]);
        let filtered = lambda_generalized_check(&s, &rot, MdrId::He, &budget, None).unwrap();
        let plain = theorem_bound(&s, MdrId::He, &budget).unwrap();
        assert!((filtered.norm() - 1.0).abs() < 1e-12, "N = {}", filtered.norm());
        assert!((filtered.lhs() - plain.lhs()).abs() < 1e-12);
        assert!(
            (filtered.rhs() - plain.rhs()).abs() < 1e-8,
            "{} vs {}",
            filtered.rhs(),
            plain.rhs()
        );
    }

    #[test]
    fn scalar_filter_cancels_exactly() {
        // Lambda = 2I: the scaling drops out of gamma~^2 / (gamma N).
        let s = scenario();
        let budget = SearchBudget::reduced();
        let two = CMatrix::identity(2).scale(Complex64::new(2.0, 0.0));
        let filtered = lambda_generalized_check(&s, &two, MdrId::B1, &budget, None).unwrap();
        let plain = theorem_bound(&s, MdrId::B1, &budget).unwrap();
        assert!((filtered.norm() - 16.0).abs() < 1e-10, "N = {}", filtered.norm());
        assert!((filtered.gamma_tilde() - 4.0 * plain.gamma().value()).abs() < 1e-9);
        assert!((filtered.rhs() - plain.rhs()).abs() < 1e-9);
        assert!((filtered.lhs() - plain.lhs()).abs() < 1e-12);
    }

    #[test]
    fn genuinely_filtered_states_keep_the_margin_for_a_valid_relation() {
        let s = scenario();
        let budget = SearchBudget::reduced();
        let skew = matrix2([
            [Complex64::new(1.2, 0.0), Complex64::new(0.3, -0.4)],
            [Complex64::new(-0.1, 0.2), Complex64::new(0.8, 0.0)],
        ]);
        for mdr in [MdrId::Oz, MdrId::B1] {
            let report = lambda_generalized_check(&s, &skew, mdr, &budget, None).unwrap();
            assert!(
                report.margin() >= -1e-8,
                "{mdr}: filtered margin {}",
                report.margin()
            );
            // The filter genuinely moved the state.
            assert!((report.norm() - 1.0).abs() > 1e-3, "filter acted trivially");
        }
    }

    #[test]
    fn near_singular_filters_are_rejected() {
        let s = scenario();
        let skew = matrix2([
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1e-9, 0.0)],
        ]);
        let err = lambda_generalized_check(
            &s,
            &skew,
            MdrId::B1,
            &SearchBudget::reduced(),
            None,
        )
        .unwrap_err();
        assert!(matches!(err, BoundsError::Singular(c) if c > 1e8));
    }

    #[test]
    fn filter_dimension_must_match_particle_two() {
        let s = scenario();
        let err = lambda_generalized_check(
            &s,
            &CMatrix::identity(3),
            MdrId::B1,
            &SearchBudget::reduced(),
            None,
        )
        .unwrap_err();
        assert!(matches!(err, BoundsError::DimensionMismatch(2, 3)));
    }
}
