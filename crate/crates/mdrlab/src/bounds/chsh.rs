//! CHSH assembly on the tripartite state: a Bell operator on particles 2-3
//! whose settings also serve particles 1-2, the quantum value of the pair,
//! and the cap each relation's gamma places on that value.

use std::f64::consts::SQRT_2;

use super::{BoundsError, Result, TripartiteScenario};
use crate::hilbert::{
    embed_site, expectation, pauli_x, pauli_y, pauli_z, CMatrix, Complex64, StateVector,
};
use crate::mdr::{kappa, MdrId};
use crate::tol;

/// Four measurement directions as Bloch (x, y, z) triples: a and b on the
/// near particle, c and d on the far one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    a: [f64; 3],
    b: [f64; 3],
    c: [f64; 3],
    d: [f64; 3],
}

impl Default for ChshSettings {
    /// The standard maximal-violation geometry: a along z, b along x, and
    /// c, d along the diagonals (x +- z)/sqrt(2).
    fn default() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        ChshSettings {
            a: [0.0, 0.0, 1.0],
            b: [1.0, 0.0, 0.0],
            c: [r, 0.0, r],
            d: [r, 0.0, -r],
        }
    }
}

impl ChshSettings {
    /// Validates that every direction is a unit vector.
    pub fn new(a: [f64; 3], b: [f64; 3], c: [f64; 3], d: [f64; 3]) -> Result<Self> {
        for n in [a, b, c, d] {
            let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            if (norm - 1.0).abs() > tol::ALGEBRAIC_TOL {
                return Err(BoundsError::InvalidDirection(norm));
            }
        }
        Ok(ChshSettings { a, b, c, d })
    }
}

/// The +-1-valued qubit observable along a Bloch direction.
pub fn direction_observable(n: [f64; 3]) -> CMatrix {
    pauli_x()
        .scale(Complex64::new(n[0], 0.0))
        .add(&pauli_y().scale(Complex64::new(n[1], 0.0)))
        .add(&pauli_z().scale(Complex64::new(n[2], 0.0)))
}

/// The two Bell operators, precomputed on the three-qubit space:
/// B23 = a2(c3 - d3) + b2(c3 + d3) and B12 = b1(c2 + d2) + a1(c2 - d2).
#[derive(Debug, Clone)]
pub struct ChshOperators {
    b23: CMatrix,
    b12: CMatrix,
}

impl ChshOperators {
    pub fn new(settings: &ChshSettings) -> Self {
        let dims = [2usize, 2, 2];
        let prod = |x: &CMatrix, sx: usize, y: &CMatrix, sy: usize| {
            embed_site(x, sx, &dims).mul(&embed_site(y, sy, &dims))
        };
        let a = direction_observable(settings.a);
        let b = direction_observable(settings.b);
        let c = direction_observable(settings.c);
        let d = direction_observable(settings.d);
        let b23 = prod(&a, 1, &c, 2)
            .sub(&prod(&a, 1, &d, 2))
            .add(&prod(&b, 1, &c, 2))
            .add(&prod(&b, 1, &d, 2));
        let b12 = prod(&b, 0, &c, 1)
            .add(&prod(&b, 0, &d, 1))
            .add(&prod(&a, 0, &c, 1))
            .sub(&prod(&a, 0, &d, 1));
        ChshOperators { b23, b12 }
    }

    /// The Bell operator on particles 2 and 3.
    pub fn b23(&self) -> &CMatrix {
        &self.b23
    }

    /// The Bell operator on particles 1 and 2.
    pub fn b12(&self) -> &CMatrix {
        &self.b12
    }

    /// (<B23>, <B12>) on a three-qubit state.
    pub fn pair_values(&self, psi: &StateVector) -> Result<(f64, f64)> {
        Ok((expectation(psi, &self.b23)?, expectation(psi, &self.b12)?))
    }
}

/// <B23> + <B12> on the scenario's tripartite state.
pub fn chsh_pair_sum(scenario: &TripartiteScenario, settings: &ChshSettings) -> Result<f64> {
    scenario.require_qubits()?;
    let (v23, v12) = ChshOperators::new(settings).pair_values(scenario.psi123())?;
    Ok(v23 + v12)
}

/// The cap sqrt(2) * (4 - gamma) that a relation's gamma places on the
/// CHSH pair sum.
pub fn chsh_bound(gamma: f64) -> f64 {
    SQRT_2 * (4.0 - gamma)
}

/// The cap evaluated at the relation's maximally-entangled-qubit gamma.
pub fn chsh_bound_kappa(mdr: MdrId) -> f64 {
    chsh_bound(kappa(mdr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{embed_pair, random_state};
    use std::f64::consts::{FRAC_PI_8, PI};

    #[test]
    fn bell_operators_collapse_to_pauli_pair_sums() {
        // With the default diagonal settings, c - d = sqrt(2) z and
        // c + d = sqrt(2) x, so B23 = sqrt(2)(Z2 Z3 + X2 X3) and
        // B12 = sqrt(2)(X1 X2 + Z1 Z2).
        let ops = ChshOperators::new(&ChshSettings::default());
        let dims = [2usize, 2, 2];
        let zz = embed_pair(&pauli_z().kron(&pauli_z()), 1, 2, &dims);
        let xx = embed_pair(&pauli_x().kron(&pauli_x()), 1, 2, &dims);
        let expect23 = zz.add(&xx).scale(Complex64::new(SQRT_2, 0.0));
        assert!(ops.b23().max_abs_diff(&expect23) < 1e-12);

        let xx12 = embed_pair(&pauli_x().kron(&pauli_x()), 0, 1, &dims);
        let zz12 = embed_pair(&pauli_z().kron(&pauli_z()), 0, 1, &dims);
        let expect12 = xx12.add(&zz12).scale(Complex64::new(SQRT_2, 0.0));
        assert!(ops.b12().max_abs_diff(&expect12) < 1e-12);
    }

    #[test]
    fn scenario_pair_sum_follows_its_closed_form() {
        // On the CNOT scenario, E(Z2,Z3) = cos(2t), E(X2,X3) = 0,
        // E(X1,X2) = sin(2t), E(Z1,Z2) = 1, so the pair sum is
        // sqrt(2) (1 + cos(2t) + sin(2t)).
        let settings = ChshSettings::default();
        for k in 0..16 {
            let theta3 = 2.0 * PI * k as f64 / 16.0;
            let scenario = TripartiteScenario::qubit_cnot(theta3).unwrap();
            let got = chsh_pair_sum(&scenario, &settings).unwrap();
            let expect = SQRT_2 * (1.0 + (2.0 * theta3).cos() + (2.0 * theta3).sin());
            assert!((got - expect).abs() < 1e-10, "theta3 = {theta3}: {got} vs {expect}");
        }
    }

    #[test]
    fn pair_sum_peaks_at_two_plus_sqrt_two() {
        let scenario = TripartiteScenario::qubit_cnot(FRAC_PI_8).unwrap();
        let got = chsh_pair_sum(&scenario, &ChshSettings::default()).unwrap();
        assert!((got - (2.0 + SQRT_2)).abs() < 1e-10, "{got}");
    }

    #[test]
    fn kappa_caps_take_their_closed_forms() {
        let cases = [
            (MdrId::He, 2.0 * SQRT_2),
            (MdrId::B2, 4.0),
            (MdrId::B1, 3.0 * SQRT_2),
            (MdrId::Ha, 18.0 * SQRT_2 / 5.0),
            (MdrId::Oz, 8.0 - 2.0 * SQRT_2),
            (MdrId::We, 3.41 * SQRT_2),
        ];
        for (mdr, expect) in cases {
            assert!(
                (chsh_bound_kappa(mdr) - expect).abs() < 1e-12,
                "{mdr}: {} vs {expect}",
                chsh_bound_kappa(mdr)
            );
        }
    }

    #[test]
    fn squared_pair_values_never_exceed_eight() {
        // The two Bell operators share particle 2; their expectation
        // values trade off so that the squares sum to at most 8.
        let ops = ChshOperators::new(&ChshSettings::default());
        let mut worst = 0.0f64;
        for seed in 0..200 {
            let psi = random_state(&[2, 2, 2], 7000 + seed);
            let (v23, v12) = ops.pair_values(&psi).unwrap();
            worst = worst.max(v23 * v23 + v12 * v12);
        }
        assert!(worst <= 8.0 + 1e-9, "monogamy broke: {worst}");
        assert!(worst > 4.0, "sweep never got close, suspicious: {worst}");
    }

    #[test]
    fn directions_must_be_unit_vectors() {
        let err = ChshSettings::new(
            [0.0, 0.0, 2.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [1.0, 0.0, 0.0],
        )
        .unwrap_err();
        assert!(matches!(err, BoundsError::InvalidDirection(n) if (n - 2.0).abs() < 1e-12));
    }
}
