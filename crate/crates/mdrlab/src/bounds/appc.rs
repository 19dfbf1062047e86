//! Brute-force maximization of E(Z2, Z3) + E(X1, X2) over all three-qubit
//! states, cross-checked against the two-parameter reduced form
//! cos(2 theta) + sin(2 theta) cos(phi) whose maximum is sqrt(2).
//!
//! The raw search runs power iteration on O + 2I, where
//! O = Z2 Z3 + X1 X2 squares to 2I (its factors anticommute site by site),
//! so the Rayleigh quotient of O ascends monotonically toward the top
//! eigenvalue sqrt(2).

use std::f64::consts::PI;

use super::{BoundsError, Result};
use crate::hilbert::{
    embed_pair, expectation, l2_norm, pauli_x, pauli_z, CMatrix, Complex64, StateVector,
};
use crate::optimize::nelder_mead_max;

/// Iterations per restart; the shifted operator's eigenvalue ratio is
/// (2 - sqrt(2)) / (2 + sqrt(2)), so forty steps converge far below any
/// tolerance used here.
const POWER_ITERS: usize = 40;

/// Outcome of the raw-state correlation search.
#[derive(Debug, Clone)]
pub struct MaxCorrReport {
    best: f64,
    argmax: StateVector,
    restart_values: Vec<f64>,
    reduced_form: f64,
}

impl MaxCorrReport {
    /// The largest correlation sum found.
    pub fn best(&self) -> f64 {
        self.best
    }

    /// The state attaining it.
    pub fn argmax(&self) -> &StateVector {
        &self.argmax
    }

    /// The converged value of each restart.
    pub fn restart_values(&self) -> &[f64] {
        &self.restart_values
    }

    /// The independently maximized reduced form.
    pub fn reduced_form(&self) -> f64 {
        self.reduced_form
    }
}

/// The correlation operator Z2 Z3 + X1 X2 on three qubits.
pub fn correlation_operator() -> CMatrix {
    let dims = [2usize, 2, 2];
    let zz = embed_pair(&pauli_z().kron(&pauli_z()), 1, 2, &dims);
    let xx = embed_pair(&pauli_x().kron(&pauli_x()), 0, 1, &dims);
    zz.add(&xx)
}

/// The reduced two-parameter correlation sum.
pub fn reduced_form(theta: f64, phi: f64) -> f64 {
    (2.0 * theta).cos() + (2.0 * theta).sin() * phi.cos()
}

/// Maximizes the reduced form by a cell-centered grid of the given
/// resolution per angle followed by a simplex polish.
pub fn reduced_form_max(samples: usize) -> f64 {
    let cells = samples.max(2);
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..cells {
        let theta = (i as f64 + 0.5) * PI / cells as f64;
        for j in 0..cells {
            let phi = (j as f64 + 0.5) * 2.0 * PI / cells as f64;
            let v = reduced_form(theta, phi);
            if v > best.0 {
                best = (v, theta, phi);
            }
        }
    }
    let objective = |x: &[f64]| reduced_form(x[0], x[1]);
    let (_, value) =
        nelder_mead_max(&objective, &[best.1, best.2], PI / cells as f64, 300, 1e-14);
    value.max(best.0)
}

/// Random-restart ascent of E(Z2, Z3) + E(X1, X2) over raw three-qubit
/// states, cross-checked against the reduced-form maximum within 1e-6.
pub fn max_corr_search(restarts: usize, seed: u64) -> Result<MaxCorrReport> {
    assert!(restarts >= 1, "the search needs at least one restart");
    let op = correlation_operator();
    let shifted = op.add(&CMatrix::identity(8).scale(Complex64::new(2.0, 0.0)));

    let mut best = f64::NEG_INFINITY;
    let mut argmax: Option<StateVector> = None;
    let mut restart_values = Vec::with_capacity(restarts);
    for k in 0..restarts {
        let start = crate::hilbert::random_state(&[2, 2, 2], seed.wrapping_add(k as u64));
        let mut amps = start.amps().to_vec();
        for _ in 0..POWER_ITERS {
            let next = shifted.mul_vec(&amps);
            let norm = l2_norm(&next);
            amps = next.into_iter().map(|z| z / norm).collect();
        }
        let state = StateVector::normalized(vec![2, 2, 2], amps)?;
        let value = expectation(&state, &op)?;
        restart_values.push(value);
        if value > best {
            best = value;
            argmax = Some(state);
        }
    }

    let reduced = reduced_form_max(96);
    if (best - reduced).abs() > 1e-6 {
        return Err(BoundsError::SearchMismatch(best, reduced));
    }
    Ok(MaxCorrReport {
        best,
        argmax: argmax.expect("at least one restart ran"),
        restart_values,
        reduced_form: reduced,
    })
}
