//! Randomized property suites behind the `verify` subcommand.
//!
//! Each suite stresses one identity or bound that the rest of the crate
//! relies on, over deterministic seeded draws, and reports pass/fail with
//! its worst residual:
//!
//! * `prop1`: operator-transfer and dual-basis identities of the
//!   nonfactorable source states, with an optional negative control that
//!   swaps the matched congruence for `W V W^dag` and must be caught;
//! * `two-route`: agreement of the per-branch and tripartite routes to
//!   the weighted error sums on random scenarios;
//! * `gamma-kappa`: the basis search on the maximally entangled qubit
//!   source against the closed-form catalog constants;
//! * `lambda`: correlation bounds for filtered (non-unitarily evolved)
//!   states, including the scalar-filter cancellation;
//! * `max-corr`: the random-restart correlation-sum search against its
//!   reduced closed form.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::bounds::{
    gamma_q, lambda_generalized_check, max_corr_search, BoundsError, SearchBudget,
    TripartiteScenario,
};
use crate::entangle::{
    build_nonfactorable, build_with_congruence, dual_basis_form, verify_transfer, EntangleError,
    ObservablePair,
};
use crate::hilbert::{
    expectation, pauli_x, pauli_y, pauli_z, random_hermitian, random_state, random_unitary,
    CMatrix, Complex64, HilbertError,
};
use crate::mdr::{kappa, MdrError, MdrId};
use crate::measure::{weighted_error_routes, MeasureError, ProjectionBasis};

/// Residual threshold for exact identities.
const IDENTITY_THRESHOLD: f64 = 1e-9;
/// Residual above which an identity counts as visibly broken.
const BREAK_THRESHOLD: f64 = 1e-3;
/// Worst tolerated negative margin for the filtered-state bounds.
const MARGIN_FLOOR: f64 = -1e-8;

/// Errors raised by the verification suites.
#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown suite label {0:?} (expected prop1, two-route, gamma-kappa, lambda, max-corr)")]
    UnknownSuite(String),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

/// Result alias for this module.
pub type Result<T> = std::result::Result<T, VerifyError>;

impl From<EntangleError> for VerifyError {
    fn from(e: EntangleError) -> Self {
        VerifyError::Bounds(e.into())
    }
}

impl From<MeasureError> for VerifyError {
    fn from(e: MeasureError) -> Self {
        VerifyError::Bounds(e.into())
    }
}

impl From<MdrError> for VerifyError {
    fn from(e: MdrError) -> Self {
        VerifyError::Bounds(e.into())
    }
}

impl From<HilbertError> for VerifyError {
    fn from(e: HilbertError) -> Self {
        VerifyError::Bounds(e.into())
    }
}

/// Identifier of one property suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SuiteId {
    Prop1,
    TwoRoute,
    GammaKappa,
    Lambda,
    MaxCorr,
}

impl SuiteId {
    /// All suites in reporting order.
    pub fn all() -> [SuiteId; 5] {
        [
            SuiteId::Prop1,
            SuiteId::TwoRoute,
            SuiteId::GammaKappa,
            SuiteId::Lambda,
            SuiteId::MaxCorr,
        ]
    }

    /// Short ASCII label, as accepted by `--suite`.
    pub fn label(self) -> &'static str {
        match self {
            SuiteId::Prop1 => "prop1",
            SuiteId::TwoRoute => "two-route",
            SuiteId::GammaKappa => "gamma-kappa",
            SuiteId::Lambda => "lambda",
            SuiteId::MaxCorr => "max-corr",
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SuiteId {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "prop1" => Ok(SuiteId::Prop1),
            "two-route" => Ok(SuiteId::TwoRoute),
            "gamma-kappa" => Ok(SuiteId::GammaKappa),
            "lambda" => Ok(SuiteId::Lambda),
            "max-corr" => Ok(SuiteId::MaxCorr),
            other => Err(VerifyError::UnknownSuite(other.to_string())),
        }
    }
}

/// Knobs shared by the suites. `dims` applies to the suites that draw
/// dimensioned instances (`prop1`, `two-route`); `restarts` to `max-corr`;
/// `negative_control` to `prop1`.
#[derive(Debug, Clone)]
pub struct VerifySettings {
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub restarts: usize,
    pub negative_control: bool,
}

impl Default for VerifySettings {
    fn default() -> Self {
        VerifySettings {
            dims: vec![2, 3, 4, 5],
            trials: 200,
            seed: 20260814,
            restarts: 50,
            negative_control: false,
        }
    }
}

/// Outcome of one suite run.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    suite: SuiteId,
    passed: bool,
    max_residual: f64,
    metrics: Vec<(&'static str, f64)>,
}

impl SuiteOutcome {
    pub fn suite(&self) -> SuiteId {
        self.suite
    }

    pub fn passed(&self) -> bool {
        self.passed
    }

    /// Worst residual seen, in the suite's own residual convention.
    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    /// Named side measurements (trial counts, break fractions, gaps).
    pub fn metrics(&self) -> &[(&'static str, f64)] {
        &self.metrics
    }

    /// Looks up one metric by name.
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }
}

/// Runs one suite.
pub fn run_suite(id: SuiteId, settings: &VerifySettings) -> Result<SuiteOutcome> {
    match id {
        SuiteId::Prop1 => prop1_suite(settings),
        SuiteId::TwoRoute => two_route_suite(settings),
        SuiteId::GammaKappa => gamma_kappa_suite(settings),
        SuiteId::Lambda => lambda_suite(settings),
        SuiteId::MaxCorr => max_corr_suite(settings),
    }
}

/// Runs the given suites in order.
pub fn run_suites(ids: &[SuiteId], settings: &VerifySettings) -> Result<Vec<SuiteOutcome>> {
    ids.iter().map(|&id| run_suite(id, settings)).collect()
}

/// Derives a well-separated per-trial seed stream.
fn trial_stream(seed: u64, salt: u64) -> u64 {
    seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Draws a random observable pair plus congruence seed, bumping the stream
/// on the rare degenerate-spectrum draw.
fn random_pair_instance(dim: usize, stream: u64) -> Result<(ObservablePair, CMatrix)> {
    let mut s = stream;
    for _ in 0..16 {
        let a = random_hermitian(dim, s);
        let b = random_hermitian(dim, s.wrapping_add(1));
        match ObservablePair::new(a, b) {
            Ok(pair) => return Ok((pair, random_unitary(dim, s.wrapping_add(2)))),
            Err(_) => s = s.wrapping_add(0x9E37_79B9),
        }
    }
    let a = random_hermitian(dim, s);
    let b = random_hermitian(dim, s.wrapping_add(1));
    Ok((ObservablePair::new(a, b)?, random_unitary(dim, s.wrapping_add(2))))
}

/// Transfer and dual-basis identities over random sources. In negative
/// control mode the matched congruence `W V W^T` is replaced by
/// `W V W^dag`, which must break the B-side identities on almost every
/// draw; the suite then reports `passed = false` and the break fraction.
fn prop1_suite(settings: &VerifySettings) -> Result<SuiteOutcome> {
    let mut max_residual = 0.0f64;
    let mut broken = 0usize;
    let mut total = 0usize;
    for (di, &dim) in settings.dims.iter().enumerate() {
        for t in 0..settings.trials {
            let stream = trial_stream(settings.seed, (di * 1_000_003 + t) as u64);
            let (pair, v) = random_pair_instance(dim, stream)?;
            let state = if settings.negative_control {
                let good = build_nonfactorable(&pair, &v)?;
                let u_bad = good.w().mul(&v).mul(&good.w().dagger());
                build_with_congruence(&pair, &v, &u_bad)?
            } else {
                build_nonfactorable(&pair, &v)?
            };
            let (ra, rb) = verify_transfer(&state);
            let rd = dual_basis_form(&state);
            max_residual = max_residual.max(ra).max(rb).max(rd);
            if rb.max(rd) > BREAK_THRESHOLD {
                broken += 1;
            }
            total += 1;
        }
    }
    Ok(SuiteOutcome {
        suite: SuiteId::Prop1,
        passed: max_residual < IDENTITY_THRESHOLD,
        max_residual,
        metrics: vec![
            ("instances", total as f64),
            ("break_fraction", broken as f64 / total.max(1) as f64),
        ],
    })
}

/// Agreement of the per-branch and tripartite error-sum routes on fully
/// random scenarios: random source pair and congruence, random qubit meter
/// and coupling, random readout, random splitting basis. Trials are split
/// evenly across the configured dimensions.
fn two_route_suite(settings: &VerifySettings) -> Result<SuiteOutcome> {
    let mut max_residual = 0.0f64;
    let mut total = 0usize;
    let per_dim = (settings.trials / settings.dims.len().max(1)).max(1);
    for (di, &dim) in settings.dims.iter().enumerate() {
        for t in 0..per_dim {
            let stream = trial_stream(settings.seed ^ 0xA5A5_0000, (di * 1_000_003 + t) as u64);
            let (pair, v) = random_pair_instance(dim, stream)?;
            let source = build_nonfactorable(&pair, &v)?;
            let scenario = TripartiteScenario::new(
                source,
                random_state(&[2], stream.wrapping_add(10)),
                random_unitary(2 * dim, stream.wrapping_add(11)),
                random_hermitian(2, stream.wrapping_add(12)),
            )?;
            let basis =
                ProjectionBasis::from_columns(&random_unitary(dim, stream.wrapping_add(13)))?;
            let routes = weighted_error_routes(&scenario, &basis)?;
            max_residual = max_residual.max(routes.max_residual());
            total += 1;
        }
    }
    Ok(SuiteOutcome {
        suite: SuiteId::TwoRoute,
        passed: max_residual < IDENTITY_THRESHOLD,
        max_residual,
        metrics: vec![("instances", total as f64)],
    })
}

/// Basis search on the maximally entangled qubit source against the
/// closed-form catalog constants, including the argmax axis.
fn gamma_kappa_suite(_settings: &VerifySettings) -> Result<SuiteOutcome> {
    let pair = ObservablePair::new(pauli_z(), pauli_x())?;
    let source = build_nonfactorable(&pair, &CMatrix::identity(2))?;
    let budget = SearchBudget::default();
    let mut max_exact_gap = 0.0f64;
    let mut two_digit_gap = 0.0f64;
    let mut worst_axis = 0.0f64;
    for mdr in MdrId::all() {
        let got = gamma_q(mdr, source.psi12(), source.pair(), &budget)?;
        let gap = (got.value() - kappa(mdr)).abs();
        if mdr == MdrId::We {
            // The We catalog constant is quoted to two digits only.
            two_digit_gap = gap;
        } else {
            max_exact_gap = max_exact_gap.max(gap);
        }
        let axis = &got.argmax_basis().vectors()[0];
        let ny = expectation(axis, &pauli_y())?.abs().min(1.0);
        worst_axis = worst_axis.max(ny.acos());
    }
    let passed = max_exact_gap < 1e-6 && two_digit_gap < 5e-3 && worst_axis < 1e-3;
    Ok(SuiteOutcome {
        suite: SuiteId::GammaKappa,
        passed,
        max_residual: max_exact_gap,
        metrics: vec![
            ("two_digit_gap", two_digit_gap),
            ("axis_angle_rad", worst_axis),
        ],
    })
}

/// Draws one random complex 2x2 filter with standard-normal entries.
fn random_filter(rng: &mut ChaCha8Rng) -> CMatrix {
    let mut m = CMatrix::zeros(2, 2);
    for i in 0..2 {
        for j in 0..2 {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            m.set(i, j, Complex64::new(re, im));
        }
    }
    m
}

/// Correlation bounds for filtered states: random invertible filters on
/// random meter angles must keep a nonnegative margin for every relation
/// that survives filtering, and the scalar filter `2 I` must reproduce the
/// unfiltered bound exactly.
fn lambda_suite(settings: &VerifySettings) -> Result<SuiteOutcome> {
    let valid: Vec<MdrId> = MdrId::all()
        .into_iter()
        .filter(|m| m.universally_valid())
        .collect();
    let full = SearchBudget::default();
    // The filtered-side search may underestimate its maximum, which only
    // enlarges the reported bound; the shared denominator stays at the
    // full budget so margins are never inflated from below.
    let inner = SearchBudget {
        grid: 8,
        refine_iters: 48,
        restarts: 1,
        ftol: 1e-9,
    };
    let scenario0 = TripartiteScenario::qubit_cnot(std::f64::consts::FRAC_PI_8)?;
    let mut bases = Vec::with_capacity(valid.len());
    for &mdr in &valid {
        bases.push(gamma_q(
            mdr,
            scenario0.source().psi12(),
            scenario0.source().pair(),
            &full,
        )?);
    }

    // Scalar-filter identity at the full budget: the two search calls see
    // bitwise-identical inputs, so the bound must cancel to rounding.
    let mut identity_gap = 0.0f64;
    let doubled = CMatrix::identity(2).scale(Complex64::new(2.0, 0.0));
    for (&mdr, base) in valid.iter().zip(&bases) {
        let report =
            lambda_generalized_check(&scenario0, &doubled, mdr, &full, Some(base))?;
        let plain_rhs = 2.0 - 0.5 * base.value();
        identity_gap = identity_gap.max((report.rhs() - plain_rhs).abs());
    }

    // Random filters, parallel over trials with per-trial streams.
    let results: Vec<Result<f64>> = (0..settings.trials)
        .into_par_iter()
        .map(|t| {
            let stream = trial_stream(settings.seed ^ 0x1A3B_5C7D, t as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(stream);
            let theta3: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let scenario = TripartiteScenario::qubit_cnot(theta3)?;
            let mut trial_min = f64::INFINITY;
            // Redraw near-singular filters; Gaussian 2x2 draws essentially
            // never hit the condition-number cap.
            'filters: loop {
                let filter = random_filter(&mut rng);
                for (&mdr, base) in valid.iter().zip(&bases) {
                    match lambda_generalized_check(&scenario, &filter, mdr, &inner, Some(base)) {
                        Ok(report) => trial_min = trial_min.min(report.margin()),
                        Err(BoundsError::Singular(_)) => {
                            trial_min = f64::INFINITY;
                            continue 'filters;
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
                break;
            }
            Ok(trial_min)
        })
        .collect();
    let mut min_margin = f64::INFINITY;
    for r in results {
        min_margin = min_margin.min(r?);
    }

    let passed = min_margin >= MARGIN_FLOOR && identity_gap < IDENTITY_THRESHOLD;
    Ok(SuiteOutcome {
        suite: SuiteId::Lambda,
        passed,
        max_residual: (-min_margin).max(0.0),
        metrics: vec![
            ("trials", settings.trials as f64),
            ("min_margin", min_margin),
            ("identity_gap", identity_gap),
        ],
    })
}

/// Random-restart correlation-sum search: the best value must land on the
/// closed-form maximum and no restart may overshoot it.
fn max_corr_suite(settings: &VerifySettings) -> Result<SuiteOutcome> {
    let target = std::f64::consts::SQRT_2;
    let report = max_corr_search(settings.restarts.max(1), settings.seed)?;
    let overshoot = report
        .restart_values()
        .iter()
        .fold(0.0f64, |m, &v| m.max(v - target));
    let best_gap = (report.best() - target).abs();
    let passed = report.best() >= target - 1e-3 && overshoot <= 1e-6;
    Ok(SuiteOutcome {
        suite: SuiteId::MaxCorr,
        passed,
        max_residual: best_gap,
        metrics: vec![
            ("restarts", report.restart_values().len() as f64),
            ("overshoot", overshoot.max(0.0)),
        ],
    })
}
