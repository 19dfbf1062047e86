//! Centralized numerical tolerances.
//!
//! Every comparison threshold in the crate lives here so that the accuracy
//! budget is auditable in one place. Constructions (norms, hermiticity) are
//! held to 1e-12; algebraic identities that chain a handful of matrix
//! products are held to 1e-10; spectral gaps below 1e-9 make an eigenbasis
//! numerically ambiguous and are refused rather than guessed.

/// State norms and hermiticity residuals accepted at construction time.
pub const CONSTRUCTION_TOL: f64 = 1e-12;

/// Residual accepted for algebraic identities (transfer checks, unitarity,
/// imaginary residues of Hermitian expectations).
pub const ALGEBRAIC_TOL: f64 = 1e-10;

/// Spectral gap below which two eigenvalues are treated as degenerate and
/// basis-dependent constructions are refused.
pub const DEGENERACY_GAP: f64 = 1e-9;

/// Modulus a vector component must exceed to serve as the phase-fixing pivot.
pub const PHASE_PIVOT_MIN: f64 = 1e-9;

/// Slack when deciding whether an inequality (an MDR, or Robertson) holds,
/// absorbing round-off on exactly saturated points.
pub const INEQUALITY_SLACK: f64 = 1e-12;

/// Projection weights below this are treated as empty branches and skipped.
pub const WEIGHT_CUTOFF: f64 = 1e-14;

/// Agreement demanded between the per-branch sum and the closed tripartite
/// form of the weighted error identities.
pub const ROUTE_AGREEMENT_TOL: f64 = 1e-9;

/// Equality residual allowed for points emitted on a region boundary.
pub const BOUNDARY_EQUALITY_TOL: f64 = 1e-8;

/// Largest particle count times dimension handled with exactness guarantees;
/// single-particle dimensions above this are refused.
pub const MAX_DIM: usize = 8;

/// Condition number above which a deformation matrix is treated as singular.
pub const MAX_CONDITION: f64 = 1e6;
