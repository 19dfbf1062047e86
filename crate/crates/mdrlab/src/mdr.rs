//! Catalog of measurement-disturbance relations (MDRs) and the geometry of
//! their allowed regions in the error-disturbance plane.
//!
//! Each relation constrains the pair (eps, eta) = (precision of an A
//! measurement, disturbance imparted to B) for a fixed ensemble context
//! (standard deviations of A and B and the commutator mean). The catalog
//! knows six relations:
//!
//! * `He` - Heisenberg-type product form, eps*eta >= |<C>|.
//! * `Oz` - Ozawa's three-term correction.
//! * `Ha` - Hall's form with measured-observable deviations.
//! * `We` - Weston et al.'s symmetrized form.
//! * `B1` - Branciard's general ellipse relation.
//! * `B2` - Branciard's tight qubit refinement.
//!
//! The shortest squared distance from the origin to an allowed region is the
//! relation's f value; on ideal symmetric contexts it reduces to the kappa
//! constants used by the correlation bounds.

use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::hilbert::{expectation, std_dev, CMatrix, StateVector};
use crate::optimize::{first_crossing, scan_then_golden};
use crate::tol;

/// Identifier of one measurement-disturbance relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MdrId {
    He,
    Oz,
    Ha,
    We,
    B1,
    B2,
}

impl MdrId {
    /// All relations in catalog order.
    pub fn all() -> [MdrId; 6] {
        [MdrId::He, MdrId::Oz, MdrId::Ha, MdrId::We, MdrId::B1, MdrId::B2]
    }

    /// Short ASCII label.
    pub fn label(self) -> &'static str {
        match self {
            MdrId::He => "He",
            MdrId::Oz => "Oz",
            MdrId::Ha => "Ha",
            MdrId::We => "We",
            MdrId::B1 => "B1",
            MdrId::B2 => "B2",
        }
    }

    /// Whether the relation holds for every quantum measurement. The plain
    /// error-disturbance product is the one catalog member known to fail,
    /// which is what the correlation bounds make quantitative.
    pub fn universally_valid(self) -> bool {
        !matches!(self, MdrId::He)
    }
}

impl fmt::Display for MdrId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MdrId {
    type Err = MdrError;

    fn from_str(s: &str) -> std::result::Result<Self, MdrError> {
        match s.to_ascii_lowercase().as_str() {
            "he" => Ok(MdrId::He),
            "oz" => Ok(MdrId::Oz),
            "ha" => Ok(MdrId::Ha),
            "we" => Ok(MdrId::We),
            "b1" => Ok(MdrId::B1),
            "b2" => Ok(MdrId::B2),
            _ => Err(MdrError::UnknownRelation(s.to_string())),
        }
    }
}

/// Errors raised by the catalog.
#[derive(Debug, Error)]
pub enum MdrError {
    #[error("unknown relation {0:?}")]
    UnknownRelation(String),
    #[error("context violates the Robertson bound: dA*dB = {0:.6e} < |<C>| = {1:.6e}")]
    ContextInvalid(f64, f64),
    #[error("relation {0} needs measured-observable deviations")]
    MissingMeasurementContext(MdrId),
    #[error("point or context outside the validity domain of {0}: {1}")]
    OutOfDomain(MdrId, String),
    #[error(transparent)]
    Hilbert(#[from] crate::hilbert::HilbertError),
}

/// Result alias for this module.
pub type Result<T> = std::result::Result<T, MdrError>;

/// Fixed ensemble data entering every relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleContext {
    delta_a: f64,
    delta_b: f64,
    abs_c: f64,
    robertson_valid: bool,
}

impl EnsembleContext {
    /// Builds a context; the commutator mean enters by modulus.
    pub fn new(delta_a: f64, delta_b: f64, c_mean: f64) -> Self {
        assert!(delta_a >= 0.0 && delta_b >= 0.0, "standard deviations are nonnegative");
        let abs_c = c_mean.abs();
        let robertson_valid = delta_a * delta_b >= abs_c - tol::INEQUALITY_SLACK;
        EnsembleContext { delta_a, delta_b, abs_c, robertson_valid }
    }

    /// Evaluates (dA, dB, |<C>|) on a state for observables A, B and their
    /// commutator observable C = [A,B]/2i.
    pub fn from_state(
        state: &StateVector,
        a: &CMatrix,
        b: &CMatrix,
        c: &CMatrix,
    ) -> Result<Self> {
        let da = std_dev(state, a)?;
        let db = std_dev(state, b)?;
        let cm = expectation(state, c)?;
        Ok(EnsembleContext::new(da, db, cm))
    }

    /// Standard deviation of A.
    pub fn delta_a(&self) -> f64 {
        self.delta_a
    }

    /// Standard deviation of B.
    pub fn delta_b(&self) -> f64 {
        self.delta_b
    }

    /// Modulus of the commutator mean.
    pub fn abs_c(&self) -> f64 {
        self.abs_c
    }

    /// Whether dA*dB >= |<C>| within slack.
    pub fn robertson_valid(&self) -> bool {
        self.robertson_valid
    }

    fn require_valid(&self) -> Result<()> {
        if !self.robertson_valid {
            return Err(MdrError::ContextInvalid(self.delta_a * self.delta_b, self.abs_c));
        }
        Ok(())
    }
}

/// Standard deviations of the actually measured observables, needed by the
/// raw Hall and Weston forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementContext {
    pub delta_ma: f64,
    pub delta_mb: f64,
}

/// A point in the error-disturbance plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorPoint {
    pub eps: f64,
    pub eta: f64,
}

impl ErrorPoint {
    /// Convenience constructor.
    pub fn new(eps: f64, eta: f64) -> Self {
        ErrorPoint { eps, eta }
    }

    /// Squared distance from the origin.
    pub fn norm_sq(&self) -> f64 {
        self.eps * self.eps + self.eta * self.eta
    }
}

/// Largest f coefficient each relation attains on ideal symmetric qubit
/// contexts (dA = dB = sqrt|<C>|). `We`'s constant is a two-digit catalog
/// value; the solved minimum is close to 0.5912.
pub fn kappa(mdr: MdrId) -> f64 {
    match mdr {
        MdrId::He => 2.0,
        MdrId::Oz => (2.0 - SQRT_2) * (2.0 - SQRT_2),
        MdrId::Ha => 0.4,
        MdrId::We => 0.59,
        MdrId::B1 => 1.0,
        MdrId::B2 => 4.0 - 2.0 * SQRT_2,
    }
}

fn require_b2_context(ctx: &EnsembleContext) -> Result<()> {
    let lim = 1.0 + tol::DEGENERACY_GAP;
    if ctx.delta_a > lim || ctx.delta_b > lim || ctx.abs_c > lim {
        return Err(MdrError::OutOfDomain(
            MdrId::B2,
            format!(
                "requires a qubit context (dA={:.3}, dB={:.3}, |<C>|={:.3})",
                ctx.delta_a, ctx.delta_b, ctx.abs_c
            ),
        ));
    }
    Ok(())
}

/// Decides whether a point satisfies the relation, within slack 1e-12.
///
/// `Ha` and `We` evaluate their raw forms and need the measured-observable
/// deviations; the other relations ignore `mctx`.
pub fn satisfies(
    mdr: MdrId,
    p: &ErrorPoint,
    ctx: &EnsembleContext,
    mctx: Option<&MeasurementContext>,
) -> Result<bool> {
    ctx.require_valid()?;
    let (a, b, c) = (ctx.delta_a, ctx.delta_b, ctx.abs_c);
    let (eps, eta) = (p.eps, p.eta);
    let (lhs, rhs) = match mdr {
        MdrId::He => (eps * eta, c),
        MdrId::Oz => (eps * eta + eps * b + eta * a, c),
        MdrId::Ha => {
            let m = mctx.ok_or(MdrError::MissingMeasurementContext(mdr))?;
            (eps * eta + eps * m.delta_mb + eta * m.delta_ma, c)
        }
        MdrId::We => {
            let m = mctx.ok_or(MdrError::MissingMeasurementContext(mdr))?;
            (eps * (m.delta_mb + b) + eta * (m.delta_ma + a), 2.0 * c)
        }
        MdrId::B1 => {
            let s = (a * a * b * b - c * c).max(0.0).sqrt();
            (b * b * eps * eps + a * a * eta * eta + 2.0 * eps * eta * s, c * c)
        }
        MdrId::B2 => {
            require_b2_context(ctx)?;
            let lim = 2.0 + tol::DEGENERACY_GAP;
            if eps > lim || eta > lim {
                return Err(MdrError::OutOfDomain(
                    MdrId::B2,
                    format!("eps={eps:.3}, eta={eta:.3} exceed the qubit range [0, 2]"),
                ));
            }
            (b2_lhs(eps, eta, c), c * c)
        }
    };
    Ok(lhs >= rhs - tol::INEQUALITY_SLACK)
}

fn b2_lhs(eps: f64, eta: f64, c: f64) -> f64 {
    let fe = (1.0 - 0.25 * eps * eps).max(0.0);
    let fn_ = (1.0 - 0.25 * eta * eta).max(0.0);
    eps * eps * fe + eta * eta * fn_
        + 2.0 * eps * eta * (1.0 - c * c).max(0.0).sqrt() * fn_.sqrt() * fe.sqrt()
}

fn ha_sub_lhs(eps: f64, eta: f64, a: f64, b: f64) -> f64 {
    eps * eta
        + eps * (b * b - eta * eta).max(0.0).sqrt()
        + eta * (a * a - eps * eps).max(0.0).sqrt()
}

fn we_sub_lhs(eps: f64, eta: f64, a: f64, b: f64) -> f64 {
    eps * ((b * b - eta * eta).max(0.0).sqrt() + b)
        + eta * ((a * a - eps * eps).max(0.0).sqrt() + a)
}

/// Left side of the region form of a relation at a point.
///
/// For `Ha` and `We` this substitutes the optimal-measurement identities
/// dMA^2 = dA^2 - eps^2 and dMB^2 = dB^2 - eta^2, which confine the
/// interesting geometry to eps <= dA, eta <= dB.
pub fn region_lhs(mdr: MdrId, p: &ErrorPoint, ctx: &EnsembleContext) -> Result<f64> {
    ctx.require_valid()?;
    let (a, b, c) = (ctx.delta_a, ctx.delta_b, ctx.abs_c);
    let (eps, eta) = (p.eps, p.eta);
    Ok(match mdr {
        MdrId::He => eps * eta,
        MdrId::Oz => eps * eta + eps * b + eta * a,
        MdrId::Ha => ha_sub_lhs(eps, eta, a, b),
        MdrId::We => we_sub_lhs(eps, eta, a, b),
        MdrId::B1 => {
            let s = (a * a * b * b - c * c).max(0.0).sqrt();
            b * b * eps * eps + a * a * eta * eta + 2.0 * eps * eta * s
        }
        MdrId::B2 => {
            require_b2_context(ctx)?;
            b2_lhs(eps, eta, c)
        }
    })
}

/// Right side of the region form of a relation.
pub fn region_rhs(mdr: MdrId, ctx: &EnsembleContext) -> f64 {
    let c = ctx.abs_c;
    match mdr {
        MdrId::He | MdrId::Oz | MdrId::Ha => c,
        MdrId::We => 2.0 * c,
        MdrId::B1 | MdrId::B2 => c * c,
    }
}

/// Shortest squared distance from the origin to the allowed region.
///
/// `He` and `B1` use closed forms (hyperbola and ellipse minor axis); the
/// others minimize the first boundary crossing along rays from the origin.
pub fn shortest_distance_sq(mdr: MdrId, ctx: &EnsembleContext) -> Result<f64> {
    ctx.require_valid()?;
    let (a, b, c) = (ctx.delta_a, ctx.delta_b, ctx.abs_c);
    if c == 0.0 {
        return Ok(0.0);
    }
    match mdr {
        MdrId::He => Ok(2.0 * c),
        MdrId::B1 => {
            // Smallest eigenvalue of the quadratic-form matrix
            // [[dB^2, s], [s, dA^2]] with s = sqrt(dA^2 dB^2 - c^2); the
            // determinant collapses to c^2, which gives the closed form.
            let sum = a * a + b * b;
            Ok(0.5 * (sum - (sum * sum - 4.0 * c * c).max(0.0).sqrt()))
        }
        MdrId::Oz => {
            let r2_at = |phi: f64| -> f64 {
                let (cp, sp) = (phi.cos().max(0.0), phi.sin().max(0.0));
                let alpha = cp * sp;
                let beta = b * cp + a * sp;
                let t = if alpha < 1e-15 {
                    c / beta
                } else {
                    (-beta + (beta * beta + 4.0 * alpha * c).sqrt()) / (2.0 * alpha)
                };
                t * t
            };
            let (_, r2) = scan_then_golden(&r2_at, 0.0, FRAC_PI_2, 65, 1e-11);
            Ok(r2)
        }
        MdrId::Ha => Ok(radial_distance_sq(
            &|eps, eta| ha_sub_lhs(eps, eta, a, b),
            c,
            a,
            b,
        )),
        MdrId::We => Ok(radial_distance_sq(
            &|eps, eta| we_sub_lhs(eps, eta, a, b),
            2.0 * c,
            a,
            b,
        )),
        MdrId::B2 => {
            require_b2_context(ctx)?;
            Ok(radial_distance_sq(&|eps, eta| b2_lhs(eps, eta, c), c * c, 2.0, 2.0))
        }
    }
}

/// Minimizes the squared first-crossing radius over ray angles; the search
/// window per ray is the box [0, eps_max] x [0, eta_max], whose far edges
/// always satisfy the three relations this is used for.
fn radial_distance_sq(
    lhs: &dyn Fn(f64, f64) -> f64,
    rhs: f64,
    eps_max: f64,
    eta_max: f64,
) -> f64 {
    let r2_at = |phi: f64| -> f64 {
        let (cp, sp) = (phi.cos().max(0.0), phi.sin().max(0.0));
        let t_max = {
            let ta = if cp > 1e-15 { eps_max / cp } else { f64::INFINITY };
            let tb = if sp > 1e-15 { eta_max / sp } else { f64::INFINITY };
            ta.min(tb)
        };
        let g = |t: f64| lhs(t * cp, t * sp) - rhs;
        match first_crossing(&g, t_max, 48, 60) {
            Some(t) => t * t,
            None => f64::INFINITY,
        }
    };
    let (_, r2) = scan_then_golden(&r2_at, 0.0, FRAC_PI_2, 65, 1e-11);
    r2
}

/// Samples n points on the boundary curve of the allowed region, each
/// satisfying the region form as an equality within 1e-8.
pub fn region_boundary(mdr: MdrId, ctx: &EnsembleContext, n: usize) -> Result<Vec<ErrorPoint>> {
    assert!(n >= 2, "a boundary trace needs at least two points");
    ctx.require_valid()?;
    let (a, b, c) = (ctx.delta_a, ctx.delta_b, ctx.abs_c);
    if c == 0.0 {
        // Region touches the axes; the boundary degenerates onto them.
        return Ok((0..n)
            .map(|_| ErrorPoint::new(0.0, 0.0))
            .collect());
    }
    let rhs = region_rhs(mdr, ctx);
    let mut points = Vec::with_capacity(n);
    match mdr {
        MdrId::He => {
            // Hyperbola eta = c/eps over a symmetric geometric window.
            let root = c.sqrt();
            let (lo, hi) = (root / 8.0, root * 8.0);
            let ratio = (hi / lo).powf(1.0 / (n - 1) as f64);
            let mut eps = lo;
            for _ in 0..n {
                points.push(ErrorPoint::new(eps, c / eps));
                eps *= ratio;
            }
        }
        MdrId::Oz => {
            let hi = c / b;
            for i in 0..n {
                let eps = hi * i as f64 / (n - 1) as f64;
                let eta = (c - eps * b) / (eps + a);
                points.push(ErrorPoint::new(eps, eta.max(0.0)));
            }
        }
        MdrId::B1 => {
            let s = (a * a * b * b - c * c).max(0.0).sqrt();
            let hi = c / b;
            for i in 0..n {
                let eps = hi * i as f64 / (n - 1) as f64;
                let eta = (c * (a * a - eps * eps).max(0.0).sqrt() - s * eps) / (a * a);
                points.push(ErrorPoint::new(eps, eta.max(0.0)));
            }
        }
        MdrId::Ha | MdrId::We | MdrId::B2 => {
            if mdr == MdrId::B2 {
                require_b2_context(ctx)?;
            }
            let lhs: Box<dyn Fn(f64, f64) -> f64> = match mdr {
                MdrId::Ha => Box::new(move |eps, eta| ha_sub_lhs(eps, eta, a, b)),
                MdrId::We => Box::new(move |eps, eta| we_sub_lhs(eps, eta, a, b)),
                _ => Box::new(move |eps, eta| b2_lhs(eps, eta, c)),
            };
            let (eps_hi, eta_hi) = match mdr {
                MdrId::Ha | MdrId::We => (c / b, b),
                _ => ((2.0 - 2.0 * (1.0 - c * c).max(0.0).sqrt()).sqrt(), SQRT_2),
            };
            for i in 0..n {
                let eps = eps_hi * i as f64 / (n - 1) as f64;
                let g = |eta: f64| lhs(eps, eta) - rhs;
                let eta = if g(0.0) >= 0.0 {
                    0.0
                } else {
                    first_crossing(&g, eta_hi, 64, 80)
                        .expect("boundary exists for every eps below the intercept")
                };
                points.push(ErrorPoint::new(eps, eta));
            }
        }
    }
    for p in &points {
        let residual = (region_lhs(mdr, p, ctx)? - rhs).abs();
        debug_assert!(
            residual <= tol::BOUNDARY_EQUALITY_TOL,
            "boundary point off the curve by {residual:.3e}"
        );
    }
    Ok(points)
}
