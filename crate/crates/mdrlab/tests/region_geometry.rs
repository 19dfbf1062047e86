//! Property tests for the allowed-region geometry.
//!
//! Random ensemble contexts probe what the fixed-point unit tests cannot:
//! boundary traces must sit on the region equality, product/sum regions
//! must stay upward-closed, and the shortest-distance fingerprint must be
//! both a lower bound for every boundary point (soundness) and attained by
//! the trace minimum (completeness).

use mdrlab::mdr::{
    region_boundary, region_lhs, region_rhs, satisfies, shortest_distance_sq, EnsembleContext,
    ErrorPoint, MdrId,
};
use proptest::prelude::*;

/// Random context with a comfortable Robertson margin: c = fraction * a * b.
fn general_context() -> impl Strategy<Value = EnsembleContext> {
    (0.3f64..2.5, 0.3f64..2.5, 0.05f64..1.0)
        .prop_map(|(a, b, frac)| EnsembleContext::new(a, b, frac * a * b))
}

/// The two-outcome relation only admits qubit-scale contexts.
fn qubit_context() -> impl Strategy<Value = EnsembleContext> {
    (0.3f64..1.0, 0.3f64..1.0, 0.05f64..1.0)
        .prop_map(|(a, b, frac)| EnsembleContext::new(a, b, frac * a * b))
}

fn context_for(mdr: MdrId) -> BoxedStrategy<EnsembleContext> {
    if mdr == MdrId::B2 {
        qubit_context().boxed()
    } else {
        general_context().boxed()
    }
}

fn any_mdr() -> impl Strategy<Value = MdrId> {
    prop::sample::select(MdrId::all().to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundary_points_sit_on_the_region_equality(
        (mdr, ctx) in any_mdr().prop_flat_map(|m| context_for(m).prop_map(move |c| (m, c))),
    ) {
        let rhs = region_rhs(mdr, &ctx);
        for p in region_boundary(mdr, &ctx, 129).unwrap() {
            let lhs = region_lhs(mdr, &p, &ctx).unwrap();
            prop_assert!(
                (lhs - rhs).abs() <= 1e-8 * rhs.max(1.0),
                "{mdr}: boundary point ({}, {}) has lhs {lhs} vs rhs {rhs}",
                p.eps,
                p.eta
            );
        }
    }

    #[test]
    fn product_and_sum_regions_are_upward_closed(
        ctx in general_context(),
        index in 0usize..129,
        shift in (0.0f64..3.0, 0.0f64..3.0),
    ) {
        for mdr in [MdrId::He, MdrId::Oz] {
            let points = region_boundary(mdr, &ctx, 129).unwrap();
            let p = &points[index];
            let moved = ErrorPoint::new(p.eps + shift.0, p.eta + shift.1);
            prop_assert!(
                satisfies(mdr, &moved, &ctx, None).unwrap(),
                "{mdr}: ({}, {}) satisfied but ({}, {}) did not",
                p.eps, p.eta, moved.eps, moved.eta
            );
        }
    }

    #[test]
    fn no_boundary_point_undercuts_the_shortest_distance(
        (mdr, ctx) in any_mdr().prop_flat_map(|m| context_for(m).prop_map(move |c| (m, c))),
    ) {
        let dist_sq = shortest_distance_sq(mdr, &ctx).unwrap();
        for p in region_boundary(mdr, &ctx, 129).unwrap() {
            prop_assert!(
                p.norm_sq() >= dist_sq - 1e-6,
                "{mdr}: boundary point ({}, {}) at norm^2 {} undercuts distance^2 {dist_sq}",
                p.eps, p.eta, p.norm_sq()
            );
        }
    }

    #[test]
    fn the_trace_minimum_attains_the_shortest_distance(
        (mdr, ctx) in any_mdr().prop_flat_map(|m| context_for(m).prop_map(move |c| (m, c))),
    ) {
        let dist_sq = shortest_distance_sq(mdr, &ctx).unwrap();
        let best = region_boundary(mdr, &ctx, 513)
            .unwrap()
            .iter()
            .map(ErrorPoint::norm_sq)
            .fold(f64::INFINITY, f64::min);
        prop_assert!(
            best <= dist_sq + 1e-2,
            "{mdr}: trace minimum {best} never approaches distance^2 {dist_sq}"
        );
    }

    #[test]
    fn points_closer_than_the_shortest_distance_violate_the_relation(
        (mdr, ctx) in any_mdr().prop_flat_map(|m| context_for(m).prop_map(move |c| (m, c))),
        index in 0usize..129,
        slack in 0.5f64..0.9,
    ) {
        let dist_sq = shortest_distance_sq(mdr, &ctx).unwrap();
        prop_assume!(dist_sq > 1e-9);
        let points = region_boundary(mdr, &ctx, 129).unwrap();
        let p = &points[index];
        prop_assume!(p.norm_sq() > 0.0);
        // Rescale the boundary point radially until its norm falls strictly
        // inside the forbidden disk; it must then violate the region form.
        let s = (slack * dist_sq / p.norm_sq()).sqrt();
        let inside = ErrorPoint::new(s * p.eps, s * p.eta);
        let lhs = region_lhs(mdr, &inside, &ctx).unwrap();
        let rhs = region_rhs(mdr, &ctx);
        prop_assert!(
            lhs < rhs - 1e-12,
            "{mdr}: ({}, {}) at norm^2 {} < {dist_sq} still satisfies ({lhs} >= {rhs})",
            inside.eps, inside.eta, inside.norm_sq()
        );
    }
}
