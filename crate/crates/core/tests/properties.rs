use std::f64::consts::PI;

use lep_core::boundary_measure::{q_measure, BoundaryDensity, CylinderRegion, IntervalSet};
use lep_core::set_classes::AmbientSet;
use lep_core::verify::{
    changeset_counts, changeset_loglik_with, disc_polygon_area, excess_mass, lens_area, min_volume_set, DiscBox,
    GridSearch, MassSource,
};
use lep_core::{ConvexBody, CylinderPoint, Point2};
use proptest::prelude::*;

fn bodies() -> Vec<ConvexBody> {
    vec![
        ConvexBody::unit_disc(),
        ConvexBody::unit_square(),
        ConvexBody::polygon(vec![Point2::new(0.0, 0.0), Point2::new(2.0, 0.0), Point2::new(0.5, 1.5)]).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn magnify_inverts_unmagnify(which in 0usize..3, u in 0.0f64..1.0, s in -0.9f64..0.9) {
        let body = &bodies()[which];
        let eps = 0.5 * body.inradius();
        let theta = u * body.perimeter();
        // inside, tau is one-to-one only above the local reach
        prop_assume!(s > body.s_floor(eps, theta) + 1e-6);
        let z = body.unmagnify(eps, CylinderPoint::new(theta, s)).unwrap();
        let back = body.magnify(eps, z).unwrap();
        prop_assert!((back.s - s).abs() < 1e-9);
        // On a polygon the outer corner sectors collapse onto the corner lines.
        if body.is_disc() || s <= 0.0 {
            let dt = (back.theta - theta).abs();
            prop_assert!(dt.min(body.perimeter() - dt) < 1e-9);
        }
    }

    #[test]
    fn signed_distance_sign_matches_membership(which in 0usize..3, x in -1.5f64..2.5, y in -1.5f64..2.5) {
        let body = &bodies()[which];
        let z = Point2::new(x, y);
        let d = body.signed_distance(z);
        if d < -1e-12 { prop_assert!(body.contains(z)); }
        if d > 1e-12 { prop_assert!(!body.contains(z)); }
    }

    #[test]
    fn interval_inclusion_exclusion(a in prop::collection::vec((-1.0f64..1.0, 0.0f64..0.5), 0..4),
                                    b in prop::collection::vec((-1.0f64..1.0, 0.0f64..0.5), 0..4)) {
        let mk = |v: &[(f64, f64)]| IntervalSet::from_intervals(v.iter().map(|&(x, w)| (x, (x + w).min(1.0))));
        let (a, b) = (mk(&a), mk(&b));
        let lhs = a.union(&b).length() + a.intersection(&b).length();
        prop_assert!((lhs - a.length() - b.length()).abs() < 1e-12);
        prop_assert!((a.symmetric_difference(&b).length() - (a.union(&b).length() - a.intersection(&b).length())).abs() < 1e-12);
    }

    #[test]
    fn q_of_complementary_sbands_sums_to_one(lo in -1.0f64..1.0, w in 0.0f64..2.0) {
        let body = ConvexBody::unit_disc();
        let dens = BoundaryDensity::two_level_ratio(&body, 3.0, 2.0).unwrap();
        let hi = (lo + w).min(1.0);
        let c = CylinderRegion::sband(vec![[lo, hi]]).unwrap();
        let rest = CylinderRegion::full().difference(&c);
        let total = q_measure(&c, &dens, &body) + q_measure(&rest, &dens, &body);
        prop_assert!((total - 1.0).abs() < 1e-8);
    }

    #[test]
    fn unit_xi_loglik_reduces_to_counts(pts in prop::collection::vec((-1.3f64..1.3, -1.3f64..1.3), 0..60),
                                        dx in -0.2f64..0.2) {
        let k = ConvexBody::unit_disc();
        let ke = AmbientSet::Body(ConvexBody::disc(Point2::new(dx, 0.0), 1.0).unwrap());
        let pts: Vec<Point2> = pts.into_iter().map(|(x, y)| Point2::new(x, y)).collect();
        let marks = vec![0.3; pts.len()];
        let (a, r) = changeset_counts(&pts, &k, &ke);
        let l = changeset_loglik_with(&pts, &marks, &k, &ke, |_| 1.0).unwrap();
        prop_assert_eq!(l, a as f64 - r as f64);
    }

    #[test]
    fn lens_is_symmetric_and_bounded(x in -2.0f64..2.0, y in -2.0f64..2.0, r1 in 0.1f64..1.5, r2 in 0.1f64..1.5) {
        let (o, c) = (Point2::new(0.0, 0.0), Point2::new(x, y));
        let a = lens_area(o, r1, c, r2);
        prop_assert!((a - lens_area(c, r2, o, r1)).abs() < 1e-12);
        prop_assert!(a >= 0.0 && a <= PI * r1.min(r2).powi(2) + 1e-12);
    }

    #[test]
    fn disc_square_area_matches_lens_free_cases(x in -0.5f64..0.5, y in -0.5f64..0.5, r in 0.01f64..3.0) {
        let sq = [Point2::new(-1.0, -1.0), Point2::new(1.0, -1.0), Point2::new(1.0, 1.0), Point2::new(-1.0, 1.0)];
        let a = disc_polygon_area(Point2::new(x, y), r, &sq);
        prop_assert!(a <= (PI * r * r).min(4.0) + 1e-12);
        if r <= 0.5 { prop_assert!((a - PI * r * r).abs() < 1e-12); }
        if r >= 3.0f64.sqrt() * 1.5 { prop_assert!((a - 4.0).abs() < 1e-12); }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn excess_mass_argmax_is_scale_invariant(k in 0.2f64..5.0, ratio in 1.5f64..4.0) {
        let body = ConvexBody::unit_disc();
        let (lo, hi) = (Point2::new(-2.0, -2.0), Point2::new(2.0, 2.0));
        let c_out = 1.0 / (16.0 + (ratio - 1.0) * PI);
        let c_in = ratio * c_out;
        let lambda = 0.5 * (c_in + c_out);
        let bounds = DiscBox { cx: [-0.5, 0.5], cy: [-0.5, 0.5], r: [0.5, 1.5] };
        let search = GridSearch { points: 5, stages: 2 };
        let base = MassSource::TwoLevel { body: &body, c_in, c_out, lo, hi };
        let scaled = MassSource::TwoLevel { body: &body, c_in: k * c_in, c_out: k * c_out, lo, hi };
        let a = excess_mass(&base, lambda, bounds, search).unwrap();
        let b = excess_mass(&scaled, k * lambda, bounds, search).unwrap();
        prop_assert_eq!(a.disc, b.disc);
    }

    #[test]
    fn min_volume_output_is_feasible(alpha in 0.05f64..0.6) {
        let body = ConvexBody::unit_disc();
        let dens = BoundaryDensity::two_level_ratio(&body, 2.0, 2.0).unwrap();
        let src = MassSource::population(&body, &dens).unwrap();
        let bounds = DiscBox { cx: [-0.5, 0.5], cy: [-0.5, 0.5], r: [0.0, 2.0] };
        let fit = min_volume_set(&src, alpha, bounds, GridSearch { points: 5, stages: 2 }).unwrap();
        prop_assert!(fit.fit.mass >= alpha - 1e-12);
    }
}
