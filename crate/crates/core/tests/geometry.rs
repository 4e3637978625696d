use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use lep_core::{ConvexBody, CylinderPoint, Error, Point2};

#[test]
fn projection_examples() {
    let disc = ConvexBody::unit_disc();
    let p = disc.project(Point2::new(2.0, 0.0)).unwrap();
    assert_abs_diff_eq!(p.foot.theta, 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(p.foot.position.x, 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(p.signed_distance, 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(p.normal.x, 1.0, epsilon = 1e-15);

    let sq = ConvexBody::unit_square();
    let p = sq.project(Point2::new(-0.3, -0.4)).unwrap();
    assert_abs_diff_eq!(p.foot.position.x, 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(p.foot.position.y, 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(p.signed_distance, 0.5, epsilon = 1e-15);
    assert_abs_diff_eq!(p.normal.x, -0.6, epsilon = 1e-15);
    assert_abs_diff_eq!(p.normal.y, -0.8, epsilon = 1e-15);

    assert!(matches!(disc.project(Point2::new(0.0, 0.0)), Err(Error::SkeletonPoint { .. })));
}

#[test]
fn local_reach_examples() {
    let disc = ConvexBody::unit_disc();
    for t in [0.0, 1.0, 4.0] {
        assert_abs_diff_eq!(disc.local_reach(t), 1.0, epsilon = 1e-15);
    }
    let sq = ConvexBody::unit_square();
    assert_abs_diff_eq!(sq.local_reach(0.3), 0.3, epsilon = 1e-15);
    assert_abs_diff_eq!(sq.local_reach(0.8), 0.2, epsilon = 1e-15);
    assert_eq!(sq.local_reach(1.0), 0.0);
}

#[test]
fn neighborhood_membership() {
    let disc = ConvexBody::unit_disc();
    assert!(disc.in_neighborhood(0.1, Point2::new(1.05, 0.0)));
    assert!(!disc.in_neighborhood(0.1, Point2::new(0.0, 0.0)));
    assert!(ConvexBody::unit_square().in_neighborhood(0.1, Point2::new(-0.05, -0.05)));
}

#[test]
fn magnification_examples() {
    let disc = ConvexBody::unit_disc();
    let c = disc.magnify(0.1, Point2::new(1.05, 0.0)).unwrap();
    assert_abs_diff_eq!(c.theta, 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(c.s, 0.5, epsilon = 1e-12);
    let c = disc.magnify(0.1, Point2::new(0.0, 0.95)).unwrap();
    assert_abs_diff_eq!(c.theta, PI / 2.0, epsilon = 1e-12);
    assert_abs_diff_eq!(c.s, -0.5, epsilon = 1e-12);
    let c = ConvexBody::unit_square().magnify(0.1, Point2::new(0.5, 1.05)).unwrap();
    assert_abs_diff_eq!(c.theta, 2.5, epsilon = 1e-12);
    assert_abs_diff_eq!(c.s, 0.5, epsilon = 1e-12);
    assert!(matches!(disc.magnify(0.1, Point2::new(0.0, 0.0)), Err(Error::OutsideNeighborhood { .. }) | Err(Error::SkeletonPoint { .. })));
}

#[test]
fn unmagnify_examples() {
    let disc = ConvexBody::unit_disc();
    let z = disc.unmagnify(0.1, CylinderPoint::new(0.0, 0.5)).unwrap();
    assert_abs_diff_eq!(z.x, 1.05, epsilon = 1e-12);
    assert_abs_diff_eq!(z.y, 0.0, epsilon = 1e-12);
    let z = disc.unmagnify(0.1, CylinderPoint::new(PI, -1.0)).unwrap();
    assert_abs_diff_eq!(z.x, -0.9, epsilon = 1e-12);
    assert_abs_diff_eq!(z.y, 0.0, epsilon = 1e-12);
    let z = ConvexBody::unit_square().unmagnify(0.1, CylinderPoint::new(0.5, -0.5)).unwrap();
    assert_abs_diff_eq!(z.x, 0.5, epsilon = 1e-12);
    assert_abs_diff_eq!(z.y, 0.05, epsilon = 1e-12);
}

#[test]
fn steiner_areas() {
    let disc = ConvexBody::unit_disc();
    for eps in [0.5, 0.1, 0.01] {
        assert_abs_diff_eq!(disc.neighborhood_area(eps).unwrap(), 4.0 * PI * eps, epsilon = 1e-9);
    }
    let sq = ConvexBody::unit_square();
    assert_abs_diff_eq!(sq.neighborhood_area(0.1).unwrap(), 0.8 + (PI - 4.0) * 0.01, epsilon = 1e-12);
    assert!(matches!(sq.neighborhood_area(0.5), Err(Error::EpsTooLarge { .. })));
}

#[test]
fn area_over_eps_tends_to_twice_perimeter() {
    let tri = ConvexBody::polygon(vec![Point2::new(0.0, 0.0), Point2::new(2.0, 0.0), Point2::new(0.5, 1.5)]).unwrap();
    for body in [ConvexBody::unit_disc(), ConvexBody::unit_square(), tri] {
        let target = 2.0 * body.perimeter();
        let errs: Vec<f64> =
            [0.1, 0.01, 0.001].iter().map(|&e| (body.neighborhood_area(e).unwrap() / e - target).abs()).collect();
        assert!(errs[2] < errs[0] || errs[0] < 1e-9);
        assert!(errs[2] < 1e-2);
    }
}

#[test]
fn polygon_validation() {
    let cw = vec![Point2::new(0.0, 0.0), Point2::new(0.0, 1.0), Point2::new(1.0, 1.0), Point2::new(1.0, 0.0)];
    assert!(matches!(ConvexBody::polygon(cw), Err(Error::InvalidBody(_))));
    assert!(matches!(ConvexBody::polygon(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)]), Err(Error::InvalidBody(_))));
    assert!(matches!(ConvexBody::disc(Point2::new(0.0, 0.0), -1.0), Err(Error::InvalidBody(_))));
}
