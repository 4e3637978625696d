use std::f64::consts::PI;

use lep_core::boundary_measure::{BoundaryDensity, CylinderRegion, DensityModel, Profile};
use lep_core::empirical::{sample_ambient, BrownianField, DEFAULT_JITTER};
use lep_core::rng::seeded;
use lep_core::verify::{
    excess_mass, min_volume_set, required_radius, statement_b_test, sup_functional_test, sup_gaussian, DiscBox,
    GridSearch, MassSource, StatementBConfig, SupFunctionalConfig,
};
use lep_core::{stats, ConvexBody, Error, Point2};

fn uniform_model() -> DensityModel {
    DensityModel::TwoLevel { c_in: 1.0 / 16.0, c_out: 1.0 / 16.0, half_width: 2.0, center: Point2::new(0.0, 0.0) }
}

#[test]
fn excess_mass_population_recovers_body() {
    let body = ConvexBody::unit_disc();
    let dens = BoundaryDensity::two_level_ratio(&body, 3.0, 2.0).unwrap();
    let src = MassSource::population(&body, &dens).unwrap();
    let bounds = DiscBox { cx: [-0.5, 0.5], cy: [-0.5, 0.5], r: [0.5, 1.5] };
    let (c_in, c_out) = match dens.model() {
        DensityModel::TwoLevel { c_in, c_out, .. } => (*c_in, *c_out),
        _ => unreachable!(),
    };
    let fit = excess_mass(&src, 0.5 * (c_in + c_out), bounds, GridSearch::default()).unwrap();
    assert_eq!(fit.disc.center, Point2::new(0.0, 0.0));
    assert_eq!(fit.disc.radius, 1.0);
    assert!((fit.mass - c_in * PI).abs() < 1e-12);
}

#[test]
fn excess_mass_degenerate_above_top_level() {
    let body = ConvexBody::unit_disc();
    let dens = BoundaryDensity::two_level_ratio(&body, 2.0, 2.0).unwrap();
    let src = MassSource::population(&body, &dens).unwrap();
    let c_in = match dens.model() {
        DensityModel::TwoLevel { c_in, .. } => *c_in,
        _ => unreachable!(),
    };
    let bounds = DiscBox { cx: [-0.5, 0.5], cy: [-0.5, 0.5], r: [0.0, 1.5] };
    assert!(matches!(excess_mass(&src, c_in, bounds, GridSearch::default()), Err(Error::DegenerateSolution)));
    assert!(matches!(excess_mass(&src, 2.0 * c_in, bounds, GridSearch::default()), Err(Error::DegenerateSolution)));
}

#[test]
fn excess_mass_rejects_collar_population() {
    let body = ConvexBody::unit_disc();
    let k = 1.0 / (PI * (1.5f64.powi(2) - 1.0));
    let m = DensityModel::Collar {
        p_plus: Profile::Constant { value: k },
        p_minus: Profile::Constant { value: 0.0 },
        width: 0.5,
        background: 0.0,
        half_width: 2.0,
        center: Point2::new(0.0, 0.0),
    };
    let dens = BoundaryDensity::new(m, &body).unwrap();
    assert!(matches!(MassSource::population(&body, &dens), Err(Error::Config(_))));
}

#[test]
fn min_volume_population_matches_concentric_radius() {
    let body = ConvexBody::unit_disc();
    let dens = BoundaryDensity::two_level_ratio(&body, 2.0, 2.0).unwrap();
    let c_in = match dens.model() {
        DensityModel::TwoLevel { c_in, .. } => *c_in,
        _ => unreachable!(),
    };
    let alpha = 0.5 * c_in * PI;
    let src = MassSource::population(&body, &dens).unwrap();
    let bounds = DiscBox { cx: [-0.5, 0.5], cy: [-0.5, 0.5], r: [0.0, 2.0] };
    let fit = min_volume_set(&src, alpha, bounds, GridSearch::default()).unwrap();
    // every disc of this radius inside K ties with the concentric one
    let r = (alpha / (PI * c_in)).sqrt();
    let d = fit.fit.disc;
    assert!((d.radius - r).abs() < 1e-12);
    assert!(d.center.norm() + d.radius <= 1.0 + 1e-12);
    assert!(fit.fit.mass >= alpha && fit.fit.mass - alpha < 1e-12);
    // no grid neighbour does better
    for (dx, dy) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
        let c = Point2::new(d.center.x + dx * fit.spacing[0], d.center.y + dy * fit.spacing[1]);
        if let Some(rr) = required_radius(&src, c, alpha, 2.0) {
            assert!(rr >= d.radius * (1.0 - 1e-12));
        }
    }
}

#[test]
fn min_volume_population_full_body_mass_is_concentric() {
    let body = ConvexBody::unit_disc();
    let dens = BoundaryDensity::two_level_ratio(&body, 2.0, 2.0).unwrap();
    let c_in = match dens.model() {
        DensityModel::TwoLevel { c_in, .. } => *c_in,
        _ => unreachable!(),
    };
    let src = MassSource::population(&body, &dens).unwrap();
    let bounds = DiscBox { cx: [-0.5, 0.5], cy: [-0.5, 0.5], r: [0.0, 2.0] };
    let fit = min_volume_set(&src, c_in * PI, bounds, GridSearch::default()).unwrap();
    assert_eq!(fit.fit.disc.center, Point2::new(0.0, 0.0));
    assert!((fit.fit.disc.radius - 1.0).abs() < 1e-12);
}

#[test]
fn min_volume_uniform_tiny_alpha() {
    let body = ConvexBody::unit_disc();
    let dens = BoundaryDensity::uniform(&body, 2.0).unwrap();
    let src = MassSource::population(&body, &dens).unwrap();
    let alpha = 0.01;
    let bounds = DiscBox { cx: [-0.5, 0.5], cy: [-0.5, 0.5], r: [0.0, 2.0] };
    let fit = min_volume_set(&src, alpha, bounds, GridSearch::default()).unwrap();
    assert!((fit.fit.disc.radius - (alpha * 16.0 / PI).sqrt()).abs() < 1e-9);
}

#[test]
fn min_volume_infeasible_or_flagged() {
    let body = ConvexBody::unit_disc();
    let dens = BoundaryDensity::uniform(&body, 2.0).unwrap();
    let src = MassSource::population(&body, &dens).unwrap();
    let bounds = DiscBox { cx: [-0.5, 0.5], cy: [-0.5, 0.5], r: [0.0, 1.0] };
    assert!(matches!(min_volume_set(&src, 0.999, bounds, GridSearch::default()), Err(Error::Infeasible { .. })));
    let wide = DiscBox { cx: [-0.5, 0.5], cy: [-0.5, 0.5], r: [0.0, 2.9] };
    let fit = min_volume_set(&src, 0.999, wide, GridSearch::default()).unwrap();
    assert!(fit.fit.mass >= 0.999);
}

#[test]
fn min_volume_sample_uses_order_statistic() {
    let body = ConvexBody::unit_disc();
    let dens = BoundaryDensity::uniform(&body, 2.0).unwrap();
    let pts = sample_ambient(&body, &dens, 20_000, &mut seeded(3));
    let src = MassSource::Sample { points: &pts };
    let bounds = DiscBox { cx: [-0.5, 0.5], cy: [-0.5, 0.5], r: [0.0, 2.0] };
    let fit = min_volume_set(&src, 0.1, bounds, GridSearch::default()).unwrap();
    assert!(fit.fit.mass >= 0.1);
    assert!((fit.fit.disc.radius - (0.1 * 16.0 / PI).sqrt()).abs() < 0.03);
}

#[test]
fn statement_b_full_region_is_standard_after_scaling() {
    let cfg = StatementBConfig {
        body: ConvexBody::unit_disc(),
        density: uniform_model(),
        n: 100_000,
        eps: 0.05,
        regions: vec![CylinderRegion::full(), CylinderRegion::upper(), CylinderRegion::lower()],
        reps: 500,
        master_seed: 7,
        ks_tol: 0.06,
        cov_tol: 0.05,
    };
    let r = statement_b_test(&cfg).unwrap();
    assert!((r.q[0] - 1.0).abs() < 1e-12);
    assert!(r.covariance_target[1][2].abs() < 1e-12);
    assert!(r.covariance_pass);
    assert!(r.ks_fail_fraction <= 1.0 / 3.0);
}

#[test]
fn statement_b_rejects_too_many_regions() {
    let cfg = StatementBConfig {
        body: ConvexBody::unit_disc(),
        density: uniform_model(),
        n: 1000,
        eps: 0.05,
        regions: vec![CylinderRegion::full(); 65],
        reps: 10,
        master_seed: 7,
        ks_tol: 0.06,
        cov_tol: 0.02,
    };
    assert!(matches!(statement_b_test(&cfg), Err(Error::Config(_))));
}

#[test]
fn sup_functional_singleton_grid() {
    let cfg = SupFunctionalConfig {
        body: ConvexBody::unit_disc(),
        density: uniform_model(),
        n: 100_000,
        eps: 0.05,
        regions: vec![CylinderRegion::full()],
        reps: 1000,
        draws: 1000,
        master_seed: 7,
    };
    let r = sup_functional_test(&cfg).unwrap();
    assert!(r.ks <= 0.08, "ks = {}", r.ks);
}

#[test]
fn gaussian_sup_against_itself() {
    let body = ConvexBody::unit_disc();
    let dens = BoundaryDensity::uniform(&body, 2.0).unwrap();
    let field = BrownianField::new(vec![CylinderRegion::upper(), CylinderRegion::lower()], &dens, &body, DEFAULT_JITTER)
        .unwrap();
    let a = sup_gaussian(&field, 1, 0, 1000).unwrap();
    let b = sup_gaussian(&field, 2, 0, 1000).unwrap();
    assert!(stats::ks_two_sample(&a, &b) <= 0.06);
}
