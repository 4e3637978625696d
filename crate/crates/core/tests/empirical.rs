use std::f64::consts::PI;

use lep_core::boundary_measure::{BoundaryDensity, CylinderRegion, DensityModel, Profile};
use lep_core::empirical::{
    psi_count, replicate, sample_conditional, sample_two_stage, z_stat, BrownianField, ExperimentConfig, ProcessFrame,
    Schedule, DEFAULT_JITTER,
};
use lep_core::rng::seeded;
use lep_core::{stats, ConvexBody, Error, Point2};

fn disc_uniform() -> (ConvexBody, BoundaryDensity) {
    let body = ConvexBody::unit_disc();
    (body.clone(), BoundaryDensity::uniform(&body, 2.0).unwrap())
}

#[test]
fn conditional_sample_examples() {
    let (body, dens) = disc_uniform();
    assert!(sample_conditional(&body, &dens, 0.1, 0, 1).unwrap().is_empty());
    let s = sample_conditional(&body, &dens, 0.1, 1_000_000, 5).unwrap();
    assert!(s.ambient.iter().all(|&z| body.in_neighborhood(0.1, z)));
    let frac = s.points.iter().filter(|c| c.s > 0.0).count() as f64 / 1e6;
    assert!((frac - 0.525).abs() <= 0.0015, "fraction {frac}");
}

#[test]
fn two_stage_counts() {
    let (body, dens) = disc_uniform();
    let n = 100_000u64;
    let a = PI * 0.05 / 4.0;
    let counts: Vec<f64> =
        (0..200).map(|i| sample_two_stage(&body, &dens, 0.05, n, 100 + i).unwrap().total_count as f64).collect();
    let se = (n as f64 * a * (1.0 - a) / 200.0).sqrt();
    assert!((stats::mean(&counts) - n as f64 * a).abs() <= 3.0 * se);
    let a1 = sample_two_stage(&body, &dens, 0.05, n, 9).unwrap();
    let a2 = sample_two_stage(&body, &dens, 0.05, n, 9).unwrap();
    assert_eq!(a1.points, a2.points);
}

#[test]
fn density_vanishing_on_the_collar_is_rejected() {
    let body = ConvexBody::unit_disc();
    let far = DensityModel::Collar {
        p_plus: Profile::Constant { value: 0.0 },
        p_minus: Profile::Constant { value: 0.0 },
        width: 0.5,
        background: 1.0 / (16.0 - PI * (1.5f64.powi(2) - 0.5f64.powi(2))),
        half_width: 2.0,
        center: Point2::new(0.0, 0.0),
    };
    assert!(matches!(BoundaryDensity::new(far, &body), Err(Error::InvalidDensity(_))));
}

#[test]
fn counts_and_z() {
    let (body, dens) = disc_uniform();
    let s = sample_two_stage(&body, &dens, 0.05, 10_000, 3).unwrap();
    assert_eq!(psi_count(&s, &CylinderRegion::empty()), 0);
    assert_eq!(psi_count(&s, &CylinderRegion::full()), s.total_count);
    assert!((z_stat(3, 100, 0.02, 0.04) - 0.5).abs() < 1e-15);
    let frame = ProcessFrame::new(&body, &dens, 10_000, 0.05, vec![CylinderRegion::empty()]).unwrap();
    assert_eq!(frame.evaluate(&s)[0], 0.0);
}

#[test]
fn full_region_variance_is_one_minus_a() {
    let cfg = ExperimentConfig {
        body: ConvexBody::unit_disc(),
        density: DensityModel::TwoLevel { c_in: 1.0 / 16.0, c_out: 1.0 / 16.0, half_width: 2.0, center: Point2::new(0.0, 0.0) },
        schedule: Schedule::single(100_000, 0.05),
        regions: vec![CylinderRegion::full()],
        reps: 1000,
        master_seed: 21,
    };
    let r = replicate(&cfg).unwrap();
    let st = &r.steps[0];
    let a = st.a;
    let var = st.summary.variance[0];
    // sample variance of 1000 draws has relative s.e. about sqrt(2/999)
    assert!((var - (1.0 - a)).abs() <= 3.0 * (1.0 - a) * (2.0f64 / 999.0).sqrt(), "var {var}");
    let sd = var.sqrt();
    assert!(st.summary.mean[0].abs() <= 3.0 * sd / 1000f64.sqrt());
}

#[test]
fn gaussian_field_examples() {
    let (body, dens) = disc_uniform();
    let f = BrownianField::new(vec![CylinderRegion::full()], &dens, &body, DEFAULT_JITTER).unwrap();
    assert!((f.covariance[(0, 0)] - 1.0).abs() < 1e-12);
    let up = CylinderRegion::upper();
    let nested = up.intersection(&lep_core::boundary_measure::region::theta_slab(0.0, 1.0));
    let f = BrownianField::new(vec![up, CylinderRegion::lower(), nested], &dens, &body, DEFAULT_JITTER).unwrap();
    assert!(f.covariance[(0, 1)].abs() < 1e-12);
    assert!((f.covariance[(0, 2)] - f.covariance[(2, 2)]).abs() < 1e-12);
    let mut rng = seeded(4);
    let draws: Vec<Vec<f64>> = (0..4000).map(|_| f.draw(&mut rng)).collect();
    let x: Vec<f64> = draws.iter().map(|d| d[0]).collect();
    let y: Vec<f64> = draws.iter().map(|d| d[1]).collect();
    assert!(stats::covariance(&x, &y).abs() < 0.03);
}
