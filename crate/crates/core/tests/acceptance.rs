//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//!
//! Every Monte Carlo criterion uses the single master seed below.

use std::f64::consts::PI;
use std::time::Instant;

use lep_core::boundary_measure::region::theta_slab;
use lep_core::boundary_measure::{
    measure_derivative_check, tv_distance, BoundaryDensity, BoundaryFn, CylinderRegion, DensityModel, DEFAULT_RASTER,
};
use lep_core::empirical::{replicate, sample_ambient, BrownianField, ExperimentConfig, Schedule, DEFAULT_JITTER};
use lep_core::rng::{derive_seed, seeded};
use lep_core::set_classes::brackets::brackets_member;
use lep_core::set_classes::{
    bracket_cover, shatter_check, BracketFamily, ClassGrid, ParamRange, SetValuedFamily, ShatterClass,
};
use lep_core::stats;
use lep_core::verify::{
    excess_mass, lens_area, statement_a_statistic, sup_gaussian, DiscBox, GridSearch, MassSource, StatementAConfig,
};
use lep_core::{ConvexBody, CylinderPoint, Point2};
use rand::Rng;

const SEED: u64 = 7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn disc_uniform() -> (ConvexBody, BoundaryDensity) {
    let body = ConvexBody::unit_disc();
    let dens = BoundaryDensity::uniform(&body, 2.0).unwrap();
    (body, dens)
}

fn uniform_model() -> DensityModel {
    DensityModel::TwoLevel { c_in: 1.0 / 16.0, c_out: 1.0 / 16.0, half_width: 2.0, center: Point2::new(0.0, 0.0) }
}

fn tv_law() -> Outcome {
    let (body, dens) = disc_uniform();
    let mut pass = true;
    let mut parts = Vec::new();
    for eps in [0.2, 0.1, 0.05] {
        let tv = tv_distance(&dens, &body, eps, DEFAULT_RASTER).unwrap();
        pass &= (tv - eps / 4.0).abs() <= 2e-3;
        parts.push(format!("eps={eps}: tv={tv:.6} target={:.6}", eps / 4.0));
    }
    outcome(pass, parts.join("; "))
}

/// Signed distance to the unit square, written out directly.
fn square_signed_distance(x: f64, y: f64) -> f64 {
    let dx = (x - 0.5).abs() - 0.5;
    let dy = (y - 0.5).abs() - 0.5;
    if dx <= 0.0 && dy <= 0.0 {
        dx.max(dy)
    } else {
        (dx.max(0.0).powi(2) + dy.max(0.0).powi(2)).sqrt()
    }
}

fn steiner_areas() -> Outcome {
    let disc = ConvexBody::unit_disc();
    let mut pass = true;
    let mut parts = Vec::new();
    for eps in [0.3, 0.1, 0.01] {
        let v = disc.neighborhood_area(eps).unwrap();
        pass &= (v - 4.0 * PI * eps).abs() <= 1e-9;
        parts.push(format!("disc eps={eps}: err={:.1e}", (v - 4.0 * PI * eps).abs()));
    }
    let sq = ConvexBody::unit_square();
    let v = sq.neighborhood_area(0.1).unwrap();
    let mut rng = seeded(derive_seed(SEED, 2));
    let n = 10_000_000u64;
    let (lo, w) = (-0.2, 1.4);
    let hits = (0..n)
        .filter(|_| {
            let (x, y) = (lo + w * rng.random::<f64>(), lo + w * rng.random::<f64>());
            square_signed_distance(x, y).abs() <= 0.1
        })
        .count();
    let mc = hits as f64 / n as f64 * w * w;
    pass &= (v - mc).abs() <= 0.01 * mc && (v - 0.79142).abs() < 1e-5;
    parts.push(format!("square eps=0.1: area={v:.6} mc={mc:.6}"));
    outcome(pass, parts.join("; "))
}

fn differentiation() -> Outcome {
    let (body, dens) = disc_uniform();
    let fam = SetValuedFamily::shifted_disc(0.5);
    let b = CylinderRegion::Band { f: BoundaryFn::EllipseF { alpha: 0.0, a: 0.0, b: 0.0, c: 0.0, d: 0.5, scale: 1.0 } };
    let grid = [0.1, 0.05, 0.025, 0.0125];
    let rows = measure_derivative_check(|e| fam.tau_image(&body, e), &b, &dens, &body, &grid).unwrap();
    let d: Vec<f64> = rows.iter().map(|r| r.deficit).collect();
    let decreasing = d.windows(2).all(|w| w[1] < w[0]) && d[3] < d[0] / 4.0;
    let row = &measure_derivative_check(|e| fam.tau_image(&body, e), &b, &dens, &body, &[0.01]).unwrap()[0];
    let rel = (row.ratio - row.mp_b).abs() / row.mp_b;
    // Independent value: uniform density times the area of the symmetric difference of two unit discs.
    let c = 1.0 / 16.0;
    let exact = c * 2.0 * (PI - lens_area(Point2::new(0.0, 0.0), 1.0, Point2::new(0.005, 0.0), 1.0)) / 0.01;
    let pass = decreasing && rel <= 0.02 && (row.ratio - exact).abs() < 1e-6 && (row.mp_b - 2.0 * c).abs() < 1e-8;
    outcome(
        pass,
        format!(
            "deficits={:?}; ratio(0.01)={:.6} exact={exact:.6} M_p(B)={:.6} rel={rel:.4}",
            d.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>(),
            row.ratio,
            row.mp_b
        ),
    )
}

fn clt_regions() -> Vec<CylinderRegion> {
    vec![CylinderRegion::upper(), theta_slab(0.0, PI)]
}

fn clt_run() -> lep_core::empirical::StepReport {
    let cfg = ExperimentConfig {
        body: ConvexBody::unit_disc(),
        density: uniform_model(),
        schedule: Schedule::single(100_000, 0.05),
        regions: clt_regions(),
        reps: 1000,
        master_seed: SEED,
    };
    replicate(&cfg).unwrap().steps.remove(0)
}

fn statement_b_marginal(step: &lep_core::empirical::StepReport) -> Outcome {
    let col: Vec<f64> = step.values.iter().map(|v| v[0]).collect();
    let (m, v) = (stats::mean(&col), stats::variance(&col));
    let q = step.summary.q_limit[0];
    let ks = stats::ks_normal(&col, 0.5);
    let pass = m.abs() <= 0.05 && (v - 0.5).abs() <= 0.05 * 0.5 && ks <= 0.06 && (q - 0.5).abs() < 1e-12;
    outcome(pass, format!("mean={m:.4} var={v:.4} (target 0.5, 5%) ks={ks:.4}"))
}

fn covariance_structure(step: &lep_core::empirical::StepReport) -> Outcome {
    let (body, dens) = disc_uniform();
    let r = clt_regions();
    let target = lep_core::boundary_measure::q_measure(&r[0].intersection(&r[1]), &dens, &body);
    let a: Vec<f64> = step.values.iter().map(|v| v[0]).collect();
    let b: Vec<f64> = step.values.iter().map(|v| v[1]).collect();
    let cov = stats::covariance(&a, &b);
    outcome((cov - target).abs() <= 0.02, format!("cov={cov:.4} Q(B cap B')={target:.4}"))
}

fn statement_a() -> Outcome {
    let r = ParamRange::new(-0.3, 0.3, 7);
    let cfg = StatementAConfig {
        body: ConvexBody::unit_disc(),
        density: uniform_model(),
        schedule: Schedule::cube_root(0.5, vec![1_000, 10_000, 100_000]),
        grid: ClassGrid::Ellipse { e1: r, e2: r, h1: r, h2: ParamRange::fixed(0.0), alpha: ParamRange::fixed(0.0) },
        reps: 200,
        master_seed: SEED,
        gamma: None,
        table_resolution: 2048,
    };
    let rep = statement_a_statistic(&cfg).unwrap();
    let detail = rep
        .steps
        .iter()
        .map(|s| format!("n={}: gamma={:.4} pairs={} median={:.4}", s.n, s.gamma, s.pairs, s.median))
        .collect::<Vec<_>>()
        .join("; ");
    outcome(rep.medians_non_increasing && rep.halved, detail)
}

/// 4 theta quarters x 4 s-bands.
fn sup_grid() -> Vec<CylinderRegion> {
    let mut v = Vec::new();
    for k in 0..4 {
        let t = [k as f64 * PI / 2.0, (k + 1) as f64 * PI / 2.0];
        for s in [[0.0, 1.0], [-1.0, 0.0], [-0.5, 0.5], [-1.0, 1.0]] {
            v.push(CylinderRegion::rect(vec![t], vec![s]).unwrap());
        }
    }
    v
}

fn continuous_mapping() -> Outcome {
    let (body, dens) = disc_uniform();
    let regions = sup_grid();
    let cfg = ExperimentConfig {
        body: body.clone(),
        density: uniform_model(),
        schedule: Schedule::single(100_000, 0.05),
        regions: regions.clone(),
        reps: 1000,
        master_seed: SEED,
    };
    let rep = replicate(&cfg).unwrap();
    let sup_vn: Vec<f64> = rep.steps[0].values.iter().map(|v| v.iter().fold(0.0, |m: f64, x| m.max(x.abs()))).collect();
    let field = BrownianField::new(regions, &dens, &body, DEFAULT_JITTER).unwrap();
    let sup_w = sup_gaussian(&field, SEED, 1 << 20, 1000).unwrap();
    let ks = stats::ks_two_sample(&sup_vn, &sup_w);
    outcome(
        ks <= 0.08,
        format!("ks={ks:.4}; median sup|v_n|={:.4} sup|W|={:.4}", stats::median(&sup_vn), stats::median(&sup_w)),
    )
}

fn brownian_sampler() -> Outcome {
    let (body, dens) = disc_uniform();
    let q = PI / 2.0;
    let mut regions: Vec<CylinderRegion> =
        (0..4).map(|k| CylinderRegion::rect(vec![[k as f64 * q, (k + 1) as f64 * q]], vec![[0.0, 1.0]]).unwrap()).collect();
    regions.push(CylinderRegion::rect(vec![[0.0, PI]], vec![[-0.5, 0.5]]).unwrap());
    regions.push(CylinderRegion::rect(vec![[q, 3.0 * q]], vec![[0.0, 1.0]]).unwrap());
    regions.push(CylinderRegion::rect(vec![[0.0, 2.0 * PI]], vec![[0.5, 1.0]]).unwrap());
    regions.push(CylinderRegion::rect(vec![[PI, 2.0 * PI]], vec![[-1.0, 0.0]]).unwrap());
    let field = BrownianField::new(regions, &dens, &body, DEFAULT_JITTER).unwrap();
    let mut rng = seeded(derive_seed(SEED, 8));
    let draws: Vec<Vec<f64>> = (0..5000).map(|_| field.draw(&mut rng)).collect();
    let k = field.dim();
    let mut worst: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            let xi: Vec<f64> = draws.iter().map(|d| d[i]).collect();
            let xj: Vec<f64> = draws.iter().map(|d| d[j]).collect();
            worst = worst.max((stats::covariance(&xi, &xj) - field.covariance[(i, j)]).abs());
        }
    }
    let qmax = (0..k).map(|i| field.covariance[(i, i)]).fold(0.0, f64::max);
    outcome(worst <= 0.02, format!("max |cov - Q| = {worst:.4} over {k}x{k}; max Q(B)={qmax:.3}"))
}

fn shattering() -> Outcome {
    let pts = |s: &[f64]| -> Vec<CylinderPoint> {
        s.iter().enumerate().map(|(i, &s)| CylinderPoint::new(0.7 * i as f64, s)).collect()
    };
    let four = shatter_check(&ShatterClass::SBand, &pts(&[0.6, -0.7, 0.1, -0.2])).unwrap();
    let five = shatter_check(&ShatterClass::SBand, &pts(&[-0.8, -0.4, 0.0, 0.4, 0.8])).unwrap();
    let alternating = matches!(five.missing, Some(0b10101) | Some(0b01010));
    outcome(
        four.shattered && !five.shattered && alternating,
        format!("4 points shattered={}; 5 points shattered={} missing={:?}", four.shattered, five.shattered, five.missing),
    )
}

fn bracketing() -> Outcome {
    let (body, dens) = disc_uniform();
    let set = bracket_cover(&BracketFamily::IntervalBands, 0.5, &dens, &body, 0.05).unwrap();
    let mut rng = seeded(derive_seed(SEED, 10));
    let nested = set.check_nested(&body, 2000, &mut rng);
    let sized = set.brackets.iter().all(|b| b.size <= 0.5);
    let probes: Vec<(f64, f64)> =
        (0..400).map(|_| (rng.random::<f64>() * body.perimeter(), rng.random::<f64>() * 2.0 - 1.0)).collect();
    let mut covered = 0;
    for _ in 0..1000 {
        let mut p = [0.0; 4];
        for x in &mut p {
            *x = rng.random::<f64>() * 2.0 - 1.0;
        }
        p.sort_by(f64::total_cmp);
        let member = CylinderRegion::sband(vec![[p[0], p[1]], [p[2], p[3]]]).unwrap();
        if let Some(i) = set.locate_bands(p) {
            if brackets_member(&set.brackets[i], &member, &probes) {
                covered += 1;
            }
        }
    }
    let pass = nested && sized && covered == 1000 && set.count <= 6561;
    outcome(pass, format!("count={} nested={nested} all sizes<=0.5: {sized} covered={covered}/1000", set.count))
}

fn excess_mass_recovery() -> Outcome {
    let body = ConvexBody::unit_disc();
    let dens = BoundaryDensity::two_level_ratio(&body, 2.0, 2.0).unwrap();
    let (c_in, c_out) = match dens.model() {
        DensityModel::TwoLevel { c_in, c_out, .. } => (*c_in, *c_out),
        _ => unreachable!(),
    };
    let lambda = 0.5 * (c_in + c_out);
    let bounds = DiscBox { cx: [-0.5, 0.5], cy: [-0.5, 0.5], r: [0.5, 1.5] };
    let pop = excess_mass(&MassSource::population(&body, &dens).unwrap(), lambda, bounds, GridSearch::default()).unwrap();
    let exact = pop.disc.center == Point2::new(0.0, 0.0) && pop.disc.radius == 1.0;
    let mut ok = 0;
    for i in 0..20u64 {
        let mut rng = seeded(derive_seed(SEED, 1100 + i));
        let pts = sample_ambient(&body, &dens, 100_000, &mut rng);
        let fit = excess_mass(&MassSource::Sample { points: &pts }, lambda, bounds, GridSearch::default()).unwrap();
        let d = fit.disc;
        if d.center.x.abs() <= 0.05 && d.center.y.abs() <= 0.05 && (d.radius - 1.0).abs() <= 0.05 {
            ok += 1;
        }
    }
    outcome(exact && ok >= 18, format!("population fit={:?}; sample recoveries {ok}/20", pop.disc))
}

fn main() {
    let mut failed = 0;
    let mut report = |id: usize, name: &str, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        let status = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("{status} [{id:>2}] {name} ({:.1}s): {}", t.elapsed().as_secs_f64(), o.detail);
    };
    report(1, "disc TV law", &tv_law);
    report(2, "Steiner areas", &steiner_areas);
    report(3, "differentiation in measure", &differentiation);
    let t = Instant::now();
    let clt = clt_run();
    let shared = t.elapsed().as_secs_f64();
    println!("     (1000 replications for criteria 4 and 5 took {shared:.1}s)");
    report(4, "statement (b) marginal", &|| statement_b_marginal(&clt));
    report(5, "covariance structure", &|| covariance_structure(&clt));
    report(6, "statement (a)", &statement_a);
    report(7, "continuous mapping", &continuous_mapping);
    report(8, "Brownian sampler", &brownian_sampler);
    report(9, "VC shattering", &shattering);
    report(10, "bracketing", &bracketing);
    report(11, "excess mass recovery", &excess_mass_recovery);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
