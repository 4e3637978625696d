//! Monte Carlo checks of the functional limit theorem for `v_n`.

use serde::{Deserialize, Serialize};

use crate::boundary_measure::{q_measure, BoundaryDensity, CylinderRegion, DensityModel};
use crate::empirical::{
    covariance_matrix, replicate, run_replications, two_stage_with, BrownianField, ExperimentConfig, ProcessFrame,
    Schedule, DEFAULT_JITTER,
};
use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::rng::seeded;
use crate::set_classes::{hausdorff_gamma_tabulated, ClassGrid};
use crate::stats;

fn default_table() -> usize {
    2048
}

/// Pairs `(B_n, B)` with `d(B_n, B) <= gamma_n` and `sup |v_n(B_n) - v_n(B)|` over them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatementAConfig {
    pub body: ConvexBody,
    pub density: DensityModel,
    pub schedule: Schedule,
    pub grid: ClassGrid,
    pub reps: usize,
    pub master_seed: u64,
    /// Fixed pairing tolerance; computed as the Hausdorff class distance when absent.
    #[serde(default)]
    pub gamma: Option<f64>,
    /// Theta midpoints used for the distance matrix.
    #[serde(default = "default_table")]
    pub table_resolution: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatementAStep {
    pub n: u64,
    pub eps: f64,
    pub gamma: f64,
    pub pairs: usize,
    pub values: Vec<f64>,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatementAReport {
    pub steps: Vec<StatementAStep>,
    pub medians_non_increasing: bool,
    /// Last median at most half the first.
    pub halved: bool,
}

pub fn statement_a_statistic(cfg: &StatementAConfig) -> Result<StatementAReport> {
    let body = &cfg.body;
    let dens = BoundaryDensity::new(cfg.density.clone(), body)?;
    let steps = cfg.schedule.validate(body)?;
    if cfg.reps == 0 {
        return Err(Error::Config("reps must be at least 1".into()));
    }
    let members = cfg.grid.members(body)?;
    let limits: Vec<CylinderRegion> = members.iter().map(|m| m.derivative(body)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (si, step) in steps.iter().enumerate() {
        let images: Vec<CylinderRegion> = members.iter().map(|m| m.tau_image(body, step.eps)).collect::<Result<_>>()?;
        let (gamma_h, d) = hausdorff_gamma_tabulated(&images, &limits, &dens, body, cfg.table_resolution)?;
        let gamma = cfg.gamma.unwrap_or(gamma_h);
        let pairs: Vec<(usize, usize)> = (0..images.len())
            .flat_map(|i| (0..limits.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| d[i][j] <= gamma)
            .collect();
        if pairs.is_empty() {
            return Err(Error::EmptyPairing);
        }
        let f_img = ProcessFrame::new(body, &dens, step.n, step.eps, images)?;
        let f_lim = ProcessFrame::new(body, &dens, step.n, step.eps, limits.clone())?;
        let values = run_replications(cfg.master_seed, si, cfg.reps, |_, seed| {
            let sample = two_stage_with(body, &dens, step.eps, step.n, seed, &mut seeded(seed))?;
            let (vi, vl) = (f_img.evaluate(&sample), f_lim.evaluate(&sample));
            Ok(pairs.iter().map(|&(i, j)| (vi[i] - vl[j]).abs()).fold(0.0, f64::max))
        })?;
        let median = stats::median(&values);
        out.push(StatementAStep { n: step.n, eps: step.eps, gamma, pairs: pairs.len(), values, median });
    }
    let medians: Vec<f64> = out.iter().map(|s| s.median).collect();
    let medians_non_increasing = medians.windows(2).all(|w| w[1] <= w[0]);
    let halved = medians.last().unwrap() <= &(0.5 * medians[0]);
    Ok(StatementAReport { steps: out, medians_non_increasing, halved })
}

fn default_ks_tol() -> f64 {
    0.06
}

fn default_cov_tol() -> f64 {
    0.02
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatementBConfig {
    pub body: ConvexBody,
    pub density: DensityModel,
    pub n: u64,
    pub eps: f64,
    pub regions: Vec<CylinderRegion>,
    pub reps: usize,
    pub master_seed: u64,
    #[serde(default = "default_ks_tol")]
    pub ks_tol: f64,
    #[serde(default = "default_cov_tol")]
    pub cov_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatementBReport {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    /// Targets `Q(B_j)`.
    pub q: Vec<f64>,
    pub ks: Vec<f64>,
    pub ks_pass: Vec<bool>,
    pub covariance: Vec<Vec<f64>>,
    /// Targets `Q(B_i cap B_j)`.
    pub covariance_target: Vec<Vec<f64>>,
    pub covariance_pass: bool,
    /// Share of regions failing the KS tolerance.
    pub ks_fail_fraction: f64,
    /// `values[rep][j]`.
    pub values: Vec<Vec<f64>>,
}

pub const MAX_STATEMENT_B_REGIONS: usize = 64;

pub fn statement_b_test(cfg: &StatementBConfig) -> Result<StatementBReport> {
    if cfg.regions.is_empty() || cfg.regions.len() > MAX_STATEMENT_B_REGIONS {
        return Err(Error::Config(format!("need 1..={MAX_STATEMENT_B_REGIONS} regions")));
    }
    let exp = ExperimentConfig {
        body: cfg.body.clone(),
        density: cfg.density.clone(),
        schedule: Schedule::single(cfg.n, cfg.eps),
        regions: cfg.regions.clone(),
        reps: cfg.reps,
        master_seed: cfg.master_seed,
    };
    let rep = replicate(&exp)?;
    let step = rep.steps.into_iter().next().expect("one step");
    let dens = BoundaryDensity::new(cfg.density.clone(), &cfg.body)?;
    let target = covariance_matrix(&cfg.regions, &dens, &cfg.body);
    let k = cfg.regions.len();
    let covariance_target: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| target[(i, j)]).collect()).collect();
    let covariance_pass = (0..k).all(|i| (0..k).all(|j| (step.summary.covariance[i][j] - target[(i, j)]).abs() <= cfg.cov_tol));
    let ks_pass: Vec<bool> = step.summary.ks.iter().map(|&d| d <= cfg.ks_tol).collect();
    let ks_fail_fraction = ks_pass.iter().filter(|p| !**p).count() as f64 / k as f64;
    Ok(StatementBReport {
        mean: step.summary.mean,
        variance: step.summary.variance,
        q: step.summary.q_limit,
        ks: step.summary.ks,
        ks_pass,
        covariance: step.summary.covariance,
        covariance_target,
        covariance_pass,
        ks_fail_fraction,
        values: step.values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupFunctionalConfig {
    pub body: ConvexBody,
    pub density: DensityModel,
    pub n: u64,
    pub eps: f64,
    pub regions: Vec<CylinderRegion>,
    pub reps: usize,
    /// Number of Gaussian draws.
    pub draws: usize,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupFunctionalReport {
    pub sup_vn: Vec<f64>,
    pub sup_w: Vec<f64>,
    pub ks: f64,
}

/// Stream index for the Gaussian draws, kept apart from the sampling streams.
const GAUSSIAN_STEP: usize = 1 << 20;

/// `sup_j |W(B_j)|` over `draws` independent draws.
pub fn sup_gaussian(field: &BrownianField, master_seed: u64, step: usize, draws: usize) -> Result<Vec<f64>> {
    run_replications(master_seed, step, draws, |_, seed| {
        Ok(field.draw(&mut seeded(seed)).iter().fold(0.0, |m: f64, v| m.max(v.abs())))
    })
}

pub fn sup_functional_test(cfg: &SupFunctionalConfig) -> Result<SupFunctionalReport> {
    let exp = ExperimentConfig {
        body: cfg.body.clone(),
        density: cfg.density.clone(),
        schedule: Schedule::single(cfg.n, cfg.eps),
        regions: cfg.regions.clone(),
        reps: cfg.reps,
        master_seed: cfg.master_seed,
    };
    let rep = replicate(&exp)?;
    let sup_vn: Vec<f64> =
        rep.steps[0].values.iter().map(|v| v.iter().fold(0.0, |m: f64, x| m.max(x.abs()))).collect();
    let dens = BoundaryDensity::new(cfg.density.clone(), &cfg.body)?;
    let field = BrownianField::new(cfg.regions.clone(), &dens, &cfg.body, DEFAULT_JITTER)?;
    let sup_w = sup_gaussian(&field, cfg.master_seed, GAUSSIAN_STEP, cfg.draws)?;
    let ks = stats::ks_two_sample(&sup_vn, &sup_w);
    Ok(SupFunctionalReport { sup_vn, sup_w, ks })
}

/// `Q(B)` for each region; convenience for reports.
pub fn limit_variances(regions: &[CylinderRegion], dens: &BoundaryDensity, body: &ConvexBody) -> Vec<f64> {
    regions.iter().map(|r| q_measure(r, dens, body)).collect()
}
