//! Replication harness: independent seeded runs, reduced in replication order.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::process::ProcessFrame;
use super::sampler::two_stage_with;
use crate::boundary_measure::{q_measure, BoundaryDensity, CylinderRegion, DensityModel};
use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::rng::{derive_seed, seeded};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleStep {
    pub n: u64,
    pub eps: f64,
}

/// The sequence `(n, eps_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Schedule {
    /// `eps_n = eps0 * n^(-beta)`.
    Power { eps0: f64, beta: f64, n: Vec<u64> },
    Explicit { steps: Vec<ScheduleStep> },
}

impl Schedule {
    pub fn cube_root(eps0: f64, n: Vec<u64>) -> Self {
        Schedule::Power { eps0, beta: 1.0 / 3.0, n }
    }

    pub fn single(n: u64, eps: f64) -> Self {
        Schedule::Explicit { steps: vec![ScheduleStep { n, eps }] }
    }

    pub fn steps(&self) -> Vec<ScheduleStep> {
        match self {
            Schedule::Power { eps0, beta, n } => {
                n.iter().map(|&n| ScheduleStep { n, eps: eps0 * (n as f64).powf(-beta) }).collect()
            }
            Schedule::Explicit { steps } => steps.clone(),
        }
    }

    pub fn validate(&self, body: &ConvexBody) -> Result<Vec<ScheduleStep>> {
        if let Schedule::Power { beta, .. } = self {
            if !(*beta > 0.0 && *beta < 1.0) {
                return Err(Error::InvalidSchedule(format!("beta = {beta} must lie in (0, 1)")));
            }
        }
        let steps = self.steps();
        if steps.is_empty() {
            return Err(Error::InvalidSchedule("schedule is empty".into()));
        }
        for s in &steps {
            if s.n == 0 || body.check_eps(s.eps).is_err() {
                return Err(Error::InvalidSchedule(format!(
                    "step (n = {}, eps = {}) needs n >= 1 and eps < {}",
                    s.n,
                    s.eps,
                    body.inradius()
                )));
            }
        }
        if steps.windows(2).any(|w| w[1].n as f64 * w[1].eps <= w[0].n as f64 * w[0].eps) {
            return Err(Error::InvalidSchedule("n * eps_n must increase along the schedule".into()));
        }
        Ok(steps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub body: ConvexBody,
    pub density: DensityModel,
    pub schedule: Schedule,
    pub regions: Vec<CylinderRegion>,
    pub reps: usize,
    pub master_seed: u64,
}

/// Seed of replication `rep` at schedule step `step`.
pub fn replication_seed(master: u64, step: usize, rep: usize) -> u64 {
    derive_seed(master, ((step as u64) << 32) | rep as u64)
}

/// Runs `f(rep, seed)` for every replication, in parallel, returning results in index order.
pub fn run_replications<T, F>(master: u64, step: usize, reps: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize, u64) -> Result<T> + Sync,
{
    (0..reps).into_par_iter().map(|r| f(r, replication_seed(master, step, r))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    /// Limit variances `Q(C_j)`.
    pub q_limit: Vec<f64>,
    /// `Q_n(C_j)`.
    pub qn: Vec<f64>,
    /// Exact finite-n variances `P(1 - P) / a` with `P = P(tau^{-1} C_j)`.
    pub var_exact: Vec<f64>,
    /// KS distance of the `v_n(C_j)` values to `Normal(0, Q(C_j))`.
    pub ks: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub n: u64,
    pub eps: f64,
    pub a: f64,
    pub seeds: Vec<u64>,
    /// `N = Psi_n(V_eps)` per replication.
    pub local_counts: Vec<u64>,
    /// `values[rep][j] = v_n(C_j)`.
    pub values: Vec<Vec<f64>>,
    pub summary: StepSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationReport {
    pub config: ExperimentConfig,
    pub master_seed: u64,
    pub steps: Vec<StepReport>,
}

pub fn replicate(cfg: &ExperimentConfig) -> Result<ReplicationReport> {
    if cfg.reps == 0 {
        return Err(Error::Config("reps must be at least 1".into()));
    }
    if cfg.regions.is_empty() {
        return Err(Error::Config("no regions to evaluate".into()));
    }
    let body = &cfg.body;
    let dens = BoundaryDensity::new(cfg.density.clone(), body)?;
    let steps = cfg.schedule.validate(body)?;
    let q_limit: Vec<f64> = cfg.regions.iter().map(|r| q_measure(r, &dens, body)).collect();
    let mut out = Vec::with_capacity(steps.len());
    for (si, step) in steps.iter().enumerate() {
        let frame = ProcessFrame::new(body, &dens, step.n, step.eps, cfg.regions.clone())?;
        let runs = run_replications(cfg.master_seed, si, cfg.reps, |_, seed| {
            let sample = two_stage_with(body, &dens, step.eps, step.n, seed, &mut seeded(seed))?;
            Ok((seed, sample.total_count, frame.evaluate(&sample)))
        })?;
        let seeds = runs.iter().map(|r| r.0).collect();
        let local_counts = runs.iter().map(|r| r.1).collect();
        let values: Vec<Vec<f64>> = runs.into_iter().map(|r| r.2).collect();
        let summary = summarize(&values, &frame, &q_limit);
        out.push(StepReport { n: step.n, eps: step.eps, a: frame.a, seeds, local_counts, values, summary });
    }
    Ok(ReplicationReport { config: cfg.clone(), master_seed: cfg.master_seed, steps: out })
}

fn summarize(values: &[Vec<f64>], frame: &ProcessFrame, q_limit: &[f64]) -> StepSummary {
    let k = frame.regions.len();
    let cols: Vec<Vec<f64>> = (0..k).map(|j| values.iter().map(|v| v[j]).collect()).collect();
    let covariance = (0..k).map(|i| (0..k).map(|j| stats::covariance(&cols[i], &cols[j])).collect()).collect();
    StepSummary {
        mean: cols.iter().map(|c| stats::mean(c)).collect(),
        variance: cols.iter().map(|c| stats::variance(c)).collect(),
        covariance,
        q_limit: q_limit.to_vec(),
        qn: (0..k).map(|j| frame.qn(j)).collect(),
        var_exact: frame.probs.iter().map(|&p| p * (1.0 - p) / frame.a).collect(),
        ks: cols.iter().zip(q_limit).map(|(c, &q)| if q > 0.0 { stats::ks_normal(c, q) } else { f64::NAN }).collect(),
    }
}

impl ReplicationReport {
    /// One row per (step, replication): `step,n,eps,rep,seed,N,v_0,...`.
    pub fn to_csv(&self) -> String {
        let k = self.config.regions.len();
        let mut s = String::from("step,n,eps,rep,seed,N");
        for j in 0..k {
            let _ = write!(s, ",v_{j}");
        }
        s.push('\n');
        for (si, st) in self.steps.iter().enumerate() {
            for (r, vals) in st.values.iter().enumerate() {
                let _ = write!(s, "{si},{},{},{r},{},{}", st.n, st.eps, st.seeds[r], st.local_counts[r]);
                for v in vals {
                    let _ = write!(s, ",{v}");
                }
                s.push('\n');
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(reps: usize) -> ExperimentConfig {
        ExperimentConfig {
            body: ConvexBody::unit_disc(),
            density: DensityModel::TwoLevel {
                c_in: 1.0 / 16.0,
                c_out: 1.0 / 16.0,
                half_width: 2.0,
                center: crate::geometry::Point2::new(0.0, 0.0),
            },
            schedule: Schedule::single(10_000, 0.05),
            regions: vec![CylinderRegion::upper(), CylinderRegion::full()],
            reps,
            master_seed: 11,
        }
    }

    #[test]
    fn single_rep_and_reproducible() {
        let a = replicate(&cfg(1)).unwrap();
        assert_eq!(a.steps[0].values.len(), 1);
        let b = replicate(&cfg(20)).unwrap();
        let c = replicate(&cfg(20)).unwrap();
        assert_eq!(serde_json::to_string(&b).unwrap(), serde_json::to_string(&c).unwrap());
        assert_eq!(b.steps[0].values[0], a.steps[0].values[0]);
        assert_eq!(b.to_csv().lines().count(), 21);
    }

    #[test]
    fn schedule_validation() {
        let body = ConvexBody::unit_disc();
        assert!(Schedule::cube_root(0.5, vec![1000, 10_000, 100_000]).validate(&body).is_ok());
        assert!(matches!(Schedule::single(100, 1.5).validate(&body), Err(Error::InvalidSchedule(_))));
        let bad = Schedule::Explicit { steps: vec![ScheduleStep { n: 1000, eps: 0.1 }, ScheduleStep { n: 1001, eps: 0.05 }] };
        assert!(matches!(bad.validate(&body), Err(Error::InvalidSchedule(_))));
    }
}
