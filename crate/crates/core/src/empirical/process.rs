//! The counting process `Psi_n` and the local empirical processes
//! `z_n(A) = (Psi_n(A) - n P(A)) / sqrt(n a)` and `v_n(C) = z_n(tau^{-1} C)`.

use rayon::prelude::*;

use super::sampler::LocalSample;
use crate::boundary_measure::{collar_probability, neighborhood_mass, BoundaryDensity, CylinderRegion};
use crate::error::{Error, Result};
use crate::geometry::ConvexBody;

/// Number of sample points in the region.
pub fn psi_count(sample: &LocalSample, region: &CylinderRegion) -> u64 {
    sample.points.iter().zip(&sample.ambient).filter(|(c, z)| region.contains_point(**c, **z)).count() as u64
}

/// `(count - n p) / sqrt(n a)`.
pub fn z_stat(count: u64, n: u64, p: f64, a: f64) -> f64 {
    (count as f64 - n as f64 * p) / (n as f64 * a).sqrt()
}

/// Precomputed `a` and `P(tau^{-1} C)` for a list of regions at one `(n, eps)`.
#[derive(Debug, Clone)]
pub struct ProcessFrame {
    pub n: u64,
    pub eps: f64,
    pub a: f64,
    pub regions: Vec<CylinderRegion>,
    /// `P(tau_eps^{-1} C_j)`.
    pub probs: Vec<f64>,
}

impl ProcessFrame {
    pub fn new(body: &ConvexBody, dens: &BoundaryDensity, n: u64, eps: f64, regions: Vec<CylinderRegion>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("sample size n must be at least 1".into()));
        }
        let a = neighborhood_mass(body, dens, eps)?;
        if !(a > 0.0) {
            return Err(Error::InvalidDensity("P(V_eps) is zero".into()));
        }
        let probs = regions.par_iter().map(|r| collar_probability(r, dens, body, eps)).collect::<Result<Vec<_>>>()?;
        Ok(Self { n, eps, a, regions, probs })
    }

    /// `Q_n(C_j)`.
    pub fn qn(&self, j: usize) -> f64 {
        self.probs[j] / self.a
    }

    /// `v_n(C_j)` for every region.
    pub fn evaluate(&self, sample: &LocalSample) -> Vec<f64> {
        self.regions
            .iter()
            .zip(&self.probs)
            .map(|(r, &p)| z_stat(psi_count(sample, r), self.n, p, self.a))
            .collect()
    }

    /// `v_n` from precomputed counts.
    pub fn from_counts(&self, counts: &[u64]) -> Vec<f64> {
        counts.iter().zip(&self.probs).map(|(&c, &p)| z_stat(c, self.n, p, self.a)).collect()
    }
}

/// `v_n(C)` for a single region.
pub fn v_stat(sample: &LocalSample, region: &CylinderRegion, dens: &BoundaryDensity, body: &ConvexBody) -> Result<f64> {
    let frame = ProcessFrame::new(body, dens, sample.n_nominal, sample.eps, vec![region.clone()])?;
    Ok(frame.evaluate(sample)[0])
}
