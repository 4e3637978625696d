//! The limiting set-indexed Brownian motion `W` with `E W(B) W(B') = Q(B cap B')`.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary_measure::{q_measure, BoundaryDensity, CylinderRegion};
use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::rng::seeded;

pub const DEFAULT_JITTER: f64 = 1e-10;
pub const MAX_REGIONS: usize = 256;
const JITTER_ESCALATIONS: usize = 3;

/// One draw of `W` on a list of regions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianDraw {
    pub regions: Vec<CylinderRegion>,
    pub values: Vec<f64>,
    /// Row-major `Q(B_i cap B_j)`.
    pub covariance: Vec<Vec<f64>>,
}

/// Factorised covariance of `W` on fixed regions; draws are cheap afterwards.
#[derive(Debug, Clone)]
pub struct BrownianField {
    pub regions: Vec<CylinderRegion>,
    pub covariance: DMatrix<f64>,
    factor: DMatrix<f64>,
    /// Diagonal jitter that made the factorisation succeed.
    pub jitter_used: f64,
}

/// `Q(B_i cap B_j)` for all pairs.
pub fn covariance_matrix(regions: &[CylinderRegion], dens: &BoundaryDensity, body: &ConvexBody) -> DMatrix<f64> {
    let k = regions.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
    let vals: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            if i == j {
                q_measure(&regions[i], dens, body)
            } else {
                q_measure(&regions[i].intersection(&regions[j]), dens, body)
            }
        })
        .collect();
    let mut m = DMatrix::zeros(k, k);
    for (&(i, j), &v) in pairs.iter().zip(&vals) {
        m[(i, j)] = v;
        m[(j, i)] = v;
    }
    m
}

impl BrownianField {
    pub fn new(regions: Vec<CylinderRegion>, dens: &BoundaryDensity, body: &ConvexBody, jitter: f64) -> Result<Self> {
        if regions.is_empty() || regions.len() > MAX_REGIONS {
            return Err(Error::InvalidRegion(format!("need 1..={MAX_REGIONS} regions, got {}", regions.len())));
        }
        let covariance = covariance_matrix(&regions, dens, body);
        Self::from_covariance(regions, covariance, jitter)
    }

    pub fn from_covariance(regions: Vec<CylinderRegion>, covariance: DMatrix<f64>, jitter: f64) -> Result<Self> {
        let k = covariance.nrows();
        let mut j = jitter;
        for _ in 0..=JITTER_ESCALATIONS {
            let m = &covariance + DMatrix::identity(k, k) * j;
            if let Some(ch) = Cholesky::new(m) {
                return Ok(Self { regions, covariance, factor: ch.l(), jitter_used: j });
            }
            j *= 10.0;
        }
        Err(Error::CovarianceNotPsd { jitter: j / 10.0 })
    }

    pub fn dim(&self) -> usize {
        self.covariance.nrows()
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let z = DVector::from_iterator(self.dim(), (0..self.dim()).map(|_| rng.sample::<f64, _>(StandardNormal)));
        (&self.factor * z).iter().copied().collect()
    }
}

/// A single draw of `W` on the regions.
pub fn brownian_field(
    regions: Vec<CylinderRegion>,
    dens: &BoundaryDensity,
    body: &ConvexBody,
    seed: u64,
    jitter: f64,
) -> Result<GaussianDraw> {
    let field = BrownianField::new(regions, dens, body, jitter)?;
    let values = field.draw(&mut seeded(seed));
    let k = field.dim();
    let covariance = (0..k).map(|i| (0..k).map(|j| field.covariance[(i, j)]).collect()).collect();
    Ok(GaussianDraw { regions: field.regions, values, covariance })
}
