//! Change-set statistics: counts in `K(eps) \ K` and `K \ K(eps)` and the
//! local log-likelihood `sum [1_{K(eps) \ K} - 1_{K \ K(eps)}] xi(Y_i)`.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Point2};
use crate::set_classes::{AmbientSet, SetValuedFamily};

/// Gaussian location family with a common scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMark {
    pub mean: f64,
    pub sd: f64,
}

impl GaussianMark {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        Normal::new(self.mean, self.sd).expect("validated scale").sample(rng)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeSetModel {
    pub body: ConvexBody,
    pub family: SetValuedFamily,
    /// Mark law off the set.
    pub p1: GaussianMark,
    /// Mark law on the set: `K` under the null, `K(eps)` under the alternative.
    pub p2: GaussianMark,
}

impl ChangeSetModel {
    pub fn new(body: ConvexBody, family: SetValuedFamily, p1: GaussianMark, p2: GaussianMark) -> Result<Self> {
        if !(p1.sd > 0.0) || p1.sd != p2.sd {
            return Err(Error::Config("mark laws need a common positive scale".into()));
        }
        Ok(Self { body, family, p1, p2 })
    }

    /// `xi(y) = log dP_2/dP_1 (y)`.
    pub fn xi(&self, y: f64) -> f64 {
        let s2 = self.p1.sd * self.p1.sd;
        ((y - self.p1.mean).powi(2) - (y - self.p2.mean).powi(2)) / (2.0 * s2)
    }

    /// The set `K(eps)` as an ambient set.
    pub fn k_eps(&self, eps: f64) -> Result<AmbientSet> {
        let el = self.family.element(&self.body, eps)?;
        Ok(AmbientSet::symmetric_difference(el.ambient(&self.body, eps), AmbientSet::Body(self.body.clone())))
    }
}

/// `(#{X_i in K(eps) \ K}, #{X_i in K \ K(eps)})`.
pub fn changeset_counts(points: &[Point2], k: &ConvexBody, k_eps: &AmbientSet) -> (u64, u64) {
    points.iter().fold((0, 0), |(add, rem), &z| {
        let (in_k, in_e) = (k.contains(z), k_eps.contains(z));
        (add + u64::from(in_e && !in_k), rem + u64::from(in_k && !in_e))
    })
}

/// `sum [1_{K(eps) \ K}(X_i) - 1_{K \ K(eps)}(X_i)] xi(Y_i)`.
pub fn changeset_loglik_with<F: Fn(f64) -> f64>(
    points: &[Point2],
    marks: &[f64],
    k: &ConvexBody,
    k_eps: &AmbientSet,
    xi: F,
) -> Result<f64> {
    if points.len() != marks.len() {
        return Err(Error::Config("every point needs a mark".into()));
    }
    Ok(points
        .iter()
        .zip(marks)
        .map(|(&z, &y)| {
            let (in_k, in_e) = (k.contains(z), k_eps.contains(z));
            if in_e && !in_k {
                xi(y)
            } else if in_k && !in_e {
                -xi(y)
            } else {
                0.0
            }
        })
        .sum())
}

pub fn changeset_loglik(points: &[Point2], marks: &[f64], model: &ChangeSetModel, eps: f64) -> Result<f64> {
    let k_eps = model.k_eps(eps)?;
    changeset_loglik_with(points, marks, &model.body, &k_eps, |y| model.xi(y))
}

/// Marks drawn from `p_in` on `set` and `p_out` elsewhere.
pub fn simulate_marks<R: Rng + ?Sized>(
    points: &[Point2],
    set: &AmbientSet,
    p_in: GaussianMark,
    p_out: GaussianMark,
    rng: &mut R,
) -> Vec<f64> {
    points.iter().map(|&z| if set.contains(z) { p_in.sample(rng) } else { p_out.sample(rng) }).collect()
}
