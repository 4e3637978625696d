//! Draws from `P` and from the conditional law `P_eps = P( . | V_eps)`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::boundary_measure::{neighborhood_mass, BoundaryDensity, NormalSegments};
use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, CylinderPoint, Point2};
use crate::rng::seeded;

/// Points of one sample that fall in `V_eps`, in cylinder and ambient coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalSample {
    pub eps: f64,
    /// The nominal sample size `n`.
    pub n_nominal: u64,
    /// `N = Psi_n(V_eps)`.
    pub total_count: u64,
    pub points: Vec<CylinderPoint>,
    pub ambient: Vec<Point2>,
    pub seed: u64,
}

impl LocalSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn segment_value(segs: &NormalSegments, s: f64) -> f64 {
    segs.iter().find(|(lo, hi, _)| s >= *lo && s <= *hi).map_or(0.0, |seg| seg.2)
}

/// Exact sampler for `P_eps` by rejection from the magnified collar.
pub struct ConditionalSampler<'a> {
    body: &'a ConvexBody,
    dens: &'a BoundaryDensity,
    eps: f64,
    p_max: f64,
    /// Probability of proposing from the edge strips (polygons).
    strip_share: f64,
}

impl<'a> ConditionalSampler<'a> {
    pub fn new(body: &'a ConvexBody, dens: &'a BoundaryDensity, eps: f64) -> Result<Self> {
        dens.check_eps(body, eps)?;
        let p_max = dens.max_density();
        if !(p_max > 0.0) {
            return Err(Error::InvalidDensity("density vanishes everywhere".into()));
        }
        let strip = 2.0 * eps * body.perimeter();
        let strip_share = if body.is_disc() { 1.0 } else { strip / (strip + PI * eps * eps) };
        Ok(Self { body, dens, eps, p_max, strip_share })
    }

    /// One draw as `(cylinder point, ambient point)`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (CylinderPoint, Point2) {
        let (body, eps) = (self.body, self.eps);
        let period = body.perimeter();
        loop {
            if body.is_disc() {
                let theta = rng.random::<f64>() * period;
                let s = rng.random::<f64>() * 2.0 - 1.0;
                let j_max = body.jacobian(eps, theta, 1.0);
                let w = segment_value(&self.dens.normal_segments(body, theta, eps), s) * body.jacobian(eps, theta, s);
                if rng.random::<f64>() * self.p_max * j_max < w {
                    let z = body.unmagnify(eps, CylinderPoint::new(theta, s)).expect("disc normals exist");
                    return (CylinderPoint::new(body.normalize_theta(theta), s), z);
                }
            } else if rng.random::<f64>() < self.strip_share {
                let theta = rng.random::<f64>() * period;
                let s = rng.random::<f64>() * 2.0 - 1.0;
                if s < body.s_floor(eps, theta) {
                    continue;
                }
                let w = segment_value(&self.dens.normal_segments(body, theta, eps), s);
                if rng.random::<f64>() * self.p_max < w {
                    if let Ok(z) = body.unmagnify(eps, CylinderPoint::new(theta, s)) {
                        return (CylinderPoint::new(body.normalize_theta(theta), s), z);
                    }
                }
            } else {
                let mut u = rng.random::<f64>() * 2.0 * PI;
                let corners = body.corners();
                let mut k = 0;
                while k + 1 < corners.len() && u >= corners[k].exterior_angle {
                    u -= corners[k].exterior_angle;
                    k += 1;
                }
                let c = &corners[k];
                let s = rng.random::<f64>().sqrt();
                let phi = c.normal_angle + rng.random::<f64>() * c.exterior_angle;
                let w = segment_value(&self.dens.normal_segments(body, c.theta, eps), s);
                if rng.random::<f64>() * self.p_max < w {
                    let z = c.vertex + Point2::from_angle(phi) * (s * eps);
                    return (CylinderPoint::new(c.theta, s), z);
                }
            }
        }
    }
}

/// `count` i.i.d. draws from `P_eps`.
pub fn sample_conditional(
    body: &ConvexBody,
    dens: &BoundaryDensity,
    eps: f64,
    count: u64,
    seed: u64,
) -> Result<LocalSample> {
    let mut rng = seeded(seed);
    let (points, ambient) = draw_conditional(body, dens, eps, count, &mut rng)?;
    Ok(LocalSample { eps, n_nominal: count, total_count: count, points, ambient, seed })
}

pub fn draw_conditional<R: Rng + ?Sized>(
    body: &ConvexBody,
    dens: &BoundaryDensity,
    eps: f64,
    count: u64,
    rng: &mut R,
) -> Result<(Vec<CylinderPoint>, Vec<Point2>)> {
    let sampler = ConditionalSampler::new(body, dens, eps)?;
    let mut points = Vec::with_capacity(count as usize);
    let mut ambient = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let (c, z) = sampler.draw(rng);
        points.push(c);
        ambient.push(z);
    }
    Ok((points, ambient))
}

/// `N ~ Binomial(n, a)` followed by `N` conditional draws: the points of an
/// `n`-sample from `P` that land in `V_eps`.
pub fn sample_two_stage(body: &ConvexBody, dens: &BoundaryDensity, eps: f64, n: u64, seed: u64) -> Result<LocalSample> {
    let mut rng = seeded(seed);
    two_stage_with(body, dens, eps, n, seed, &mut rng)
}

pub fn two_stage_with<R: Rng + ?Sized>(
    body: &ConvexBody,
    dens: &BoundaryDensity,
    eps: f64,
    n: u64,
    seed: u64,
    rng: &mut R,
) -> Result<LocalSample> {
    if n == 0 {
        return Err(Error::Config("sample size n must be at least 1".into()));
    }
    let a = neighborhood_mass(body, dens, eps)?.clamp(0.0, 1.0);
    let big_n = if a > 0.0 {
        Binomial::new(n, a).map_err(|e| Error::InvalidDensity(e.to_string()))?.sample(rng)
    } else {
        0
    };
    let (points, ambient) = if big_n > 0 { draw_conditional(body, dens, eps, big_n, rng)? } else { (Vec::new(), Vec::new()) };
    Ok(LocalSample { eps, n_nominal: n, total_count: big_n, points, ambient, seed })
}

/// `n` i.i.d. points from `P` by rejection from the support square.
pub fn sample_ambient<R: Rng + ?Sized>(body: &ConvexBody, dens: &BoundaryDensity, n: usize, rng: &mut R) -> Vec<Point2> {
    let (lo, hi) = dens.support_box();
    let p_max = dens.max_density();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let z = Point2::new(lo.x + rng.random::<f64>() * (hi.x - lo.x), lo.y + rng.random::<f64>() * (hi.y - lo.y));
        if rng.random::<f64>() * p_max < dens.density_at(body, z) {
            out.push(z);
        }
    }
    out
}

/// Keep the points of an ambient sample inside `V_eps`, in cylinder coordinates.
/// Skeleton points (a null set) are dropped.
pub fn localize(body: &ConvexBody, eps: f64, n_nominal: u64, seed: u64, points: &[Point2]) -> LocalSample {
    let mut cyl = Vec::new();
    let mut amb = Vec::new();
    for &z in points {
        if body.in_neighborhood(eps, z) {
            if let Ok(c) = body.magnify(eps, z) {
                cyl.push(c);
                amb.push(z);
            }
        }
    }
    LocalSample { eps, n_nominal, total_count: cyl.len() as u64, points: cyl, ambient: amb, seed }
}

/// Full ambient sampling followed by localisation; for cross-checking the two-stage sampler.
pub fn sample_full(body: &ConvexBody, dens: &BoundaryDensity, eps: f64, n: u64, seed: u64) -> Result<LocalSample> {
    dens.check_eps(body, eps)?;
    let mut rng = seeded(seed);
    let pts = sample_ambient(body, dens, n as usize, &mut rng);
    Ok(localize(body, eps, n, seed, &pts))
}
