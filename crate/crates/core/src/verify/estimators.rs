//! Excess-mass and minimum-volume estimators over the disc family, by
//! exhaustive coarse-to-fine grid search.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::boundary_measure::{BoundaryDensity, DensityModel};
use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Point2, Shape};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: Point2,
    pub radius: f64,
}

impl Disc {
    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }
}

/// Parameter box `cx x cy x r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscBox {
    pub cx: [f64; 2],
    pub cy: [f64; 2],
    pub r: [f64; 2],
}

impl DiscBox {
    fn validate(&self) -> Result<()> {
        let ok = |a: [f64; 2]| a[0].is_finite() && a[1].is_finite() && a[0] <= a[1];
        if !(ok(self.cx) && ok(self.cy) && ok(self.r)) || self.r[0] < 0.0 {
            return Err(Error::Config("parameter box needs finite lo <= hi and r >= 0".into()));
        }
        Ok(())
    }
}

/// `points` per axis, `stages` refinements; each stage shrinks the step by `(points - 1) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSearch {
    pub points: usize,
    pub stages: usize,
}

impl Default for GridSearch {
    /// Nine points per axis: the step shrinks by four per stage.
    fn default() -> Self {
        Self { points: 9, stages: 3 }
    }
}

/// Where masses `P(D)` come from.
#[derive(Debug, Clone, PartialEq)]
pub enum MassSource<'a> {
    /// Density `c_in` on `K`, `c_out` on the rest of an axis-parallel box; need not be normalised.
    TwoLevel { body: &'a ConvexBody, c_in: f64, c_out: f64, lo: Point2, hi: Point2 },
    /// Empirical measure of ambient points.
    Sample { points: &'a [Point2] },
}

impl<'a> MassSource<'a> {
    /// Population measure of a density; only two-level densities are supported.
    pub fn population(body: &'a ConvexBody, dens: &BoundaryDensity) -> Result<Self> {
        match dens.model() {
            DensityModel::TwoLevel { c_in, c_out, .. } => {
                let (lo, hi) = dens.support_box();
                Ok(MassSource::TwoLevel { body, c_in: *c_in, c_out: *c_out, lo, hi })
            }
            DensityModel::Collar { .. } => {
                Err(Error::Config("population mode supports two-level densities only".into()))
            }
        }
    }

    pub fn mass(&self, d: Disc) -> f64 {
        match self {
            MassSource::TwoLevel { body, c_in, c_out, lo, hi } => {
                let bx = [*lo, Point2::new(hi.x, lo.y), *hi, Point2::new(lo.x, hi.y)];
                let in_box = disc_polygon_area(d.center, d.radius, &bx);
                c_out * in_box + (c_in - c_out) * disc_body_area(d.center, d.radius, body)
            }
            MassSource::Sample { points } => {
                let r2 = d.radius * d.radius;
                let c = points.iter().filter(|z| sq_dist(**z, d.center) <= r2).count();
                c as f64 / points.len() as f64
            }
        }
    }
}

const TIE_TOL: f64 = 1e-12;

fn sq_dist(a: Point2, b: Point2) -> f64 {
    (a.x - b.x).powi(2) + (a.y - b.y).powi(2)
}

/// Area of the intersection of two discs.
pub fn lens_area(c1: Point2, r1: f64, c2: Point2, r2: f64) -> f64 {
    let d = sq_dist(c1, c2).sqrt();
    if d >= r1 + r2 {
        return 0.0;
    }
    if d <= (r1 - r2).abs() {
        let r = r1.min(r2);
        return PI * r * r;
    }
    let a1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).clamp(-1.0, 1.0).acos();
    let a2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).clamp(-1.0, 1.0).acos();
    let k = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
    r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * k.max(0.0).sqrt()
}

/// Signed area of `disc(0, r) cap triangle(0, a, b)`.
fn triangle_disc_area(a: Point2, b: Point2, r: f64) -> f64 {
    let dv = b - a;
    let (qa, qb, qc) = (dv.dot(dv), 2.0 * a.dot(dv), a.dot(a) - r * r);
    let mut ts = vec![0.0];
    let disc = qb * qb - 4.0 * qa * qc;
    if qa > 0.0 && disc > 0.0 {
        let sq = disc.sqrt();
        for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
            if t > 0.0 && t < 1.0 {
                ts.push(t);
            }
        }
    }
    ts.push(1.0);
    ts.windows(2)
        .map(|w| {
            let (p, q) = (a + dv * w[0], a + dv * w[1]);
            let m = a + dv * (0.5 * (w[0] + w[1]));
            if m.dot(m) < r * r {
                0.5 * p.cross(q)
            } else {
                0.5 * r * r * p.cross(q).atan2(p.dot(q))
            }
        })
        .sum()
}

/// Area of `disc(c, r)` intersected with a counterclockwise convex polygon.
pub fn disc_polygon_area(c: Point2, r: f64, vertices: &[Point2]) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let n = vertices.len();
    (0..n).map(|i| triangle_disc_area(vertices[i] - c, vertices[(i + 1) % n] - c, r)).sum::<f64>().max(0.0)
}

fn disc_body_area(c: Point2, r: f64, body: &ConvexBody) -> f64 {
    match body.shape() {
        Shape::Disc { center, radius } => lens_area(c, r, *center, *radius),
        Shape::Polygon { vertices } => disc_polygon_area(c, r, vertices),
    }
}

fn axis(range: [f64; 2], points: usize) -> Vec<f64> {
    if points <= 1 || range[0] == range[1] {
        return vec![0.5 * (range[0] + range[1])];
    }
    let h = (range[1] - range[0]) / (points - 1) as f64;
    (0..points).map(|i| if i + 1 == points { range[1] } else { range[0] + i as f64 * h }).collect()
}

fn step(range: [f64; 2], points: usize) -> f64 {
    if points <= 1 {
        0.0
    } else {
        (range[1] - range[0]) / (points - 1) as f64
    }
}

/// The range `best +- step` cut to the outer range, keeping `best` on the next grid.
fn refine(best: f64, h: f64, outer: [f64; 2], points: usize) -> Vec<f64> {
    if points <= 1 || h == 0.0 {
        return vec![best];
    }
    let half = (points - 1) / 2;
    let h2 = h / half as f64;
    (0..points)
        .map(|i| best + (i as f64 - half as f64) * h2)
        .filter(|v| *v >= outer[0] && *v <= outer[1])
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscFit {
    pub disc: Disc,
    pub objective: f64,
    pub mass: f64,
    /// Some parameter sits on the edge of the search box.
    pub at_boundary: bool,
}

fn on_edge(d: Disc, b: &DiscBox, check_r: bool) -> bool {
    let e = |v: f64, r: [f64; 2]| r[0] < r[1] && (v == r[0] || v == r[1]);
    e(d.center.x, b.cx) || e(d.center.y, b.cy) || (check_r && d.radius >= b.r[1])
}

/// Argmax of `P(D) - lambda |D|` over the disc grid; ties go to the lexicographically
/// smallest `(cx, cy, r)`.
pub fn excess_mass(source: &MassSource, lambda: f64, bounds: DiscBox, search: GridSearch) -> Result<DiscFit> {
    if !(lambda > 0.0) {
        return Err(Error::Config(format!("lambda must be positive, got {lambda}")));
    }
    bounds.validate()?;
    let p = search.points.max(1);
    let (mut xs, mut ys, mut rs) = (axis(bounds.cx, p), axis(bounds.cy, p), axis(bounds.r, p));
    let (mut hx, mut hy, mut hr) = (step(bounds.cx, p), step(bounds.cy, p), step(bounds.r, p));
    // values within round-off of each other tie; the earlier (lexicographically smaller) grid point wins
    let tol = TIE_TOL * lambda * PI * bounds.r[1].max(1.0).powi(2);
    let mut best: Option<(f64, Disc)> = None;
    for stage in 0..search.stages.max(1) {
        let mut stage_best: Option<(f64, Disc)> = None;
        for &x in &xs {
            for &y in &ys {
                let c = Point2::new(x, y);
                let masses = masses_by_radius(source, c, &rs);
                for (&r, m) in rs.iter().zip(masses) {
                    let obj = m - lambda * PI * r * r;
                    if stage_best.is_none_or(|(b, _)| obj > b + tol) {
                        stage_best = Some((obj, Disc { center: c, radius: r }));
                    }
                }
            }
        }
        let (obj, d) = stage_best.expect("nonempty grid");
        if best.is_none_or(|(b, _)| obj > b + tol) {
            best = Some((obj, d));
        }
        if stage + 1 < search.stages {
            let (_, d) = best.unwrap();
            xs = refine(d.center.x, hx, bounds.cx, p);
            ys = refine(d.center.y, hy, bounds.cy, p);
            rs = refine(d.radius, hr, bounds.r, p);
            let k = ((p - 1) / 2).max(1) as f64;
            (hx, hy, hr) = (hx / k, hy / k, hr / k);
        }
    }
    let (objective, disc) = best.unwrap();
    if !(objective > tol) || disc.radius == 0.0 {
        return Err(Error::DegenerateSolution);
    }
    Ok(DiscFit { disc, objective, mass: source.mass(disc), at_boundary: on_edge(disc, &bounds, true) })
}

/// `P(disc(c, r))` for every radius in `rs`.
fn masses_by_radius(source: &MassSource, c: Point2, rs: &[f64]) -> Vec<f64> {
    match source {
        MassSource::Sample { points } => {
            let mut d2: Vec<f64> = points.iter().map(|z| sq_dist(*z, c)).collect();
            d2.sort_unstable_by(f64::total_cmp);
            rs.iter().map(|r| d2.partition_point(|v| *v <= r * r) as f64 / points.len() as f64).collect()
        }
        _ => rs.iter().map(|&r| source.mass(Disc { center: c, radius: r })).collect(),
    }
}

/// Smallest radius at `c` with mass at least `alpha`, if one fits below `r_max`.
pub fn required_radius(source: &MassSource, c: Point2, alpha: f64, r_max: f64) -> Option<f64> {
    match source {
        MassSource::Sample { points } => {
            let k = (alpha * points.len() as f64).ceil() as usize;
            if k == 0 || k > points.len() {
                return None;
            }
            let mut d2: Vec<f64> = points.iter().map(|z| sq_dist(*z, c)).collect();
            let (_, kth, _) = d2.select_nth_unstable_by(k - 1, f64::total_cmp);
            let mut r = kth.sqrt();
            while r * r < *kth {
                r = r.next_up();
            }
            (r <= r_max).then_some(r)
        }
        _ => {
            let m = |r: f64| source.mass(Disc { center: c, radius: r });
            if m(r_max) < alpha {
                return None;
            }
            let (mut lo, mut hi) = (0.0, r_max);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if m(mid) >= alpha {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Some(hi)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinVolumeFit {
    pub fit: DiscFit,
    /// Final-stage grid spacing of the centers.
    pub spacing: [f64; 2],
}

/// Argmin of `|D|` over grid centers subject to `P(D) >= alpha`, radius in `bounds.r`.
pub fn min_volume_set(source: &MassSource, alpha: f64, bounds: DiscBox, search: GridSearch) -> Result<MinVolumeFit> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    bounds.validate()?;
    let p = search.points.max(1);
    let (mut xs, mut ys) = (axis(bounds.cx, p), axis(bounds.cy, p));
    let (mut hx, mut hy) = (step(bounds.cx, p), step(bounds.cy, p));
    let mut best: Option<Disc> = None;
    for stage in 0..search.stages.max(1) {
        for &x in &xs {
            for &y in &ys {
                let c = Point2::new(x, y);
                if let Some(r) = required_radius(source, c, alpha, bounds.r[1]) {
                    let r = r.max(bounds.r[0]);
                    if best.is_none_or(|b| r < b.radius * (1.0 - TIE_TOL)) {
                        best = Some(Disc { center: c, radius: r });
                    }
                }
            }
        }
        let Some(d) = best else {
            return Err(Error::Infeasible { alpha });
        };
        if stage + 1 < search.stages {
            xs = refine(d.center.x, hx, bounds.cx, p);
            ys = refine(d.center.y, hy, bounds.cy, p);
            let k = ((p - 1) / 2).max(1) as f64;
            (hx, hy) = (hx / k, hy / k);
        }
    }
    let disc = best.unwrap();
    let fit = DiscFit { disc, objective: disc.area(), mass: source.mass(disc), at_boundary: on_edge(disc, &bounds, true) };
    Ok(MinVolumeFit { fit, spacing: [hx, hy] })
}
