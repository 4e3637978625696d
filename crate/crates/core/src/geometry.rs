//! Planar convex-body geometry: metric projection onto the boundary, signed
//! distance, local interior reach, the eps-collar `V_eps` and the local
//! magnification map `tau_eps` with its inverse.
//!
//! Boundaries are parametrised by counterclockwise arclength `theta`. A disc
//! starts at angle 0, a polygon at its first vertex.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two feet closer than this in distance are considered equidistant.
pub const SKELETON_DISTANCE_TOL: f64 = 1e-12;
/// Equidistant feet further apart than this make the point a skeleton point.
pub const SKELETON_FOOT_SEPARATION: f64 = 1e-9;
/// Arclength tolerance for "at a polygon corner".
pub const CORNER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point2 {
    fn from(v: [f64; 2]) -> Self {
        Point2 { x: v[0], y: v[1] }
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self::new(c, s)
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// A point of the boundary together with its arclength coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub theta: f64,
    pub position: Point2,
}

/// Output of the metric projection: `z = foot + signed_distance * normal`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedProjection {
    pub foot: BoundaryPoint,
    pub signed_distance: f64,
    pub normal: Point2,
}

/// A point of the cylinder `Gamma = boundary x [-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderPoint {
    pub theta: f64,
    pub s: f64,
}

impl CylinderPoint {
    pub const fn new(theta: f64, s: f64) -> Self {
        Self { theta, s }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub start: Point2,
    pub end: Point2,
    /// Unit tangent, counterclockwise.
    pub dir: Point2,
    /// Unit outer normal.
    pub normal: Point2,
    pub len: f64,
    /// Arclength of `start`.
    pub theta0: f64,
}

/// A polygon vertex with its outer normal cone `[normal_angle, normal_angle + exterior_angle]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corner {
    pub theta: f64,
    pub vertex: Point2,
    pub normal_angle: f64,
    pub exterior_angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    Disc { center: Point2, radius: f64 },
    Polygon { vertices: Vec<Point2> },
}

/// The fixed convex body `K`: a disc or a strictly convex polygon given counterclockwise.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "Shape", into = "Shape")]
pub struct ConvexBody {
    shape: Shape,
    perimeter: f64,
    area: f64,
    inradius: f64,
    edges: Vec<Edge>,
    corners: Vec<Corner>,
}

impl PartialEq for ConvexBody {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape
    }
}

impl TryFrom<Shape> for ConvexBody {
    type Error = Error;
    fn try_from(shape: Shape) -> Result<Self> {
        match shape {
            Shape::Disc { center, radius } => ConvexBody::disc(center, radius),
            Shape::Polygon { vertices } => ConvexBody::polygon(vertices),
        }
    }
}

impl From<ConvexBody> for Shape {
    fn from(b: ConvexBody) -> Shape {
        b.shape
    }
}

pub fn polygon_area(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    if n < 3 {
        return 0.0;
    }
    0.5 * (0..n).map(|i| vertices[i].cross(vertices[(i + 1) % n])).sum::<f64>()
}

/// Clips a convex polygon to the half-plane `{y : normal . y <= offset}`.
pub fn clip_half_plane(poly: &[Point2], normal: Point2, offset: f64) -> Vec<Point2> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let n = poly.len();
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let fp = normal.dot(p) - offset;
        let fq = normal.dot(q) - offset;
        if fp <= 0.0 {
            out.push(p);
        }
        if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
            let t = fp / (fp - fq);
            out.push(p + (q - p) * t);
        }
    }
    out
}

impl ConvexBody {
    pub fn disc(center: Point2, radius: f64) -> Result<Self> {
        if !center.is_finite() || !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidBody(format!("disc needs finite center and radius > 0, got {radius}")));
        }
        Ok(Self {
            shape: Shape::Disc { center, radius },
            perimeter: 2.0 * PI * radius,
            area: PI * radius * radius,
            inradius: radius,
            edges: Vec::new(),
            corners: Vec::new(),
        })
    }

    pub fn unit_disc() -> Self {
        Self::disc(Point2::new(0.0, 0.0), 1.0).expect("valid disc")
    }

    pub fn unit_square() -> Self {
        Self::polygon(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ])
        .expect("valid square")
    }

    pub fn polygon(vertices: Vec<Point2>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidBody(format!("polygon needs at least 3 vertices, got {n}")));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidBody("non-finite vertex".into()));
        }
        let mut edges = Vec::with_capacity(n);
        let mut theta = 0.0;
        for i in 0..n {
            let start = vertices[i];
            let end = vertices[(i + 1) % n];
            let d = end - start;
            let len = d.norm();
            if len <= 0.0 {
                return Err(Error::InvalidBody(format!("degenerate edge at vertex {i}")));
            }
            let dir = d * (1.0 / len);
            edges.push(Edge { start, end, dir, normal: Point2::new(dir.y, -dir.x), len, theta0: theta });
            theta += len;
        }
        let mut turning = 0.0;
        let mut corners = Vec::with_capacity(n);
        for k in 0..n {
            let prev = &edges[(k + n - 1) % n];
            let next = &edges[k];
            let cross = prev.dir.cross(next.dir);
            if cross <= 1e-12 {
                return Err(Error::InvalidBody(format!(
                    "polygon must be strictly convex and counterclockwise (vertex {k})"
                )));
            }
            let beta = cross.atan2(prev.dir.dot(next.dir));
            turning += beta;
            corners.push(Corner {
                theta: next.theta0,
                vertex: next.start,
                normal_angle: prev.normal.angle(),
                exterior_angle: beta,
            });
        }
        if (turning - 2.0 * PI).abs() > 1e-9 {
            return Err(Error::InvalidBody("polygon winds more than once".into()));
        }
        let area = polygon_area(&vertices);
        let mut body = Self {
            shape: Shape::Polygon { vertices },
            perimeter: theta,
            area,
            inradius: 0.0,
            edges,
            corners,
        };
        body.inradius = body.polygon_inradius();
        Ok(body)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    /// Radius of the largest inscribed disc; every eps-dependent object needs `eps < inradius`.
    pub fn inradius(&self) -> f64 {
        self.inradius
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn corners(&self) -> &[Corner] {
        &self.corners
    }

    pub fn is_disc(&self) -> bool {
        matches!(self.shape, Shape::Disc { .. })
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bounding_box(&self) -> (Point2, Point2) {
        match &self.shape {
            Shape::Disc { center, radius } => {
                (Point2::new(center.x - radius, center.y - radius), Point2::new(center.x + radius, center.y + radius))
            }
            Shape::Polygon { vertices } => {
                let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
                let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for v in vertices {
                    lo = Point2::new(lo.x.min(v.x), lo.y.min(v.y));
                    hi = Point2::new(hi.x.max(v.x), hi.y.max(v.y));
                }
                (lo, hi)
            }
        }
    }

    pub fn check_eps(&self, eps: f64) -> Result<()> {
        if eps.is_finite() && eps > 0.0 && eps < self.inradius {
            Ok(())
        } else {
            Err(Error::EpsTooLarge { eps, limit: self.inradius })
        }
    }

    pub fn normalize_theta(&self, theta: f64) -> f64 {
        let t = theta.rem_euclid(self.perimeter);
        if t >= self.perimeter {
            0.0
        } else {
            t
        }
    }

    /// Index of the polygon edge whose arclength range `[theta0, theta0 + len)` holds `theta`.
    pub fn edge_index(&self, theta: f64) -> usize {
        let t = self.normalize_theta(theta);
        match self.edges.binary_search_by(|e| e.theta0.total_cmp(&t)) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        }
    }

    /// Arclength distance from `theta` to the nearest polygon corner (infinite for a disc).
    pub fn corner_distance(&self, theta: f64) -> f64 {
        if self.is_disc() {
            return f64::INFINITY;
        }
        let t = self.normalize_theta(theta);
        let e = &self.edges[self.edge_index(t)];
        let u = t - e.theta0;
        u.min(e.len - u).min(self.perimeter - t)
    }

    pub fn boundary_point(&self, theta: f64) -> BoundaryPoint {
        let t = self.normalize_theta(theta);
        let position = match &self.shape {
            Shape::Disc { center, radius } => *center + Point2::from_angle(t / radius) * *radius,
            Shape::Polygon { .. } => {
                let e = &self.edges[self.edge_index(t)];
                e.start + e.dir * (t - e.theta0)
            }
        };
        BoundaryPoint { theta: t, position }
    }

    /// Outer unit normal at `theta`; `None` at a polygon corner.
    pub fn outer_normal(&self, theta: f64) -> Option<Point2> {
        match &self.shape {
            Shape::Disc { radius, .. } => Some(Point2::from_angle(self.normalize_theta(theta) / radius)),
            Shape::Polygon { .. } => {
                if self.corner_distance(theta) <= CORNER_TOL {
                    None
                } else {
                    Some(self.edges[self.edge_index(theta)].normal)
                }
            }
        }
    }

    /// Closed membership `z in K`.
    pub fn contains(&self, z: Point2) -> bool {
        match &self.shape {
            Shape::Disc { center, radius } => (z - *center).norm() <= *radius,
            Shape::Polygon { .. } => self.edges.iter().all(|e| e.normal.dot(z - e.start) <= 0.0),
        }
    }

    /// Unsigned distance from `z` to the boundary; defined everywhere, including the skeleton.
    pub fn distance(&self, z: Point2) -> f64 {
        match &self.shape {
            Shape::Disc { center, radius } => ((z - *center).norm() - radius).abs(),
            Shape::Polygon { .. } => {
                self.edges.iter().map(|e| segment_foot(e, z).1).fold(f64::INFINITY, f64::min)
            }
        }
    }

    pub fn signed_distance(&self, z: Point2) -> f64 {
        match &self.shape {
            Shape::Disc { center, radius } => (z - *center).norm() - radius,
            Shape::Polygon { .. } => {
                let d = self.distance(z);
                if self.contains(z) {
                    -d
                } else {
                    d
                }
            }
        }
    }

    /// Metric projection of `z` onto the boundary with signed distance and outer normal.
    pub fn project(&self, z: Point2) -> Result<SignedProjection> {
        if !z.is_finite() {
            return Err(Error::InvalidBody(format!("non-finite point ({}, {})", z.x, z.y)));
        }
        match &self.shape {
            Shape::Disc { center, radius } => {
                let v = z - *center;
                let r = v.norm();
                if 2.0 * r <= SKELETON_DISTANCE_TOL {
                    return Err(Error::SkeletonPoint { x: z.x, y: z.y });
                }
                let normal = v * (1.0 / r);
                let phi = normal.angle().rem_euclid(2.0 * PI);
                let theta = self.normalize_theta(phi * radius);
                Ok(SignedProjection {
                    foot: BoundaryPoint { theta, position: *center + normal * *radius },
                    signed_distance: r - radius,
                    normal,
                })
            }
            Shape::Polygon { .. } => self.project_polygon(z, true),
        }
    }

    /// Projection that resolves skeleton ties by the lowest edge index instead of failing.
    pub(crate) fn project_lenient(&self, z: Point2) -> SignedProjection {
        match &self.shape {
            Shape::Disc { center, radius } => {
                let v = z - *center;
                let r = v.norm();
                let normal = if r > 0.0 { v * (1.0 / r) } else { Point2::new(1.0, 0.0) };
                let phi = normal.angle().rem_euclid(2.0 * PI);
                SignedProjection {
                    foot: BoundaryPoint { theta: self.normalize_theta(phi * radius), position: *center + normal * *radius },
                    signed_distance: r - radius,
                    normal,
                }
            }
            Shape::Polygon { .. } => self.project_polygon(z, false).expect("lenient projection"),
        }
    }

    fn project_polygon(&self, z: Point2, strict: bool) -> Result<SignedProjection> {
        let feet: Vec<(usize, f64, f64)> = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let (t, d) = segment_foot(e, z);
                (i, t, d)
            })
            .collect();
        let &(best, t_best, d_best) = feet
            .iter()
            .min_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)))
            .expect("polygon has edges");
        let e = &self.edges[best];
        let foot_pos = e.start + e.dir * t_best;
        if strict {
            for &(i, t, d) in &feet {
                if i != best && d - d_best <= SKELETON_DISTANCE_TOL {
                    let other = self.edges[i].start + self.edges[i].dir * t;
                    if other.distance(foot_pos) > SKELETON_FOOT_SEPARATION {
                        return Err(Error::SkeletonPoint { x: z.x, y: z.y });
                    }
                }
            }
        }
        let inside = self.contains(z);
        let theta = self.normalize_theta(e.theta0 + t_best);
        let normal = if !inside && d_best > 0.0 { (z - foot_pos) * (1.0 / d_best) } else { e.normal };
        Ok(SignedProjection {
            foot: BoundaryPoint { theta, position: foot_pos },
            signed_distance: if inside { -d_best } else { d_best },
            normal,
        })
    }

    /// Local interior reach `r(x)` at the boundary point with arclength `theta`.
    pub fn local_reach(&self, theta: f64) -> f64 {
        match &self.shape {
            Shape::Disc { radius, .. } => *radius,
            Shape::Polygon { .. } => {
                if self.corner_distance(theta) <= CORNER_TOL {
                    return 0.0;
                }
                let i = self.edge_index(theta);
                let x = self.boundary_point(theta).position;
                let ni = self.edges[i].normal;
                self.edges
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, e)| {
                        let gap = e.normal.dot(e.start - x).max(0.0);
                        gap / (1.0 - e.normal.dot(ni))
                    })
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    pub fn in_neighborhood(&self, eps: f64, z: Point2) -> bool {
        self.distance(z) <= eps
    }

    /// `tau_eps(z) = (theta of Pi(z), d_s(z) / eps)`.
    pub fn magnify(&self, eps: f64, z: Point2) -> Result<CylinderPoint> {
        if !self.in_neighborhood(eps, z) {
            return Err(Error::OutsideNeighborhood { x: z.x, y: z.y });
        }
        let proj = self.project(z)?;
        Ok(CylinderPoint::new(proj.foot.theta, (proj.signed_distance / eps).clamp(-1.0, 1.0)))
    }

    /// Inverse of [`magnify`](Self::magnify): `position(theta) + s * eps * u(theta)`.
    pub fn unmagnify(&self, eps: f64, c: CylinderPoint) -> Result<Point2> {
        let theta = self.normalize_theta(c.theta);
        match &self.shape {
            Shape::Disc { .. } => {
                let normal = self.outer_normal(theta).expect("disc normal");
                Ok(self.boundary_point(theta).position + normal * (c.s * eps))
            }
            Shape::Polygon { .. } => {
                if c.s > 0.0 && self.corner_distance(theta) <= CORNER_TOL {
                    return Err(Error::NormalUndefinedAtCorner { theta });
                }
                let e = &self.edges[self.edge_index(theta)];
                Ok(self.boundary_point(theta).position + e.normal * (c.s * eps))
            }
        }
    }

    /// Lowest `s` at `theta` that lies in the image of `tau_eps`.
    pub fn s_floor(&self, eps: f64, theta: f64) -> f64 {
        match &self.shape {
            Shape::Disc { .. } => -1.0,
            Shape::Polygon { .. } => (-self.local_reach(theta) / eps).max(-1.0),
        }
    }

    /// Local Steiner Jacobian: `d mu_2 = J(theta, s) dtheta ds` on the edge strips
    /// (zero outside the image of `tau_eps`). Polygon corner sectors are handled separately.
    pub fn jacobian(&self, eps: f64, theta: f64, s: f64) -> f64 {
        match &self.shape {
            Shape::Disc { radius, .. } => eps * (1.0 + s * eps / radius),
            Shape::Polygon { .. } => {
                if s < 0.0 && -s * eps > self.local_reach(theta) {
                    0.0
                } else {
                    eps
                }
            }
        }
    }

    /// `int_{s_lo}^{s_hi} J(theta, s) ds`, clipped to the image of `tau_eps`.
    pub fn jacobian_integral(&self, eps: f64, theta: f64, s_lo: f64, s_hi: f64) -> f64 {
        match &self.shape {
            Shape::Disc { radius, .. } => {
                if s_hi <= s_lo {
                    return 0.0;
                }
                eps * ((s_hi - s_lo) + eps * (s_hi * s_hi - s_lo * s_lo) / (2.0 * radius))
            }
            Shape::Polygon { .. } => {
                let lo = if s_lo < 0.0 { s_lo.max(self.s_floor(eps, theta)) } else { s_lo };
                if s_hi <= lo {
                    0.0
                } else {
                    eps * (s_hi - lo)
                }
            }
        }
    }

    /// Inner parallel body `{z in K : dist(z, boundary) >= eps}` (polygon vertices; empty if void).
    pub fn inner_parallel_polygon(&self, eps: f64) -> Vec<Point2> {
        match &self.shape {
            Shape::Disc { .. } => Vec::new(),
            Shape::Polygon { vertices } => {
                let mut poly = vertices.clone();
                for e in &self.edges {
                    poly = clip_half_plane(&poly, e.normal, e.normal.dot(e.start) - eps);
                    if poly.len() < 3 {
                        return Vec::new();
                    }
                }
                poly
            }
        }
    }

    /// Largest inscribed disc radius: the optimum of `max r` subject to
    /// `n_i . x + r <= n_i . start_i`, attained where three constraints are active.
    fn polygon_inradius(&self) -> f64 {
        let rows: Vec<[f64; 3]> = self.edges.iter().map(|e| [e.normal.x, e.normal.y, e.normal.dot(e.start)]).collect();
        let mut best: f64 = 0.0;
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                for k in j + 1..rows.len() {
                    let (a, b, c) = (rows[i], rows[j], rows[k]);
                    let det = a[0] * (b[1] - c[1]) - a[1] * (b[0] - c[0]) + (b[0] * c[1] - b[1] * c[0]);
                    if det.abs() < 1e-14 {
                        continue;
                    }
                    // Cramer's rule for [n_x n_y 1] (x, y, r) = h
                    let x = (a[2] * (b[1] - c[1]) - a[1] * (b[2] - c[2]) + (b[2] * c[1] - b[1] * c[2])) / det;
                    let y = (a[0] * (b[2] - c[2]) - a[2] * (b[0] - c[0]) + (b[0] * c[2] - b[2] * c[0])) / det;
                    let r = (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                        + a[2] * (b[0] * c[1] - b[1] * c[0]))
                        / det;
                    let feasible = rows.iter().all(|h| h[0] * x + h[1] * y + r <= h[2] + 1e-12);
                    if feasible && r > best {
                        best = r;
                    }
                }
            }
        }
        best
    }

    /// Lebesgue area of `V_eps`: `4 pi R eps` for a disc; outer strips, corner sectors
    /// and `area(K) - area(K_{-eps})` for a polygon.
    pub fn neighborhood_area(&self, eps: f64) -> Result<f64> {
        self.check_eps(eps)?;
        Ok(match &self.shape {
            Shape::Disc { radius, .. } => 4.0 * PI * radius * eps,
            Shape::Polygon { .. } => self.outer_area(eps) + self.inner_area(eps),
        })
    }

    /// Area of `V_eps \ K`.
    pub fn outer_area(&self, eps: f64) -> f64 {
        match &self.shape {
            Shape::Disc { radius, .. } => PI * ((radius + eps).powi(2) - radius * radius),
            Shape::Polygon { .. } => eps * self.perimeter + PI * eps * eps,
        }
    }

    /// Area of `V_eps cap K`.
    pub fn inner_area(&self, eps: f64) -> f64 {
        match &self.shape {
            Shape::Disc { radius, .. } => PI * (radius * radius - (radius - eps).max(0.0).powi(2)),
            Shape::Polygon { .. } => self.area - polygon_area(&self.inner_parallel_polygon(eps)),
        }
    }
}

/// Closest point of a segment to `z`: (arclength along the edge, distance).
fn segment_foot(e: &Edge, z: Point2) -> (f64, f64) {
    let t = (z - e.start).dot(e.dir).clamp(0.0, e.len);
    let foot = e.start + e.dir * t;
    (t, z.distance(foot))
}
