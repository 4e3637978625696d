use serde::{Deserialize, Serialize};

use crate::geometry::{ConvexBody, Point2};

/// Closed ellipse with semi-axes along the rotated frame `(cos angle, sin angle)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ellipse {
    pub center: Point2,
    pub semi_axes: [f64; 2],
    #[serde(default)]
    pub angle: f64,
}

impl Ellipse {
    pub fn new(center: Point2, semi_axes: [f64; 2], angle: f64) -> Self {
        Self { center, semi_axes, angle }
    }

    fn to_local(&self, z: Point2) -> Point2 {
        let (s, c) = self.angle.sin_cos();
        let v = z - self.center;
        Point2::new(c * v.x + s * v.y, -s * v.x + c * v.y)
    }

    pub fn contains(&self, z: Point2) -> bool {
        let w = self.to_local(z);
        (w.x / self.semi_axes[0]).powi(2) + (w.y / self.semi_axes[1]).powi(2) <= 1.0
    }

    pub fn boundary_point(&self, t: f64) -> Point2 {
        let (s, c) = self.angle.sin_cos();
        let (st, ct) = t.sin_cos();
        let lx = self.semi_axes[0] * ct;
        let ly = self.semi_axes[1] * st;
        self.center + Point2::new(c * lx - s * ly, s * lx + c * ly)
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.semi_axes[0] * self.semi_axes[1]
    }

    /// Largest `rho >= 0` with `origin + rho * dir` on the ellipse, for `origin` inside.
    pub fn ray_exit(&self, origin: Point2, dir: Point2) -> Option<f64> {
        let (s, c) = self.angle.sin_cos();
        let v = origin - self.center;
        let w0 = Point2::new(c * v.x + s * v.y, -s * v.x + c * v.y);
        let w1 = Point2::new(c * dir.x + s * dir.y, -s * dir.x + c * dir.y);
        let (ia, ib) = (1.0 / (self.semi_axes[0] * self.semi_axes[0]), 1.0 / (self.semi_axes[1] * self.semi_axes[1]));
        let qa = w1.x * w1.x * ia + w1.y * w1.y * ib;
        let qb = 2.0 * (w0.x * w1.x * ia + w0.y * w1.y * ib);
        let qc = w0.x * w0.x * ia + w0.y * w0.y * ib - 1.0;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 {
            return None;
        }
        let root = disc.sqrt();
        // (-qb + root) / (2 qa), written to avoid cancellation when qb > 0
        let rho = if qb > 0.0 { -2.0 * qc / (qb + root) } else { (-qb + root) / (2.0 * qa) };
        (rho >= 0.0).then_some(rho)
    }
}

/// Even-odd membership for a simple polygon.
pub fn polygon_contains(vertices: &[Point2], z: Point2) -> bool {
    let n = vertices.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[j]);
        if (a.y > z.y) != (b.y > z.y) && z.x < (b.x - a.x) * (z.y - a.y) / (b.y - a.y) + a.x {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Measurable subsets of the plane used as members of the indexing classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AmbientSet {
    Empty,
    Body(ConvexBody),
    Ellipse(Ellipse),
    Polygon { vertices: Vec<Point2> },
    /// `{z in V_eps : d_s(z) / eps in union of intervals}`.
    CollarBands { body: ConvexBody, eps: f64, intervals: Vec<[f64; 2]> },
    SymmetricDifference { a: Box<AmbientSet>, b: Box<AmbientSet> },
    Difference { a: Box<AmbientSet>, b: Box<AmbientSet> },
}

impl AmbientSet {
    pub fn symmetric_difference(a: AmbientSet, b: AmbientSet) -> Self {
        AmbientSet::SymmetricDifference { a: Box::new(a), b: Box::new(b) }
    }

    pub fn difference(a: AmbientSet, b: AmbientSet) -> Self {
        AmbientSet::Difference { a: Box::new(a), b: Box::new(b) }
    }

    pub fn contains(&self, z: Point2) -> bool {
        match self {
            AmbientSet::Empty => false,
            AmbientSet::Body(b) => b.contains(z),
            AmbientSet::Ellipse(e) => e.contains(z),
            AmbientSet::Polygon { vertices } => polygon_contains(vertices, z),
            AmbientSet::CollarBands { body, eps, intervals } => {
                let d = body.signed_distance(z);
                if d.abs() > *eps {
                    return false;
                }
                let s = d / eps;
                intervals.iter().any(|iv| s >= iv[0] && s <= iv[1])
            }
            AmbientSet::SymmetricDifference { a, b } => a.contains(z) != b.contains(z),
            AmbientSet::Difference { a, b } => a.contains(z) && !b.contains(z),
        }
    }
}
