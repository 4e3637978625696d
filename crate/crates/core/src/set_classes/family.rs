//! Ambient families `A(eps) subset V_eps` built as symmetric differences with `K`,
//! their `tau`-images and their derivative bands.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::ambient::{polygon_contains, AmbientSet, Ellipse};
use crate::boundary_measure::{derivative_deficit, BoundaryFn, CylinderRegion};
use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Point2, Shape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `E symmetric-difference K` for closed ellipses `E` (disc body).
    EllipseSymmDiff,
    /// `{z : d_s(z) / eps in [a, b] cup [c, d]}`.
    IntervalBands,
    /// `Q symmetric-difference K` for quadrangles `Q` (polygon body).
    QuadrangleSymmDiff,
    /// `C symmetric-difference K` for convex polygons `C` (polygon body).
    ConvexSymmDiff,
}

/// One member `A` of an ambient class at a fixed `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FamilyElement {
    Empty,
    EllipseSymmDiff { ellipse: Ellipse },
    IntervalBands { params: [f64; 4] },
    QuadrangleSymmDiff { vertices: [Point2; 4] },
    ConvexSymmDiff { vertices: Vec<Point2> },
}

fn disc_of(body: &ConvexBody) -> Option<(Point2, f64)> {
    match body.shape() {
        Shape::Disc { center, radius } => Some((*center, *radius)),
        Shape::Polygon { .. } => None,
    }
}

impl FamilyElement {
    pub fn kind(&self) -> Option<FamilyKind> {
        match self {
            FamilyElement::Empty => None,
            FamilyElement::EllipseSymmDiff { .. } => Some(FamilyKind::EllipseSymmDiff),
            FamilyElement::IntervalBands { .. } => Some(FamilyKind::IntervalBands),
            FamilyElement::QuadrangleSymmDiff { .. } => Some(FamilyKind::QuadrangleSymmDiff),
            FamilyElement::ConvexSymmDiff { .. } => Some(FamilyKind::ConvexSymmDiff),
        }
    }

    pub fn ambient(&self, body: &ConvexBody, eps: f64) -> AmbientSet {
        let k = AmbientSet::Body(body.clone());
        match self {
            FamilyElement::Empty => AmbientSet::Empty,
            FamilyElement::EllipseSymmDiff { ellipse } => AmbientSet::symmetric_difference(AmbientSet::Ellipse(*ellipse), k),
            FamilyElement::IntervalBands { params: [a, b, c, d] } => {
                AmbientSet::CollarBands { body: body.clone(), eps, intervals: vec![[*a, *b], [*c, *d]] }
            }
            FamilyElement::QuadrangleSymmDiff { vertices } => {
                AmbientSet::symmetric_difference(AmbientSet::Polygon { vertices: vertices.to_vec() }, k)
            }
            FamilyElement::ConvexSymmDiff { vertices } => {
                AmbientSet::symmetric_difference(AmbientSet::Polygon { vertices: vertices.clone() }, k)
            }
        }
    }

    /// Parameter validity and `A subset V_eps`.
    pub fn validate(&self, body: &ConvexBody, eps: f64) -> Result<()> {
        body.check_eps(eps)?;
        match self {
            FamilyElement::Empty => Ok(()),
            FamilyElement::IntervalBands { params } => {
                let ok = params[0] >= -1.0 && params.windows(2).all(|w| w[0] <= w[1]) && params[3] <= 1.0;
                if ok {
                    Ok(())
                } else {
                    Err(Error::InvalidFamily(format!("band parameters {params:?} must satisfy -1 <= a <= b <= c <= d <= 1")))
                }
            }
            FamilyElement::EllipseSymmDiff { ellipse } => {
                let (center, radius) = disc_of(body)
                    .ok_or_else(|| Error::InvalidFamily("ellipse classes need a disc body".into()))?;
                if !(ellipse.semi_axes[0] > 0.0 && ellipse.semi_axes[1] > 0.0) {
                    return Err(Error::InvalidFamily("ellipse semi-axes must be positive".into()));
                }
                if !ellipse.contains(center) {
                    return Err(Error::InvalidFamily("ellipse must contain the disc center".into()));
                }
                BoundaryFn::Radial { center, radius, eps, ellipse: *ellipse }
                    .validate(body.perimeter())
                    .map_err(|_| Error::InvalidFamily("ellipse leaves the eps-collar".into()))
            }
            FamilyElement::QuadrangleSymmDiff { vertices } => validate_polygon_member(body, eps, vertices),
            FamilyElement::ConvexSymmDiff { vertices } => validate_polygon_member(body, eps, vertices),
        }
    }

    pub fn contains(&self, body: &ConvexBody, eps: f64, z: Point2) -> bool {
        self.ambient(body, eps).contains(z)
    }
}

fn validate_polygon_member(body: &ConvexBody, eps: f64, vertices: &[Point2]) -> Result<()> {
    if body.is_disc() {
        return Err(Error::InvalidFamily("polygon classes need a polygon body".into()));
    }
    ConvexBody::polygon(vertices.to_vec()).map_err(|e| Error::InvalidFamily(format!("member polygon: {e}")))?;
    // C \ K: the distance to K is convex, so its maximum over C sits at a vertex
    if vertices.iter().any(|&v| body.distance(v) > eps && !body.contains(v)) {
        return Err(Error::InvalidFamily("member polygon reaches beyond the outer collar".into()));
    }
    // K \ C inside the collar iff the inner parallel body lies in C
    if body.inner_parallel_polygon(eps).iter().any(|&v| !polygon_contains(vertices, v)) {
        return Err(Error::InvalidFamily("member polygon misses the inner parallel body".into()));
    }
    Ok(())
}

/// `tau_eps(A)`. Interval bands map to their s-band exactly and ellipses around a disc
/// body to the radial band `(rho_E - R) / eps`; other members are kept as membership images.
pub fn tau_image(element: &FamilyElement, body: &ConvexBody, eps: f64) -> Result<CylinderRegion> {
    element.validate(body, eps)?;
    Ok(match element {
        FamilyElement::Empty => CylinderRegion::empty(),
        FamilyElement::IntervalBands { params: [a, b, c, d] } => {
            CylinderRegion::SBand { intervals: vec![[*a, *b], [*c, *d]] }
        }
        FamilyElement::EllipseSymmDiff { ellipse } => {
            let (center, radius) = disc_of(body).expect("validated");
            CylinderRegion::Band { f: BoundaryFn::Radial { center, radius, eps, ellipse: *ellipse } }
        }
        _ => CylinderRegion::TauImage { set: element.ambient(body, eps), body: body.clone(), eps },
    })
}

/// A family `eps -> A(eps)` with a derivative band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SetValuedFamily {
    /// `E(eps)`: center `c_K + eps h`, semi-axes `R + eps e`, major direction `alpha`.
    Ellipse { e: [f64; 2], h: Point2, alpha: f64 },
    Bands { params: [f64; 4] },
    /// `Q(eps)` with vertices `v_k + eps w_k` for the vertices `v_k` of a quadrilateral body.
    Quadrangle { w: [Point2; 4] },
}

impl SetValuedFamily {
    /// The disc `B_R(c_K + (delta eps, 0))`.
    pub fn shifted_disc(delta: f64) -> Self {
        SetValuedFamily::Ellipse { e: [0.0, 0.0], h: Point2::new(delta, 0.0), alpha: 0.0 }
    }

    /// Each corner pushed by `t_k` along its outer bisector.
    pub fn quadrangle_bisector(body: &ConvexBody, t: [f64; 4]) -> Result<Self> {
        let corners = body.corners();
        if corners.len() != 4 {
            return Err(Error::InvalidFamily("quadrangle families need a quadrilateral body".into()));
        }
        let mut w = [Point2::new(0.0, 0.0); 4];
        for k in 0..4 {
            let c = &corners[k];
            w[k] = Point2::from_angle(c.normal_angle + 0.5 * c.exterior_angle) * t[k];
        }
        Ok(SetValuedFamily::Quadrangle { w })
    }

    pub fn kind(&self) -> FamilyKind {
        match self {
            SetValuedFamily::Ellipse { .. } => FamilyKind::EllipseSymmDiff,
            SetValuedFamily::Bands { .. } => FamilyKind::IntervalBands,
            SetValuedFamily::Quadrangle { .. } => FamilyKind::QuadrangleSymmDiff,
        }
    }

    /// Same ellipse family with `alpha` reduced to `[0, pi/2)` (swapping the axes when needed).
    fn reduced(&self) -> Self {
        match *self {
            SetValuedFamily::Ellipse { e, h, alpha } => {
                let a = alpha.rem_euclid(PI);
                if a >= FRAC_PI_2 {
                    SetValuedFamily::Ellipse { e: [e[1], e[0]], h, alpha: a - FRAC_PI_2 }
                } else {
                    SetValuedFamily::Ellipse { e, h, alpha: a }
                }
            }
            ref other => other.clone(),
        }
    }

    pub fn element(&self, body: &ConvexBody, eps: f64) -> Result<FamilyElement> {
        let el = match self.reduced() {
            SetValuedFamily::Ellipse { e, h, alpha } => {
                let (center, radius) = disc_of(body)
                    .ok_or_else(|| Error::InvalidFamily("ellipse families need a disc body".into()))?;
                FamilyElement::EllipseSymmDiff {
                    ellipse: Ellipse::new(center + h * eps, [radius + eps * e[0], radius + eps * e[1]], alpha),
                }
            }
            SetValuedFamily::Bands { params } => FamilyElement::IntervalBands { params },
            SetValuedFamily::Quadrangle { w } => {
                let corners = body.corners();
                if corners.len() != 4 {
                    return Err(Error::InvalidFamily("quadrangle families need a quadrilateral body".into()));
                }
                let mut vertices = [Point2::new(0.0, 0.0); 4];
                for k in 0..4 {
                    vertices[k] = corners[k].vertex + w[k] * eps;
                }
                FamilyElement::QuadrangleSymmDiff { vertices }
            }
        };
        el.validate(body, eps)?;
        Ok(el)
    }

    pub fn tau_image(&self, body: &ConvexBody, eps: f64) -> Result<CylinderRegion> {
        tau_image(&self.element(body, eps)?, body, eps)
    }

    /// The boundary function of the limit band `B`.
    pub fn derivative_fn(&self, body: &ConvexBody) -> Result<BoundaryFn> {
        Ok(match self.reduced() {
            SetValuedFamily::Ellipse { e, h, alpha } => {
                let (_, radius) = disc_of(body)
                    .ok_or_else(|| Error::InvalidFamily("ellipse families need a disc body".into()))?;
                let (sa, ca) = alpha.sin_cos();
                BoundaryFn::EllipseF {
                    alpha,
                    a: e[0],
                    b: e[1] - e[0],
                    c: h.dot(Point2::new(-sa, ca)),
                    d: h.dot(Point2::new(ca, sa)),
                    scale: radius,
                }
            }
            SetValuedFamily::Bands { .. } => {
                return Err(Error::InvalidFamily("interval bands are not boundary-function bands".into()))
            }
            SetValuedFamily::Quadrangle { w } => {
                let edges = body.edges();
                if edges.len() != 4 {
                    return Err(Error::InvalidFamily("quadrangle families need a quadrilateral body".into()));
                }
                let mut knots = Vec::with_capacity(4);
                let mut slopes = Vec::with_capacity(4);
                let mut intercepts = Vec::with_capacity(4);
                for (m, edge) in edges.iter().enumerate() {
                    let start = w[m].dot(edge.normal);
                    let end = w[(m + 1) % 4].dot(edge.normal);
                    knots.push(edge.theta0);
                    intercepts.push(start);
                    slopes.push((end - start) / edge.len);
                }
                if slopes.iter().any(|s| s.abs() > 2.0) {
                    return Err(Error::InvalidFamily("side slopes must lie in [-2, 2]".into()));
                }
                BoundaryFn::PiecewiseLinear { knots, slopes, intercepts, period: body.perimeter() }
            }
        })
    }

    /// The derivative set `B` as a validated cylinder region.
    pub fn derivative(&self, body: &ConvexBody) -> Result<CylinderRegion> {
        match self {
            SetValuedFamily::Bands { params: [a, b, c, d] } => {
                CylinderRegion::sband(vec![[*a, *b], [*c, *d]])
            }
            _ => CylinderRegion::band(self.derivative_fn(body)?, body.perimeter()),
        }
    }

    /// `M(tau_eps A(eps) symmetric-difference B)`.
    pub fn derivative_deficit(&self, body: &ConvexBody, eps: f64) -> Result<f64> {
        Ok(derivative_deficit(&self.tau_image(body, eps)?, &self.derivative(body)?, body))
    }
}

/// Evenly spaced values `lo, ..., hi` (a single `lo` when `count == 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl ParamRange {
    pub fn new(lo: f64, hi: f64, count: usize) -> Self {
        Self { lo, hi, count }
    }

    pub fn fixed(value: f64) -> Self {
        Self { lo: value, hi: value, count: 1 }
    }

    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.lo],
            n => (0..n).map(|i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

/// Finite lattice discretisations of the classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClassGrid {
    Ellipse { e1: ParamRange, e2: ParamRange, h1: ParamRange, h2: ParamRange, alpha: ParamRange },
    /// All `a <= b <= c <= d` on `levels` equally spaced points of `[-1, 1]`.
    Bands { levels: usize },
    /// Bisector pushes with every corner drawn from `t`.
    Quadrangle { t: ParamRange },
}

impl ClassGrid {
    /// Members in a fixed lexicographic order.
    pub fn members(&self, body: &ConvexBody) -> Result<Vec<SetValuedFamily>> {
        let out = match self {
            ClassGrid::Ellipse { e1, e2, h1, h2, alpha } => {
                let mut v = Vec::new();
                for &x1 in &e1.values() {
                    for &x2 in &e2.values() {
                        for &y1 in &h1.values() {
                            for &y2 in &h2.values() {
                                for &al in &alpha.values() {
                                    v.push(SetValuedFamily::Ellipse { e: [x1, x2], h: Point2::new(y1, y2), alpha: al });
                                }
                            }
                        }
                    }
                }
                v
            }
            ClassGrid::Bands { levels } => {
                let g = ParamRange::new(-1.0, 1.0, *levels).values();
                let mut v = Vec::new();
                for i in 0..g.len() {
                    for j in i..g.len() {
                        for k in j..g.len() {
                            for l in k..g.len() {
                                v.push(SetValuedFamily::Bands { params: [g[i], g[j], g[k], g[l]] });
                            }
                        }
                    }
                }
                v
            }
            ClassGrid::Quadrangle { t } => {
                let vals = t.values();
                let mut v = Vec::new();
                for &a in &vals {
                    for &b in &vals {
                        for &c in &vals {
                            for &d in &vals {
                                v.push(SetValuedFamily::quadrangle_bisector(body, [a, b, c, d])?);
                            }
                        }
                    }
                }
                v
            }
        };
        if out.is_empty() {
            return Err(Error::InvalidFamily("class grid is empty".into()));
        }
        Ok(out)
    }
}
