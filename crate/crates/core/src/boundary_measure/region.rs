//! Measurable subsets of the cylinder `Gamma = [0, L) x [-1, 1]`.
//!
//! Most regions are *sectionable*: for every `theta` the slice
//! `{s : (theta, s) in C}` is a finite union of intervals that can be
//! computed exactly. Measures of such regions reduce to one-dimensional
//! quadrature in `theta`. Regions defined through an ambient membership
//! predicate (`TauImage`) are only available pointwise and are measured on a
//! raster.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, CylinderPoint, Point2};
use crate::set_classes::ambient::{AmbientSet, Ellipse};

/// Sorted, disjoint, nonempty open intervals inside `[-1, 1]`. Endpoints carry no
/// membership information; the type is used for lengths only.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntervalSet {
    items: SmallVec<[(f64, f64); 2]>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        Self::single(-1.0, 1.0)
    }

    pub fn single(lo: f64, hi: f64) -> Self {
        let (lo, hi) = (lo.max(-1.0), hi.min(1.0));
        let mut items = SmallVec::new();
        if hi > lo {
            items.push((lo, hi));
        }
        Self { items }
    }

    pub fn from_intervals<I: IntoIterator<Item = (f64, f64)>>(iter: I) -> Self {
        let mut v: SmallVec<[(f64, f64); 2]> =
            iter.into_iter().map(|(a, b)| (a.max(-1.0), b.min(1.0))).filter(|(a, b)| b > a).collect();
        v.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut items: SmallVec<[(f64, f64); 2]> = SmallVec::new();
        for (a, b) in v {
            match items.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => items.push((a, b)),
            }
        }
        Self { items }
    }

    pub fn iter(&self) -> impl Iterator<Item = &(f64, f64)> {
        self.items.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.items.iter().map(|(a, b)| b - a).sum()
    }

    /// Length of the part inside `[lo, hi]`.
    pub fn length_within(&self, lo: f64, hi: f64) -> f64 {
        self.items.iter().map(|&(a, b)| (b.min(hi) - a.max(lo)).max(0.0)).sum()
    }

    pub fn union(&self, o: &IntervalSet) -> IntervalSet {
        IntervalSet::from_intervals(self.items.iter().chain(o.items.iter()).copied())
    }

    pub fn intersection(&self, o: &IntervalSet) -> IntervalSet {
        let mut items = SmallVec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.items.len() && j < o.items.len() {
            let (a0, a1) = self.items[i];
            let (b0, b1) = o.items[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if hi > lo {
                items.push((lo, hi));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet { items }
    }

    pub fn complement(&self) -> IntervalSet {
        let mut items = SmallVec::new();
        let mut cursor = -1.0;
        for &(a, b) in &self.items {
            if a > cursor {
                items.push((cursor, a));
            }
            cursor = b;
        }
        if cursor < 1.0 {
            items.push((cursor, 1.0));
        }
        IntervalSet { items }
    }

    pub fn difference(&self, o: &IntervalSet) -> IntervalSet {
        self.intersection(&o.complement())
    }

    pub fn symmetric_difference(&self, o: &IntervalSet) -> IntervalSet {
        self.difference(o).union(&o.difference(self))
    }

    pub fn apply(&self, op: SetOp, o: &IntervalSet) -> IntervalSet {
        match op {
            SetOp::Union => self.union(o),
            SetOp::Intersection => self.intersection(o),
            SetOp::Difference => self.difference(o),
            SetOp::SymmetricDifference => self.symmetric_difference(o),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetOp {
    Union,
    Intersection,
    Difference,
    SymmetricDifference,
}

impl SetOp {
    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            SetOp::Union => a || b,
            SetOp::Intersection => a && b,
            SetOp::Difference => a && !b,
            SetOp::SymmetricDifference => a != b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeMode {
    /// `min(f_lo, 0)`: lower edge of the outer bracket set.
    LowerEdge,
    /// `max(f_hi, 0)`: upper edge of the outer bracket set.
    UpperEdge,
    /// Band function of the inner bracket set: `f_lo` where positive, `f_hi` where negative, else 0.
    Inner,
}

fn one() -> f64 {
    1.0
}

/// Functions `theta -> [-1, 1]` that describe band-shaped regions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BoundaryFn {
    Constant { value: f64 },
    /// `a + b sin^2(phi - alpha) + c sin(phi - alpha) + d cos(phi - alpha)` with `phi = theta / scale`.
    EllipseF {
        alpha: f64,
        a: f64,
        b: f64,
        c: f64,
        d: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `slopes[m] (theta - knots[m]) + intercepts[m]` on `[knots[m], knots[m+1])`.
    PiecewiseLinear { knots: Vec<f64>, slopes: Vec<f64>, intercepts: Vec<f64>, period: f64 },
    /// Piecewise-linear interpolation of `values[m]` on equally spaced nodes of side `m`.
    PiecewiseConcave { knots: Vec<f64>, values: Vec<Vec<f64>>, period: f64 },
    /// `(rho(theta) - radius) / eps` where `rho` is the radial function of an ellipse seen
    /// from the center of a disc body of the given radius.
    Radial { center: Point2, radius: f64, eps: f64, ellipse: Ellipse },
    /// Pointwise envelope of `EllipseF` over the coefficient box `lo..hi` (with fixed `alpha`).
    EllipseEnvelope {
        alpha: f64,
        #[serde(default = "one")]
        scale: f64,
        lo: [f64; 4],
        hi: [f64; 4],
        mode: EnvelopeMode,
    },
}

fn piece_index(knots: &[f64], period: f64, theta: f64) -> (usize, f64) {
    let t = theta.rem_euclid(period);
    let m = match knots.binary_search_by(|k| k.total_cmp(&t)) {
        Ok(i) => i,
        Err(i) => i.saturating_sub(1),
    };
    (m, t)
}

impl BoundaryFn {
    pub fn eval(&self, theta: f64) -> f64 {
        match self {
            BoundaryFn::Constant { value } => *value,
            BoundaryFn::EllipseF { alpha, a, b, c, d, scale } => {
                let (s, co) = (theta / scale - alpha).sin_cos();
                a + b * s * s + c * s + d * co
            }
            BoundaryFn::PiecewiseLinear { knots, slopes, intercepts, period } => {
                let (m, t) = piece_index(knots, *period, theta);
                slopes[m] * (t - knots[m]) + intercepts[m]
            }
            BoundaryFn::PiecewiseConcave { knots, values, period } => {
                let (m, t) = piece_index(knots, *period, theta);
                let end = if m + 1 < knots.len() { knots[m + 1] } else { *period };
                let nodes = &values[m];
                let u = ((t - knots[m]) / (end - knots[m])).clamp(0.0, 1.0) * (nodes.len() - 1) as f64;
                let k = (u.floor() as usize).min(nodes.len() - 2);
                let w = u - k as f64;
                nodes[k] * (1.0 - w) + nodes[k + 1] * w
            }
            BoundaryFn::Radial { center, radius, eps, ellipse } => {
                let dir = Point2::from_angle(theta / radius);
                match ellipse.ray_exit(*center, dir) {
                    Some(rho) => (rho - radius) / eps,
                    None => -1.0,
                }
            }
            BoundaryFn::EllipseEnvelope { alpha, scale, lo, hi, mode } => {
                let (s, co) = (theta / scale - alpha).sin_cos();
                let basis = [1.0, s * s, s, co];
                let (mut f_lo, mut f_hi) = (0.0, 0.0);
                for k in 0..4 {
                    let (p, q) = (lo[k] * basis[k], hi[k] * basis[k]);
                    f_lo += p.min(q);
                    f_hi += p.max(q);
                }
                match mode {
                    EnvelopeMode::LowerEdge => f_lo.min(0.0),
                    EnvelopeMode::UpperEdge => f_hi.max(0.0),
                    EnvelopeMode::Inner => {
                        if f_lo > 0.0 {
                            f_lo
                        } else if f_hi < 0.0 {
                            f_hi
                        } else {
                            0.0
                        }
                    }
                }
            }
        }
    }

    /// Points where the function may jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            BoundaryFn::PiecewiseLinear { knots, .. } | BoundaryFn::PiecewiseConcave { knots, .. } => knots.clone(),
            _ => Vec::new(),
        }
    }

    /// Structural checks plus `|f| <= 1` on a dense grid over `[0, period)`.
    pub fn validate(&self, period: f64) -> Result<()> {
        match self {
            BoundaryFn::PiecewiseLinear { knots, slopes, intercepts, period: p } => {
                if knots.is_empty() || slopes.len() != knots.len() || intercepts.len() != knots.len() {
                    return Err(Error::InvalidRegion("piecewise-linear pieces are inconsistent".into()));
                }
                check_knots(knots, *p)?;
            }
            BoundaryFn::PiecewiseConcave { knots, values, period: p } => {
                if knots.is_empty() || values.len() != knots.len() || values.iter().any(|v| v.len() < 2) {
                    return Err(Error::InvalidRegion("piecewise-concave pieces are inconsistent".into()));
                }
                check_knots(knots, *p)?;
                for v in values {
                    if v.windows(3).any(|w| w[0] - 2.0 * w[1] + w[2] > 1e-12) {
                        return Err(Error::InvalidRegion("side function is not concave".into()));
                    }
                }
            }
            _ => {}
        }
        let n = 8192;
        let mut probes: Vec<f64> = (0..n).map(|i| period * i as f64 / n as f64).collect();
        probes.extend(self.breakpoints());
        for t in probes {
            let v = self.eval(t);
            if !v.is_finite() || v.abs() > 1.0 + 1e-12 {
                return Err(Error::InvalidRegion(format!("|f({t})| = {} exceeds 1", v.abs())));
            }
        }
        Ok(())
    }
}

fn check_knots(knots: &[f64], period: f64) -> Result<()> {
    if knots[0] != 0.0 || knots.windows(2).any(|w| w[1] <= w[0]) || *knots.last().unwrap() >= period {
        return Err(Error::InvalidRegion("knots must start at 0 and increase below the period".into()));
    }
    Ok(())
}

/// Boolean raster of the cylinder, `cells[i * n_s + j]` for theta-column `i` and s-row `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridDump", into = "GridDump")]
pub struct GridIndicator {
    pub n_theta: usize,
    pub n_s: usize,
    pub period: f64,
    cells: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct GridDump {
    n_theta: usize,
    n_s: usize,
    period: f64,
    /// One string of '0'/'1' per theta-column.
    columns: Vec<String>,
}

impl TryFrom<GridDump> for GridIndicator {
    type Error = Error;
    fn try_from(d: GridDump) -> Result<Self> {
        if d.columns.len() != d.n_theta || d.columns.iter().any(|c| c.len() != d.n_s) {
            return Err(Error::InvalidRegion("raster dimensions do not match".into()));
        }
        let cells = d.columns.iter().flat_map(|c| c.bytes().map(|b| b == b'1')).collect();
        GridIndicator::new(d.n_theta, d.n_s, d.period, cells)
    }
}

impl From<GridIndicator> for GridDump {
    fn from(g: GridIndicator) -> Self {
        let columns = g
            .cells
            .chunks(g.n_s)
            .map(|col| col.iter().map(|&b| if b { '1' } else { '0' }).collect())
            .collect();
        GridDump { n_theta: g.n_theta, n_s: g.n_s, period: g.period, columns }
    }
}

impl GridIndicator {
    pub fn new(n_theta: usize, n_s: usize, period: f64, cells: Vec<bool>) -> Result<Self> {
        if n_theta == 0 || n_s == 0 || cells.len() != n_theta * n_s || !(period > 0.0) {
            return Err(Error::InvalidRegion("raster dimensions do not match".into()));
        }
        Ok(Self { n_theta, n_s, period, cells })
    }

    pub fn cell(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.n_s + j]
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    fn column(&self, theta: f64) -> usize {
        let t = theta.rem_euclid(self.period);
        ((t / self.period * self.n_theta as f64) as usize).min(self.n_theta - 1)
    }

    fn contains(&self, theta: f64, s: f64) -> bool {
        if !(-1.0..=1.0).contains(&s) {
            return false;
        }
        let j = (((s + 1.0) / 2.0 * self.n_s as f64) as usize).min(self.n_s - 1);
        self.cell(self.column(theta), j)
    }

    fn section(&self, theta: f64) -> IntervalSet {
        let i = self.column(theta);
        let h = 2.0 / self.n_s as f64;
        let mut runs = Vec::new();
        let mut start: Option<usize> = None;
        for j in 0..=self.n_s {
            let on = j < self.n_s && self.cell(i, j);
            match (on, start) {
                (true, None) => start = Some(j),
                (false, Some(a)) => {
                    runs.push((-1.0 + a as f64 * h, -1.0 + j as f64 * h));
                    start = None;
                }
                _ => {}
            }
        }
        IntervalSet::from_intervals(runs)
    }
}

/// A measurable subset of the cylinder `Gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CylinderRegion {
    /// `{0 < s <= f(theta)} cup {f(theta) < s <= 0}`.
    Band { f: BoundaryFn },
    /// `{lower(theta) < s <= upper(theta)}`.
    Between { lower: BoundaryFn, upper: BoundaryFn },
    /// `{s in union of closed intervals}` for every theta.
    #[serde(rename = "sband")]
    SBand { intervals: Vec<[f64; 2]> },
    /// `{theta in union of [t0, t1)} x {s in union of closed intervals}`.
    Rect { theta: Vec<[f64; 2]>, s: Vec<[f64; 2]> },
    Grid(GridIndicator),
    /// `tau_eps(A)` for an ambient set `A` inside `V_eps`.
    TauImage { set: AmbientSet, body: ConvexBody, eps: f64 },
    Composite { op: SetOp, left: Box<CylinderRegion>, right: Box<CylinderRegion> },
}

impl CylinderRegion {
    pub fn full() -> Self {
        CylinderRegion::SBand { intervals: vec![[-1.0, 1.0]] }
    }

    pub fn empty() -> Self {
        CylinderRegion::SBand { intervals: Vec::new() }
    }

    /// `{s > 0}` (the point `s = 0` is an `M`-null set).
    pub fn upper() -> Self {
        CylinderRegion::SBand { intervals: vec![[0.0, 1.0]] }
    }

    pub fn lower() -> Self {
        CylinderRegion::SBand { intervals: vec![[-1.0, 0.0]] }
    }

    pub fn sband(intervals: Vec<[f64; 2]>) -> Result<Self> {
        check_intervals(&intervals, -1.0, 1.0)?;
        Ok(CylinderRegion::SBand { intervals })
    }

    pub fn rect(theta: Vec<[f64; 2]>, s: Vec<[f64; 2]>) -> Result<Self> {
        check_intervals(&theta, f64::NEG_INFINITY, f64::INFINITY)?;
        check_intervals(&s, -1.0, 1.0)?;
        Ok(CylinderRegion::Rect { theta, s })
    }

    /// Validated band region; `period` is the boundary length used for the `|f| <= 1` scan.
    pub fn band(f: BoundaryFn, period: f64) -> Result<Self> {
        f.validate(period)?;
        Ok(CylinderRegion::Band { f })
    }

    pub fn between(lower: BoundaryFn, upper: BoundaryFn, period: f64) -> Result<Self> {
        lower.validate(period)?;
        upper.validate(period)?;
        Ok(CylinderRegion::Between { lower, upper })
    }

    pub fn combine(op: SetOp, left: CylinderRegion, right: CylinderRegion) -> Self {
        CylinderRegion::Composite { op, left: Box::new(left), right: Box::new(right) }
    }

    pub fn union(&self, o: &CylinderRegion) -> Self {
        Self::combine(SetOp::Union, self.clone(), o.clone())
    }

    pub fn intersection(&self, o: &CylinderRegion) -> Self {
        Self::combine(SetOp::Intersection, self.clone(), o.clone())
    }

    pub fn difference(&self, o: &CylinderRegion) -> Self {
        Self::combine(SetOp::Difference, self.clone(), o.clone())
    }

    pub fn symmetric_difference(&self, o: &CylinderRegion) -> Self {
        Self::combine(SetOp::SymmetricDifference, self.clone(), o.clone())
    }

    /// Pointwise membership on `Gamma`.
    pub fn contains(&self, theta: f64, s: f64) -> bool {
        match self {
            CylinderRegion::Band { f } => {
                let v = f.eval(theta);
                (s > 0.0 && s <= v) || (s > v && s <= 0.0)
            }
            CylinderRegion::Between { lower, upper } => s > lower.eval(theta) && s <= upper.eval(theta),
            CylinderRegion::SBand { intervals } => intervals.iter().any(|iv| s >= iv[0] && s <= iv[1]),
            CylinderRegion::Rect { theta: ts, s: ss } => {
                ts.iter().any(|iv| theta >= iv[0] && theta < iv[1]) && ss.iter().any(|iv| s >= iv[0] && s <= iv[1])
            }
            CylinderRegion::Grid(g) => g.contains(theta, s),
            CylinderRegion::TauImage { set, body, eps } => {
                if s < body.s_floor(*eps, theta) {
                    return false;
                }
                match body.unmagnify(*eps, CylinderPoint::new(theta, s)) {
                    Ok(z) => set.contains(z),
                    Err(_) => false,
                }
            }
            CylinderRegion::Composite { op, left, right } => op.apply(left.contains(theta, s), right.contains(theta, s)),
        }
    }

    /// Membership of a sample point known both in cylinder coordinates and in the plane.
    /// `TauImage` parts are decided by the ambient point, which stays exact at polygon corners.
    pub fn contains_point(&self, c: CylinderPoint, z: Point2) -> bool {
        match self {
            CylinderRegion::TauImage { set, .. } => set.contains(z),
            CylinderRegion::Composite { op, left, right } => {
                op.apply(left.contains_point(c, z), right.contains_point(c, z))
            }
            _ => self.contains(c.theta, c.s),
        }
    }

    pub fn is_sectionable(&self) -> bool {
        match self {
            CylinderRegion::TauImage { .. } => false,
            CylinderRegion::Composite { left, right, .. } => left.is_sectionable() && right.is_sectionable(),
            _ => true,
        }
    }

    /// The slice at `theta` as an interval set, when exactly available.
    pub fn section(&self, theta: f64) -> Option<IntervalSet> {
        Some(match self {
            CylinderRegion::Band { f } => {
                let v = f.eval(theta).clamp(-1.0, 1.0);
                if v > 0.0 {
                    IntervalSet::single(0.0, v)
                } else {
                    IntervalSet::single(v, 0.0)
                }
            }
            CylinderRegion::Between { lower, upper } => IntervalSet::single(lower.eval(theta), upper.eval(theta)),
            CylinderRegion::SBand { intervals } => IntervalSet::from_intervals(intervals.iter().map(|iv| (iv[0], iv[1]))),
            CylinderRegion::Rect { theta: ts, s } => {
                if ts.iter().any(|iv| theta >= iv[0] && theta < iv[1]) {
                    IntervalSet::from_intervals(s.iter().map(|iv| (iv[0], iv[1])))
                } else {
                    IntervalSet::empty()
                }
            }
            CylinderRegion::Grid(g) => g.section(theta),
            CylinderRegion::TauImage { .. } => return None,
            CylinderRegion::Composite { op, left, right } => left.section(theta)?.apply(*op, &right.section(theta)?),
        })
    }

    /// Theta values where the section may jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            CylinderRegion::Band { f } => f.breakpoints(),
            CylinderRegion::Between { lower, upper } => {
                let mut v = lower.breakpoints();
                v.extend(upper.breakpoints());
                v
            }
            CylinderRegion::SBand { .. } | CylinderRegion::TauImage { .. } => Vec::new(),
            CylinderRegion::Rect { theta, .. } => theta.iter().flat_map(|iv| [iv[0], iv[1]]).collect(),
            CylinderRegion::Grid(g) => (0..=g.n_theta).map(|i| g.period * i as f64 / g.n_theta as f64).collect(),
            CylinderRegion::Composite { left, right, .. } => {
                let mut v = left.breakpoints();
                v.extend(right.breakpoints());
                v
            }
        }
    }

    /// Midpoint raster with `n_theta x n_s` cells over `[0, period) x [-1, 1]`.
    pub fn rasterize(&self, n_theta: usize, n_s: usize, period: f64) -> GridIndicator {
        let cells: Vec<bool> = (0..n_theta)
            .into_par_iter()
            .flat_map_iter(|i| {
                let theta = period * (i as f64 + 0.5) / n_theta as f64;
                (0..n_s).map(move |j| self.contains(theta, -1.0 + 2.0 * (j as f64 + 0.5) / n_s as f64))
            })
            .collect();
        GridIndicator::new(n_theta, n_s, period, cells).expect("consistent raster")
    }
}

fn check_intervals(ivs: &[[f64; 2]], lo: f64, hi: f64) -> Result<()> {
    for iv in ivs {
        if !(iv[0] <= iv[1]) || iv[0] < lo || iv[1] > hi {
            return Err(Error::InvalidRegion(format!("interval [{}, {}] is not inside [{lo}, {hi}]", iv[0], iv[1])));
        }
    }
    Ok(())
}

/// `{theta in [t0, t1)}` over the whole s-range.
pub fn theta_slab(t0: f64, t1: f64) -> CylinderRegion {
    CylinderRegion::Rect { theta: vec![[t0, t1]], s: vec![[-1.0, 1.0]] }
}

/// Half-cylinder `theta in [0, pi)` on the unit disc.
pub fn upper_half_disc_slab() -> CylinderRegion {
    theta_slab(0.0, PI)
}
