//! Measures on the cylinder `Gamma = boundary x [-1, 1]`: the limit measures
//! `M`, `M_p`, `Q` and the magnified sampling law `Q_n = P(tau_eps^{-1} . ) / a`.

pub mod density;
pub mod region;

use rayon::prelude::*;

pub use density::{BoundaryDensity, DensityModel, NormalSegments, Profile};
pub use region::{BoundaryFn, CylinderRegion, EnvelopeMode, GridIndicator, IntervalSet, SetOp};

use crate::error::Result;
use crate::geometry::{ConvexBody, CylinderPoint, Point2};
use crate::quad::{integrate, QuadOptions};

/// Raster used when a region has no exact sections.
pub const DEFAULT_RASTER: (usize, usize) = (1024, 256);

/// Angular cells per corner sector in raster mode.
const CORNER_PHI_CELLS: usize = 64;

fn theta_breakpoints(region: &CylinderRegion, body: &ConvexBody) -> Vec<f64> {
    let mut v = region.breakpoints();
    v.extend(body.corners().iter().map(|c| c.theta));
    v
}

/// `M_p(C)` with `p_+` on `s > 0` and `p_-` on `s <= 0`.
pub fn mp_measure(region: &CylinderRegion, dens: &BoundaryDensity, body: &ConvexBody) -> f64 {
    let period = body.perimeter();
    if region.is_sectionable() {
        let f = |t: f64| {
            let sec = region.section(t).expect("sectionable");
            dens.p_plus(body, t) * sec.length_within(0.0, 1.0) + dens.p_minus(body, t) * sec.length_within(-1.0, 0.0)
        };
        integrate(f, 0.0, period, &theta_breakpoints(region, body), QuadOptions::default())
    } else {
        let (nt, ns) = DEFAULT_RASTER;
        raster_sum(nt, ns, period, |t, s| {
            if !region.contains(t, s) {
                0.0
            } else if s > 0.0 {
                dens.p_plus(body, t)
            } else {
                dens.p_minus(body, t)
            }
        })
    }
}

/// Lebesgue measure `M(C)` on `Gamma` (that is, `M_p` with `p_+ = p_- = 1`).
pub fn m_measure(region: &CylinderRegion, body: &ConvexBody) -> f64 {
    let period = body.perimeter();
    if region.is_sectionable() {
        let f = |t: f64| region.section(t).expect("sectionable").length();
        integrate(f, 0.0, period, &theta_breakpoints(region, body), QuadOptions::default())
    } else {
        let (nt, ns) = DEFAULT_RASTER;
        raster_sum(nt, ns, period, |t, s| if region.contains(t, s) { 1.0 } else { 0.0 })
    }
}

/// `Q(C) = M_p(C) / M_p(Sigma)`.
pub fn q_measure(region: &CylinderRegion, dens: &BoundaryDensity, body: &ConvexBody) -> f64 {
    mp_measure(region, dens, body) / dens.mp_total()
}

/// Midpoint sum of `g(theta, s) dtheta ds` over the cylinder, summed row by row in a fixed order.
fn raster_sum<G: Fn(f64, f64) -> f64 + Sync>(nt: usize, ns: usize, period: f64, g: G) -> f64 {
    let (dt, ds) = (period / nt as f64, 2.0 / ns as f64);
    let rows: Vec<f64> = (0..nt)
        .into_par_iter()
        .map(|i| {
            let t = (i as f64 + 0.5) * dt;
            (0..ns).map(|j| g(t, -1.0 + (j as f64 + 0.5) * ds)).sum::<f64>()
        })
        .collect();
    rows.iter().sum::<f64>() * dt * ds
}

/// Mass of `tau_eps^{-1}` of an interval set at one theta, given the density along the normal.
fn strip_mass_at(body: &ConvexBody, dens: &BoundaryDensity, eps: f64, theta: f64, sec: &IntervalSet) -> f64 {
    let mut total = 0.0;
    for &(lo, hi, value) in dens.normal_segments(body, theta, eps).iter() {
        if value == 0.0 {
            continue;
        }
        for &(a, b) in sec.iter() {
            let (a, b) = (a.max(lo), b.min(hi));
            if b > a {
                total += value * body.jacobian_integral(eps, theta, a, b);
            }
        }
    }
    total
}

/// Mass of the outer corner sectors whose points map to `(theta_k, s)` with `s` in the section.
fn corner_mass(body: &ConvexBody, dens: &BoundaryDensity, eps: f64, section: impl Fn(f64) -> IntervalSet) -> f64 {
    body.corners()
        .iter()
        .map(|c| {
            let sec = section(c.theta);
            let mut m = 0.0;
            for &(lo, hi, value) in dens.normal_segments(body, c.theta, eps).iter() {
                for &(a, b) in sec.iter() {
                    let (a, b) = (a.max(lo).max(0.0), b.min(hi));
                    if b > a {
                        m += value * c.exterior_angle * eps * eps * (b * b - a * a) / 2.0;
                    }
                }
            }
            m
        })
        .sum()
}

/// `P(tau_eps^{-1} C)` for a sectionable region.
fn sectioned_probability(region: &CylinderRegion, dens: &BoundaryDensity, body: &ConvexBody, eps: f64) -> f64 {
    let f = |t: f64| strip_mass_at(body, dens, eps, t, &region.section(t).expect("sectionable"));
    let strips = integrate(f, 0.0, body.perimeter(), &theta_breakpoints(region, body), QuadOptions::default());
    strips + corner_mass(body, dens, eps, |t| region.section(t).expect("sectionable"))
}

/// `P(tau_eps^{-1} C)` on a raster: strip cells weighted by `p J`, corner sectors on a polar grid.
fn rastered_probability(
    region: &CylinderRegion,
    dens: &BoundaryDensity,
    body: &ConvexBody,
    eps: f64,
    raster: (usize, usize),
) -> f64 {
    let (nt, ns) = raster;
    let strips = raster_sum(nt, ns, body.perimeter(), |t, s| {
        if s < body.s_floor(eps, t) || !region.contains(t, s) {
            return 0.0;
        }
        let value = dens
            .normal_segments(body, t, eps)
            .iter()
            .find(|(lo, hi, _)| s >= *lo && s <= *hi)
            .map_or(0.0, |seg| seg.2);
        value * body.jacobian(eps, t, s)
    });
    let n_r = (ns / 2).max(1);
    let mut corners = 0.0;
    for c in body.corners() {
        let (dphi, dr) = (c.exterior_angle / CORNER_PHI_CELLS as f64, 1.0 / n_r as f64);
        let segs = dens.normal_segments(body, c.theta, eps);
        for k in 0..CORNER_PHI_CELLS {
            let dir = Point2::from_angle(c.normal_angle + (k as f64 + 0.5) * dphi);
            for j in 0..n_r {
                let s = (j as f64 + 0.5) * dr;
                let z = c.vertex + dir * (s * eps);
                if region.contains_point(CylinderPoint::new(c.theta, s), z) {
                    let value = segs.iter().find(|(lo, hi, _)| s >= *lo && s <= *hi).map_or(0.0, |seg| seg.2);
                    corners += value * s * eps * eps * dr * dphi;
                }
            }
        }
    }
    strips + corners
}

/// `P(tau_eps^{-1} C)`: exact sections when available, otherwise the default raster.
pub fn collar_probability(region: &CylinderRegion, dens: &BoundaryDensity, body: &ConvexBody, eps: f64) -> Result<f64> {
    dens.check_eps(body, eps)?;
    Ok(if region.is_sectionable() {
        sectioned_probability(region, dens, body, eps)
    } else {
        rastered_probability(region, dens, body, eps, DEFAULT_RASTER)
    })
}

/// As [`collar_probability`] but always on the given raster.
pub fn collar_probability_raster(
    region: &CylinderRegion,
    dens: &BoundaryDensity,
    body: &ConvexBody,
    eps: f64,
    raster: (usize, usize),
) -> Result<f64> {
    dens.check_eps(body, eps)?;
    Ok(rastered_probability(region, dens, body, eps, raster))
}

/// `P(V_width)` without the support-square checks; used while validating a density.
pub(crate) fn collar_mass_unchecked(dens: &BoundaryDensity, body: &ConvexBody, width: f64) -> f64 {
    sectioned_probability(&CylinderRegion::full(), dens, body, width)
}

/// `a = P(V_eps)`.
pub fn neighborhood_mass(body: &ConvexBody, dens: &BoundaryDensity, eps: f64) -> Result<f64> {
    dens.check_eps(body, eps)?;
    Ok(match dens.model() {
        DensityModel::TwoLevel { c_in, c_out, .. } => c_out * body.outer_area(eps) + c_in * body.inner_area(eps),
        DensityModel::Collar { .. } => collar_mass_unchecked(dens, body, eps),
    })
}

/// `Q_n(C) = P(tau_eps^{-1} C) / P(V_eps)`.
pub fn qn_measure(region: &CylinderRegion, dens: &BoundaryDensity, body: &ConvexBody, eps: f64) -> Result<f64> {
    let a = neighborhood_mass(body, dens, eps)?;
    Ok(collar_probability(region, dens, body, eps)? / a)
}

/// Total variation distance between `Q_n` and `Q`.
///
/// The absolutely continuous parts are compared with the midpoint rule on an
/// `n_theta x n_s` grid. For polygons `Q_n` also charges the corner lines
/// `{theta_k} x (0, 1]` (images of the outer corner sectors), which `Q` does
/// not; that mass enters in full.
pub fn tv_distance(dens: &BoundaryDensity, body: &ConvexBody, eps: f64, grid: (usize, usize)) -> Result<f64> {
    let a = neighborhood_mass(body, dens, eps)?;
    let mp = dens.mp_total();
    let (nt, ns) = grid;
    let ac = raster_sum(nt, ns, body.perimeter(), |t, s| {
        let q = if s > 0.0 { dens.p_plus(body, t) } else { dens.p_minus(body, t) } / mp;
        let p = dens
            .normal_segments(body, t, eps)
            .iter()
            .find(|(lo, hi, _)| s >= *lo && s <= *hi)
            .map_or(0.0, |seg| seg.2);
        (p * body.jacobian(eps, t, s) / a - q).abs()
    });
    let singular = corner_mass(body, dens, eps, |_| IntervalSet::full()) / a;
    Ok(0.5 * (ac + singular))
}

/// `M(image symmetric-difference B)`: exact sections when both are sectionable,
/// otherwise a raster of at least `1024 x 512` cells.
pub fn derivative_deficit(image: &CylinderRegion, b: &CylinderRegion, body: &ConvexBody) -> f64 {
    let sd = image.symmetric_difference(b);
    if sd.is_sectionable() {
        m_measure(&sd, body)
    } else {
        raster_sum(1024, 512, body.perimeter(), |t, s| if sd.contains(t, s) { 1.0 } else { 0.0 })
    }
}

/// One row of a differentiation-in-measure table.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DerivativeRow {
    pub eps: f64,
    /// `P(A(eps)) / eps`.
    pub ratio: f64,
    /// `M_p(B)`.
    pub mp_b: f64,
    /// `M(tau_eps A(eps) symmetric-difference B)`.
    pub deficit: f64,
}

/// Ratio table for a family given by its `tau`-images at each `eps`.
pub fn measure_derivative_check<F>(
    images: F,
    b: &CylinderRegion,
    dens: &BoundaryDensity,
    body: &ConvexBody,
    eps_grid: &[f64],
) -> Result<Vec<DerivativeRow>>
where
    F: Fn(f64) -> Result<CylinderRegion>,
{
    let mp_b = mp_measure(b, dens, body);
    eps_grid
        .iter()
        .map(|&eps| {
            let image = images(eps)?;
            let p = collar_probability(&image, dens, body, eps)?;
            Ok(DerivativeRow { eps, ratio: p / eps, mp_b, deficit: derivative_deficit(&image, b, body) })
        })
        .collect()
}
