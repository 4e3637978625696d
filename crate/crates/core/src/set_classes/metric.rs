//! The pseudometrics `d(C, C') = Q(C sd C')^{1/2}`, `d_n(A, A') = P_eps(A sd A')^{1/2}`
//! and the Hausdorff distance between discretised classes.

use rayon::prelude::*;

use super::family::{tau_image, FamilyElement};
use crate::boundary_measure::{q_measure, qn_measure, BoundaryDensity, CylinderRegion, IntervalSet};
use crate::error::{Error, Result};
use crate::geometry::ConvexBody;

pub fn d_metric(b1: &CylinderRegion, b2: &CylinderRegion, dens: &BoundaryDensity, body: &ConvexBody) -> f64 {
    if b1 == b2 {
        return 0.0;
    }
    q_measure(&b1.symmetric_difference(b2), dens, body).max(0.0).sqrt()
}

/// `d_n` through the `tau`-images: `Q_n(tau A sd tau A')^{1/2}`.
pub fn dn_metric(
    a1: &FamilyElement,
    a2: &FamilyElement,
    dens: &BoundaryDensity,
    body: &ConvexBody,
    eps: f64,
) -> Result<f64> {
    if a1 == a2 {
        return Ok(0.0);
    }
    let (i1, i2) = (tau_image(a1, body, eps)?, tau_image(a2, body, eps)?);
    dn_regions(&i1, &i2, dens, body, eps)
}

/// `Q_n(C sd C')^{1/2}` for cylinder regions.
pub fn dn_regions(
    c1: &CylinderRegion,
    c2: &CylinderRegion,
    dens: &BoundaryDensity,
    body: &ConvexBody,
    eps: f64,
) -> Result<f64> {
    Ok(qn_measure(&c1.symmetric_difference(c2), dens, body, eps)?.max(0.0).sqrt())
}

enum Slice {
    /// The section is the band `(0, f]` or `(f, 0]`.
    Band(f64),
    General(IntervalSet),
}

/// Sections of many regions at fixed `theta` midpoints, for fast `Q`-distances.
/// Accurate to the midpoint rule in `theta` (the s-direction is exact).
pub struct SectionTable {
    weights_plus: Vec<f64>,
    weights_minus: Vec<f64>,
    rows: Vec<Vec<Slice>>,
}

impl SectionTable {
    pub fn new(regions: &[CylinderRegion], dens: &BoundaryDensity, body: &ConvexBody, n_theta: usize) -> Result<Self> {
        if regions.iter().any(|r| !r.is_sectionable()) {
            return Err(Error::InvalidRegion("section tables need sectionable regions".into()));
        }
        let period = body.perimeter();
        let dt = period / n_theta as f64;
        let thetas: Vec<f64> = (0..n_theta).map(|i| (i as f64 + 0.5) * dt).collect();
        let mp = dens.mp_total();
        let weights_plus = thetas.iter().map(|&t| dens.p_plus(body, t) * dt / mp).collect();
        let weights_minus = thetas.iter().map(|&t| dens.p_minus(body, t) * dt / mp).collect();
        let rows = regions
            .par_iter()
            .map(|r| {
                thetas
                    .iter()
                    .map(|&t| {
                        let sec = r.section(t).expect("sectionable");
                        let parts: Vec<_> = sec.iter().copied().collect();
                        match parts.as_slice() {
                            [] => Slice::Band(0.0),
                            [(lo, hi)] if *lo == 0.0 => Slice::Band(*hi),
                            [(lo, hi)] if *hi == 0.0 => Slice::Band(*lo),
                            _ => Slice::General(sec),
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Self { weights_plus, weights_minus, rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `Q(C_i sd C_j)` with the table of `self` for `i` and `other` for `j`.
    pub fn q_symdiff(&self, i: usize, other: &SectionTable, j: usize) -> f64 {
        let (r1, r2) = (&self.rows[i], &other.rows[j]);
        let mut total = 0.0;
        for k in 0..r1.len() {
            let (up, down) = match (&r1[k], &r2[k]) {
                (Slice::Band(f), Slice::Band(g)) => {
                    ((f.max(0.0) - g.max(0.0)).abs(), (f.min(0.0) - g.min(0.0)).abs())
                }
                (x, y) => {
                    let sd = x.to_set().symmetric_difference(&y.to_set());
                    (sd.length_within(0.0, 1.0), sd.length_within(-1.0, 0.0))
                }
            };
            total += self.weights_plus[k] * up + self.weights_minus[k] * down;
        }
        total
    }

    pub fn d(&self, i: usize, other: &SectionTable, j: usize) -> f64 {
        self.q_symdiff(i, other, j).max(0.0).sqrt()
    }

    /// Matrix `d(C_i, C'_j)`, row-major.
    pub fn d_matrix(&self, other: &SectionTable) -> Vec<Vec<f64>> {
        (0..self.len()).into_par_iter().map(|i| (0..other.len()).map(|j| self.d(i, other, j)).collect()).collect()
    }
}

impl Slice {
    fn to_set(&self) -> IntervalSet {
        match self {
            Slice::Band(f) if *f > 0.0 => IntervalSet::single(0.0, *f),
            Slice::Band(f) => IntervalSet::single(*f, 0.0),
            Slice::General(s) => s.clone(),
        }
    }
}

/// Hausdorff distance from a distance matrix `d[i][j]` between grid `i` and grid `j`.
pub fn hausdorff_from_matrix(d: &[Vec<f64>]) -> Result<f64> {
    if d.is_empty() || d[0].is_empty() {
        return Err(Error::InvalidFamily("both class grids must be nonempty".into()));
    }
    let rows = d.iter().map(|r| r.iter().copied().fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    let cols = (0..d[0].len()).map(|j| d.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    Ok(rows.max(cols))
}

/// Hausdorff `d`-distance between two discretised classes (exact quadrature per pair).
pub fn hausdorff_gamma(
    bn_grid: &[CylinderRegion],
    b_grid: &[CylinderRegion],
    dens: &BoundaryDensity,
    body: &ConvexBody,
) -> Result<f64> {
    if bn_grid.is_empty() || b_grid.is_empty() {
        return Err(Error::InvalidFamily("both class grids must be nonempty".into()));
    }
    let d: Vec<Vec<f64>> =
        bn_grid.par_iter().map(|x| b_grid.iter().map(|y| d_metric(x, y, dens, body)).collect()).collect();
    hausdorff_from_matrix(&d)
}

/// Hausdorff distance computed on a section table with `n_theta` midpoints.
pub fn hausdorff_gamma_tabulated(
    bn_grid: &[CylinderRegion],
    b_grid: &[CylinderRegion],
    dens: &BoundaryDensity,
    body: &ConvexBody,
    n_theta: usize,
) -> Result<(f64, Vec<Vec<f64>>)> {
    if bn_grid.is_empty() || b_grid.is_empty() {
        return Err(Error::InvalidFamily("both class grids must be nonempty".into()));
    }
    let t1 = SectionTable::new(bn_grid, dens, body, n_theta)?;
    let t2 = SectionTable::new(b_grid, dens, body, n_theta)?;
    let d = t1.d_matrix(&t2);
    Ok((hausdorff_from_matrix(&d)?, d))
}
