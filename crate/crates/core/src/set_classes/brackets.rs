//! Bracketing covers `[L, U]` with `L subset A subset U` and `d_n(L, U) <= delta`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::family::FamilyKind;
use crate::boundary_measure::{qn_measure, BoundaryDensity, BoundaryFn, CylinderRegion, EnvelopeMode};
use crate::error::{Error, Result};
use crate::geometry::ConvexBody;

/// Classes for which covers are constructed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BracketFamily {
    IntervalBands,
    /// `F_E` bands with fixed `alpha` and coefficients `(a, b, c, d)` in the box `lo..hi`.
    EllipseBands { alpha: f64, scale: f64, lo: [f64; 4], hi: [f64; 4] },
    Other(FamilyKind),
}

/// How a bracket is indexed, so members can be located without search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BracketCell {
    All,
    /// Quantile cells holding `a, b, c, d`.
    Bands { cells: [usize; 4] },
    /// Coefficient box.
    Ellipse { lo: [f64; 4], hi: [f64; 4] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lower: CylinderRegion,
    pub upper: CylinderRegion,
    /// `d_n(lower, upper)`.
    pub size: f64,
    pub cell: BracketCell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketSet {
    pub delta: f64,
    pub eps: f64,
    pub brackets: Vec<Bracket>,
    pub count: usize,
    /// Quantile points of the s-marginal of `Q_n` (interval bands only).
    pub quantiles: Vec<f64>,
    /// Cells per coefficient (ellipse bands only).
    pub resolution: usize,
}

fn sband(ivs: &[(f64, f64)]) -> CylinderRegion {
    CylinderRegion::SBand { intervals: ivs.iter().filter(|(a, b)| b >= a).map(|&(a, b)| [a, b]).collect() }
}

/// Points `-1 = q_0 < ... < q_k = 1` with `Q_n(s <= q_i) = i / k`.
pub fn marginal_quantiles(dens: &BoundaryDensity, body: &ConvexBody, eps: f64, k: usize) -> Result<Vec<f64>> {
    let cdf = |s: f64| qn_measure(&CylinderRegion::SBand { intervals: vec![[-1.0, s]] }, dens, body, eps);
    let mut q = vec![-1.0];
    for i in 1..k {
        let target = i as f64 / k as f64;
        let (mut lo, mut hi) = (*q.last().unwrap(), 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if cdf(mid)? < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        q.push(0.5 * (lo + hi));
    }
    q.push(1.0);
    Ok(q)
}

pub fn bracket_cover(
    family: &BracketFamily,
    delta: f64,
    dens: &BoundaryDensity,
    body: &ConvexBody,
    eps: f64,
) -> Result<BracketSet> {
    if !(delta > 0.0) {
        return Err(Error::InvalidFamily("delta must be positive".into()));
    }
    dens.check_eps(body, eps)?;
    match family {
        BracketFamily::Other(kind) => {
            return Err(Error::UnsupportedFamily(format!("no bracketing construction for {kind:?}")));
        }
        _ if delta >= 1.0 => {
            let b = Bracket {
                lower: CylinderRegion::empty(),
                upper: CylinderRegion::full(),
                size: qn_measure(&CylinderRegion::full(), dens, body, eps)?.sqrt(),
                cell: BracketCell::All,
            };
            return Ok(BracketSet { delta, eps, brackets: vec![b], count: 1, quantiles: Vec::new(), resolution: 0 });
        }
        BracketFamily::IntervalBands => interval_cover(delta, dens, body, eps),
        BracketFamily::EllipseBands { alpha, scale, lo, hi } => ellipse_cover(*alpha, *scale, *lo, *hi, delta, dens, body, eps),
    }
}

fn interval_cover(delta: f64, dens: &BoundaryDensity, body: &ConvexBody, eps: f64) -> Result<BracketSet> {
    // U \ L is covered by at most four cells of mass 1/k each, so 4/k < delta^2 strictly
    let k = (4.0 / (delta * delta)).floor() as usize + 1;
    let q = marginal_quantiles(dens, body, eps, k)?;
    let masses: Vec<f64> = (0..k)
        .map(|i| qn_measure(&CylinderRegion::SBand { intervals: vec![[q[i], q[i + 1]]] }, dens, body, eps))
        .collect::<Result<_>>()?;
    let mut brackets = Vec::new();
    for ia in 0..k {
        for ib in ia..k {
            for ic in ib..k {
                for id in ic..k {
                    let lower = sband(&[(q[ia + 1], q[ib]), (q[ic + 1], q[id])]);
                    let upper = sband(&[(q[ia], q[ib + 1]), (q[ic], q[id + 1])]);
                    let mut cells = vec![ia, ib, ic, id];
                    cells.dedup();
                    let size = cells.iter().map(|&c| masses[c]).sum::<f64>().sqrt();
                    brackets.push(Bracket { lower, upper, size, cell: BracketCell::Bands { cells: [ia, ib, ic, id] } });
                }
            }
        }
    }
    let count = brackets.len();
    Ok(BracketSet { delta, eps, brackets, count, quantiles: q, resolution: k })
}

fn envelope(alpha: f64, scale: f64, lo: [f64; 4], hi: [f64; 4], mode: EnvelopeMode) -> BoundaryFn {
    BoundaryFn::EllipseEnvelope { alpha, scale, lo, hi, mode }
}

#[allow(clippy::too_many_arguments)]
fn ellipse_cover(
    alpha: f64,
    scale: f64,
    lo: [f64; 4],
    hi: [f64; 4],
    delta: f64,
    dens: &BoundaryDensity,
    body: &ConvexBody,
    eps: f64,
) -> Result<BracketSet> {
    if (0..4).any(|i| !(hi[i] >= lo[i])) {
        return Err(Error::InvalidFamily("coefficient box is empty".into()));
    }
    let mut m = 1;
    loop {
        let mut brackets = Vec::with_capacity(m * m * m * m);
        let mut worst: f64 = 0.0;
        for idx in 0..m.pow(4) {
            let mut c_lo = [0.0; 4];
            let mut c_hi = [0.0; 4];
            let mut r = idx;
            for j in 0..4 {
                let i = r % m;
                r /= m;
                let w = (hi[j] - lo[j]) / m as f64;
                c_lo[j] = lo[j] + i as f64 * w;
                c_hi[j] = if i + 1 == m { hi[j] } else { lo[j] + (i + 1) as f64 * w };
            }
            let lower = CylinderRegion::Band { f: envelope(alpha, scale, c_lo, c_hi, EnvelopeMode::Inner) };
            let upper = CylinderRegion::Between {
                lower: envelope(alpha, scale, c_lo, c_hi, EnvelopeMode::LowerEdge),
                upper: envelope(alpha, scale, c_lo, c_hi, EnvelopeMode::UpperEdge),
            };
            let size = qn_measure(&upper.difference(&lower), dens, body, eps)?.max(0.0).sqrt();
            worst = worst.max(size);
            if worst > delta {
                break;
            }
            brackets.push(Bracket { lower, upper, size, cell: BracketCell::Ellipse { lo: c_lo, hi: c_hi } });
        }
        if worst <= delta {
            let count = brackets.len();
            return Ok(BracketSet { delta, eps, brackets, count, quantiles: Vec::new(), resolution: m });
        }
        m *= 2;
        if m > 16 {
            return Err(Error::InvalidFamily(format!("coefficient box too wide for delta = {delta}")));
        }
    }
}

impl BracketSet {
    /// Index of a bracket holding the interval-band member `[a, b] cup [c, d]`.
    pub fn locate_bands(&self, params: [f64; 4]) -> Option<usize> {
        if self.count == 1 {
            return Some(0);
        }
        let q = &self.quantiles;
        let k = self.resolution;
        let cell = |x: f64| -> usize {
            let i = q.partition_point(|&v| v <= x);
            i.saturating_sub(1).min(k - 1)
        };
        let target = [cell(params[0]), cell(params[1]), cell(params[2]), cell(params[3])];
        self.brackets.iter().position(|b| b.cell == BracketCell::Bands { cells: target })
    }

    /// Index of a bracket holding the `F_E` member with coefficients `coef`.
    pub fn locate_ellipse(&self, coef: [f64; 4]) -> Option<usize> {
        self.brackets.iter().position(|b| match &b.cell {
            BracketCell::All => true,
            BracketCell::Ellipse { lo, hi } => (0..4).all(|j| coef[j] >= lo[j] && coef[j] <= hi[j]),
            BracketCell::Bands { .. } => false,
        })
    }

    /// `lower subset upper` on `n_probe` random cylinder points.
    pub fn check_nested<R: Rng>(&self, body: &ConvexBody, n_probe: usize, rng: &mut R) -> bool {
        let probes: Vec<(f64, f64)> =
            (0..n_probe).map(|_| (rng.random::<f64>() * body.perimeter(), rng.random::<f64>() * 2.0 - 1.0)).collect();
        self.brackets
            .iter()
            .all(|b| probes.iter().all(|&(t, s)| !b.lower.contains(t, s) || b.upper.contains(t, s)))
    }
}

/// `lower subset member subset upper` on the given probe points.
pub fn brackets_member(b: &Bracket, member: &CylinderRegion, probes: &[(f64, f64)]) -> bool {
    probes.iter().all(|&(t, s)| {
        let m = member.contains(t, s);
        (!b.lower.contains(t, s) || m) && (!m || b.upper.contains(t, s))
    })
}
