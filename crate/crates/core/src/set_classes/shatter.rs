//! Exhaustive shattering checks on small point sets of the cylinder.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::boundary_measure::BoundaryFn;
use crate::error::{Error, Result};
use crate::geometry::CylinderPoint;

pub const MAX_SHATTER_POINTS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ShatterClass {
    /// `{s in [a, b] cup [c, d]}`; decided exactly.
    SBand,
    /// `F_E` bands on a disc with boundary length `period`, searched on a lattice:
    /// `alpha` on `alpha_steps` points of `[0, pi/2)`, each coefficient on `coef_steps` points of `[-1, 1]`.
    EllipseBands { period: f64, alpha_steps: usize, coef_steps: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShatterReport {
    pub shattered: bool,
    /// First labelling (bit `i` = point `i` inside) that no searched element realises.
    pub missing: Option<u32>,
    /// Description of the search resolution.
    pub resolution: String,
}

/// An s-band with two intervals picks exactly the positives iff, with points ordered
/// by `s`, the positives form at most two runs and no tie mixes labels.
fn sband_realizes(points: &[CylinderPoint], label: u32) -> bool {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| points[i].s.total_cmp(&points[j].s));
    let mut runs = 0;
    let mut prev: Option<(f64, bool)> = None;
    for &i in &order {
        let on = label >> i & 1 == 1;
        if let Some((s, p)) = prev {
            if s == points[i].s && p != on {
                return false;
            }
            if on && !p {
                runs += 1;
            }
        } else if on {
            runs += 1;
        }
        prev = Some((points[i].s, on));
    }
    runs <= 2
}

fn band_mask(f: &BoundaryFn, points: &[CylinderPoint]) -> u32 {
    points.iter().enumerate().fold(0, |m, (i, p)| {
        let v = f.eval(p.theta);
        let inside = (p.s > 0.0 && p.s <= v) || (p.s > v && p.s <= 0.0);
        if inside {
            m | 1 << i
        } else {
            m
        }
    })
}

fn within_unit(f: &BoundaryFn, period: f64) -> bool {
    (0..256).all(|i| f.eval(period * i as f64 / 256.0).abs() <= 1.0)
}

pub fn shatter_check(class: &ShatterClass, points: &[CylinderPoint]) -> Result<ShatterReport> {
    if points.len() > MAX_SHATTER_POINTS {
        return Err(Error::TooManyPoints { got: points.len(), max: MAX_SHATTER_POINTS });
    }
    let total = 1u32 << points.len();
    match class {
        ShatterClass::SBand => {
            let missing = (0..total).find(|&l| !sband_realizes(points, l));
            Ok(ShatterReport { shattered: missing.is_none(), missing, resolution: "exact".into() })
        }
        ShatterClass::EllipseBands { period, alpha_steps, coef_steps } => {
            let alphas: Vec<f64> =
                (0..*alpha_steps).map(|i| std::f64::consts::FRAC_PI_2 * i as f64 / *alpha_steps as f64).collect();
            let coefs: Vec<f64> = (0..*coef_steps)
                .map(|i| if *coef_steps == 1 { 0.0 } else { -1.0 + 2.0 * i as f64 / (*coef_steps - 1) as f64 })
                .collect();
            let mut seen = HashSet::new();
            let scale = period / (2.0 * std::f64::consts::PI);
            for &alpha in &alphas {
                for &a in &coefs {
                    for &b in &coefs {
                        for &c in &coefs {
                            for &d in &coefs {
                                let f = BoundaryFn::EllipseF { alpha, a, b, c, d, scale };
                                if within_unit(&f, *period) {
                                    seen.insert(band_mask(&f, points));
                                }
                            }
                        }
                    }
                }
            }
            let missing = (0..total).find(|l| !seen.contains(l));
            Ok(ShatterReport {
                shattered: missing.is_none(),
                missing,
                resolution: format!("{alpha_steps} alpha values x {coef_steps}^4 coefficient lattice"),
            })
        }
    }
}
