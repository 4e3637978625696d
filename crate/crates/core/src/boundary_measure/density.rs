//! Ambient densities whose boundary limits `p_+` (outside) and `p_-` (inside)
//! depend only on the foot point of the metric projection.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Point2};
use crate::quad::{integrate, QuadOptions};

/// A nonnegative function of boundary arclength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Profile {
    Constant { value: f64 },
    /// `mean + amplitude * cos(2 pi harmonic theta / perimeter)`.
    Cosine { mean: f64, amplitude: f64, harmonic: u32 },
}

impl Profile {
    pub fn eval(&self, theta: f64, period: f64) -> f64 {
        match *self {
            Profile::Constant { value } => value,
            Profile::Cosine { mean, amplitude, harmonic } => {
                mean + amplitude * (2.0 * PI * harmonic as f64 * theta / period).cos()
            }
        }
    }

    pub fn min_value(&self) -> f64 {
        match *self {
            Profile::Constant { value } => value,
            Profile::Cosine { mean, amplitude, harmonic } => {
                if harmonic == 0 {
                    mean + amplitude
                } else {
                    mean - amplitude.abs()
                }
            }
        }
    }

    pub fn max_value(&self) -> f64 {
        match *self {
            Profile::Constant { value } => value,
            Profile::Cosine { mean, amplitude, harmonic } => {
                if harmonic == 0 {
                    mean + amplitude
                } else {
                    mean + amplitude.abs()
                }
            }
        }
    }

    pub fn scaled(&self, k: f64) -> Profile {
        match *self {
            Profile::Constant { value } => Profile::Constant { value: value * k },
            Profile::Cosine { mean, amplitude, harmonic } => {
                Profile::Cosine { mean: mean * k, amplitude: amplitude * k, harmonic }
            }
        }
    }
}

fn origin() -> Point2 {
    Point2::new(0.0, 0.0)
}

/// Ambient density models. Both are supported on the square `center + [-R, R]^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum DensityModel {
    /// `c_in` on `K`, `c_out` on the rest of the square.
    TwoLevel {
        c_in: f64,
        c_out: f64,
        #[serde(rename = "R")]
        half_width: f64,
        #[serde(default = "origin")]
        center: Point2,
    },
    /// `p_+(theta)` on the outer collar of width `width`, `p_-(theta)` on the inner one,
    /// both constant along normals; `background` elsewhere in the square.
    Collar {
        p_plus: Profile,
        p_minus: Profile,
        width: f64,
        background: f64,
        #[serde(rename = "R")]
        half_width: f64,
        #[serde(default = "origin")]
        center: Point2,
    },
}

/// A validated density model tied to the body it was checked against.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "DensityModel")]
pub struct BoundaryDensity {
    model: DensityModel,
    mp_total: f64,
    p_max: f64,
}

impl From<BoundaryDensity> for DensityModel {
    fn from(d: BoundaryDensity) -> DensityModel {
        d.model
    }
}

/// Piecewise-constant density along the normal line at one boundary point: `(s_lo, s_hi, value)`.
pub type NormalSegments = SmallVec<[(f64, f64, f64); 4]>;

impl BoundaryDensity {
    pub fn new(model: DensityModel, body: &ConvexBody) -> Result<Self> {
        let (center, half_width) = match &model {
            DensityModel::TwoLevel { half_width, center, .. } | DensityModel::Collar { half_width, center, .. } => {
                (*center, *half_width)
            }
        };
        if !(half_width > 0.0) || !center.is_finite() {
            return Err(Error::InvalidDensity("support half-width R must be positive".into()));
        }
        let mut dens = Self { model, mp_total: 0.0, p_max: 0.0 };
        let period = body.perimeter();
        match &dens.model {
            DensityModel::TwoLevel { c_in, c_out, .. } => {
                if !(*c_in >= 0.0 && *c_out >= 0.0) {
                    return Err(Error::InvalidDensity("c_in and c_out must be nonnegative".into()));
                }
                dens.p_max = c_in.max(*c_out);
            }
            DensityModel::Collar { p_plus, p_minus, width, background, .. } => {
                if p_plus.min_value() < 0.0 || p_minus.min_value() < 0.0 || *background < 0.0 {
                    return Err(Error::InvalidDensity("density values must be nonnegative".into()));
                }
                body.check_eps(*width).map_err(|_| {
                    Error::InvalidDensity(format!("collar width {width} must lie in (0, {})", body.inradius()))
                })?;
                dens.p_max = p_plus.max_value().max(p_minus.max_value()).max(*background);
            }
        }
        if !dens.fits(body, dens.margin()) {
            return Err(Error::InvalidDensity("support square must contain the body and its collar".into()));
        }
        dens.mp_total = integrate(|t| dens.p_plus(body, t) + dens.p_minus(body, t), 0.0, period, &[], QuadOptions::default());
        if !(dens.mp_total > 0.0) {
            return Err(Error::InvalidDensity("M_p(Sigma) must be positive".into()));
        }
        let mass = dens.total_mass(body);
        if (mass - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidDensity(format!("density integrates to {mass}, not 1")));
        }
        Ok(dens)
    }

    /// Uniform density on `[-R, R]^2`.
    pub fn uniform(body: &ConvexBody, half_width: f64) -> Result<Self> {
        let c = 1.0 / (4.0 * half_width * half_width);
        Self::new(DensityModel::TwoLevel { c_in: c, c_out: c, half_width, center: origin() }, body)
    }

    /// Two-level density on `[-R, R]^2` with `c_in = ratio * c_out`, normalised to mass 1.
    pub fn two_level_ratio(body: &ConvexBody, ratio: f64, half_width: f64) -> Result<Self> {
        let box_area = 4.0 * half_width * half_width;
        let c_out = 1.0 / (box_area - body.area() + ratio * body.area());
        Self::new(DensityModel::TwoLevel { c_in: ratio * c_out, c_out, half_width, center: origin() }, body)
    }

    pub fn model(&self) -> &DensityModel {
        &self.model
    }

    fn margin(&self) -> f64 {
        match &self.model {
            DensityModel::TwoLevel { .. } => 0.0,
            DensityModel::Collar { width, .. } => *width,
        }
    }

    pub fn support_box(&self) -> (Point2, Point2) {
        let (center, r) = match &self.model {
            DensityModel::TwoLevel { half_width, center, .. } | DensityModel::Collar { half_width, center, .. } => {
                (*center, *half_width)
            }
        };
        (Point2::new(center.x - r, center.y - r), Point2::new(center.x + r, center.y + r))
    }

    fn in_support(&self, z: Point2) -> bool {
        let (lo, hi) = self.support_box();
        z.x >= lo.x && z.x <= hi.x && z.y >= lo.y && z.y <= hi.y
    }

    fn fits(&self, body: &ConvexBody, margin: f64) -> bool {
        let (lo, hi) = body.bounding_box();
        let (slo, shi) = self.support_box();
        lo.x - margin > slo.x && lo.y - margin > slo.y && hi.x + margin < shi.x && hi.y + margin < shi.y
    }

    /// Checks `0 < eps < inradius` and that `V_eps` lies inside the support square.
    pub fn check_eps(&self, body: &ConvexBody, eps: f64) -> Result<()> {
        body.check_eps(eps)?;
        if !self.fits(body, eps) {
            let (lo, hi) = body.bounding_box();
            let (slo, shi) = self.support_box();
            let room = (lo.x - slo.x).min(lo.y - slo.y).min(shi.x - hi.x).min(shi.y - hi.y);
            return Err(Error::EpsTooLarge { eps, limit: room.min(body.inradius()) });
        }
        Ok(())
    }

    pub fn p_plus(&self, body: &ConvexBody, theta: f64) -> f64 {
        match &self.model {
            DensityModel::TwoLevel { c_out, .. } => *c_out,
            DensityModel::Collar { p_plus, .. } => p_plus.eval(body.normalize_theta(theta), body.perimeter()),
        }
    }

    pub fn p_minus(&self, body: &ConvexBody, theta: f64) -> f64 {
        match &self.model {
            DensityModel::TwoLevel { c_in, .. } => *c_in,
            DensityModel::Collar { p_minus, .. } => p_minus.eval(body.normalize_theta(theta), body.perimeter()),
        }
    }

    /// `M_p(Sigma) = int (p_+ + p_-) d nu`.
    pub fn mp_total(&self) -> f64 {
        self.mp_total
    }

    pub fn max_density(&self) -> f64 {
        self.p_max
    }

    pub fn density_at(&self, body: &ConvexBody, z: Point2) -> f64 {
        if !self.in_support(z) {
            return 0.0;
        }
        match &self.model {
            DensityModel::TwoLevel { c_in, c_out, .. } => {
                if body.contains(z) {
                    *c_in
                } else {
                    *c_out
                }
            }
            DensityModel::Collar { p_plus, p_minus, width, background, .. } => {
                let proj = body.project_lenient(z);
                let d = proj.signed_distance;
                let period = body.perimeter();
                if d > 0.0 && d <= *width {
                    p_plus.eval(proj.foot.theta, period)
                } else if d <= 0.0 && d >= -width {
                    p_minus.eval(proj.foot.theta, period)
                } else {
                    *background
                }
            }
        }
    }

    /// Density along the normal line `s -> z(theta, s)`, `s in [-1, 1]`, for a collar of width `eps`.
    /// Requires `V_eps` inside the support square.
    pub fn normal_segments(&self, body: &ConvexBody, theta: f64, eps: f64) -> NormalSegments {
        match &self.model {
            DensityModel::TwoLevel { c_in, c_out, .. } => smallvec![(-1.0, 0.0, *c_in), (0.0, 1.0, *c_out)],
            DensityModel::Collar { p_plus, p_minus, width, background, .. } => {
                let period = body.perimeter();
                let t = body.normalize_theta(theta);
                let (pp, pm) = (p_plus.eval(t, period), p_minus.eval(t, period));
                let w = width / eps;
                if w >= 1.0 {
                    smallvec![(-1.0, 0.0, pm), (0.0, 1.0, pp)]
                } else {
                    smallvec![(-1.0, -w, *background), (-w, 0.0, pm), (0.0, w, pp), (w, 1.0, *background)]
                }
            }
        }
    }

    /// Total mass of the ambient density (quadrature over strips and corner sectors).
    pub fn total_mass(&self, body: &ConvexBody) -> f64 {
        let (lo, hi) = self.support_box();
        let box_area = (hi.x - lo.x) * (hi.y - lo.y);
        match &self.model {
            DensityModel::TwoLevel { c_in, c_out, .. } => c_in * body.area() + c_out * (box_area - body.area()),
            DensityModel::Collar { width, background, .. } => {
                let collar = super::collar_mass_unchecked(self, body, *width);
                let area = body.outer_area(*width) + body.inner_area(*width);
                collar + background * (box_area - area)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_box_is_valid() {
        let d = BoundaryDensity::uniform(&ConvexBody::unit_disc(), 2.0).unwrap();
        assert!((d.mp_total() - 2.0 * PI / 8.0).abs() < 1e-12);
        assert_eq!(d.density_at(&ConvexBody::unit_disc(), Point2::new(3.0, 0.0)), 0.0);
    }

    #[test]
    fn rejects_unnormalised() {
        let m = DensityModel::TwoLevel { c_in: 1.0, c_out: 1.0, half_width: 2.0, center: origin() };
        assert!(matches!(BoundaryDensity::new(m, &ConvexBody::unit_disc()), Err(Error::InvalidDensity(_))));
    }

    #[test]
    fn rejects_zero_boundary_mass() {
        // all mass strictly away from the boundary is impossible for two-level, but c_in = c_out = 0 fails mass
        let m = DensityModel::TwoLevel { c_in: 0.0, c_out: 0.0, half_width: 2.0, center: origin() };
        assert!(BoundaryDensity::new(m, &ConvexBody::unit_disc()).is_err());
    }

    #[test]
    fn collar_density_normalises() {
        let body = ConvexBody::unit_disc();
        let width = 0.2;
        let raw = DensityModel::Collar {
            p_plus: Profile::Cosine { mean: 1.0, amplitude: 0.5, harmonic: 2 },
            p_minus: Profile::Constant { value: 2.0 },
            width,
            background: 0.5,
            half_width: 2.0,
            center: origin(),
        };
        // outer collar mass: int p_+ dtheta * (w + w^2/2); inner: 2 * 2 pi * (w - w^2/2)
        let outer = 2.0 * PI * (width + width * width / 2.0);
        let inner = 2.0 * 2.0 * PI * (width - width * width / 2.0);
        let bg = 0.5 * (16.0 - 4.0 * PI * width);
        let total = outer + inner + bg;
        let k = 1.0 / total;
        let scaled = DensityModel::Collar {
            p_plus: Profile::Cosine { mean: k, amplitude: 0.5 * k, harmonic: 2 },
            p_minus: Profile::Constant { value: 2.0 * k },
            width,
            background: 0.5 * k,
            half_width: 2.0,
            center: origin(),
        };
        assert!(BoundaryDensity::new(raw, &body).is_err());
        let d = BoundaryDensity::new(scaled, &body).unwrap();
        assert!((d.total_mass(&body) - 1.0).abs() < 1e-9);
        let z = Point2::new(1.1, 0.0);
        assert!((d.density_at(&body, z) - 1.5 * k).abs() < 1e-12);
        assert!((d.density_at(&body, Point2::new(0.0, 0.0)) - 0.5 * k).abs() < 1e-12);
    }

    #[test]
    fn json_schema() {
        let body = ConvexBody::unit_disc();
        let m: DensityModel =
            serde_json::from_str(r#"{"model":"two_level","c_in":0.0625,"c_out":0.0625,"R":2}"#).unwrap();
        let d = BoundaryDensity::new(m, &body).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert!(s.contains("\"R\":2.0"));
    }
}
