use std::f64::consts::PI;
use std::path::Path;

use lep_core::boundary_measure::region::theta_slab;
use lep_core::boundary_measure::{CylinderRegion, DensityModel};
use lep_core::empirical::Schedule;
use lep_core::set_classes::{ClassGrid, ParamRange, SetValuedFamily};
use lep_core::verify::{DiscBox, GaussianMark, GridSearch};
use lep_core::{ConvexBody, Point2};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassMode {
    Population,
    Sample,
}

/// Settings shared by every subcommand; any field may be omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub body: ConvexBody,
    pub density: DensityModel,
    pub n: u64,
    pub eps: f64,
    pub reps: usize,
    pub draws: usize,
    pub regions: Vec<CylinderRegion>,
    /// Raster resolution in theta; the s-resolution is a quarter of it.
    pub grid: usize,
    pub eps_grid: Vec<f64>,
    pub family: SetValuedFamily,
    pub derivative: Option<CylinderRegion>,
    pub delta: f64,
    pub schedule: Schedule,
    pub class_grid: ClassGrid,
    pub gamma: Option<f64>,
    pub ks_tol: f64,
    pub cov_tol: f64,
    pub sup_ks_tol: f64,
    pub max_fail_fraction: f64,
    pub p1: GaussianMark,
    pub p2: GaussianMark,
    pub lambda: Option<f64>,
    pub alpha: f64,
    pub mode: MassMode,
    pub bounds: DiscBox,
    pub search: GridSearch,
}

impl Default for RunConfig {
    fn default() -> Self {
        let r = ParamRange::new(-0.3, 0.3, 7);
        Self {
            seed: 0,
            body: ConvexBody::unit_disc(),
            density: DensityModel::TwoLevel {
                c_in: 1.0 / 16.0,
                c_out: 1.0 / 16.0,
                half_width: 2.0,
                center: Point2::new(0.0, 0.0),
            },
            n: 100_000,
            eps: 0.05,
            reps: 1000,
            draws: 1000,
            regions: vec![CylinderRegion::upper(), theta_slab(0.0, PI)],
            grid: 1024,
            eps_grid: vec![0.1, 0.05, 0.025, 0.0125],
            family: SetValuedFamily::shifted_disc(0.5),
            derivative: None,
            delta: 0.5,
            schedule: Schedule::cube_root(0.5, vec![1_000, 10_000, 100_000]),
            class_grid: ClassGrid::Ellipse {
                e1: r,
                e2: r,
                h1: r,
                h2: ParamRange::fixed(0.0),
                alpha: ParamRange::fixed(0.0),
            },
            gamma: None,
            ks_tol: 0.06,
            cov_tol: 0.02,
            sup_ks_tol: 0.08,
            max_fail_fraction: 0.1,
            p1: GaussianMark { mean: 0.0, sd: 1.0 },
            p2: GaussianMark { mean: 1.0, sd: 1.0 },
            lambda: None,
            alpha: 0.5,
            mode: MassMode::Population,
            bounds: DiscBox { cx: [-0.5, 0.5], cy: [-0.5, 0.5], r: [0.5, 1.5] },
            search: GridSearch::default(),
        }
    }
}

/// Reads a TOML or JSON config, by extension (`.json` is JSON, anything else TOML).
pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
