//! Local empirical processes near the boundary of a planar convex body.
//!
//! The crate is organised around the objects that appear when a sample is
//! inspected in a thin collar `V_eps` around the boundary of a convex body `K`:
//!
//! * [`geometry`]: metric projection, signed distance, local reach and the
//!   magnification map that blows the collar up onto the cylinder
//!   `Gamma = boundary x [-1, 1]`.
//! * [`boundary_measure`]: densities near the boundary, cylinder regions and
//!   the measures `M_p`, `Q`, `Q_n` living on the cylinder.
//! * [`set_classes`]: the indexing classes, their derivative classes, the
//!   pseudometrics `d`/`d_n`, bracketing covers and shattering checks.
//! * [`empirical`]: samplers, the local empirical processes and the
//!   set-parametric Brownian motion, plus a reproducible replication harness.
//! * [`verify`]: Monte Carlo checks of the limit theorems and the
//!   change-set / excess-mass applications.

pub mod boundary_measure;
pub mod empirical;
pub mod error;
pub mod geometry;
pub mod quad;
pub mod rng;
pub mod set_classes;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{BoundaryPoint, ConvexBody, CylinderPoint, Point2, SignedProjection};
