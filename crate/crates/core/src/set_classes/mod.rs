//! Indexing classes: ambient families, their `tau`-images and derivative bands,
//! the pseudometrics `d` and `d_n`, bracketing covers and shattering checks.

pub mod ambient;
pub mod brackets;
pub mod family;
pub mod metric;
pub mod shatter;

pub use ambient::{AmbientSet, Ellipse};
pub use brackets::{bracket_cover, Bracket, BracketCell, BracketFamily, BracketSet};
pub use family::{tau_image, ClassGrid, FamilyElement, FamilyKind, ParamRange, SetValuedFamily};
pub use metric::{d_metric, dn_metric, dn_regions, hausdorff_gamma, hausdorff_gamma_tabulated, SectionTable};
pub use shatter::{shatter_check, ShatterClass, ShatterReport};
