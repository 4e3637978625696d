//! Verification suites: limit theorem checks and the statistical applications.

pub mod changeset;
pub mod clt;
pub mod estimators;

pub use changeset::{changeset_counts, changeset_loglik, changeset_loglik_with, simulate_marks, ChangeSetModel, GaussianMark};
pub use clt::{
    limit_variances, statement_a_statistic, statement_b_test, sup_functional_test, sup_gaussian, StatementAConfig,
    StatementAReport, StatementAStep, StatementBConfig, StatementBReport, SupFunctionalConfig, SupFunctionalReport,
    MAX_STATEMENT_B_REGIONS,
};
pub use estimators::{
    disc_polygon_area, excess_mass, lens_area, min_volume_set, required_radius, Disc, DiscBox, DiscFit, GridSearch,
    MassSource, MinVolumeFit,
};
