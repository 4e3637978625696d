//! Sampling engines, the local empirical processes and the limiting Gaussian field.

pub mod brownian;
pub mod process;
pub mod replicate;
pub mod sampler;

pub use brownian::{brownian_field, covariance_matrix, BrownianField, GaussianDraw, DEFAULT_JITTER};
pub use process::{psi_count, v_stat, z_stat, ProcessFrame};
pub use replicate::{
    replicate, replication_seed, run_replications, ExperimentConfig, ReplicationReport, Schedule, ScheduleStep,
    StepReport, StepSummary,
};
pub use sampler::{
    draw_conditional, localize, sample_ambient, sample_conditional, sample_full, sample_two_stage, two_stage_with,
    ConditionalSampler, LocalSample,
};
