//! Experiment harness: replicate total masses over a grid of window radii,
//! variance scaling, direct `σ²` estimates, normality tests and the
//! multivariate covariance.

mod direct;
mod plan;
mod run;
mod stats;

pub use direct::{sigma_squared_direct, ShellCovariance, SigmaEstimate, DIRECT_BATCHES};
pub use plan::{config_hash_of, ExperimentPlan, Thresholds, MIN_REPLICATES};
pub use run::{
    metadata_header, run, with_workers, ExperimentResult, GridResult, Metadata, Outcome, ScoreStats, ScoreSummary,
    TOOL_VERSION,
};
pub use stats::{
    clustering_decay_fit, kolmogorov_p_value, lilliefors_p_value, multivariate_covariance, normality_test,
    variance_scaling_fit, CovarianceEstimate, DecayFit, NormalityTest, VarianceFit, MIN_NORMALITY_SAMPLE,
    MIN_USABLE_BINS,
};
