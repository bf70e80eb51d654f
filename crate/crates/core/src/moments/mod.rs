//! Correlation functions, clustering gaps, mixed moments, Ursell
//! functions, the moment–cumulant transform and factorial moment
//! expansions.

mod correlation;
mod cumulants;
mod fme;

pub use correlation::{
    clustering_gap, cumulant_of_total_from_table, diameter_split, estimate_correlation, mixed_moment,
    pooled_pair_gaps, ursell_from_moments, void_probability_check, ClusteringGap, CorrelationEstimate,
    DiameterSplit, MixedMomentSpec, MixedMomentTable, MomentEntry, PooledGap, VoidEstimate, VoidFit, VoidReport,
};
pub use cumulants::{
    cumulants_to_moments, for_each_partition, k_statistics, moments_to_cumulants, sample_cumulants,
    set_partitions, ursell_from_subset_moments, CumulantVector, Partition, BOOTSTRAP_RESAMPLES,
    MAX_CUMULANT_ORDER,
};
pub use fme::{
    fme_expansion_check, fme_kernel, fme_psi_check, mixed_moment_functional, FmeCheck, FmeFunctional,
    FmeKernelValue, Functional, MAX_ENUMERATION_SITES,
};
