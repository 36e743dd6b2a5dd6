//! Configuration, seeded parallel experiments, comparison against the
//! limits, and persistence.

mod config;
mod output;
mod runner;
mod stats;

pub use config::{
    default_eval_points, parse_config, ConstantsSource, ExperimentConfig, ProvidedTerm,
    DEFAULT_CONSTANT_REPLICATIONS, DEFAULT_ETA, DEFAULT_EVAL_AXIS,
};
pub use output::{
    cdf_csv, parse_samples_csv, prepare_directory, samples_csv, to_json, write_outputs, Manifest,
    SampleRow, Summary, CDF_FILE, MANIFEST_FILE, SAMPLES_FILE, SUMMARY_FILE, TIMING_FILE,
};
pub use runner::{
    compare, lattice_mesh, mesh_audit, plan_norm_constants, resolve_constants, run_experiment,
    run_experiment_with_workers, theoretical_table, ComparisonReport, ExperimentPlan,
    ExperimentRun, MeshAudit, ReplicationResult, ReportMetadata, ResolvedConstants, Timing,
};
pub use stats::{
    empirical_cdf, empirical_joint_cdf, kolmogorov_sf, ks_statistic, ks_two_sample,
    ks_two_sample_pvalue, NormalizedPair,
};
