// SPDX-License-Identifier: Apache-2.0

//! Experiment orchestration: cross-validation suites, reports and
//! artifacts.

pub mod compare;
pub mod config;
pub mod experiments;
pub mod functionals;
pub mod output;
pub mod report;

pub use compare::{compare_functionals, saw_exit_samples, sle_exit_samples, SawSampling};
pub use config::{parse_params, ExperimentConfig, Params};
pub use experiments::{
    catalog, default_params, eight_vs_five, run_experiment, run_to_dir, saw_vs_sle_comparison, validate, ExperimentInfo,
    CATALOG,
};
pub use functionals::{exit_functionals, marked_point, ExitFunctionals};
pub use output::{write_artifacts, write_atomic};
pub use report::{ComparisonReport, EstimateRow, Table, TestRow};
pub use crate::stats::{chi_square, ks_two_sample};
pub use crate::curve::curve_hausdorff;
