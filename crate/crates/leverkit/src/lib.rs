//! Generalized leverage scores and the selection algorithms built on them:
//! deterministic column subset selection against an arbitrary target matrix
//! (GCSS), two-sided selection for sparse CCA, greedy and uniform-random
//! baselines, verifiers for the underlying angle bounds, synthetic instance
//! generators, matrix/report IO, and a benchmark harness.
//!
//! The data-parallel inner loops (random-baseline trials, greedy candidate
//! scans, bench sweep cells) run on rayon when the default `parallel` feature
//! is enabled and fall back to sequential execution otherwise; either way the
//! computed values are identical.

pub mod bench;
pub mod bounds;
pub mod error;
pub mod instances;
pub mod io;
pub mod leverage;
pub mod linalg;
pub mod par;
pub mod selection;

pub use error::{Error, Result};
pub use linalg::{
    orthonormal_basis, principal_angle_cosines, projection_energy, svd, DenseMatrix, IndexSet,
    SvdFactors, DEFAULT_RANK_TOL,
};
pub use leverage::{
    generalized_leverage_scores, rank_k_leverage_scores, scaled_leverage_update,
    statistical_leverages, LeverageScores, StatisticalLeverages,
};
pub use selection::{
    choose_singular_set, gcss, greedy_gcss, greedy_gcss_serial, random_baseline,
    random_baseline_serial, select_columns_to_mass, sparse_cca, CcaOptions, CcaResult,
    ColumnSelection, GcssOptions, GcssResult, GreedyResult, RandomBaselineResult,
    SigmaOmegaMode, SingularSetChoice,
};
pub use bounds::{
    cca_bound_value, condition_number, gcss_bound_value, powerlaw_column_count,
    verify_general_bound, verify_topk_bound, BoundReport, GeneralBoundChecks, DEFAULT_BOUND_TOL,
};
pub use instances::{
    altschuler_instance, powerlaw_instance, random_lowrank_instance, InstanceMetadata,
    InstancePair, PowerlawInstance,
};
pub use io::{
    load_matrix, read_report, split_columns, write_matrix_csv, write_matrix_market, write_report,
    LoadOptions, MatrixFormat, RunParams, RunReport, Timings,
};
pub use bench::{
    fig1_csv, figure1_sweep, retained_rank, run_bench, run_bench_serial, Algorithm, BenchConfig,
    Fig1Row,
};
