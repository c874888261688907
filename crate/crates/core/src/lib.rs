//! Grover partial search (GRK) and hierarchies of partial searches.
//!
//! * [`sim`]: exact evolution of the database state, in the 3-dimensional
//!   symmetric subspace and as a brute-force `N`-vector.
//! * [`grk`]: the three-step partial search, its cancellation condition and
//!   integer schedules.
//! * [`calculus`]: closed-form query counts of every search strategy.
//! * [`optimizer`]: parameter ranges, the minimization of the query count,
//!   the monotonicity lemmas and large-`K` expansions.
//! * [`hierarchy`]: sequential GRK runs and their comparison with direct search.
//! * [`partitions`]: counting equal-size partitions of the database.
//! * [`tables`]: recomputation of the published reference tables.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the scalar to `f64`.

pub mod calculus;
pub mod error;
pub mod grk;
pub mod hierarchy;
pub mod optimizer;
pub mod partitions;
pub mod roots;
pub mod scalar;
pub mod sim;
pub mod tables;

pub use calculus::{
    alpha_opt, binary_queries, complement_queries, eta_of_alpha, eta_opt, full_queries,
    hierarchy_gap, naive_queries, s_coeff, s_direct_multi, sbar_coeff, t_coeff, t_coeff_levels,
    t_coeff_multi, NaiveQueries, QueryCoefficient, ScaledParams,
};
pub use error::{Error, Result};
pub use grk::{
    compare_final_variants, implied_scaled_params, leaked_amplitude, optimal_integer_schedule,
    optimal_real_schedule, run_grk, run_grk_with, solve_cancellation, Evolution, FinalOp,
    GrkResult, IterationSchedule,
};
pub use hierarchy::{
    corollary_check, run_hierarchy, table1_reproduce, theorem_check, GapDecomposition,
    HierarchyRun, HierarchySpec, NegativeGlobalPolicy,
};
pub use optimizer::{
    alpha_upper_bound, asymptotic_alpha, asymptotic_eta, asymptotic_gap, verify_local_min,
    AsymptoticRegime, BlockCount, MinimizationReport,
};
pub use partitions::{ancilla_bits, partition_count, AncillaBits, PartitionCount};
pub use scalar::Real;
pub use sim::{
    full_state_simulate, DatabaseGeometry, FullState, Op, RotationAngles, SymmetricState,
};

pub type SymmetricState64 = SymmetricState<f64>;
pub type FullState64 = FullState<f64>;
pub type IterationSchedule64 = IterationSchedule<f64>;
pub type GrkResult64 = GrkResult<f64>;
pub type ScaledParams64 = ScaledParams<f64>;
pub type QueryCoefficient64 = QueryCoefficient<f64>;
pub type MinimizationReport64 = MinimizationReport<f64>;
pub type GapDecomposition64 = GapDecomposition<f64>;
pub type HierarchyRun64 = HierarchyRun<f64>;
pub type BlockCount64 = BlockCount<f64>;
