//! The evaluation engine.

mod body;
mod check;
mod direct;
mod fixpoint;
mod miniscope;
mod stats;
mod subset;

pub use check::{check, check_traces, check_with, validate, CheckOptions, CheckResult, FixpointMode};
pub use direct::{eval_body, eval_qformula};
pub use fixpoint::{
    compute_fixpoint, compute_fixpoint_rounds, fixpoint_constraint_holds, sol_bruteforce,
    sol_bruteforce_bounded, SetAssignment, TraceAssignment, SOL_BOUND,
};
pub use stats::Stats;
pub use subset::{masks_by_cardinality, TraceSubset};
