//! Certified lower bounds on multiclass adversarial risk, and the robust
//! classifiers that attain them.
//!
//! Given a finite labeled dataset and a perturbation budget `epsilon`
//! (every point may move up to `epsilon` in a chosen metric), any
//! classifier — of any architecture — suffers at least some irreducible
//! risk, because perturbed points from different classes can become
//! indistinguishable. This crate computes that floor exactly for the
//! cross-entropy loss, its bounded alpha-logarithmic relaxations
//! (alpha = 0 recovers the 0-1 loss), and evaluates the optimal robust
//! classifier for those families plus the quadratic loss.
//!
//! The pipeline:
//!
//! 1. [`geometry`] / [`hypergraph`]: find every inclusion-maximal tuple of
//!    cross-class points whose epsilon-balls share a common point. Each
//!    tuple is one packing constraint ("these atoms can be confused with
//!    one another").
//! 2. [`solver`]: maximize `sum_l w_l log_alpha(z_l)` subject to `z >= 0`
//!    and `sum_{l in A} z_l <= 1` per tuple `A`, with a damped-Newton
//!    interior-point method that returns a KKT residual certificate. The
//!    negated optimum is the risk lower bound.
//! 3. [`classifier`]: transfer the dual potentials `phi = log_alpha(z)`
//!    to arbitrary query points by c-transform and evaluate the
//!    loss-specific optimal classifier in closed form, with a numerical
//!    saddle-point verifier.
//! 4. [`harness`]: sweep (epsilon, alpha) grids with warm starts and
//!    emit risk curves; [`dataset`] handles CSV/JSON persistence.
//!
//! The `advbound` binary exposes the pipeline as `hypergraph`, `solve`,
//! `curve`, and `classify` subcommands.

pub mod alpha;
pub mod classifier;
pub mod dataset;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod hypergraph;
pub mod solver;

pub use alpha::{exp_alpha, find_normalizer, is_alpha_one, log_alpha, loss_value, LossSpec};
pub use classifier::{
    classify, verify_saddle, ClassifierOutput, GroundCost, PotentialSet, SaddleReport,
};
pub use dataset::{
    load_dataset, read_solution, write_curve_csv, write_solution, CsvFormat, LabeledDataset,
    PsiEntry, SolutionRecord, SolveMeta,
};
pub use error::{Error, Result};
pub use geometry::{balls_intersect, enclosing_radius, min_enclosing_ball, Metric};
pub use harness::{
    full_confusion_value, sweep, sweep_parallel, CurveRow, RiskCurve, RunConfig,
    DEFAULT_WARM_START_THETA,
};
pub use hypergraph::{
    build_hypergraph, build_hypergraph_with_limit, ConflictHypergraph, ConstraintEdge,
    VariableIndex, DEFAULT_EDGE_LIMIT,
};
pub use solver::{
    kkt_residual, oracle_solve, solve, zero_one_dual_solve, DualSolution, PackingProblem,
    SolverTolerances, WarmStart,
};
