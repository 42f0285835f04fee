//! Interior-point solver for the weighted fairness-packing program
//!
//! ```text
//!     maximize    sum_l w_l * log_alpha(z_l)
//!     subject to  D z <= 1,   z >= 0,
//! ```
//!
//! where `D` is a 0/1 incidence matrix whose rows come from the conflict
//! hypergraph. The solver follows the log-barrier central path: it
//! minimizes `t*F(z) - sum_r ln(1 - D_r z) - sum_l ln(z_l)` with
//! `F(z) = -sum_l w_l log_alpha(z_l)` by damped Newton steps, grows `t`
//! geometrically, and stops once the barrier gap `(rows + n)/t` is below
//! `gap_tol` AND the measured KKT residual is below `kkt_tol`. Every
//! returned solution therefore carries its own optimality certificate.
//!
//! A successive-refinement grid oracle for tiny instances and the
//! equivalent 0-1-loss dual (a plain packing LP over the same rows) are
//! provided as independent cross-checks.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::alpha::{self, log_alpha};
use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::hypergraph::ConflictHypergraph;

/// Stationarity / complementarity certificate threshold.
pub const DEFAULT_KKT_TOL: f64 = 1e-6;
/// Barrier suboptimality (rows + n)/t at which the path stops.
pub const DEFAULT_GAP_TOL: f64 = 1e-8;
/// Newton step budget per centering stage.
pub const DEFAULT_MAX_NEWTON_ITERS: usize = 200;
/// Barrier weight growth factor between stages.
pub const DEFAULT_BARRIER_GROWTH: f64 = 10.0;
/// Default weight of the uniform point when perturbing a warm start.
pub const DEFAULT_WARM_START_THETA: f64 = 0.01;

const T_INITIAL: f64 = 1.0;
const T_MAX: f64 = 1e18;
/// Newton decrement at which a stage counts as centered.
const NEWTON_DECREMENT_TOL: f64 = 1e-6;
/// Below this decrement a pure Newton step stays strictly feasible
/// (self-concordance), so no line search is needed.
const FULL_STEP_DECREMENT: f64 = 0.25;
/// Fraction of the distance to the boundary a damped step may take.
const BOUNDARY_SHRINK: f64 = 0.99;
const ARMIJO_SLOPE: f64 = 0.25;
const ARMIJO_BACKOFF: f64 = 0.5;
const MIN_STEP: f64 = 1e-14;
/// Once the decrement is this small, stalled progress means we have hit
/// the floating-point noise floor of the gradient and the stage is as
/// centered as arithmetic allows.
const STALL_CEILING: f64 = 1e-3;
const STALL_STREAK: usize = 2;
/// Strict-interior repair: entry floor and the slack margin enforced on
/// the worst row before a solve starts.
const INTERIOR_FLOOR: f64 = 1e-12;
const INTERIOR_MARGIN: f64 = 1e-3;
const RIDGE_INITIAL: f64 = 1e-10;
const RIDGE_GROWTH: f64 = 100.0;
const RIDGE_MAX: f64 = 1e-2;
/// Variables the grid oracle can afford (21^n points per round).
const ORACLE_MAX_VARS: usize = 4;
const ORACLE_ROUNDS: usize = 6;
const ORACLE_POINTS_PER_AXIS: usize = 21;
const ORACLE_BOX_SHRINK: f64 = 5.0;
const ORACLE_FLOOR: f64 = 1e-6;
const ORACLE_FEASIBILITY_SLACK: f64 = 1e-12;

/// Stopping and stepping controls for [`solve`].
#[derive(Clone, Copy, Debug)]
pub struct SolverTolerances {
    pub kkt_tol: f64,
    pub gap_tol: f64,
    pub max_newton_iters: usize,
    pub barrier_growth: f64,
}

impl Default for SolverTolerances {
    fn default() -> Self {
        SolverTolerances {
            kkt_tol: DEFAULT_KKT_TOL,
            gap_tol: DEFAULT_GAP_TOL,
            max_newton_iters: DEFAULT_MAX_NEWTON_ITERS,
            barrier_growth: DEFAULT_BARRIER_GROWTH,
        }
    }
}

impl SolverTolerances {
    pub fn validate(&self) -> Result<()> {
        if !(self.kkt_tol > 0.0 && self.kkt_tol.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "kkt_tol must be positive, got {}",
                self.kkt_tol
            )));
        }
        if !(self.gap_tol > 0.0 && self.gap_tol.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "gap_tol must be positive, got {}",
                self.gap_tol
            )));
        }
        if self.max_newton_iters < 10 {
            return Err(Error::InvalidConfig(format!(
                "max_newton_iters must be at least 10, got {}",
                self.max_newton_iters
            )));
        }
        if !(self.barrier_growth > 1.0 && self.barrier_growth.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "barrier_growth must exceed 1, got {}",
                self.barrier_growth
            )));
        }
        Ok(())
    }
}

/// The packing program: weights, 0/1 constraint rows, and the utility
/// exponent. Rows hold sorted variable ids; every variable must appear in
/// at least one row (the hypergraph guarantees this via singletons).
#[derive(Clone, Debug)]
pub struct PackingProblem {
    pub weights: Vec<f64>,
    pub rows: Vec<Vec<u32>>,
    pub class_count: usize,
    pub alpha: f64,
}

impl PackingProblem {
    pub fn new(
        weights: Vec<f64>,
        rows: Vec<Vec<u32>>,
        class_count: usize,
        alpha: f64,
    ) -> Result<Self> {
        let problem = PackingProblem {
            weights,
            rows,
            class_count,
            alpha,
        };
        problem.validate()?;
        Ok(problem)
    }

    /// Assembles the program for one hypergraph: one variable per atom,
    /// weighted by its mass, one constraint row per edge.
    pub fn from_hypergraph(
        graph: &ConflictHypergraph,
        data: &LabeledDataset,
        alpha: f64,
    ) -> Result<Self> {
        let index = &graph.index;
        let weights = (0..index.var_count())
            .map(|v| data.weight(index.point_of(v)))
            .collect();
        let rows = graph.edges.iter().map(|e| e.vars.clone()).collect();
        PackingProblem::new(weights, rows, data.class_count(), alpha)
    }

    pub fn var_count(&self) -> usize {
        self.weights.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.is_empty() {
            return Err(Error::InvalidConfig(
                "packing problem has no variables".into(),
            ));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be finite and nonnegative, got {}",
                self.alpha
            )));
        }
        if self.class_count == 0 {
            return Err(Error::InvalidConfig("class_count must be positive".into()));
        }
        for (l, &w) in self.weights.iter().enumerate() {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "weight of variable {l} must be strictly positive, got {w}"
                )));
            }
        }
        let n = self.weights.len();
        let mut covered = vec![false; n];
        for (r, row) in self.rows.iter().enumerate() {
            if row.is_empty() || row.len() > self.class_count {
                return Err(Error::InvalidConfig(format!(
                    "row {r} has {} members, expected 1..={}",
                    row.len(),
                    self.class_count
                )));
            }
            for pair in row.windows(2) {
                if pair[0] >= pair[1] {
                    return Err(Error::InvalidConfig(format!(
                        "row {r} must list strictly increasing variable ids"
                    )));
                }
            }
            for &v in row {
                let v = v as usize;
                if v >= n {
                    return Err(Error::InvalidConfig(format!(
                        "row {r} references variable {v}, but there are only {n}"
                    )));
                }
                covered[v] = true;
            }
        }
        if let Some(l) = covered.iter().position(|&c| !c) {
            return Err(Error::InvalidConfig(format!(
                "variable {l} appears in no constraint row"
            )));
        }
        Ok(())
    }
}

/// A solved program with its optimality certificate.
#[derive(Clone, Debug)]
pub struct DualSolution {
    /// Optimal variable values in (0, 1].
    pub z: Vec<f64>,
    /// Nonnegative multiplier per constraint row.
    pub lambda: Vec<f64>,
    /// The maximized utility sum_l w_l log_alpha(z_l) (always <= 0).
    pub objective: f64,
    /// The certified adversarial-risk lower bound, -objective.
    pub risk_lower_bound: f64,
    pub kkt_residual: f64,
    pub newton_iters: usize,
}

/// Starting point carried over from a neighboring solve. It is blended
/// with the uniform point before use: (1-theta)*z0 + theta*(1/K).
#[derive(Clone, Debug)]
pub struct WarmStart {
    pub z0: Vec<f64>,
    pub theta: f64,
}

/// The separable utility family the barrier core maximizes.
#[derive(Clone, Copy, Debug)]
enum Util {
    /// w * ln(z) — the alpha ~ 1 branch.
    Log,
    /// w * (z^(1-alpha) - 1)/(1-alpha) for alpha != 1.
    Power { alpha: f64 },
    /// w * z — the 0-1 dual objective.
    Linear,
}

impl Util {
    fn from_alpha(alpha_value: f64) -> Util {
        if alpha::is_alpha_one(alpha_value) {
            Util::Log
        } else {
            Util::Power { alpha: alpha_value }
        }
    }

    fn value(self, w: f64, z: f64) -> f64 {
        match self {
            Util::Log => w * z.ln(),
            Util::Power { alpha } => w * (z.powf(1.0 - alpha) - 1.0) / (1.0 - alpha),
            Util::Linear => w * z,
        }
    }

    /// First derivative of the utility in z (always positive).
    fn d1(self, w: f64, z: f64) -> f64 {
        match self {
            Util::Log => w / z,
            Util::Power { alpha } => w * z.powf(-alpha),
            Util::Linear => w,
        }
    }

    /// Change of -value for a move from z to z + dz, in a form that keeps
    /// full relative precision for small |dz|/z. Centering accepts steps
    /// on potential *differences*; computing value(z+dz) - value(z) by
    /// subtraction would drown genuine decreases in the rounding of two
    /// huge near-equal totals once they are scaled by t.
    fn neg_value_delta(self, w: f64, z: f64, dz: f64) -> f64 {
        match self {
            Util::Log => -w * (dz / z).ln_1p(),
            Util::Power { alpha } => {
                let p = 1.0 - alpha;
                -w * z.powf(p) * (p * (dz / z).ln_1p()).exp_m1() / p
            }
            Util::Linear => -w * dz,
        }
    }

    /// Negated second derivative (curvature of -utility, always >= 0).
    fn neg_d2(self, w: f64, z: f64) -> f64 {
        match self {
            Util::Log => w / (z * z),
            Util::Power { alpha } => alpha * w * z.powf(-alpha - 1.0),
            Util::Linear => 0.0,
        }
    }
}

/// Row sums D_r z, in the fixed member order. This is the single place
/// slacks are derived from, so the Newton gradient, the extracted
/// multipliers, and the reported residual all see bitwise-identical
/// values — the certificate identity survives cancellation at large t.
fn row_sum(row: &[u32], z: &[f64]) -> f64 {
    row.iter().map(|&v| z[v as usize]).sum()
}

fn slacks(rows: &[Vec<u32>], z: &[f64]) -> Vec<f64> {
    rows.iter().map(|row| 1.0 - row_sum(row, z)).collect()
}

/// Clamps a point into the strict interior: floors entries and rescales
/// if the worst row sum leaves less than the interior margin. The uniform
/// point 1/K touches the boundary whenever a row has K members, so even
/// the cold start goes through this repair.
fn make_interior(rows: &[Vec<u32>], z: &mut [f64]) {
    for v in z.iter_mut() {
        if !(*v >= INTERIOR_FLOOR) {
            *v = INTERIOR_FLOOR;
        }
    }
    let worst = rows
        .iter()
        .map(|row| row_sum(row, z))
        .fold(0.0_f64, f64::max);
    if worst >= 1.0 - INTERIOR_MARGIN {
        let scale = (1.0 - INTERIOR_MARGIN) / worst;
        for v in z.iter_mut() {
            *v *= scale;
        }
    }
}

/// One centering stage: damped Newton on the barrier potential at fixed
/// t, until the Newton decrement is below tolerance (or provably at the
/// arithmetic noise floor). Returns the number of steps taken.
fn center(
    util: Util,
    weights: &[f64],
    rows: &[Vec<u32>],
    t: f64,
    z: &mut [f64],
    tols: &SolverTolerances,
) -> Result<usize> {
    let n = weights.len();
    let mut steps = 0;
    let mut prev_decrement = f64::INFINITY;
    let mut stall_streak = 0;

    for _ in 0..tols.max_newton_iters {
        let s = slacks(rows, z);
        if s.iter().any(|&v| v <= 0.0) || z.iter().any(|&v| v <= 0.0) {
            return Err(Error::NumericalFailure(format!(
                "iterate left the strict interior at t = {t:.3e}"
            )));
        }

        // Gradient of the barrier potential.
        let mut grad = DVector::zeros(n);
        for l in 0..n {
            grad[l] = -t * util.d1(weights[l], z[l]) - 1.0 / z[l];
        }
        for (r, row) in rows.iter().enumerate() {
            let inv_s = 1.0 / s[r];
            for &v in row {
                grad[v as usize] += inv_s;
            }
        }

        // Hessian: t * curvature + D' diag(1/s^2) D + diag(1/z^2).
        let mut hess = DMatrix::zeros(n, n);
        for l in 0..n {
            hess[(l, l)] = t * util.neg_d2(weights[l], z[l]) + 1.0 / (z[l] * z[l]);
        }
        for (r, row) in rows.iter().enumerate() {
            let inv_s2 = 1.0 / (s[r] * s[r]);
            for &a in row {
                for &b in row {
                    hess[(a as usize, b as usize)] += inv_s2;
                }
            }
        }

        // Factor, regularizing the diagonal if the factorization fails.
        let scale = 1.0 + hess.diagonal().amax();
        let mut ridge = 0.0;
        let chol = loop {
            let mut m = hess.clone();
            if ridge > 0.0 {
                for l in 0..n {
                    m[(l, l)] += ridge * scale;
                }
            }
            match Cholesky::new(m) {
                Some(c) => break c,
                None => {
                    ridge = if ridge == 0.0 {
                        RIDGE_INITIAL
                    } else {
                        ridge * RIDGE_GROWTH
                    };
                    if ridge > RIDGE_MAX {
                        return Err(Error::NumericalFailure(format!(
                            "Hessian factorization failed at t = {t:.3e} despite regularization"
                        )));
                    }
                }
            }
        };

        let direction = chol.solve(&(-&grad));
        let decrement = (-grad.dot(&direction)).max(0.0).sqrt();

        if decrement <= NEWTON_DECREMENT_TOL {
            return Ok(steps);
        }
        // Progress stalls once gradient cancellation noise dominates; a
        // small decrement that stops shrinking is as centered as f64
        // arithmetic allows, and the outer loop's measured residual stays
        // in charge of actual solution quality.
        if decrement <= STALL_CEILING && decrement >= 0.5 * prev_decrement {
            stall_streak += 1;
            if stall_streak >= STALL_STREAK {
                return Ok(steps);
            }
        } else {
            stall_streak = 0;
        }
        prev_decrement = decrement;

        // Movement of each row sum per unit step, and the largest step
        // that keeps every slack and variable positive.
        let row_along: Vec<f64> = rows
            .iter()
            .map(|row| row.iter().map(|&v| direction[v as usize]).sum())
            .collect();
        let mut step_limit = f64::INFINITY;
        for l in 0..n {
            if direction[l] < 0.0 {
                step_limit = step_limit.min(z[l] / -direction[l]);
            }
        }
        for (r, &along) in row_along.iter().enumerate() {
            if along > 0.0 {
                step_limit = step_limit.min(s[r] / along);
            }
        }

        if decrement <= FULL_STEP_DECREMENT && step_limit > 1.0 {
            for l in 0..n {
                z[l] += direction[l];
            }
            steps += 1;
            continue;
        }

        // Damped phase: Armijo backtracking from just inside the
        // boundary. The acceptance test works on the potential
        // *difference*, assembled per term in cancellation-free form;
        // the potential value itself has ulps coarser than the decrease
        // being certified at large t, so subtracting two evaluations
        // would let rounding noise accept steps that move nothing.
        let potential_delta = |step: f64| -> f64 {
            let mut delta = 0.0;
            for l in 0..n {
                let dz = step * direction[l];
                delta += t * util.neg_value_delta(weights[l], z[l], dz);
                delta -= (dz / z[l]).ln_1p();
            }
            for (r, &along) in row_along.iter().enumerate() {
                delta -= (-step * along / s[r]).ln_1p();
            }
            delta
        };
        let mut step = (BOUNDARY_SHRINK * step_limit).min(1.0);
        loop {
            let delta = potential_delta(step);
            if delta.is_finite() && delta <= -ARMIJO_SLOPE * step * decrement * decrement {
                for l in 0..n {
                    z[l] += step * direction[l];
                }
                break;
            }
            step *= ARMIJO_BACKOFF;
            if step < MIN_STEP {
                // No descent distinguishable from rounding noise: the
                // iterate is as centered as f64 arithmetic allows here,
                // and the outer loop's measured certificate decides
                // whether that is good enough.
                return Ok(steps);
            }
        }
        steps += 1;
    }

    Err(Error::NonConvergence(format!(
        "centering did not converge within {} Newton steps at t = {t:.3e}",
        tols.max_newton_iters
    )))
}

/// Shared path-following core for both utility families.
fn barrier_solve(
    util: Util,
    weights: &[f64],
    rows: &[Vec<u32>],
    class_count: usize,
    alpha_for_certificate: f64,
    tols: &SolverTolerances,
    warm_start: Option<&WarmStart>,
) -> Result<DualSolution> {
    tols.validate()?;
    let n = weights.len();

    // Singleton-only programs are solved in closed form: every variable
    // sits at its cap, the objective is exactly zero, and the row
    // multipliers equal the utility derivatives at 1.
    if rows.iter().all(|row| row.len() == 1) && rows.len() == n && {
        let mut seen = vec![false; n];
        rows.iter().for_each(|row| seen[row[0] as usize] = true);
        seen.iter().all(|&s| s)
    } {
        let z = vec![1.0; n];
        let lambda: Vec<f64> = rows.iter().map(|row| weights[row[0] as usize]).collect();
        let objective: f64 = weights.iter().map(|&w| util.value(w, 1.0)).sum();
        let risk_lower_bound = if objective == 0.0 { 0.0 } else { -objective };
        return Ok(DualSolution {
            objective,
            risk_lower_bound,
            kkt_residual: 0.0,
            newton_iters: 0,
            z,
            lambda,
        });
    }

    let uniform = 1.0 / class_count as f64;
    let mut z: Vec<f64> = match warm_start {
        Some(ws) => {
            if ws.z0.len() != n {
                return Err(Error::InvalidConfig(format!(
                    "warm start has {} entries, problem has {n} variables",
                    ws.z0.len()
                )));
            }
            if !(ws.theta > 0.0 && ws.theta < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "warm start theta must lie in (0,1), got {}",
                    ws.theta
                )));
            }
            if ws.z0.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidConfig(
                    "warm start contains non-finite entries".into(),
                ));
            }
            ws.z0
                .iter()
                .map(|&v| (1.0 - ws.theta) * v + ws.theta * uniform)
                .collect()
        }
        None => vec![uniform; n],
    };
    make_interior(rows, &mut z);
    debug_assert!(slacks(rows, &z).iter().all(|&s| s > 0.0));

    let barrier_terms = (rows.len() + n) as f64;
    // Smallest t that satisfies the gap condition, padded so the division
    // below cannot round back above the tolerance. Capping the growth
    // ladder here avoids centering at a barrier weight up to one full
    // growth factor larger than needed, which for the curvature-free
    // alpha = 0 utility on large programs is the difference between a
    // routine solve and f64 cancellation noise.
    let t_needed = barrier_terms / tols.gap_tol * (1.0 + 1e-10);
    let mut t = T_INITIAL;
    let mut newton_iters = 0;
    loop {
        newton_iters += center(util, weights, rows, t, &mut z, tols)?;
        let s = slacks(rows, &z);
        let lambda: Vec<f64> = s.iter().map(|&sr| 1.0 / (t * sr)).collect();
        let gap = barrier_terms / t;
        let residual = kkt_residual_impl(alpha_for_certificate, weights, rows, &z, &lambda);
        if gap <= tols.gap_tol && residual <= tols.kkt_tol {
            let objective: f64 = weights
                .iter()
                .zip(&z)
                .map(|(&w, &v)| util.value(w, v))
                .sum();
            let risk_lower_bound = if objective == 0.0 { 0.0 } else { -objective };
            return Ok(DualSolution {
                z,
                lambda,
                objective,
                risk_lower_bound,
                kkt_residual: residual,
                newton_iters,
            });
        }
        t = if t < t_needed {
            (t * tols.barrier_growth).min(t_needed)
        } else {
            // The gap condition already holds; only the measured residual
            // is short, so keep sharpening the certificate.
            t * tols.barrier_growth
        };
        if t > T_MAX {
            return Err(Error::NonConvergence(format!(
                "barrier weight exceeded {T_MAX:.1e} with gap {gap:.3e} and KKT residual {residual:.3e}"
            )));
        }
    }
}

/// Solves the packing program to the configured certificate tolerances.
pub fn solve(
    problem: &PackingProblem,
    tols: &SolverTolerances,
    warm_start: Option<&WarmStart>,
) -> Result<DualSolution> {
    problem.validate()?;
    barrier_solve(
        Util::from_alpha(problem.alpha),
        &problem.weights,
        &problem.rows,
        problem.class_count,
        problem.alpha,
        tols,
        warm_start,
    )
}

fn kkt_residual_impl(
    alpha_value: f64,
    weights: &[f64],
    rows: &[Vec<u32>],
    z: &[f64],
    lambda: &[f64],
) -> f64 {
    let util = Util::from_alpha(alpha_value);
    let mut residual = 0.0_f64;

    // Multiplier mass reaching each variable, (D' lambda)_l.
    let mut pull = vec![0.0; z.len()];
    for (r, row) in rows.iter().enumerate() {
        for &v in row {
            pull[v as usize] += lambda[r];
        }
    }

    for l in 0..z.len() {
        // Stationarity with the z >= 0 bound multiplier eliminated: the
        // negative part of r is that multiplier, so only excess gradient
        // (r > 0) and the bound's complementary slackness |r| z count.
        let r = util.d1(weights[l], z[l]) - pull[l];
        residual = residual.max(r.max(0.0));
        residual = residual.max((r * z[l]).abs());
        residual = residual.max(-z[l]);
    }
    for (r, row) in rows.iter().enumerate() {
        let slack = 1.0 - row_sum(row, z);
        residual = residual.max(-slack); // primal feasibility
        residual = residual.max(-lambda[r]); // dual feasibility
        residual = residual.max((lambda[r] * slack).abs()); // complementarity
    }
    residual
}

/// Optimality certificate: the largest violation among stationarity
/// (gradient not covered by multipliers), primal/dual feasibility, and
/// complementary slackness for both the rows and the z >= 0 bounds.
pub fn kkt_residual(problem: &PackingProblem, z: &[f64], lambda: &[f64]) -> f64 {
    assert_eq!(z.len(), problem.var_count(), "z length mismatch");
    assert_eq!(lambda.len(), problem.rows.len(), "lambda length mismatch");
    kkt_residual_impl(problem.alpha, &problem.weights, &problem.rows, z, lambda)
}

/// Brute-force reference for tiny programs: successive grid refinement
/// over the feasible box. Returns the best objective found, accurate to
/// about 1e-3 thanks to concavity of the objective.
pub fn oracle_solve(problem: &PackingProblem) -> Result<f64> {
    problem.validate()?;
    let n = problem.var_count();
    if n > ORACLE_MAX_VARS {
        return Err(Error::OracleTooLarge {
            got: n,
            max: ORACLE_MAX_VARS,
        });
    }
    let mut lo = vec![ORACLE_FLOOR; n];
    let mut hi = vec![1.0; n];
    let mut best_val = f64::NEG_INFINITY;
    let mut best_z = vec![ORACLE_FLOOR; n];

    for _ in 0..ORACLE_ROUNDS {
        let axes: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..ORACLE_POINTS_PER_AXIS)
                    .map(|k| {
                        lo[i] + (hi[i] - lo[i]) * k as f64 / (ORACLE_POINTS_PER_AXIS - 1) as f64
                    })
                    .collect()
            })
            .collect();
        let mut idx = vec![0usize; n];
        let mut z = vec![0.0; n];
        'points: loop {
            for i in 0..n {
                z[i] = axes[i][idx[i]];
            }
            let feasible = problem
                .rows
                .iter()
                .all(|row| row_sum(row, &z) <= 1.0 + ORACLE_FEASIBILITY_SLACK);
            if feasible {
                let val: f64 = problem
                    .weights
                    .iter()
                    .zip(&z)
                    .map(|(&w, &v)| {
                        w * log_alpha(problem.alpha, v).expect("grid points are positive")
                    })
                    .sum();
                if val > best_val {
                    best_val = val;
                    best_z.copy_from_slice(&z);
                }
            }
            // odometer increment
            let mut axis = 0;
            loop {
                if axis == n {
                    break 'points;
                }
                idx[axis] += 1;
                if idx[axis] < ORACLE_POINTS_PER_AXIS {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
            }
        }
        for i in 0..n {
            let half = (hi[i] - lo[i]) / (2.0 * ORACLE_BOX_SHRINK);
            lo[i] = (best_z[i] - half).max(ORACLE_FLOOR);
            hi[i] = (best_z[i] + half).min(1.0);
        }
    }
    Ok(best_val)
}

/// The 0-1-loss dual over the same rows: maximize sum_l w_l g_l subject
/// to D g <= 1, g >= 0, returning 1 - optimum. For unit total mass this
/// equals the alpha = 0 risk lower bound (the two programs differ by the
/// constant sum of weights and share their optimizers).
pub fn zero_one_dual_solve(problem: &PackingProblem, tols: &SolverTolerances) -> Result<f64> {
    problem.validate()?;
    if problem.alpha != 0.0 {
        return Err(Error::InvalidConfig(format!(
            "the 0-1 dual applies to alpha = 0 programs, got alpha = {}",
            problem.alpha
        )));
    }
    let solution = barrier_solve(
        Util::Linear,
        &problem.weights,
        &problem.rows,
        problem.class_count,
        0.0,
        tols,
        None,
    )?;
    Ok(1.0 - solution.objective)
}
