//! Sweep orchestration: run the bound over an (epsilon, alpha) grid with
//! warm starts, collect per-cell diagnostics, and expose the asymptote
//! reference value.
//!
//! Sweeps iterate alpha ascending (outer) and epsilon ascending (inner).
//! Conflict hypergraphs depend only on (metric, epsilon, cap), so they are
//! built once per epsilon and reused across all alphas. Each solve is
//! warm-started from the nearest already-solved neighbor: the previous
//! epsilon at the same alpha when available, otherwise the same epsilon at
//! the previous alpha; the solver blends the start toward the uniform
//! point by `warm_start_theta` to restore strict feasibility.

use std::time::Instant;

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::geometry::Metric;
use crate::hypergraph::{build_hypergraph, ConflictHypergraph};
use crate::solver::{solve, PackingProblem, SolverTolerances, WarmStart};

/// Default blend weight toward the uniform point for warm starts.
pub const DEFAULT_WARM_START_THETA: f64 = 0.01;

/// Everything a sweep needs besides the dataset.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub metric: Metric,
    /// Strictly increasing, all nonnegative.
    pub epsilon_grid: Vec<f64>,
    /// Nonnegative alpha values; solved in ascending order.
    pub alpha_list: Vec<f64>,
    /// Largest conflicting tuple size to enumerate; at least 2. Values
    /// above the class count are harmless (tuples hold at most one atom
    /// per class, so the effective cap is min(cap, classes)).
    pub interaction_cap: usize,
    pub tolerances: SolverTolerances,
    /// Blend weight in (0, 1) toward the uniform point for warm starts.
    pub warm_start_theta: f64,
}

impl RunConfig {
    pub fn new(metric: Metric, epsilon_grid: Vec<f64>, alpha_list: Vec<f64>) -> Self {
        RunConfig {
            metric,
            epsilon_grid,
            alpha_list,
            interaction_cap: 3,
            tolerances: SolverTolerances::default(),
            warm_start_theta: DEFAULT_WARM_START_THETA,
        }
    }

    pub fn validate(&self, data: &LabeledDataset) -> Result<()> {
        let _ = data; // shape checks live in the dataset loader
        if self.epsilon_grid.is_empty() {
            return Err(Error::InvalidConfig("epsilon grid is empty".into()));
        }
        for pair in self.epsilon_grid.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(Error::InvalidConfig(format!(
                    "epsilon grid must be strictly increasing, got {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        for &eps in &self.epsilon_grid {
            if !(eps.is_finite() && eps >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "epsilon values must be finite and nonnegative, got {eps}"
                )));
            }
        }
        if self.alpha_list.is_empty() {
            return Err(Error::InvalidConfig("alpha list is empty".into()));
        }
        for &alpha in &self.alpha_list {
            if !(alpha.is_finite() && alpha >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "alpha values must be finite and nonnegative, got {alpha}"
                )));
            }
        }
        if self.interaction_cap < 2 {
            return Err(Error::InvalidConfig(format!(
                "interaction cap must be at least 2, got {}",
                self.interaction_cap
            )));
        }
        if !(self.warm_start_theta > 0.0
            && self.warm_start_theta < 1.0
            && self.warm_start_theta.is_finite())
        {
            return Err(Error::InvalidConfig(format!(
                "warm start blend must lie strictly between 0 and 1, got {}",
                self.warm_start_theta
            )));
        }
        self.tolerances.validate()
    }

    /// Alphas in solving order: ascending, exact duplicates dropped.
    fn sorted_alphas(&self) -> Vec<f64> {
        let mut alphas = self.alpha_list.clone();
        alphas.sort_by(f64::total_cmp);
        alphas.dedup();
        alphas
    }
}

/// One solved grid cell with its diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveRow {
    pub epsilon: f64,
    pub alpha: f64,
    pub risk_lower_bound: f64,
    pub kkt_residual: f64,
    pub newton_iters: usize,
    pub edge_count: usize,
    pub wall_time_ms: u64,
}

/// All cells of a sweep, sorted by (alpha, epsilon).
#[derive(Clone, Debug, Default)]
pub struct RiskCurve {
    pub rows: Vec<CurveRow>,
}

impl RiskCurve {
    /// The rows of one alpha value, in epsilon order.
    pub fn alpha_slice(&self, alpha: f64) -> Vec<&CurveRow> {
        self.rows.iter().filter(|r| r.alpha == alpha).collect()
    }
}

fn sort_rows(rows: &mut [CurveRow]) {
    rows.sort_by(|a, b| {
        a.alpha
            .total_cmp(&b.alpha)
            .then(a.epsilon.total_cmp(&b.epsilon))
    });
}

/// Tags message-bearing errors with the grid cell that produced them.
fn annotate_cell(err: Error, epsilon: f64, alpha: f64) -> Error {
    let tag = format!("cell (epsilon={epsilon}, alpha={alpha})");
    match err {
        Error::NonConvergence(m) => Error::NonConvergence(format!("{tag}: {m}")),
        Error::NumericalFailure(m) => Error::NumericalFailure(format!("{tag}: {m}")),
        Error::InvalidConfig(m) => Error::InvalidConfig(format!("{tag}: {m}")),
        other => {
            log::error!("{tag}: {other}");
            other
        }
    }
}

fn build_graphs(data: &LabeledDataset, config: &RunConfig) -> Result<Vec<ConflictHypergraph>> {
    config
        .epsilon_grid
        .iter()
        .map(|&eps| {
            build_hypergraph(data, config.metric, eps, config.interaction_cap)
                .map_err(|e| annotate_cell(e, eps, f64::NAN))
        })
        .collect()
}

/// Solves the epsilon chain of one alpha. `seed_for` supplies the
/// cross-alpha fallback start for cells whose same-alpha predecessor does
/// not exist (the chain's first cell).
fn solve_slice(
    data: &LabeledDataset,
    config: &RunConfig,
    graphs: &[ConflictHypergraph],
    alpha: f64,
    mut seed_for: impl FnMut(usize) -> Option<Vec<f64>>,
    mut on_solved: impl FnMut(usize, &[f64]),
) -> Result<Vec<CurveRow>> {
    let mut rows = Vec::with_capacity(graphs.len());
    let mut prev_z: Option<Vec<f64>> = None;
    for (ei, graph) in graphs.iter().enumerate() {
        let epsilon = config.epsilon_grid[ei];
        let clock = Instant::now();
        let problem = PackingProblem::from_hypergraph(graph, data, alpha)
            .map_err(|e| annotate_cell(e, epsilon, alpha))?;
        let start = prev_z.take().or_else(|| seed_for(ei)).map(|z0| WarmStart {
            z0,
            theta: config.warm_start_theta,
        });
        let solution = solve(&problem, &config.tolerances, start.as_ref())
            .map_err(|e| annotate_cell(e, epsilon, alpha))?;
        on_solved(ei, &solution.z);
        rows.push(CurveRow {
            epsilon,
            alpha,
            risk_lower_bound: solution.risk_lower_bound,
            kkt_residual: solution.kkt_residual,
            newton_iters: solution.newton_iters,
            edge_count: graph.edge_count(),
            wall_time_ms: clock.elapsed().as_millis().try_into().unwrap_or(u64::MAX),
        });
        prev_z = Some(solution.z);
    }
    Ok(rows)
}

/// Runs the full (epsilon, alpha) grid sequentially. Deterministic; rows
/// come back sorted by (alpha, epsilon). The first error aborts the sweep,
/// annotated with its cell.
pub fn sweep(data: &LabeledDataset, config: &RunConfig) -> Result<RiskCurve> {
    config.validate(data)?;
    let graphs = build_graphs(data, config)?;
    let alphas = config.sorted_alphas();

    // Solutions of the previous alpha, per epsilon index: the fallback
    // warm start for the first cell of each subsequent alpha chain.
    let mut carry: Vec<Option<Vec<f64>>> = vec![None; graphs.len()];
    let mut rows = Vec::with_capacity(alphas.len() * graphs.len());
    for &alpha in &alphas {
        let mut solved: Vec<Option<Vec<f64>>> = vec![None; graphs.len()];
        let slice = solve_slice(
            data,
            config,
            &graphs,
            alpha,
            |ei| carry[ei].clone(),
            |ei, z| solved[ei] = Some(z.to_vec()),
        )?;
        rows.extend(slice);
        carry = solved;
    }
    sort_rows(&mut rows);
    Ok(RiskCurve { rows })
}

/// Like [`sweep`], but solves the alpha slices on separate threads. Each
/// slice keeps its sequential same-alpha warm-start chain (its first cell
/// starts cold), so every cell's arithmetic is independent of scheduling
/// and the merged result is deterministic.
pub fn sweep_parallel(data: &LabeledDataset, config: &RunConfig) -> Result<RiskCurve> {
    config.validate(data)?;
    let graphs = build_graphs(data, config)?;
    let alphas = config.sorted_alphas();

    let results: Vec<Result<Vec<CurveRow>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = alphas
            .iter()
            .map(|&alpha| {
                let graphs = &graphs;
                scope.spawn(move || solve_slice(data, config, graphs, alpha, |_| None, |_, _| {}))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });

    let mut rows = Vec::with_capacity(alphas.len() * graphs.len());
    for slice in results {
        rows.extend(slice?);
    }
    sort_rows(&mut rows);
    Ok(RiskCurve { rows })
}

/// The large-epsilon ceiling of the bound: with every cross-class tuple
/// conflicting, equal class masses give the closed form -log_alpha(1/K);
/// unequal masses are priced by solving the dense one-row program.
pub fn full_confusion_value(alpha: f64, k: usize, class_masses: &[f64]) -> Result<f64> {
    if k == 0 || class_masses.len() != k {
        return Err(Error::InvalidConfig(format!(
            "expected {k} class masses, got {}",
            class_masses.len()
        )));
    }
    let total: f64 = class_masses.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidConfig(format!(
            "class masses must sum to 1, got {total}"
        )));
    }
    let uniform = 1.0 / k as f64;
    if class_masses.iter().all(|&m| (m - uniform).abs() <= 1e-12) {
        return Ok(-crate::alpha::log_alpha(alpha, uniform)?);
    }
    let problem = PackingProblem::new(
        class_masses.to_vec(),
        vec![(0..k as u32).collect()],
        k,
        alpha,
    )?;
    let solution = solve(&problem, &SolverTolerances::default(), None)?;
    Ok(solution.risk_lower_bound)
}
