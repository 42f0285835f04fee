//! Conflict hypergraph: which cross-class tuples of atoms can be pushed
//! onto a single point by an adversary with budget `eps`.
//!
//! Variables are the dataset atoms, numbered class by class. An edge is a
//! tuple with at most one atom per class whose closed `eps`-balls intersect
//! jointly; each edge becomes one packing constraint `sum z <= 1`. Because
//! the dual variables are nonnegative, a tuple contained in a larger
//! intersecting tuple is redundant, so only inclusion-maximal edges are
//! kept (plus singletons for atoms that appear in no edge, which carry the
//! plain `z <= 1` box constraint).

use std::collections::HashSet;

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::geometry::{balls_intersect, within_radius, Metric};

/// Default ceiling on stored edges before enumeration aborts.
pub const DEFAULT_EDGE_LIMIT: usize = 10_000_000;

/// Bijection between dense variable ids and (class, position) pairs.
///
/// Variables are ordered by class, then by the order in which atoms of
/// that class appear in the dataset. The layout depends only on the
/// dataset, never on `eps`, so dual vectors can be reused across radii.
#[derive(Clone, Debug)]
pub struct VariableIndex {
    /// class -> first variable id (length class_count + 1)
    offsets: Vec<u32>,
    /// variable id -> dataset row
    point_of: Vec<u32>,
    /// variable id -> (class, position within class)
    member_of: Vec<(u32, u32)>,
}

impl VariableIndex {
    pub fn new(data: &LabeledDataset) -> Self {
        let k = data.class_count();
        let mut by_class: Vec<Vec<u32>> = vec![Vec::new(); k];
        for i in 0..data.len() {
            by_class[data.label(i)].push(i as u32);
        }
        let mut offsets = Vec::with_capacity(k + 1);
        let mut point_of = Vec::with_capacity(data.len());
        let mut member_of = Vec::with_capacity(data.len());
        offsets.push(0);
        for (c, rows) in by_class.iter().enumerate() {
            for (pos, &row) in rows.iter().enumerate() {
                point_of.push(row);
                member_of.push((c as u32, pos as u32));
            }
            offsets.push(point_of.len() as u32);
        }
        VariableIndex {
            offsets,
            point_of,
            member_of,
        }
    }

    pub fn var_count(&self) -> usize {
        self.point_of.len()
    }

    pub fn class_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Variable ids of one class, as a contiguous range.
    pub fn class_vars(&self, class: usize) -> std::ops::Range<usize> {
        self.offsets[class] as usize..self.offsets[class + 1] as usize
    }

    /// Dataset row behind a variable.
    pub fn point_of(&self, var: usize) -> usize {
        self.point_of[var] as usize
    }

    /// (class, position-within-class) behind a variable.
    pub fn member_of(&self, var: usize) -> (usize, usize) {
        let (c, p) = self.member_of[var];
        (c as usize, p as usize)
    }

    /// Variable id for (class, position), if it exists.
    pub fn var_of(&self, class: usize, position: usize) -> Option<usize> {
        if class >= self.class_count() {
            return None;
        }
        let range = self.class_vars(class);
        let v = range.start + position;
        (v < range.end).then_some(v)
    }

    pub fn class_of(&self, var: usize) -> usize {
        self.member_of[var].0 as usize
    }
}

/// One packing constraint: a set of variables (classes pairwise distinct)
/// whose dual values must sum to at most one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintEdge {
    /// Sorted variable ids.
    pub vars: Vec<u32>,
}

impl ConstraintEdge {
    pub fn size(&self) -> usize {
        self.vars.len()
    }
}

#[derive(Clone, Debug)]
pub struct ConflictHypergraph {
    pub edges: Vec<ConstraintEdge>,
    pub index: VariableIndex,
    pub metric: Metric,
    pub epsilon: f64,
    pub interaction_cap: usize,
}

impl ConflictHypergraph {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn var_count(&self) -> usize {
        self.index.var_count()
    }

    /// Members of an edge as (class, position) pairs.
    pub fn members(&self, edge: &ConstraintEdge) -> Vec<(usize, usize)> {
        edge.vars
            .iter()
            .map(|&v| self.index.member_of(v as usize))
            .collect()
    }

    /// Writes `edge_id,size,class:point;class:point;...` rows.
    pub fn write_edges_csv(&self, path: &std::path::Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["edge_id", "size", "members"])?;
        for (i, e) in self.edges.iter().enumerate() {
            let members = self
                .members(e)
                .iter()
                .map(|(c, p)| format!("{c}:{p}"))
                .collect::<Vec<_>>()
                .join(";");
            w.write_record([format!("{i}"), format!("{}", e.size()), members])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Builds the conflict hypergraph with the default edge budget.
pub fn build_hypergraph(
    data: &LabeledDataset,
    metric: Metric,
    epsilon: f64,
    cap: usize,
) -> Result<ConflictHypergraph> {
    build_hypergraph_with_limit(data, metric, epsilon, cap, DEFAULT_EDGE_LIMIT)
}

/// As [`build_hypergraph`], with an explicit ceiling on stored edges.
///
/// Enumeration walks class subsets largest-first and tuples in
/// lexicographic order, prunes candidates by the pairwise half-distance
/// test, and (Euclidean only, tuples of three or more) confirms with the
/// exact enclosing-ball test — Chebyshev balls are boxes, where pairwise
/// intersection already implies a joint point. The returned edges are
/// sorted lexicographically by member ids.
pub fn build_hypergraph_with_limit(
    data: &LabeledDataset,
    metric: Metric,
    epsilon: f64,
    cap: usize,
    edge_limit: usize,
) -> Result<ConflictHypergraph> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "epsilon must be finite and nonnegative, got {epsilon}"
        )));
    }
    if cap < 2 {
        return Err(Error::InvalidConfig(format!(
            "interaction cap must be at least 2, got {cap}"
        )));
    }
    let index = VariableIndex::new(data);
    let n = index.var_count();
    let k = index.class_count();
    let max_size = cap.min(k);

    // Pairwise adjacency under the necessary condition d <= 2 eps,
    // stored as bitsets over variable ids.
    let words = n.div_ceil(64);
    let mut adj = vec![0u64; n * words];
    for a in 0..n {
        let pa = data.point(index.point_of(a));
        for b in (a + 1)..n {
            if index.class_of(a) == index.class_of(b) {
                continue;
            }
            let pb = data.point(index.point_of(b));
            let d = metric.distance(pa, pb);
            if within_radius(0.5 * d, epsilon) {
                adj[a * words + b / 64] |= 1 << (b % 64);
                adj[b * words + a / 64] |= 1 << (a % 64);
            }
        }
    }
    let adjacent = |a: usize, b: usize| adj[a * words + b / 64] >> (b % 64) & 1 == 1;

    let mut edges: Vec<Vec<u32>> = Vec::new();
    let mut dominated: HashSet<Vec<u32>> = HashSet::new();
    let mut covered = vec![false; n];

    // One tuple slot per chosen class; recursion depth == subset size.
    struct Walk<'a> {
        data: &'a LabeledDataset,
        index: &'a VariableIndex,
        metric: Metric,
        epsilon: f64,
        edge_limit: usize,
        adjacent: &'a dyn Fn(usize, usize) -> bool,
        edges: &'a mut Vec<Vec<u32>>,
        dominated: &'a mut HashSet<Vec<u32>>,
        covered: &'a mut Vec<bool>,
    }

    impl Walk<'_> {
        fn tuples(&mut self, combo: &[usize], level: usize, chosen: &mut Vec<u32>) -> Result<()> {
            if level == combo.len() {
                return self.emit(chosen);
            }
            for v in self.index.class_vars(combo[level]) {
                if chosen.iter().all(|&u| (self.adjacent)(u as usize, v)) {
                    chosen.push(v as u32);
                    self.tuples(combo, level + 1, chosen)?;
                    chosen.pop();
                }
            }
            Ok(())
        }

        fn emit(&mut self, tuple: &[u32]) -> Result<()> {
            if tuple.len() >= 3 && self.metric == Metric::Euclidean {
                let pts: Vec<&[f64]> = tuple
                    .iter()
                    .map(|&v| self.data.point(self.index.point_of(v as usize)))
                    .collect();
                if !balls_intersect(self.metric, &pts, self.epsilon) {
                    return Ok(());
                }
            }
            let candidate = tuple.to_vec();
            if self.dominated.contains(&candidate) {
                return Ok(());
            }
            if self.edges.len() == self.edge_limit {
                return Err(Error::EdgeLimit {
                    limit: self.edge_limit,
                });
            }
            // Register proper sub-tuples so smaller candidates are skipped.
            let s = candidate.len();
            for mask in 1u32..(1 << s) {
                let size = mask.count_ones() as usize;
                if size < 2 || size == s {
                    continue;
                }
                let sub: Vec<u32> = (0..s)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| candidate[i])
                    .collect();
                self.dominated.insert(sub);
            }
            for &v in &candidate {
                self.covered[v as usize] = true;
            }
            self.edges.push(candidate);
            Ok(())
        }
    }

    let mut walk = Walk {
        data,
        index: &index,
        metric,
        epsilon,
        edge_limit,
        adjacent: &adjacent,
        edges: &mut edges,
        dominated: &mut dominated,
        covered: &mut covered,
    };

    // Next lexicographic class combination; false once exhausted.
    fn advance(combo: &mut [usize], k: usize) -> bool {
        let size = combo.len();
        for i in (0..size).rev() {
            if combo[i] < k - (size - i) {
                combo[i] += 1;
                for j in (i + 1)..size {
                    combo[j] = combo[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }

    for size in (2..=max_size).rev() {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            walk.tuples(&combo, 0, &mut Vec::new())?;
            if !advance(&mut combo, k) {
                break;
            }
        }
    }
    drop(walk);

    for v in 0..n {
        if !covered[v] {
            edges.push(vec![v as u32]);
        }
    }
    edges.sort();

    Ok(ConflictHypergraph {
        edges: edges
            .into_iter()
            .map(|vars| ConstraintEdge { vars })
            .collect(),
        index,
        metric,
        epsilon,
        interaction_cap: cap,
    })
}
