//! Optimal robust classifiers built from dual potentials.
//!
//! A solved packing program assigns each support atom a potential
//! `phi = log_alpha(psi)`. Transferring those potentials to an arbitrary
//! query point is the c-transform: the cheapest way an adversary could
//! have produced the query from a clean atom of a given class. The
//! classifier then turns the K transform values into a probability
//! vector, with one closed-form recipe per loss family, and
//! [`verify_saddle`] checks the optimality conditions numerically.

use crate::alpha::{self, find_normalizer, log_alpha, loss_value, LossSpec};
use crate::dataset::{LabeledDataset, SolutionRecord};
use crate::error::{Error, Result};
use crate::geometry::{within_radius, Metric};
use crate::hypergraph::VariableIndex;

/// Transport cost from a clean point to a perturbed one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GroundCost {
    /// Free within `epsilon`, impossible beyond (closed balls).
    ZeroInfinity { epsilon: f64 },
    /// Distance divided by `tau`; every atom stays reachable.
    ScaledDistance { tau: f64 },
}

impl GroundCost {
    fn validate(&self) -> Result<()> {
        match *self {
            GroundCost::ZeroInfinity { epsilon } => {
                if !(epsilon >= 0.0 && epsilon.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "epsilon must be finite and nonnegative, got {epsilon}"
                    )));
                }
            }
            GroundCost::ScaledDistance { tau } => {
                if !(tau > 0.0 && tau.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "tau must be finite and positive, got {tau}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Per-atom dual potentials over a dataset, with the ground cost and
/// metric needed to transfer them to queries.
#[derive(Clone, Debug)]
pub struct PotentialSet<'a> {
    data: &'a LabeledDataset,
    index: VariableIndex,
    metric: Metric,
    cost: GroundCost,
    /// Potential per variable id (the index's (class, position) order).
    phi: Vec<f64>,
}

impl<'a> PotentialSet<'a> {
    /// Builds a potential set from per-class potential lists; `phi[c][p]`
    /// belongs to the p-th atom of class c (dataset order within class).
    pub fn new(
        data: &'a LabeledDataset,
        metric: Metric,
        cost: GroundCost,
        phi_by_class: Vec<Vec<f64>>,
    ) -> Result<Self> {
        cost.validate()?;
        let index = VariableIndex::new(data);
        if phi_by_class.len() != data.class_count() {
            return Err(Error::InvalidConfig(format!(
                "potentials cover {} classes, dataset has {}",
                phi_by_class.len(),
                data.class_count()
            )));
        }
        let mut phi = vec![0.0; index.var_count()];
        for (c, class_phi) in phi_by_class.iter().enumerate() {
            let vars = index.class_vars(c);
            if class_phi.len() != vars.len() {
                return Err(Error::InvalidConfig(format!(
                    "class {c} has {} atoms but {} potentials",
                    vars.len(),
                    class_phi.len()
                )));
            }
            for (offset, &value) in class_phi.iter().enumerate() {
                if !value.is_finite() {
                    return Err(Error::InvalidConfig(format!(
                        "potential of class {c}, atom {offset} is not finite: {value}"
                    )));
                }
                phi[vars.start + offset] = value;
            }
        }
        Ok(PotentialSet {
            data,
            index,
            metric,
            cost,
            phi,
        })
    }

    /// Recovers potentials from a stored solve: phi = log_alpha(psi),
    /// under the 0-infinity cost at the solve's radius and metric.
    pub fn from_solution(record: &SolutionRecord, data: &'a LabeledDataset) -> Result<Self> {
        let index = VariableIndex::new(data);
        let psi = record.psi_by_variable(&index)?;
        let mut phi = Vec::with_capacity(psi.len());
        for (v, &value) in psi.iter().enumerate() {
            let p = log_alpha(record.alpha, value)?;
            if !p.is_finite() {
                let (class, point) = index.member_of(v);
                return Err(Error::InvalidConfig(format!(
                    "psi of class {class}, atom {point} is {value}, whose potential is not finite at alpha = {}",
                    record.alpha
                )));
            }
            phi.push(p);
        }
        let cost = GroundCost::ZeroInfinity {
            epsilon: record.epsilon,
        };
        cost.validate()?;
        Ok(PotentialSet {
            data,
            index,
            metric: record.metric,
            cost,
            phi,
        })
    }

    pub fn class_count(&self) -> usize {
        self.data.class_count()
    }

    pub fn cost(&self) -> GroundCost {
        self.cost
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    fn check_query(&self, query: &[f64]) -> Result<()> {
        if query.len() != self.data.dim() {
            return Err(Error::InvalidConfig(format!(
                "query has dimension {}, dataset has {}",
                query.len(),
                self.data.dim()
            )));
        }
        Ok(())
    }

    /// The c-transform of class `class` at `query`: the minimum of
    /// cost(x, query) - phi(x) over that class's atoms. Under the
    /// 0-infinity cost only atoms within epsilon compete and the result
    /// is +infinity when none is in reach.
    pub fn c_transform(&self, class: usize, query: &[f64]) -> Result<f64> {
        self.check_query(query)?;
        if class >= self.class_count() {
            return Err(Error::InvalidConfig(format!(
                "class {class} out of range, dataset has {}",
                self.class_count()
            )));
        }
        let mut best = f64::INFINITY;
        for v in self.index.class_vars(class) {
            let atom = self.data.point(self.index.point_of(v));
            let d = self.metric.distance(atom, query);
            let candidate = match self.cost {
                GroundCost::ZeroInfinity { epsilon } => {
                    if within_radius(d, epsilon) {
                        -self.phi[v]
                    } else {
                        continue;
                    }
                }
                GroundCost::ScaledDistance { tau } => d / tau - self.phi[v],
            };
            best = best.min(candidate);
        }
        Ok(best)
    }

    fn transforms(&self, query: &[f64]) -> Result<Vec<f64>> {
        (0..self.class_count())
            .map(|c| self.c_transform(c, query))
            .collect()
    }
}

/// A classifier evaluation at one query point.
#[derive(Clone, Debug)]
pub struct ClassifierOutput {
    /// Probability vector over the K classes.
    pub f: Vec<f64>,
    /// The K c-transform values (+infinity for out-of-reach classes).
    pub transforms: Vec<f64>,
    /// The normalizer Z (cross-entropy and alpha families) or the
    /// water-filling level c* (quadratic).
    pub normalizer: Option<f64>,
}

/// Water-filling for the quadratic loss: sort transforms ascending, find
/// the largest prefix the budget of 2 can cover, and spread it linearly.
/// Returns (f, level). Infinite transforms sort last and never enter the
/// prefix. Ties sort by class index, which leaves the output invariant.
fn waterfill_quadratic(transforms: &[f64]) -> (Vec<f64>, f64) {
    let k = transforms.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| transforms[a].total_cmp(&transforms[b]).then(a.cmp(&b)));

    let sorted: Vec<f64> = order.iter().map(|&i| transforms[i]).collect();
    let mut prefix_sum = 0.0;
    let mut cut = k;
    for i in 1..k {
        prefix_sum += sorted[i - 1];
        // prefix of size i saturates if raising it to the next transform
        // level would overshoot the budget
        if i as f64 * sorted[i] - prefix_sum > 2.0 {
            cut = i;
            break;
        }
    }
    let head: f64 = sorted[..cut].iter().sum();
    let level = (2.0 + head) / cut as f64;

    let mut f = vec![0.0; k];
    for (rank, &class) in order.iter().enumerate() {
        if rank < cut {
            f[class] = ((level - sorted[rank]) / 2.0).max(0.0);
        }
    }
    (f, level)
}

/// Evaluates the optimal robust classifier at a query point.
pub fn classify(
    potentials: &PotentialSet,
    loss: &LossSpec,
    query: &[f64],
) -> Result<ClassifierOutput> {
    let transforms = potentials.transforms(query)?;
    if transforms.iter().all(|t| t.is_infinite()) {
        return Err(Error::UnreachableQuery { query: 0 });
    }
    match loss {
        LossSpec::CrossEntropy | LossSpec::AlphaLog(_) => {
            let alpha_value = loss.alpha().expect("loss family carries alpha");
            let z = find_normalizer(alpha_value, &transforms)?;
            let f: Vec<f64> = transforms
                .iter()
                .map(|&a| alpha::normalized_score(alpha_value, a, z))
                .collect();
            Ok(ClassifierOutput {
                f,
                transforms,
                normalizer: Some(z),
            })
        }
        LossSpec::Quadratic => {
            let (f, level) = waterfill_quadratic(&transforms);
            Ok(ClassifierOutput {
                f,
                transforms,
                normalizer: Some(level),
            })
        }
    }
}

/// Numerical optimality certificate for a classifier value at a query.
#[derive(Clone, Debug)]
pub struct SaddleReport {
    /// Worst loss-vs-transform gap over classes in reach; at a true
    /// saddle this is nonpositive. -infinity when no class is in reach.
    pub feasibility_gap: f64,
    /// Gap per class; -infinity marks out-of-reach classes.
    pub per_class_gaps: Vec<f64>,
    /// Quadratic loss only: the worst violation among multiplier
    /// nonnegativity, complementary slackness, and stationarity.
    pub multiplier_violation: Option<f64>,
    /// Quadratic loss only: the reconstructed equality multiplier.
    pub lambda_m: Option<f64>,
    /// max(feasibility_gap, multiplier_violation) <= tol.
    pub within_tol: bool,
}

impl SaddleReport {
    pub fn max_violation(&self) -> f64 {
        self.feasibility_gap
            .max(self.multiplier_violation.unwrap_or(f64::NEG_INFINITY))
    }
}

/// Checks the saddle conditions for a proposed classifier value `f`:
/// every in-reach class's loss must stay below its transform, and for
/// the quadratic loss the closed-form multipliers must be nonnegative,
/// complementary, and stationary. Violations are reported, not raised.
pub fn verify_saddle(
    potentials: &PotentialSet,
    loss: &LossSpec,
    query: &[f64],
    f: &[f64],
    tol: f64,
) -> Result<SaddleReport> {
    if f.len() != potentials.class_count() {
        return Err(Error::InvalidConfig(format!(
            "classifier value has {} entries, dataset has {} classes",
            f.len(),
            potentials.class_count()
        )));
    }
    let total: f64 = f.iter().sum();
    if f.iter().any(|&v| !(v >= -1e-9)) || (total - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidConfig(format!(
            "classifier value is not a probability vector (sum {total})"
        )));
    }
    let transforms = potentials.transforms(query)?;

    let per_class_gaps: Vec<f64> = transforms
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            if t.is_finite() {
                loss_value(loss, f, i) - t
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let feasibility_gap = per_class_gaps
        .iter()
        .fold(f64::NEG_INFINITY, |acc, &g| acc.max(g));

    let (multiplier_violation, lambda_m) = if matches!(loss, LossSpec::Quadratic) {
        let k = transforms.len();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| transforms[a].total_cmp(&transforms[b]).then(a.cmp(&b)));
        let sorted: Vec<f64> = order.iter().map(|&i| transforms[i]).collect();
        let mut prefix_sum = 0.0;
        let mut cut = k;
        for i in 1..k {
            prefix_sum += sorted[i - 1];
            if i as f64 * sorted[i] - prefix_sum > 2.0 {
                cut = i;
                break;
            }
        }
        let head: f64 = sorted[..cut].iter().sum();
        let level = (2.0 + head) / cut as f64;
        let norm2: f64 = f.iter().map(|&v| v * v).sum();

        let mut violation = 0.0_f64;
        for (rank, &class) in order.iter().enumerate() {
            let t = transforms[class];
            if t.is_finite() {
                let gamma = if rank < cut { 0.0 } else { t - level };
                violation = violation.max(-gamma); // nonnegativity
                violation = violation.max((gamma * f[class]).abs()); // slackness
                violation = violation.max((level - 2.0 * f[class] - t + gamma).abs());
            } else {
                // out of reach: the classifier must put no mass here
                violation = violation.max(f[class]);
            }
        }
        (Some(violation), Some(level - norm2 - 1.0))
    } else {
        (None, None)
    };

    let max_violation = feasibility_gap.max(multiplier_violation.unwrap_or(f64::NEG_INFINITY));
    Ok(SaddleReport {
        feasibility_gap,
        per_class_gaps,
        multiplier_violation,
        lambda_m,
        within_tol: max_violation <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// One atom per class at the given coordinates; potentials supplied
    /// per class (every class has exactly one atom here).
    fn single_atom_set<'a>(
        data: &'a LabeledDataset,
        cost: GroundCost,
        phi: &[f64],
    ) -> PotentialSet<'a> {
        let per_class: Vec<Vec<f64>> = phi.iter().map(|&p| vec![p]).collect();
        PotentialSet::new(data, Metric::Euclidean, cost, per_class).unwrap()
    }

    fn dataset(rows: &[(u64, Vec<f64>)]) -> LabeledDataset {
        let points: Vec<Vec<f64>> = rows.iter().map(|(_, p)| p.clone()).collect();
        let labels: Vec<u64> = rows.iter().map(|(l, _)| *l).collect();
        LabeledDataset::new(points, labels, None).unwrap()
    }

    const EPS1: GroundCost = GroundCost::ZeroInfinity { epsilon: 1.0 };

    #[test]
    fn c_transform_negates_the_potential_of_reachable_atoms() {
        let d = dataset(&[(0, vec![0.0, 0.0])]);
        let p = single_atom_set(&d, EPS1, &[-0.3]);
        assert!((p.c_transform(0, &[0.5, 0.0]).unwrap() - 0.3).abs() <= 1e-15);
        assert_eq!(p.c_transform(0, &[2.0, 0.0]).unwrap(), f64::INFINITY);
    }

    #[test]
    fn c_transform_takes_the_minimum_over_atoms() {
        let d = dataset(&[(0, vec![0.0]), (0, vec![0.5])]);
        let p = PotentialSet::new(&d, Metric::Euclidean, EPS1, vec![vec![-0.2, -0.9]]).unwrap();
        assert!((p.c_transform(0, &[0.25]).unwrap() - 0.2).abs() <= 1e-15);
    }

    #[test]
    fn scaled_distance_transform_charges_travel() {
        let d = dataset(&[(0, vec![0.0]), (0, vec![4.0])]);
        let p = PotentialSet::new(
            &d,
            Metric::Euclidean,
            GroundCost::ScaledDistance { tau: 2.0 },
            vec![vec![0.0, -0.1]],
        )
        .unwrap();
        // candidates: 1/2 - 0 = 0.5 and 3/2 + 0.1 = 1.6
        assert!((p.c_transform(0, &[1.0]).unwrap() - 0.5).abs() <= 1e-15);
    }

    #[test]
    fn symmetric_transforms_classify_uniformly_under_cross_entropy() {
        let d = dataset(&[(0, vec![0.0]), (1, vec![0.0]), (2, vec![0.0])]);
        let p = single_atom_set(&d, EPS1, &[0.0, 0.0, 0.0]);
        let out = classify(&p, &LossSpec::CrossEntropy, &[0.0]).unwrap();
        for &v in &out.f {
            assert!((v - 1.0 / 3.0).abs() <= 1e-12);
        }
        assert!((out.normalizer.unwrap() - 3.0_f64.ln()).abs() <= 1e-12);
        let total: f64 = out.f.iter().sum();
        assert!((total - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn quadratic_waterfill_matches_hand_values() {
        let d = dataset(&[(0, vec![0.0]), (1, vec![0.0]), (2, vec![0.0])]);

        let p = single_atom_set(&d, EPS1, &[0.0, 0.0, -10.0]);
        let out = classify(&p, &LossSpec::Quadratic, &[0.0]).unwrap();
        assert!((out.f[0] - 0.5).abs() <= 1e-12);
        assert!((out.f[1] - 0.5).abs() <= 1e-12);
        assert_eq!(out.f[2], 0.0);
        assert!((out.normalizer.unwrap() - 1.0).abs() <= 1e-12);

        let p = single_atom_set(&d, EPS1, &[0.0, -1.0, -10.0]);
        let out = classify(&p, &LossSpec::Quadratic, &[0.0]).unwrap();
        assert!((out.f[0] - 0.75).abs() <= 1e-12);
        assert!((out.f[1] - 0.25).abs() <= 1e-12);
        assert_eq!(out.f[2], 0.0);
        assert!((out.normalizer.unwrap() - 1.5).abs() <= 1e-12);
    }

    #[test]
    fn clamped_linear_family_puts_all_mass_on_the_cheap_class() {
        let d = dataset(&[(0, vec![0.0]), (1, vec![0.0])]);
        let p = single_atom_set(&d, EPS1, &[0.0, -5.0]);
        let loss = LossSpec::alpha_log(0.0).unwrap();
        let out = classify(&p, &loss, &[0.0]).unwrap();
        assert!((out.f[0] - 1.0).abs() <= 1e-12);
        assert!(out.f[1].abs() <= 1e-12);
        assert!(out.normalizer.unwrap().abs() <= 1e-12);
    }

    #[test]
    fn out_of_reach_classes_get_zero_mass() {
        let d = dataset(&[(0, vec![0.0]), (1, vec![100.0])]);
        let p = single_atom_set(&d, EPS1, &[-0.2, 0.0]);
        let out = classify(&p, &LossSpec::CrossEntropy, &[0.0]).unwrap();
        assert_eq!(out.transforms[1], f64::INFINITY);
        assert_eq!(out.f[1], 0.0);
        assert!((out.f[0] - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn queries_outside_every_reach_are_an_error() {
        let d = dataset(&[(0, vec![0.0]), (1, vec![1.0])]);
        let p = single_atom_set(&d, EPS1, &[0.0, 0.0]);
        match classify(&p, &LossSpec::CrossEntropy, &[50.0]) {
            Err(Error::UnreachableQuery { .. }) => {}
            other => panic!("expected unreachable-query error, got {other:?}"),
        }
    }

    #[test]
    fn saddle_report_accepts_a_degenerate_single_class_query() {
        let d = dataset(&[(0, vec![0.0]), (1, vec![100.0]), (2, vec![100.0])]);
        let p = single_atom_set(&d, EPS1, &[-0.1, 0.0, 0.0]);
        let report =
            verify_saddle(&p, &LossSpec::CrossEntropy, &[0.0], &[1.0, 0.0, 0.0], 1e-9).unwrap();
        assert!((report.feasibility_gap + 0.1).abs() <= 1e-12);
        assert!(report.within_tol);
    }

    #[test]
    fn saddle_report_flags_non_optimal_potentials() {
        let d = dataset(&[(0, vec![0.0]), (1, vec![0.0])]);
        let p = single_atom_set(&d, EPS1, &[0.0, 0.0]);
        let report = verify_saddle(&p, &LossSpec::CrossEntropy, &[0.0], &[0.5, 0.5], 1e-9).unwrap();
        assert!((report.feasibility_gap - 2.0_f64.ln()).abs() <= 1e-12);
        assert!(!report.within_tol);
    }

    #[test]
    fn quadratic_multipliers_certify_the_waterfill_output() {
        let d = dataset(&[(0, vec![0.0]), (1, vec![0.0]), (2, vec![0.0])]);
        let p = single_atom_set(&d, EPS1, &[0.0, -1.0, -10.0]);
        let out = classify(&p, &LossSpec::Quadratic, &[0.0]).unwrap();
        let report = verify_saddle(&p, &LossSpec::Quadratic, &[0.0], &out.f, 1e-9).unwrap();
        assert!(report.multiplier_violation.unwrap() <= 1e-12);
        // lambda_m = c* - |f|^2 - 1 with c* = 1.5, |f|^2 = 0.625
        assert!((report.lambda_m.unwrap() - (1.5 - 0.625 - 1.0)).abs() <= 1e-12);
        // The loss-vs-transform gap is genuine data here: these
        // potentials do not come from a solved program. Both support
        // classes sit at the same gap, as stationarity requires:
        // |f - e_0|^2 - t_0 = 0.0625 + 0.0625 - 0 = 0.125.
        assert!((report.feasibility_gap - 0.125).abs() <= 1e-12);
    }

    #[test]
    fn adding_a_constant_to_potentials_leaves_outputs_unchanged() {
        let d = dataset(&[(0, vec![0.0]), (1, vec![0.0]), (2, vec![0.0])]);
        let shift = 0.8;
        for loss in [
            LossSpec::CrossEntropy,
            LossSpec::alpha_log(0.4).unwrap(),
            LossSpec::alpha_log(2.0).unwrap(),
            LossSpec::Quadratic,
        ] {
            let base = single_atom_set(&d, EPS1, &[0.1, -0.6, -1.4]);
            let shifted = single_atom_set(&d, EPS1, &[0.1 - shift, -0.6 - shift, -1.4 - shift]);
            let a = classify(&base, &loss, &[0.0]).unwrap();
            let b = classify(&shifted, &loss, &[0.0]).unwrap();
            for (x, y) in a.f.iter().zip(&b.f) {
                assert!((x - y).abs() <= 1e-10, "{loss:?}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn permuting_classes_permutes_the_output() {
        let phi = [0.05, -0.35, -0.9];
        let perm = [2usize, 0, 1]; // new class of old class i
        let d = dataset(&[(0, vec![0.0]), (1, vec![0.0]), (2, vec![0.0])]);
        let permuted_phi = {
            let mut out = [0.0; 3];
            for (old, &new) in perm.iter().enumerate() {
                out[new] = phi[old];
            }
            out
        };
        for loss in [
            LossSpec::CrossEntropy,
            LossSpec::alpha_log(0.5).unwrap(),
            LossSpec::Quadratic,
        ] {
            let base = single_atom_set(&d, EPS1, &phi);
            let permuted = single_atom_set(&d, EPS1, &permuted_phi);
            let a = classify(&base, &loss, &[0.0]).unwrap();
            let b = classify(&permuted, &loss, &[0.0]).unwrap();
            for (old, &new) in perm.iter().enumerate() {
                assert!((a.f[old] - b.f[new]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn scaled_distance_classifier_is_lipschitz() {
        // Difference quotients of each class score stay below 1/tau.
        let tau = 2.0;
        let d = dataset(&[
            (0, vec![0.0, 0.0]),
            (0, vec![1.0, 0.5]),
            (1, vec![2.0, 0.0]),
            (2, vec![0.5, 1.5]),
        ]);
        let p = PotentialSet::new(
            &d,
            Metric::Euclidean,
            GroundCost::ScaledDistance { tau },
            vec![vec![-0.1, -0.4], vec![-0.2], vec![0.0]],
        )
        .unwrap();
        let mut state = 0x9e3779b97f4a7c15_u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((state >> 11) as f64) / ((1_u64 << 53) as f64) * 4.0 - 1.0
        };
        for _ in 0..200 {
            let a = [next(), next()];
            let b = [next(), next()];
            let dist = Metric::Euclidean.distance(&a, &b);
            if dist < 1e-9 {
                continue;
            }
            let fa = classify(&p, &LossSpec::CrossEntropy, &a).unwrap().f;
            let fb = classify(&p, &LossSpec::CrossEntropy, &b).unwrap().f;
            for (x, y) in fa.iter().zip(&fb) {
                assert!((x - y).abs() / dist <= 1.0 / tau + 1e-6);
            }
        }
    }

    #[test]
    fn quadratic_matches_a_simplex_grid_minimax_on_spot_checks() {
        let d = dataset(&[(0, vec![0.0]), (1, vec![0.0]), (2, vec![0.0])]);
        for phi in [
            [0.0, 0.0, -10.0],
            [0.3, -0.7, -1.9],
            [-2.5, -2.5, -2.5],
            [1.0, 0.5, 0.0],
        ] {
            let p = single_atom_set(&d, EPS1, &phi);
            let out = classify(&p, &LossSpec::Quadratic, &[0.0]).unwrap();
            let value = out
                .transforms
                .iter()
                .enumerate()
                .map(|(i, &t)| loss_value(&LossSpec::Quadratic, &out.f, i) - t)
                .fold(f64::NEG_INFINITY, f64::max);

            let mut grid_best = f64::INFINITY;
            let steps = 400;
            for i in 0..=steps {
                for j in 0..=(steps - i) {
                    let v = [
                        i as f64 / steps as f64,
                        j as f64 / steps as f64,
                        (steps - i - j) as f64 / steps as f64,
                    ];
                    let worst = out
                        .transforms
                        .iter()
                        .enumerate()
                        .map(|(c, &t)| loss_value(&LossSpec::Quadratic, &v, c) - t)
                        .fold(f64::NEG_INFINITY, f64::max);
                    grid_best = grid_best.min(worst);
                }
            }
            assert!(
                (value - grid_best).abs() <= 2e-3,
                "phi {phi:?}: water-filling {value} vs grid {grid_best}"
            );
        }
    }

    #[test]
    fn potentials_recovered_from_a_solution_classify_support_points() {
        use crate::hypergraph::build_hypergraph;
        use crate::solver::{solve, PackingProblem, SolverTolerances};

        let d = dataset(&[(0, vec![0.0, 0.0]), (1, vec![1.0, 0.0])]);
        let graph = build_hypergraph(&d, Metric::Euclidean, 0.6, 2).unwrap();
        let problem = PackingProblem::from_hypergraph(&graph, &d, 1.0).unwrap();
        let sol = solve(&problem, &SolverTolerances::default(), None).unwrap();
        let record = crate::dataset::SolutionRecord::new(
            &sol,
            &graph.index,
            crate::dataset::SolveMeta {
                alpha: 1.0,
                epsilon: 0.6,
                metric: Metric::Euclidean,
                interaction_cap: 2,
            },
        );
        let potentials = PotentialSet::from_solution(&record, &d).unwrap();
        let out = classify(&potentials, &LossSpec::CrossEntropy, &[0.5, 0.0]).unwrap();
        // Both atoms reach the midpoint; the solve is symmetric.
        assert!((out.f[0] - 0.5).abs() <= 1e-6);
        assert!((out.f[1] - 0.5).abs() <= 1e-6);
        let report = verify_saddle(
            &potentials,
            &LossSpec::CrossEntropy,
            &[0.5, 0.0],
            &out.f,
            1e-6,
        )
        .unwrap();
        assert!(report.within_tol, "gap {}", report.feasibility_gap);
    }
}
