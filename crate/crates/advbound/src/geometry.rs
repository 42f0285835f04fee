//! Metrics and closed-ball intersection tests.
//!
//! A tuple of closed balls of common radius `eps` has nonempty joint
//! intersection exactly when the smallest ball enclosing the centers has
//! radius at most `eps`. Under the Chebyshev metric that radius is half the
//! widest per-coordinate span; under the Euclidean metric it is the
//! minimum enclosing ball, computed exactly for the small tuples that
//! arise here (at most one point per class).

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Relative/absolute slack for radius comparisons: ties at the boundary
/// resolve toward intersection.
const RADIUS_REL_TOL: f64 = 1e-12;
const RADIUS_ABS_TOL: f64 = 1e-12;

/// Gram-system pivots below this threshold are treated as degenerate
/// (affinely dependent boundary points).
const PIVOT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    Chebyshev,
}

impl Metric {
    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        assert_eq!(
            x.len(),
            y.len(),
            "dimension mismatch: {} vs {}",
            x.len(),
            y.len()
        );
        match self {
            Metric::Euclidean => x
                .iter()
                .zip(y)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt(),
            Metric::Chebyshev => x
                .iter()
                .zip(y)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "l2" => Ok(Metric::Euclidean),
            "chebyshev" | "linf" => Ok(Metric::Chebyshev),
            other => Err(Error::InvalidConfig(format!(
                "unknown metric '{other}' (expected euclidean or chebyshev)"
            ))),
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Metric::Euclidean => write!(f, "euclidean"),
            Metric::Chebyshev => write!(f, "chebyshev"),
        }
    }
}

/// Boundary-inclusive radius comparison shared by every eps test.
#[inline]
pub(crate) fn within_radius(radius: f64, eps: f64) -> bool {
    radius <= eps * (1.0 + RADIUS_REL_TOL) + RADIUS_ABS_TOL
}

/// Radius of the smallest ball (in `metric`) enclosing the given points.
pub fn enclosing_radius(metric: Metric, points: &[&[f64]]) -> f64 {
    assert!(!points.is_empty());
    match metric {
        Metric::Chebyshev => {
            let dim = points[0].len();
            let mut radius: f64 = 0.0;
            for c in 0..dim {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for p in points {
                    lo = lo.min(p[c]);
                    hi = hi.max(p[c]);
                }
                radius = radius.max(0.5 * (hi - lo));
            }
            radius
        }
        Metric::Euclidean => min_enclosing_ball(points).1,
    }
}

/// Do the closed `eps`-balls around the given centers intersect jointly?
/// Ties at the boundary count as intersecting.
pub fn balls_intersect(metric: Metric, points: &[&[f64]], eps: f64) -> bool {
    within_radius(enclosing_radius(metric, points), eps)
}

// ─── Euclidean minimum enclosing ball ───────────────────────────────────

/// Exact minimum enclosing ball of a small point set, returning
/// `(center, radius)`. Uses the classic recursive scheme with a fixed
/// (input) point order — no randomization, so results are reproducible.
/// Exact duplicates are removed first; they cannot change the ball.
pub fn min_enclosing_ball(points: &[&[f64]]) -> (Vec<f64>, f64) {
    assert!(!points.is_empty());
    let mut unique: Vec<&[f64]> = Vec::with_capacity(points.len());
    for p in points {
        if !unique
            .iter()
            .any(|q| q.iter().zip(p.iter()).all(|(a, b)| a == b))
        {
            unique.push(p);
        }
    }
    let n = unique.len();
    let mut boundary: Vec<&[f64]> = Vec::with_capacity(n);
    welzl(&unique, n, &mut boundary, n)
}

fn welzl<'a>(
    points: &[&'a [f64]],
    n: usize,
    boundary: &mut Vec<&'a [f64]>,
    max_support: usize,
) -> (Vec<f64>, f64) {
    if n == 0 || boundary.len() == max_support {
        return circumball(boundary, points[0].len());
    }
    let p = points[n - 1];
    let (center, radius) = welzl(points, n - 1, boundary, max_support);
    if radius >= 0.0 && within_radius(euclid(&center, p), radius) {
        return (center, radius);
    }
    boundary.push(p);
    let ball = welzl(points, n - 1, boundary, max_support);
    boundary.pop();
    ball
}

fn euclid(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Smallest ball with all of `boundary` on its surface. Empty input yields
/// a sentinel with negative radius (contains nothing).
fn circumball(boundary: &[&[f64]], dim: usize) -> (Vec<f64>, f64) {
    match boundary.len() {
        0 => (vec![0.0; dim], -1.0),
        1 => (boundary[0].to_vec(), 0.0),
        2 => {
            let center: Vec<f64> = boundary[0]
                .iter()
                .zip(boundary[1])
                .map(|(a, b)| 0.5 * (a + b))
                .collect();
            let radius = euclid(&center, boundary[0]);
            (center, radius)
        }
        m => {
            // Solve for the equidistant point in the affine hull of the
            // boundary: with u_j = p_j - p_0, the coefficients c satisfy
            // G c = b where G is the Gram matrix of the u_j and
            // b_j = |u_j|^2 / 2.
            let base = boundary[0];
            let k = m - 1;
            // dot product of p - base and q - base
            let dot = |p: &[f64], q: &[f64]| -> f64 {
                p.iter()
                    .zip(q)
                    .zip(base)
                    .map(|((x, y), b)| (x - b) * (y - b))
                    .sum()
            };
            let mut g = vec![0.0; k * k];
            let mut rhs = vec![0.0; k];
            for j in 0..k {
                for l in j..k {
                    let v = dot(boundary[j + 1], boundary[l + 1]);
                    g[j * k + l] = v;
                    g[l * k + j] = v;
                }
                rhs[j] = 0.5 * g[j * k + j];
            }
            let coeff = solve_symmetric(&mut g, &mut rhs, k);
            let mut center = base.to_vec();
            for (j, &c) in coeff.iter().enumerate() {
                for (cc, (pj, b0)) in center.iter_mut().zip(boundary[j + 1].iter().zip(base)) {
                    *cc += c * (pj - b0);
                }
            }
            // The boundary points are equidistant by construction; measure
            // against the base point.
            let radius = euclid(&center, base);
            (center, radius)
        }
    }
}

/// Gaussian elimination with partial pivoting on a dense symmetric system.
/// Near-zero pivots (affinely dependent points) zero out the corresponding
/// coefficient, which drops the dependent direction.
fn solve_symmetric(g: &mut [f64], rhs: &mut [f64], k: usize) -> Vec<f64> {
    let scale = g.iter().fold(0.0_f64, |acc, &v| acc.max(v.abs())).max(1.0);
    let mut perm: Vec<usize> = (0..k).collect();
    for col in 0..k {
        // pivot search in rows col..k
        let (mut best_row, mut best_val) = (col, 0.0);
        for row in col..k {
            let v = g[perm[row] * k + col].abs();
            if v > best_val {
                best_val = v;
                best_row = row;
            }
        }
        if best_val <= PIVOT_TOL * scale {
            // Degenerate direction: zero the column below and move on.
            for row in col..k {
                g[perm[row] * k + col] = 0.0;
            }
            continue;
        }
        perm.swap(col, best_row);
        let p = perm[col];
        for row in (col + 1)..k {
            let r = perm[row];
            let factor = g[r * k + col] / g[p * k + col];
            if factor == 0.0 {
                continue;
            }
            for c in col..k {
                g[r * k + c] -= factor * g[p * k + c];
            }
            rhs[r] -= factor * rhs[p];
        }
    }
    // back substitution
    let mut x = vec![0.0; k];
    for col in (0..k).rev() {
        let p = perm[col];
        let pivot = g[p * k + col];
        if pivot.abs() <= PIVOT_TOL * scale {
            x[col] = 0.0;
            continue;
        }
        let mut acc = rhs[p];
        for c in (col + 1)..k {
            acc -= g[p * k + c] * x[c];
        }
        x[col] = acc / pivot;
    }
    x
}
