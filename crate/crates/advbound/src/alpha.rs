//! The one-parameter family of generalized logarithms/exponentials that
//! interpolates between the 0-1 loss (alpha = 0) and cross-entropy
//! (alpha = 1), together with the loss evaluations and the simplex
//! normalizer used by the classifier.
//!
//! For alpha != 1 the generalized logarithm is
//! `log_a(t) = (t^(1-a) - 1) / (1 - a)`, with the natural logarithm as the
//! alpha -> 1 limit. Its inverse is `exp_a(s) = ((1-a) s + 1)^(1/(1-a))`.
//! For alpha in [0, 1) the logarithm is bounded below by `-1/(1-a)` (attained
//! at t = 0); for alpha > 1 it diverges to -infinity as t -> 0+.

use crate::error::{Error, Result};

/// Half-width of the band around alpha = 1 that is routed to the
/// natural-log/exp branch to avoid catastrophic cancellation.
pub const ALPHA_ONE_BAND: f64 = 1e-9;

/// Convergence target for the normalizer equation `sum_i g_i(Z) = 1`.
const NORMALIZER_TOL: f64 = 1e-12;

/// Iteration cap for the normalizer bisection.
const NORMALIZER_MAX_ITERS: usize = 200;

/// True when `alpha` is treated as the cross-entropy case.
#[inline]
pub fn is_alpha_one(alpha: f64) -> bool {
    (alpha - 1.0).abs() <= ALPHA_ONE_BAND
}

/// Generalized logarithm. `t` must be nonnegative; `t = 0` yields the
/// finite floor `-1/(1-alpha)` for alpha < 1 and `-inf` for alpha >= 1.
pub fn log_alpha(alpha: f64, t: f64) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeLogArgument(t));
    }
    if is_alpha_one(alpha) {
        Ok(t.ln())
    } else {
        // t = 0, alpha > 1: 0^(negative) = +inf, and dividing by the
        // negative 1 - alpha gives the intended -inf.
        Ok((t.powf(1.0 - alpha) - 1.0) / (1.0 - alpha))
    }
}

/// Generalized exponential, the inverse of [`log_alpha`]. Errors outside
/// the alpha-dependent domain instead of clamping; the classifier clamps
/// explicitly where its formula says to.
pub fn exp_alpha(alpha: f64, s: f64) -> Result<f64> {
    if is_alpha_one(alpha) {
        return Ok(s.exp());
    }
    let base = (1.0 - alpha) * s + 1.0;
    if base < 0.0 || base.is_nan() || (alpha > 1.0 && base == 0.0) {
        return Err(Error::ExpDomain { alpha, arg: s });
    }
    Ok(base.powf(1.0 / (1.0 - alpha)))
}

/// Which loss the classifier is built for.
///
/// `alpha_log(1)` is normalized to `CrossEntropy` at construction; the
/// evaluation routines also route alpha within [`ALPHA_ONE_BAND`] of 1 to
/// the natural-log branch, so an unnormalized value behaves identically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LossSpec {
    CrossEntropy,
    AlphaLog(f64),
    Quadratic,
}

impl LossSpec {
    /// Bounded-loss constructor; requires `alpha >= 0`.
    pub fn alpha_log(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "alpha must be finite and nonnegative, got {alpha}"
            )));
        }
        if is_alpha_one(alpha) {
            Ok(LossSpec::CrossEntropy)
        } else {
            Ok(LossSpec::AlphaLog(alpha))
        }
    }

    /// The alpha parameter, where one applies (1 for cross-entropy).
    pub fn alpha(&self) -> Option<f64> {
        match self {
            LossSpec::CrossEntropy => Some(1.0),
            LossSpec::AlphaLog(a) => Some(*a),
            LossSpec::Quadratic => None,
        }
    }
}

/// Loss of the probability vector `v` against true class `class`.
///
/// `v` is expected to lie on the simplex up to ~1e-9 slop; tiny negative
/// entries are treated as zero. Returns `+inf` for a vanishing predicted
/// probability under cross-entropy or alpha >= 1.
pub fn loss_value(loss: &LossSpec, v: &[f64], class: usize) -> f64 {
    debug_assert!(class < v.len());
    debug_assert!((v.iter().sum::<f64>() - 1.0).abs() <= 1e-6);
    let vi = v[class].max(0.0);
    match loss {
        LossSpec::CrossEntropy => -vi.ln(),
        LossSpec::AlphaLog(a) => -log_alpha(*a, vi).expect("vi >= 0"),
        LossSpec::Quadratic => v
            .iter()
            .enumerate()
            .map(|(j, &vj)| {
                let d = if j == class { vj - 1.0 } else { vj };
                d * d
            })
            .sum(),
    }
}

/// One normalized score `g_i(Z)` for entry `a_i`; infinite entries score 0.
///
/// For alpha < 1 the exponent is clamped at the domain floor `-1/(1-alpha)`
/// (which maps to a hard zero); for alpha > 1 the caller keeps `Z` above the
/// pole so the argument stays in-domain.
pub(crate) fn normalized_score(alpha: f64, a_i: f64, z: f64) -> f64 {
    if a_i == f64::INFINITY {
        return 0.0;
    }
    if is_alpha_one(alpha) {
        return (-a_i - z).exp();
    }
    if alpha < 1.0 {
        let floor = -1.0 / (1.0 - alpha);
        let s = (-a_i - z).max(floor);
        exp_alpha(alpha, s).expect("clamped into domain")
    } else {
        exp_alpha(alpha, -a_i - z).expect("caller keeps Z above the pole")
    }
}

/// Solves `sum_i g_i(Z) = 1` for the unique normalizer `Z`, where
/// `g_i(Z) = exp_a(-a_i - Z)` with the alpha-dependent clamping of
/// [`normalized_score`]. Entries may be `+inf` (they contribute 0);
/// errors only when every entry is infinite.
///
/// alpha = 1 has the closed form `Z = ln sum_i exp(-a_i)`. Otherwise the
/// strictly decreasing sum is bisected from a bracket that starts at
/// `[-max a - 10, -min a + 10]` and is widened geometrically until the
/// sign flips, capped at 200 iterations.
pub fn find_normalizer(alpha: f64, a: &[f64]) -> Result<f64> {
    let mut amin = f64::INFINITY;
    let mut amax = f64::NEG_INFINITY;
    for &ai in a {
        debug_assert!(!ai.is_nan() && ai != f64::NEG_INFINITY);
        if ai.is_finite() {
            amin = amin.min(ai);
            amax = amax.max(ai);
        }
    }
    if !amin.is_finite() {
        return Err(Error::AllInfinite);
    }

    if is_alpha_one(alpha) {
        // Z = ln sum exp(-a_i), computed against the dominant term.
        let m = -amin;
        let s: f64 = a
            .iter()
            .filter(|ai| ai.is_finite())
            .map(|&ai| (-ai - m).exp())
            .sum();
        return Ok(m + s.ln());
    }

    // For alpha > 1 the scores blow up as Z approaches this pole from above.
    let z_pole = if alpha > 1.0 {
        1.0 / (1.0 - alpha) - amin
    } else {
        f64::NEG_INFINITY
    };
    let total = |z: f64| -> f64 {
        if z <= z_pole {
            return f64::INFINITY;
        }
        a.iter().map(|&ai| normalized_score(alpha, ai, z)).sum()
    };

    // Establish total(lo) > 1 > total(hi), expanding geometrically.
    let mut lo = -amax - 10.0;
    if alpha > 1.0 && lo <= z_pole {
        lo = z_pole + 1.0;
    }
    while total(lo) <= 1.0 {
        if alpha > 1.0 {
            lo = z_pole + 0.25 * (lo - z_pole);
        } else {
            lo = 2.0 * lo - 10.0;
        }
    }
    let mut hi = -amin + 10.0;
    let mut step = 10.0;
    while total(hi) >= 1.0 {
        hi += step;
        step *= 2.0;
    }

    let mut mid = 0.5 * (lo + hi);
    for _ in 0..NORMALIZER_MAX_ITERS {
        mid = 0.5 * (lo + hi);
        let s = total(mid);
        if (s - 1.0).abs() <= NORMALIZER_TOL {
            return Ok(mid);
        }
        if s > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= f64::EPSILON * mid.abs() {
            break;
        }
    }
    Ok(mid)
}
