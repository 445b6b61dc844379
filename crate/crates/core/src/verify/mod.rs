//! Empirical oracles: thresholds and metastability windows read off actual
//! runs, projection oracles, and the axiom harness.
//!
//! Thresholds use the suffix criterion over the computed window only, which
//! is weaker than "for all n ≥ threshold"; reports carry the horizon.

mod axioms;
mod projection;

use rug::Integer;
use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::geometry::{GeodesicSpace, Point, SpaceModel};
use crate::operators::NonexpansiveMap;
use crate::rates::{CounterFn, Natural};

pub use axioms::{run_axiom_suite, AxiomCheck, AxiomReport, BrokenCombine};
pub use projection::{brute_force_projection, check_projection_variational, set_net, SetSampler, VariationalReport};

/// Least `n ≤ horizon` with `residual(m) ≤ ε` for all `m ∈ [n, horizon]`;
/// `None` when `residual(horizon) > ε`. NaN counts as a violation.
pub fn empirical_threshold(residual: impl Fn(usize) -> f64, eps: f64, horizon: usize) -> Option<usize> {
    let ok = |m: usize| residual(m) <= eps;
    if !ok(horizon) {
        return None;
    }
    let mut n = horizon;
    while n > 0 && ok(n - 1) {
        n -= 1;
    }
    Some(n)
}

/// [`empirical_threshold`] over a stored residual column.
pub fn threshold_of(column: &[f64], eps: f64) -> Option<usize> {
    if column.is_empty() {
        return None;
    }
    empirical_threshold(|m| column[m], eps, column.len() - 1)
}

fn window_diameter_exceeds(space: &SpaceModel, xs: &[Point], eps: f64) -> Result<bool> {
    if let SpaceModel::Euclidean { dim: 1 } = space {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for x in xs {
            let v = x.coords()?[0];
            lo = lo.min(v);
            hi = hi.max(v);
        }
        return Ok(hi - lo > eps);
    }
    for (i, a) in xs.iter().enumerate() {
        for b in &xs[i + 1..] {
            if space.dist(a, b)? > eps {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Least `n` with `d(x_i, x_j) ≤ ε` for all `i, j ∈ [n, f(n)]` among those
/// `n` whose window fits in `xs[..=horizon]`; `None` if there is none.
pub fn empirical_metastability(
    space: &SpaceModel,
    xs: &[Point],
    eps: f64,
    f: &CounterFn,
    horizon: usize,
) -> Result<Option<usize>> {
    let horizon = horizon.min(xs.len().saturating_sub(1));
    for n in 0..=horizon {
        // Windows running past the data cannot be decided; skip them.
        let end = match f.eval(&Integer::from(n)).to_usize() {
            Some(e) if e <= horizon => e,
            _ => continue,
        };
        if end < n || !window_diameter_exceeds(space, &xs[n..=end], eps)? {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// `x ∈ F_N(p, η)`: `d(x, Tx), d(x, Ux) ≤ η` and `d(x, p) ≤ N`, each up to
/// `tol`.
#[allow(clippy::too_many_arguments)]
pub fn check_f_n_membership(
    space: &SpaceModel,
    x: &Point,
    t: &NonexpansiveMap,
    u: &NonexpansiveMap,
    p: &Point,
    n: f64,
    eta: f64,
    tol: f64,
) -> Result<bool> {
    Ok(space.dist(x, &t.eval(x)?)? <= eta + tol
        && space.dist(x, &u.eval(x)?)? <= eta + tol
        && space.dist(x, p)? <= n + tol)
}

fn as_display<S: Serializer, T: std::fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Comparison of an empirical index against a computed rate.
#[derive(Clone, Debug, Serialize)]
pub struct ThresholdReport {
    pub label: String,
    pub eps: String,
    /// `None` when not reached within the horizon.
    pub empirical_index: Option<usize>,
    #[serde(serialize_with = "as_display")]
    pub rate_bound: Natural,
    pub horizon: usize,
    pub sound: bool,
}

impl ThresholdReport {
    /// `sound` holds when the index is certified `≤ rate_bound`, or, if the
    /// threshold was not reached, when the rate lies beyond the horizon.
    pub fn new(label: impl Into<String>, eps: impl ToString, empirical_index: Option<usize>, rate_bound: Natural, horizon: usize) -> Self {
        let sound = match empirical_index {
            Some(i) => Natural::from_u64(i as u64).le_certified(&rate_bound) == Some(true),
            None => Natural::from_u64(horizon as u64 + 1).le_certified(&rate_bound) == Some(true),
        };
        ThresholdReport { label: label.into(), eps: eps.to_string(), empirical_index, rate_bound, horizon, sound }
    }

    pub fn line(&self) -> String {
        let idx = self.empirical_index.map_or_else(|| format!("not reached by {}", self.horizon), |i| i.to_string());
        format!("{} eps={}: empirical {} vs bound {} -> {}", self.label, self.eps, idx, self.rate_bound, if self.sound { "sound" } else { "UNSOUND" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_examples() {
        assert_eq!(empirical_threshold(|_| 0.0, 0.1, 50), Some(0));
        assert_eq!(empirical_threshold(|n| 1.0 / (n as f64 + 1.0), 0.1, 100), Some(9));
        assert_eq!(empirical_threshold(|n| (n % 2) as f64, 0.5, 101), None);
        assert_eq!(empirical_threshold(|n| if n == 5 { 1.0 } else { 0.0 }, 0.5, 10), Some(6));
        assert_eq!(threshold_of(&[f64::NAN, 0.3, 0.05], 0.1), Some(2));
    }

    #[test]
    fn metastability_examples() {
        let sp = SpaceModel::euclidean(1);
        let flat = vec![Point::scalar(1.0); 20];
        assert_eq!(empirical_metastability(&sp, &flat, 0.1, &CounterFn::affine(2, 0), 19).unwrap(), Some(0));
        let xs: Vec<Point> = (0..200).map(|n| Point::scalar(1.0 / (n as f64 + 1.0))).collect();
        let n = empirical_metastability(&sp, &xs, 0.1, &CounterFn::affine(2, 0), 199).unwrap().unwrap();
        // [n, 2n] has diameter 1/(n+1) − 1/(2n+1) = n/((n+1)(2n+1)).
        let diam = |n: f64| n / ((n + 1.0) * (2.0 * n + 1.0));
        assert!(diam(n as f64) <= 0.1 && (n == 0 || diam(n as f64 - 1.0) > 0.1));
        assert_eq!(empirical_metastability(&sp, &xs, 0.1, &CounterFn::constant(1000), 199).unwrap(), None);
    }

    #[test]
    fn report_soundness() {
        assert!(ThresholdReport::new("r", 0.1, Some(5), Natural::from_u64(5), 100).sound);
        assert!(!ThresholdReport::new("r", 0.1, Some(6), Natural::from_u64(5), 100).sound);
        assert!(ThresholdReport::new("r", 0.1, Some(6), Natural::AtLeastPow2(80.0), 100).sound);
        assert!(!ThresholdReport::new("r", 0.1, None, Natural::from_u64(5), 100).sound);
        assert!(ThresholdReport::new("r", 0.1, None, Natural::from_u64(500), 100).sound);
        let j = serde_json::to_value(ThresholdReport::new("r", 0.1, None, Natural::from_u64(500), 100)).unwrap();
        assert_eq!(j["rate_bound"], "500");
    }
}
