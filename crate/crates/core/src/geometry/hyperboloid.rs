//! H² as the upper sheet of `-x₀² + x₁² + x₂² = -1`.

use crate::error::{Error, Result};

/// Allowed deviation of `⟨x,x⟩_M` from −1.
pub const HYPERBOLOID_SHEET_TOL: f64 = 1e-10;

/// Below this separation `combine` returns its first argument.
const DEGENERATE: f64 = 1e-12;

/// The Minkowski bilinear form `-x₀y₀ + x₁y₁ + x₂y₂`.
pub fn minkowski_dot(x: &[f64; 3], y: &[f64; 3]) -> f64 {
    -x[0] * y[0] + x[1] * y[1] + x[2] * y[2]
}

pub(super) fn from_polar(r: f64, theta: f64) -> [f64; 3] {
    let s = r.sinh();
    [r.cosh(), s * theta.cos(), s * theta.sin()]
}

pub(super) fn validate(x: &[f64; 3]) -> Result<()> {
    if x.iter().any(|c| !c.is_finite()) {
        return Err(Error::usage("non-finite coordinate"));
    }
    if x[0] <= 0.0 {
        return Err(Error::usage("hyperboloid point must lie on the upper sheet"));
    }
    // Relative to the coordinate scale: far-out points carry proportionally
    // larger rounding in the form itself.
    let q = minkowski_dot(x, x);
    if (q + 1.0).abs() > HYPERBOLOID_SHEET_TOL * x[0] * x[0] {
        return Err(Error::usage(format!("point is off the hyperboloid: <x,x> = {q}")));
    }
    Ok(())
}

/// `arccosh(-⟨x,y⟩)` evaluated as `2 asinh(‖x-y‖_M / 2)`, which keeps full
/// relative accuracy for nearby points.
pub(super) fn dist(x: &[f64; 3], y: &[f64; 3]) -> f64 {
    let d = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
    let q = minkowski_dot(&d, &d).max(0.0);
    2.0 * (q.sqrt() / 2.0).asinh()
}

fn to_sheet(mut x: [f64; 3]) -> [f64; 3] {
    let q = -minkowski_dot(&x, &x);
    if q > 0.0 {
        let s = q.sqrt();
        x.iter_mut().for_each(|c| *c /= s);
    }
    // Recompute x₀ from the spatial part so the point is on the sheet to
    // rounding.
    x[0] = (1.0 + x[1] * x[1] + x[2] * x[2]).sqrt();
    x
}

pub(super) fn combine(a: &[f64; 3], b: &[f64; 3], lambda: f64) -> [f64; 3] {
    let delta = dist(a, b);
    if delta < DEGENERATE {
        return *a;
    }
    if lambda == 0.0 {
        return *a;
    }
    if lambda == 1.0 {
        return *b;
    }
    let s = delta.sinh();
    let wa = ((1.0 - lambda) * delta).sinh() / s;
    let wb = (lambda * delta).sinh() / s;
    to_sheet([
        wa * a[0] + wb * b[0],
        wa * a[1] + wb * b[1],
        wa * a[2] + wb * b[2],
    ])
}
