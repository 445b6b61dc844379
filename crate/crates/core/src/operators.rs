//! Nonexpansive maps, projections and resolvents.
//!
//! Multi-valued monotone operators are only ever touched through their
//! resolvents, so [`MonotoneOpSpec`] covers the handful of kinds whose
//! resolvent has a closed form.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_lambda, minkowski_dot, GeodesicSpace, Point, SpaceModel};

/// A closed convex set with a computable metric projection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexSet {
    /// `[lo, hi] ⊂ ℝ`.
    Interval { lo: f64, hi: f64 },
    /// Axis-aligned box in ℝᵈ.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Closed ball in any model.
    Ball { center: Point, radius: f64 },
    /// `{x ∈ ℝᵈ : ⟨normal, x⟩ ≤ offset}`.
    Halfspace { normal: Vec<f64>, offset: f64 },
    /// Affine line `{point + s·direction}` in ℝᵈ.
    Line { point: Vec<f64>, direction: Vec<f64> },
    /// Complete geodesic `{x ∈ H² : ⟨normal, x⟩_M = 0}` for a spacelike normal.
    Geodesic { normal: [f64; 3] },
    /// The listed legs of a spider, each truncated at arclength `max_t`.
    TreeLegs { legs: Vec<usize>, max_t: f64 },
    /// Geodesic segment `[a, b]` in any model.
    Segment { a: Point, b: Point },
    Singleton { point: Point },
}

impl ConvexSet {
    /// Rejects empty or malformed sets.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::usage(m.to_string()));
        match self {
            ConvexSet::Interval { lo, hi } if !(lo <= hi) => bad("empty interval"),
            ConvexSet::Box { lo, hi } => {
                if lo.len() != hi.len() || lo.is_empty() {
                    bad("box bounds have mismatched dimension")
                } else if lo.iter().zip(hi).any(|(l, h)| !(l <= h)) {
                    bad("empty box")
                } else {
                    Ok(())
                }
            }
            ConvexSet::Ball { radius, .. } if !(*radius >= 0.0) || !radius.is_finite() => {
                bad("ball radius must be finite and >= 0")
            }
            ConvexSet::Halfspace { normal, offset } => {
                if norm(normal) == 0.0 || !offset.is_finite() {
                    bad("halfspace needs a nonzero normal")
                } else {
                    Ok(())
                }
            }
            ConvexSet::Line { point, direction } => {
                if point.len() != direction.len() || norm(direction) == 0.0 {
                    bad("line needs a nonzero direction of matching dimension")
                } else {
                    Ok(())
                }
            }
            ConvexSet::Geodesic { normal } if minkowski_dot(normal, normal) <= 0.0 => {
                bad("geodesic normal must be spacelike")
            }
            ConvexSet::TreeLegs { legs, max_t } if legs.is_empty() || !(*max_t >= 0.0) => {
                bad("tree subset needs at least one leg and max_t >= 0")
            }
            _ => Ok(()),
        }
    }

    /// Nearest point of the set to `x`.
    pub fn project(&self, space: &SpaceModel, x: &Point) -> Result<Point> {
        self.validate()?;
        space.validate(x)?;
        match self {
            ConvexSet::Interval { lo, hi } => {
                let v = x.coords()?;
                if v.len() != 1 {
                    return Err(Error::usage("interval projection needs a point of R^1"));
                }
                Ok(Point::scalar(v[0].clamp(*lo, *hi)))
            }
            ConvexSet::Box { lo, hi } => {
                let v = x.coords()?;
                check_dim(v, lo.len())?;
                Ok(Point::Euclidean(
                    v.iter().zip(lo.iter().zip(hi)).map(|(c, (l, h))| c.clamp(*l, *h)).collect(),
                ))
            }
            ConvexSet::Ball { center, radius } => {
                let d = space.dist(center, x)?;
                if d <= *radius {
                    Ok(x.clone())
                } else {
                    space.combine(center, x, radius / d)
                }
            }
            ConvexSet::Halfspace { normal, offset } => {
                let v = x.coords()?;
                check_dim(v, normal.len())?;
                let excess = dot(normal, v) - offset;
                if excess <= 0.0 {
                    return Ok(x.clone());
                }
                let s = excess / dot(normal, normal);
                Ok(Point::Euclidean(v.iter().zip(normal).map(|(c, n)| c - s * n).collect()))
            }
            ConvexSet::Line { point, direction } => {
                let v = x.coords()?;
                check_dim(v, point.len())?;
                let diff: Vec<f64> = v.iter().zip(point).map(|(a, b)| a - b).collect();
                let s = dot(&diff, direction) / dot(direction, direction);
                Ok(Point::Euclidean(point.iter().zip(direction).map(|(p, d)| p + s * d).collect()))
            }
            ConvexSet::Geodesic { normal } => {
                let Point::Hyperboloid(h) = x else {
                    return Err(Error::ModelMismatch { expected: "hyperboloid", found: x.model_name() });
                };
                let n = unit_spacelike(normal);
                let s = minkowski_dot(h, &n);
                let k = (1.0 + s * s).sqrt();
                let mut p = [(h[0] - s * n[0]) / k, (h[1] - s * n[1]) / k, (h[2] - s * n[2]) / k];
                p[0] = (1.0 + p[1] * p[1] + p[2] * p[2]).sqrt();
                Ok(Point::Hyperboloid(p))
            }
            ConvexSet::TreeLegs { legs, max_t } => {
                let Point::Tree(leg, t) = x else {
                    return Err(Error::ModelMismatch { expected: "tree", found: x.model_name() });
                };
                if legs.contains(leg) {
                    Ok(Point::tree(*leg, t.min(*max_t)))
                } else {
                    Ok(Point::junction())
                }
            }
            ConvexSet::Segment { a, b } => project_segment(space, a, b, x),
            ConvexSet::Singleton { point } => {
                space.validate(point)?;
                Ok(point.clone())
            }
        }
    }

    /// Membership up to `tol` (measured as distance to the projection).
    pub fn contains(&self, space: &SpaceModel, x: &Point, tol: f64) -> Result<bool> {
        let p = self.project(space, x)?;
        Ok(space.dist(&p, x)? <= tol)
    }
}

fn check_dim(v: &[f64], d: usize) -> Result<()> {
    if v.len() == d {
        Ok(())
    } else {
        Err(Error::usage(format!("point has dimension {}, set has dimension {d}", v.len())))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn unit_spacelike(n: &[f64; 3]) -> [f64; 3] {
    let s = minkowski_dot(n, n).sqrt();
    [n[0] / s, n[1] / s, n[2] / s]
}

/// Projection onto a geodesic segment.
///
/// In ℝᵈ this is the usual clamp of the line parameter. Elsewhere,
/// `λ ↦ d(x, γ(λ))` is convex along the geodesic γ of a CAT(0) space, so a
/// golden-section search converges to the unique minimizer.
fn project_segment(space: &SpaceModel, a: &Point, b: &Point, x: &Point) -> Result<Point> {
    space.validate(a)?;
    space.validate(b)?;
    if let (Point::Euclidean(av), Point::Euclidean(bv), Point::Euclidean(xv)) = (a, b, x) {
        let d: Vec<f64> = bv.iter().zip(av).map(|(p, q)| p - q).collect();
        let dd = dot(&d, &d);
        if dd == 0.0 {
            return Ok(a.clone());
        }
        let r: Vec<f64> = xv.iter().zip(av).map(|(p, q)| p - q).collect();
        let s = (dot(&r, &d) / dd).clamp(0.0, 1.0);
        return space.combine(a, b, s);
    }
    let f = |l: f64| space.combine(a, b, l).and_then(|p| space.dist(x, &p));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-15 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if f(m1)? <= f(m2)? {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let mut best = 0.5 * (lo + hi);
    for end in [0.0, 1.0] {
        if f(end)? <= f(best)? {
            best = end;
        }
    }
    space.combine(a, b, best)
}

/// Shorthand for `set.project(space, x)`.
pub fn project_convex(space: &SpaceModel, set: &ConvexSet, x: &Point) -> Result<Point> {
    set.project(space, x)
}

type Eval = dyn Fn(&Point) -> Result<Point> + Send + Sync;

/// A map declared 1-Lipschitz, optionally carrying a known fixed point.
#[derive(Clone)]
pub struct NonexpansiveMap {
    name: String,
    lipschitz: f64,
    witness: Option<Point>,
    f: Arc<Eval>,
}

impl fmt::Debug for NonexpansiveMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonexpansiveMap")
            .field("name", &self.name)
            .field("lipschitz", &self.lipschitz)
            .field("witness", &self.witness)
            .finish()
    }
}

impl NonexpansiveMap {
    /// Wraps `f` with a declared Lipschitz constant, which must be ≤ 1.
    pub fn new(
        name: impl Into<String>,
        lipschitz: f64,
        f: impl Fn(&Point) -> Result<Point> + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&lipschitz) {
            return Err(Error::usage(format!("Lipschitz certificate {lipschitz} exceeds 1")));
        }
        Ok(NonexpansiveMap { name: name.into(), lipschitz, witness: None, f: Arc::new(f) })
    }

    pub fn identity() -> Self {
        NonexpansiveMap::new("id", 1.0, |x| Ok(x.clone())).expect("valid certificate")
    }

    /// Metric projection onto a convex set.
    pub fn projection(space: SpaceModel, set: ConvexSet) -> Result<Self> {
        set.validate()?;
        let name = format!("proj[{}]", serde_json::to_string(&set).unwrap_or_default());
        NonexpansiveMap::new(name, 1.0, move |x| set.project(&space, x))
    }

    /// A linear isometry or contraction `x ↦ Mx` of ℝᵈ given row-major.
    pub fn linear(rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(Error::usage("linear map needs a square matrix"));
        }
        let m = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
        let sv = m.clone().singular_values();
        let l = sv.iter().cloned().fold(0.0, f64::max);
        if l > 1.0 + 1e-12 {
            return Err(Error::usage(format!("operator norm {l} exceeds 1")));
        }
        NonexpansiveMap::new("linear", l.min(1.0), move |x| {
            let v = x.coords()?;
            check_dim(v, d)?;
            let y = &m * DVector::from_column_slice(v);
            Ok(Point::Euclidean(y.iter().cloned().collect()))
        })
    }

    /// Counter-clockwise rotation of ℝ² by `angle`.
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let f = move |x: &Point| {
            let v = x.coords()?;
            check_dim(v, 2)?;
            Ok(Point::vector([c * v[0] - s * v[1], s * v[0] + c * v[1]]))
        };
        NonexpansiveMap::new(format!("rot({angle})"), 1.0, f).expect("valid certificate")
    }

    /// `J_{c·op}`.
    pub fn resolvent(op: MonotoneOpSpec, c: f64) -> Result<Self> {
        op.validate()?;
        check_c(c)?;
        NonexpansiveMap::new(format!("J[{}]", op.label()), 1.0, move |x| {
            Ok(Point::Euclidean(resolvent(&op, c, x.coords()?)?))
        })
    }

    /// `R_{c·op} = 2J_{c·op} − Id`.
    pub fn reflected_resolvent(op: MonotoneOpSpec, c: f64) -> Result<Self> {
        op.validate()?;
        check_c(c)?;
        NonexpansiveMap::new(format!("R[{}]", op.label()), 1.0, move |x| {
            Ok(Point::Euclidean(reflected_resolvent(&op, c, x.coords()?)?))
        })
    }

    /// The forward step `x ↦ x − c·op(x)`, nonexpansive for a δ-cocoercive
    /// `op` when `c ≤ 2δ`.
    pub fn forward_step(op: MonotoneOpSpec, c: f64) -> Result<Self> {
        op.validate()?;
        check_c(c)?;
        match op.cocoercivity() {
            Some(delta) if c > 2.0 * delta * (1.0 + 1e-12) => {
                return Err(Error::usage(format!("step c={c} exceeds 2δ={}", 2.0 * delta)));
            }
            _ => {}
        }
        NonexpansiveMap::new(format!("fwd[{}]", op.label()), 1.0, move |x| {
            let v = x.coords()?;
            let g = op.apply(v)?;
            Ok(Point::Euclidean(v.iter().zip(&g).map(|(a, b)| a - c * b).collect()))
        })
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &NonexpansiveMap) -> Self {
        let (outer_f, inner_f) = (self.f.clone(), inner.f.clone());
        NonexpansiveMap {
            name: format!("{}∘{}", self.name, inner.name),
            lipschitz: self.lipschitz * inner.lipschitz,
            witness: None,
            f: Arc::new(move |x| outer_f(&inner_f(x)?)),
        }
    }

    pub fn with_witness(mut self, p: Point) -> Self {
        self.witness = Some(p);
        self
    }

    pub fn witness(&self) -> Option<&Point> {
        self.witness.as_ref()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn eval(&self, x: &Point) -> Result<Point> {
        (self.f)(x)
    }
}

fn check_c(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::usage(format!("resolvent parameter c={c} must be positive")))
    }
}

/// A monotone operator on ℝᵈ given by one of a few concrete kinds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MonotoneOpSpec {
    Zero,
    /// Normal cone ∂ι_S of a Euclidean interval, box, ball or halfspace.
    NormalCone { set: ConvexSet },
    /// `x ↦ Ax + b` with `A` symmetric positive semidefinite (row-major).
    AffineGradient { a: Vec<Vec<f64>>, b: Vec<f64> },
    /// `x ↦ s·x`, `s ≥ 0`.
    ScaledIdentity { scale: f64 },
}

impl MonotoneOpSpec {
    /// Gradient of `g(x) = (x − target)²/2` on ℝ¹.
    pub fn quadratic_1d(target: f64) -> Self {
        MonotoneOpSpec::AffineGradient { a: vec![vec![1.0]], b: vec![-target] }
    }

    pub fn normal_cone_interval(lo: f64, hi: f64) -> Self {
        MonotoneOpSpec::NormalCone { set: ConvexSet::Interval { lo, hi } }
    }

    fn label(&self) -> &'static str {
        match self {
            MonotoneOpSpec::Zero => "zero",
            MonotoneOpSpec::NormalCone { .. } => "normal_cone",
            MonotoneOpSpec::AffineGradient { .. } => "affine_gradient",
            MonotoneOpSpec::ScaledIdentity { .. } => "scaled_identity",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MonotoneOpSpec::Zero => Ok(()),
            MonotoneOpSpec::NormalCone { set } => match set {
                ConvexSet::Interval { .. }
                | ConvexSet::Box { .. }
                | ConvexSet::Halfspace { .. }
                | ConvexSet::Ball { center: Point::Euclidean(_), .. } => set.validate(),
                _ => Err(Error::usage("normal cones are supported for Euclidean interval/box/ball/halfspace")),
            },
            MonotoneOpSpec::AffineGradient { a, b } => {
                let d = b.len();
                if d == 0 || a.len() != d || a.iter().any(|r| r.len() != d) {
                    return Err(Error::usage("affine gradient needs a square A matching b"));
                }
                for i in 0..d {
                    for j in 0..i {
                        if (a[i][j] - a[j][i]).abs() > 1e-12 * (1.0 + a[i][j].abs()) {
                            return Err(Error::usage("affine gradient matrix must be symmetric"));
                        }
                    }
                }
                let min_eig = self.eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
                if min_eig < -1e-12 {
                    return Err(Error::usage("affine gradient matrix must be positive semidefinite"));
                }
                Ok(())
            }
            MonotoneOpSpec::ScaledIdentity { scale } if !(*scale >= 0.0) || !scale.is_finite() => {
                Err(Error::usage("scaled identity needs a finite scale >= 0"))
            }
            MonotoneOpSpec::ScaledIdentity { .. } => Ok(()),
        }
    }

    fn matrix(a: &[Vec<f64>]) -> DMatrix<f64> {
        DMatrix::from_fn(a.len(), a.len(), |i, j| a[i][j])
    }

    fn eigenvalues(&self) -> Vec<f64> {
        match self {
            MonotoneOpSpec::AffineGradient { a, .. } => {
                Self::matrix(a).symmetric_eigenvalues().iter().cloned().collect()
            }
            _ => Vec::new(),
        }
    }

    /// Largest δ such that the operator is δ-cocoercive, if single-valued and
    /// nonzero.
    pub fn cocoercivity(&self) -> Option<f64> {
        match self {
            MonotoneOpSpec::AffineGradient { .. } => {
                let l = self.eigenvalues().iter().cloned().fold(0.0, f64::max);
                (l > 0.0).then(|| 1.0 / l)
            }
            MonotoneOpSpec::ScaledIdentity { scale } if *scale > 0.0 => Some(1.0 / scale),
            _ => None,
        }
    }

    /// Value of a single-valued operator.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            MonotoneOpSpec::Zero => Ok(vec![0.0; x.len()]),
            MonotoneOpSpec::AffineGradient { a, b } => {
                check_dim(x, b.len())?;
                Ok(a.iter().zip(b).map(|(row, bi)| dot(row, x) + bi).collect())
            }
            MonotoneOpSpec::ScaledIdentity { scale } => Ok(x.iter().map(|v| scale * v).collect()),
            MonotoneOpSpec::NormalCone { .. } => {
                Err(Error::usage("normal cone is multi-valued; use its resolvent"))
            }
        }
    }

    /// Whether `0 ∈ op(x)`, up to `tol`.
    pub fn is_zero_at(&self, x: &[f64], tol: f64) -> Result<bool> {
        match self {
            MonotoneOpSpec::NormalCone { set } => {
                set.contains(&SpaceModel::euclidean(x.len()), &Point::Euclidean(x.to_vec()), tol)
            }
            _ => Ok(norm(&self.apply(x)?) <= tol),
        }
    }
}

/// `J_{c·op}(x) = (Id + c·op)⁻¹ x`.
pub fn resolvent(op: &MonotoneOpSpec, c: f64, x: &[f64]) -> Result<Vec<f64>> {
    check_c(c)?;
    match op {
        MonotoneOpSpec::Zero => Ok(x.to_vec()),
        MonotoneOpSpec::NormalCone { set } => {
            let space = SpaceModel::euclidean(x.len());
            match set.project(&space, &Point::Euclidean(x.to_vec()))? {
                Point::Euclidean(v) => Ok(v),
                _ => unreachable!("Euclidean projection"),
            }
        }
        MonotoneOpSpec::AffineGradient { a, b } => {
            check_dim(x, b.len())?;
            let d = b.len();
            let m = DMatrix::identity(d, d) + MonotoneOpSpec::matrix(a) * c;
            let rhs = DVector::from_iterator(d, x.iter().zip(b).map(|(xi, bi)| xi - c * bi));
            let y = m
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::numeric("singular system in affine resolvent"))?;
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::numeric("non-finite affine resolvent"));
            }
            Ok(y.iter().cloned().collect())
        }
        MonotoneOpSpec::ScaledIdentity { scale } => Ok(x.iter().map(|v| v / (1.0 + c * scale)).collect()),
    }
}

/// `R_{c·op}(x) = 2J_{c·op}(x) − x`.
pub fn reflected_resolvent(op: &MonotoneOpSpec, c: f64, x: &[f64]) -> Result<Vec<f64>> {
    Ok(resolvent(op, c, x)?.iter().zip(x).map(|(j, v)| 2.0 * j - v).collect())
}

/// `(1-α)Id ⊕ αU′`.
#[derive(Clone, Debug)]
pub struct AveragedMap {
    pub space: SpaceModel,
    pub base: NonexpansiveMap,
    pub alpha: f64,
}

impl AveragedMap {
    pub fn new(space: SpaceModel, base: NonexpansiveMap, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::usage(format!("averaging parameter {alpha} outside (0, 1]")));
        }
        Ok(AveragedMap { space, base, alpha })
    }

    pub fn eval(&self, x: &Point) -> Result<Point> {
        check_lambda(self.alpha)?;
        self.space.combine(x, &self.base.eval(x)?, self.alpha)
    }

    pub fn into_map(self) -> NonexpansiveMap {
        let name = format!("avg[{}]({})", self.alpha, self.base.name());
        NonexpansiveMap::new(name, 1.0, move |x| self.eval(x)).expect("valid certificate")
    }
}

/// `averaged_eval(m, x) = (1-α)x ⊕ αU′(x)`.
pub fn averaged_eval(m: &AveragedMap, x: &Point) -> Result<Point> {
    m.eval(x)
}

/// `‖x−y‖² − ‖(x−f(x))−(y−f(y))‖² − ‖f(x)−f(y)‖²`, nonnegative exactly when
/// `f` is firmly nonexpansive on the pair.
pub fn firm_nonexp_gap(f: &NonexpansiveMap, x: &Point, y: &Point) -> Result<f64> {
    let (xv, yv) = (x.coords()?, y.coords()?);
    let fx = f.eval(x)?;
    let fy = f.eval(y)?;
    let (fxv, fyv) = (fx.coords()?, fy.coords()?);
    let mut a = 0.0;
    let mut b = 0.0;
    let mut c = 0.0;
    for i in 0..xv.len() {
        let dxy = xv[i] - yv[i];
        let dr = (xv[i] - fxv[i]) - (yv[i] - fyv[i]);
        let df = fxv[i] - fyv[i];
        a += dxy * dxy;
        b += dr * dr;
        c += df * df;
    }
    Ok(a - b - c)
}

/// `⟨x−y, op(x)−op(y)⟩ − δ‖op(x)−op(y)‖²`.
pub fn cocoercive_gap(op: &MonotoneOpSpec, delta: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    let (gx, gy) = (op.apply(x)?, op.apply(y)?);
    let dg: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a - b).collect();
    let dx: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    Ok(dot(&dx, &dg) - delta * dot(&dg, &dg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn r1(x: f64) -> Point {
        Point::scalar(x)
    }

    #[test]
    fn projections() {
        let e1 = SpaceModel::euclidean(1);
        let e2 = SpaceModel::euclidean(2);
        let t = SpaceModel::spider();
        assert_eq!(ConvexSet::Interval { lo: 0.0, hi: 1.0 }.project(&e1, &r1(3.0)).unwrap(), r1(1.0));
        let ball = ConvexSet::Ball { center: Point::vector([0., 0.]), radius: 1.0 };
        assert_eq!(ball.project(&e2, &Point::vector([2., 0.])).unwrap(), Point::vector([1., 0.]));
        let leg0 = ConvexSet::TreeLegs { legs: vec![0], max_t: f64::INFINITY };
        assert_eq!(leg0.project(&t, &Point::tree(1, 1.0)).unwrap(), Point::junction());
        let hs = ConvexSet::Halfspace { normal: vec![1., 1.], offset: 0.0 };
        let p = hs.project(&e2, &Point::vector([1., 1.])).unwrap();
        assert_eq!(p, Point::vector([0., 0.]));
        assert!(ConvexSet::Interval { lo: 1.0, hi: 0.0 }.project(&e1, &r1(0.0)).is_err());
    }

    #[test]
    fn hyperbolic_geodesic_projection_is_orthogonal() {
        let h = SpaceModel::Hyperboloid;
        let line = ConvexSet::Geodesic { normal: [0.0, 0.0, 1.0] };
        let x = Point::hyperbolic_polar(1.2, 1.0);
        let p = line.project(&h, &x).unwrap();
        h.validate(&p).unwrap();
        let Point::Hyperboloid(pc) = p.clone() else { unreachable!() };
        assert!(pc[2].abs() < 1e-14);
        // Nearby points on the line are not closer.
        let d = h.dist(&x, &p).unwrap();
        let s = pc[1].asinh();
        for ds in [-1e-3, 1e-3] {
            let q = Point::Hyperboloid([(s + ds).cosh(), (s + ds).sinh(), 0.0]);
            assert!(h.dist(&x, &q).unwrap() >= d);
        }
    }

    #[test]
    fn segment_projection_matches_closed_form_on_tree() {
        let t = SpaceModel::spider();
        let seg = ConvexSet::Segment { a: Point::tree(0, 1.0), b: Point::tree(1, 1.0) };
        let p = seg.project(&t, &Point::tree(2, 2.0)).unwrap();
        assert!(t.dist(&p, &Point::junction()).unwrap() < 1e-12);
    }

    #[test]
    fn resolvents() {
        let nc = MonotoneOpSpec::normal_cone_interval(0.0, 1.0);
        assert_eq!(resolvent(&nc, 1.0, &[3.0]).unwrap(), vec![1.0]);
        assert_eq!(reflected_resolvent(&nc, 1.0, &[3.0]).unwrap(), vec![-1.0]);
        let q = MonotoneOpSpec::quadratic_1d(3.0);
        assert_abs_diff_eq!(resolvent(&q, 1.0, &[1.0]).unwrap()[0], 2.0, epsilon = 1e-15);
        assert_eq!(resolvent(&MonotoneOpSpec::Zero, 4.0, &[7.0]).unwrap(), vec![7.0]);
        assert_eq!(reflected_resolvent(&MonotoneOpSpec::Zero, 1.0, &[5.0]).unwrap(), vec![5.0]);
        let nc2 = MonotoneOpSpec::normal_cone_interval(0.5, 2.0);
        assert_eq!(reflected_resolvent(&nc2, 1.0, &[0.0]).unwrap(), vec![1.0]);
        assert!(resolvent(&nc, 0.0, &[0.0]).is_err());
    }

    #[test]
    fn averaged_and_gaps() {
        let e1 = SpaceModel::euclidean(1);
        let proj = NonexpansiveMap::projection(e1.clone(), ConvexSet::Interval { lo: 0.0, hi: 1.0 }).unwrap();
        let avg = AveragedMap::new(e1.clone(), proj.clone(), 0.5).unwrap();
        assert_eq!(averaged_eval(&avg, &r1(3.0)).unwrap(), r1(2.0));
        let full = AveragedMap::new(e1.clone(), proj.clone(), 1.0).unwrap();
        assert_eq!(full.eval(&r1(3.0)).unwrap(), r1(1.0));
        let id_avg = AveragedMap::new(e1.clone(), NonexpansiveMap::identity(), 0.5).unwrap();
        assert_eq!(id_avg.eval(&r1(-4.0)).unwrap(), r1(-4.0));
        assert!(AveragedMap::new(e1, proj.clone(), 0.0).is_err());

        // ‖x−y‖² = 16, residual difference (3−1) − (−1−0) = 3, image gap 1.
        assert_eq!(firm_nonexp_gap(&proj, &r1(3.0), &r1(-1.0)).unwrap(), 16.0 - 9.0 - 1.0);
        assert_eq!(firm_nonexp_gap(&NonexpansiveMap::identity(), &r1(2.0), &r1(2.0)).unwrap(), 0.0);
        let ball = NonexpansiveMap::projection(
            SpaceModel::euclidean(2),
            ConvexSet::Ball { center: Point::vector([0., 0.]), radius: 1.0 },
        )
        .unwrap();
        assert!(firm_nonexp_gap(&ball, &Point::vector([2., 0.]), &Point::vector([0., 2.])).unwrap() >= 0.0);

        let id = MonotoneOpSpec::ScaledIdentity { scale: 1.0 };
        assert_eq!(cocoercive_gap(&id, 1.0, &[3.0], &[1.0]).unwrap(), 0.0);
        let half = MonotoneOpSpec::ScaledIdentity { scale: 0.5 };
        assert_eq!(cocoercive_gap(&half, 2.0, &[3.0], &[1.0]).unwrap(), 0.0);
        let q = MonotoneOpSpec::quadratic_1d(3.0);
        assert_eq!(cocoercive_gap(&q, 1.0, &[5.0], &[-2.0]).unwrap(), 0.0);
        assert_eq!(q.cocoercivity(), Some(1.0));
    }

    #[test]
    fn certificates_are_enforced() {
        assert!(NonexpansiveMap::new("x", 1.5, |x| Ok(x.clone())).is_err());
        assert!(NonexpansiveMap::linear(vec![vec![2.0]]).is_err());
        assert!(MonotoneOpSpec::AffineGradient { a: vec![vec![-1.0]], b: vec![0.0] }.validate().is_err());
        assert!(NonexpansiveMap::forward_step(MonotoneOpSpec::quadratic_1d(0.0), 2.5).is_err());
        assert!(NonexpansiveMap::forward_step(MonotoneOpSpec::quadratic_1d(0.0), 2.0).is_ok());
    }

    #[test]
    fn fixed_points_of_resolvent_are_zeros() {
        let specs = [
            MonotoneOpSpec::normal_cone_interval(0.0, 1.0),
            MonotoneOpSpec::quadratic_1d(3.0),
            MonotoneOpSpec::ScaledIdentity { scale: 2.0 },
        ];
        for op in &specs {
            for i in -40..=40 {
                let x = [i as f64 * 0.1];
                let fixed = (resolvent(op, 0.7, &x).unwrap()[0] - x[0]).abs() <= 1e-12;
                assert_eq!(fixed, op.is_zero_at(&x, 1e-9).unwrap(), "{op:?} at {x:?}");
            }
        }
    }

    #[test]
    fn specs_round_trip_json() {
        let op = MonotoneOpSpec::normal_cone_interval(0.0, 1.0);
        let s = serde_json::to_string(&op).unwrap();
        assert_eq!(s, r#"{"kind":"normal_cone","set":{"kind":"interval","lo":0.0,"hi":1.0}}"#);
        assert_eq!(serde_json::from_str::<MonotoneOpSpec>(&s).unwrap(), op);
    }
}
