//! Geodesic model spaces.
//!
//! Every model is a W-hyperbolic space: a metric `dist` together with a
//! convexity function `combine(a, b, λ) = (1-λ)a ⊕ λb` satisfying the
//! axioms W1–W4. All three concrete models are CAT(0), so the
//! quasi-linearization satisfies Cauchy–Schwarz and the CN⁺ inequality
//! holds for arbitrary λ.
//!
//! - [`SpaceModel::Euclidean`]: ℝᵈ with the usual linear combination.
//! - [`SpaceModel::Hyperboloid`]: the hyperbolic plane H² in the hyperboloid
//!   model, where geodesic interpolation has a closed form.
//! - [`SpaceModel::Tree`]: a spider (k half-lines glued at a junction), the
//!   simplest CAT(0) space with branching geodesics.

mod euclidean;
mod hyperboloid;
mod tree;

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use hyperboloid::{minkowski_dot, HYPERBOLOID_SHEET_TOL};

/// An element of one of the model spaces.
///
/// Serializes as `{"model": "euclidean"|"hyperboloid"|"tree", "coords": [...]}`,
/// tree coordinates being `[leg, t]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", content = "coords", rename_all = "lowercase")]
pub enum Point {
    Euclidean(Vec<f64>),
    Hyperboloid([f64; 3]),
    Tree(usize, f64),
}

impl Point {
    pub fn model_name(&self) -> &'static str {
        match self {
            Point::Euclidean(_) => "euclidean",
            Point::Hyperboloid(_) => "hyperboloid",
            Point::Tree(..) => "tree",
        }
    }

    /// Shorthand for a point of ℝ¹.
    pub fn scalar(x: f64) -> Self {
        Point::Euclidean(vec![x])
    }

    pub fn vector(coords: impl Into<Vec<f64>>) -> Self {
        Point::Euclidean(coords.into())
    }

    /// Point on the given leg of a spider at arclength `t` from the junction.
    pub fn tree(leg: usize, t: f64) -> Self {
        tree::canonical(leg, t)
    }

    /// The junction of a spider.
    pub fn junction() -> Self {
        Point::Tree(0, 0.0)
    }

    /// Point of H² at geodesic distance `r` from the base point `(1, 0, 0)` in
    /// direction `theta`.
    pub fn hyperbolic_polar(r: f64, theta: f64) -> Self {
        Point::Hyperboloid(hyperboloid::from_polar(r, theta))
    }

    /// Coordinates of a Euclidean point.
    pub fn coords(&self) -> Result<&[f64]> {
        match self {
            Point::Euclidean(v) => Ok(v),
            other => Err(Error::ModelMismatch {
                expected: "euclidean",
                found: other.model_name(),
            }),
        }
    }

    /// Flat coordinate list, as written to trajectory exports.
    pub fn flat_coords(&self) -> Vec<f64> {
        match self {
            Point::Euclidean(v) => v.clone(),
            Point::Hyperboloid(x) => x.to_vec(),
            Point::Tree(leg, t) => vec![*leg as f64, *t],
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Euclidean(v) if v.len() == 1 => write!(f, "{}", v[0]),
            Point::Euclidean(v) => write!(f, "{v:?}"),
            Point::Hyperboloid(x) => write!(f, "H({}, {}, {})", x[0], x[1], x[2]),
            Point::Tree(leg, t) => write!(f, "(leg {leg}, {t})"),
        }
    }
}

/// A geodesic space: metric plus convexity function.
///
/// The derived quantities (quasi-linearization and the CAT(0) gaps) are
/// provided in terms of `dist` and `combine`, so any implementation gets
/// them for free. Test doubles for the axiom harness implement this trait
/// directly.
pub trait GeodesicSpace: Send + Sync {
    fn name(&self) -> String;

    /// Checks that `p` is a valid point of this space.
    fn validate(&self, p: &Point) -> Result<()>;

    fn dist(&self, a: &Point, b: &Point) -> Result<f64>;

    /// `(1-λ)a ⊕ λb`.
    fn combine(&self, a: &Point, b: &Point, lambda: f64) -> Result<Point>;

    /// Draws a point within distance roughly `radius` of the base point.
    fn sample(&self, rng: &mut dyn rand::RngCore, radius: f64) -> Point;

    /// Quasi-linearization ⟨→xy, →uv⟩ = ½(d²(x,v) + d²(y,u) − d²(x,u) − d²(y,v)).
    fn quasilin(&self, x: &Point, y: &Point, u: &Point, v: &Point) -> Result<f64> {
        let xv = self.dist(x, v)?;
        let yu = self.dist(y, u)?;
        let xu = self.dist(x, u)?;
        let yv = self.dist(y, v)?;
        Ok(0.5 * (xv * xv + yu * yu - xu * xu - yv * yv))
    }

    /// Slack in CN⁺: `(1-λ)d²(z,x) + λd²(z,y) − λ(1-λ)d²(x,y) − d²(z, (1-λ)x ⊕ λy)`.
    fn cn_plus_gap(&self, z: &Point, x: &Point, y: &Point, lambda: f64) -> Result<f64> {
        let m = self.combine(x, y, lambda)?;
        let zx = self.dist(z, x)?;
        let zy = self.dist(z, y)?;
        let xy = self.dist(x, y)?;
        let zm = self.dist(z, &m)?;
        Ok((1.0 - lambda) * zx * zx + lambda * zy * zy - lambda * (1.0 - lambda) * xy * xy - zm * zm)
    }

    /// Slack in the binomial bound
    /// `d²((1-t)x ⊕ ty, z) ≤ (1-t)²d²(x,z) + 2t(1-t)⟨→xz, →yz⟩ + t²d²(y,z)`.
    fn binomial_bound_gap(&self, x: &Point, y: &Point, z: &Point, t: f64) -> Result<f64> {
        let w = self.combine(x, y, t)?;
        let xz = self.dist(x, z)?;
        let yz = self.dist(y, z)?;
        let wz = self.dist(&w, z)?;
        let q = self.quasilin(x, z, y, z)?;
        Ok((1.0 - t) * (1.0 - t) * xz * xz + 2.0 * t * (1.0 - t) * q + t * t * yz * yz - wz * wz)
    }
}

/// The concrete model spaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpaceModel {
    Euclidean { dim: usize },
    Hyperboloid,
    Tree { legs: usize },
}

impl SpaceModel {
    pub fn euclidean(dim: usize) -> Self {
        SpaceModel::Euclidean { dim }
    }

    /// Spider with the default three legs.
    pub fn spider() -> Self {
        SpaceModel::Tree { legs: 3 }
    }

    /// The point every sampler is centred on.
    pub fn base_point(&self) -> Point {
        match self {
            SpaceModel::Euclidean { dim } => Point::Euclidean(vec![0.0; *dim]),
            SpaceModel::Hyperboloid => Point::Hyperboloid([1.0, 0.0, 0.0]),
            SpaceModel::Tree { .. } => Point::junction(),
        }
    }

    fn mismatch(&self, p: &Point) -> Error {
        Error::ModelMismatch {
            expected: self.tag(),
            found: p.model_name(),
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            SpaceModel::Euclidean { .. } => "euclidean",
            SpaceModel::Hyperboloid => "hyperboloid",
            SpaceModel::Tree { .. } => "tree",
        }
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::usage(format!("combination weight {lambda} outside [0, 1]")))
    }
}

impl GeodesicSpace for SpaceModel {
    fn name(&self) -> String {
        match self {
            SpaceModel::Euclidean { dim } => format!("euclidean R^{dim}"),
            SpaceModel::Hyperboloid => "hyperboloid H^2".to_string(),
            SpaceModel::Tree { legs } => format!("tree ({legs} legs)"),
        }
    }

    fn validate(&self, p: &Point) -> Result<()> {
        match (self, p) {
            (SpaceModel::Euclidean { dim }, Point::Euclidean(v)) => {
                if v.len() != *dim {
                    return Err(Error::usage(format!(
                        "point has dimension {}, model has dimension {dim}",
                        v.len()
                    )));
                }
                if v.iter().any(|c| !c.is_finite()) {
                    return Err(Error::usage("non-finite coordinate"));
                }
                Ok(())
            }
            (SpaceModel::Hyperboloid, Point::Hyperboloid(x)) => hyperboloid::validate(x),
            (SpaceModel::Tree { legs }, Point::Tree(leg, t)) => tree::validate(*legs, *leg, *t),
            (model, p) => Err(model.mismatch(p)),
        }
    }

    fn dist(&self, a: &Point, b: &Point) -> Result<f64> {
        match (self, a, b) {
            (SpaceModel::Euclidean { .. }, Point::Euclidean(x), Point::Euclidean(y)) => {
                euclidean::dist(x, y)
            }
            (SpaceModel::Hyperboloid, Point::Hyperboloid(x), Point::Hyperboloid(y)) => {
                Ok(hyperboloid::dist(x, y))
            }
            (SpaceModel::Tree { .. }, Point::Tree(la, ta), Point::Tree(lb, tb)) => {
                Ok(tree::dist((*la, *ta), (*lb, *tb)))
            }
            (model, a, b) => Err(model.mismatch(if a.model_name() == model.tag() { b } else { a })),
        }
    }

    fn combine(&self, a: &Point, b: &Point, lambda: f64) -> Result<Point> {
        check_lambda(lambda)?;
        match (self, a, b) {
            (SpaceModel::Euclidean { .. }, Point::Euclidean(x), Point::Euclidean(y)) => {
                Ok(Point::Euclidean(euclidean::combine(x, y, lambda)?))
            }
            (SpaceModel::Hyperboloid, Point::Hyperboloid(x), Point::Hyperboloid(y)) => {
                Ok(Point::Hyperboloid(hyperboloid::combine(x, y, lambda)))
            }
            (SpaceModel::Tree { .. }, Point::Tree(la, ta), Point::Tree(lb, tb)) => {
                let (leg, t) = tree::combine((*la, *ta), (*lb, *tb), lambda);
                Ok(tree::canonical(leg, t))
            }
            (model, a, b) => Err(model.mismatch(if a.model_name() == model.tag() { b } else { a })),
        }
    }

    fn sample(&self, rng: &mut dyn rand::RngCore, radius: f64) -> Point {
        match self {
            SpaceModel::Euclidean { dim } => {
                Point::Euclidean((0..*dim).map(|_| rng.gen_range(-radius..=radius)).collect())
            }
            SpaceModel::Hyperboloid => {
                let r = rng.gen_range(0.0..=radius);
                let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                Point::hyperbolic_polar(r, theta)
            }
            SpaceModel::Tree { legs } => {
                // Land exactly on the junction now and then: it is where
                // geodesics branch.
                if rng.gen_bool(0.05) {
                    Point::junction()
                } else {
                    Point::tree(rng.gen_range(0..*legs), rng.gen_range(0.0..=radius))
                }
            }
        }
    }
}
