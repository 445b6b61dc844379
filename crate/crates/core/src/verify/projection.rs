//! Projection oracles independent of the closed forms in `operators`.
//!
//! A set is described by a [`SetSampler`]: finitely many pieces, each a
//! continuous map from a parameter box `[0,1]ᵏ` onto part of the set. The
//! brute-force projection scans a grid over every piece and then zooms in on
//! the best cell until the cell is below tolerance.

use std::f64::consts::TAU;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{GeodesicSpace, Point, SpaceModel};
use crate::operators::ConvexSet;

type PieceFn = dyn Fn(&[f64]) -> Result<Point> + Send + Sync;

#[derive(Clone)]
struct Piece {
    dims: usize,
    /// Largest distance moved per unit of parameter, for the stopping rule.
    scale: f64,
    map: Arc<PieceFn>,
}

/// A parametrization of a bounded set by finitely many boxes.
#[derive(Clone)]
pub struct SetSampler {
    pieces: Vec<Piece>,
}

impl std::fmt::Debug for SetSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SetSampler({} pieces)", self.pieces.len())
    }
}

impl SetSampler {
    pub fn new() -> Self {
        SetSampler { pieces: Vec::new() }
    }

    /// Adds a piece `[0,1]^dims → S`; `scale` bounds how far the image moves
    /// per unit change of a parameter.
    pub fn piece(mut self, dims: usize, scale: f64, map: impl Fn(&[f64]) -> Result<Point> + Send + Sync + 'static) -> Self {
        self.pieces.push(Piece { dims, scale, map: Arc::new(map) });
        self
    }

    /// Images of a uniform grid with `resolution` subdivisions per parameter.
    pub fn net(&self, resolution: usize) -> Result<Vec<Point>> {
        let k = resolution.max(1);
        let mut out = Vec::new();
        for p in &self.pieces {
            for params in grid(&vec![(0.0, 1.0); p.dims], k) {
                out.push((p.map)(&params)?);
            }
        }
        Ok(out)
    }

    /// The standard parametrization of a bounded [`ConvexSet`].
    pub fn for_set(space: &SpaceModel, set: &ConvexSet) -> Result<Self> {
        set.validate()?;
        let s = SetSampler::new();
        let sampler = match set.clone() {
            ConvexSet::Interval { lo, hi } => s.piece(1, hi - lo, move |t| Ok(Point::scalar(lo + (hi - lo) * t[0]))),
            ConvexSet::Box { lo, hi } => {
                let scale = lo.iter().zip(&hi).map(|(l, h)| h - l).fold(0.0, f64::max);
                s.piece(lo.len(), scale, move |t| {
                    Ok(Point::Euclidean(t.iter().zip(lo.iter().zip(&hi)).map(|(s, (l, h))| l + (h - l) * s).collect()))
                })
            }
            ConvexSet::Ball { center, radius } => ball_sampler(space, center, radius)?,
            ConvexSet::TreeLegs { legs, max_t } => legs.into_iter().fold(s, |s, l| s.piece(1, max_t, move |t| Ok(Point::tree(l, max_t * t[0])))),
            ConvexSet::Segment { a, b } => {
                let len = space.dist(&a, &b)?;
                let sp = space.clone();
                s.piece(1, len, move |t| sp.combine(&a, &b, t[0]))
            }
            ConvexSet::Singleton { point } => s.piece(0, 0.0, move |_| Ok(point.clone())),
            ConvexSet::Halfspace { .. } | ConvexSet::Line { .. } | ConvexSet::Geodesic { .. } => {
                return Err(Error::usage("unbounded set has no finite parametrization"));
            }
        };
        Ok(sampler)
    }
}

impl Default for SetSampler {
    fn default() -> Self {
        SetSampler::new()
    }
}

fn grid(bounds: &[(f64, f64)], k: usize) -> Vec<Vec<f64>> {
    let mut pts = vec![vec![]];
    for &(lo, hi) in bounds {
        pts = pts
            .into_iter()
            .flat_map(|p: Vec<f64>| (0..=k).map(move |i| [p.clone(), vec![lo + (hi - lo) * i as f64 / k as f64]].concat()))
            .collect();
    }
    pts
}

fn ball_sampler(space: &SpaceModel, center: Point, radius: f64) -> Result<SetSampler> {
    let s = SetSampler::new();
    Ok(match (space, &center) {
        (SpaceModel::Euclidean { dim: 1 }, Point::Euclidean(c)) => {
            let c = c[0];
            s.piece(1, 2.0 * radius, move |t| Ok(Point::scalar(c - radius + 2.0 * radius * t[0])))
        }
        (SpaceModel::Euclidean { dim: 2 }, Point::Euclidean(c)) => {
            let c = [c[0], c[1]];
            s.piece(2, TAU * radius, move |t| {
                let (r, th) = (radius * t[0], TAU * t[1]);
                Ok(Point::vector([c[0] + r * th.cos(), c[1] + r * th.sin()]))
            })
        }
        (SpaceModel::Hyperboloid, _) => {
            // Directions at the centre via geodesics to a circle around the
            // base point that encloses the centre.
            let reach = space.dist(&center, &space.base_point())? + 2.0;
            let sp = space.clone();
            s.piece(2, TAU * radius.sinh().max(radius) * 2.0, move |t| {
                let far = Point::hyperbolic_polar(reach, TAU * t[1]);
                let d = sp.dist(&center, &far)?;
                sp.combine(&center, &far, radius * t[0] / d)
            })
        }
        (SpaceModel::Tree { legs }, Point::Tree(..)) => {
            let mut s = s;
            for l in 0..*legs {
                // The part of leg `l` inside the ball is an interval [a, b].
                let (a, b) = match center {
                    Point::Tree(cl, ct) if cl == l || ct == 0.0 => ((ct - radius).max(0.0), ct + radius),
                    Point::Tree(_, ct) => (0.0, radius - ct),
                    _ => unreachable!(),
                };
                if b >= a && b >= 0.0 {
                    s = s.piece(1, b - a, move |t| Ok(Point::tree(l, a + (b - a) * t[0])));
                }
            }
            s
        }
        _ => return Err(Error::usage("ball parametrizations exist in R^1, R^2, H^2 and trees")),
    })
}

/// A finite net of a bounded convex set.
pub fn set_net(space: &SpaceModel, set: &ConvexSet, resolution: usize) -> Result<Vec<Point>> {
    SetSampler::for_set(space, set)?.net(resolution)
}

/// Nearest point to `u` of the sampled set: a grid search over every piece
/// followed by repeated zooming into the best cell, until the cell's image
/// is smaller than `tol`.
pub fn brute_force_projection(space: &SpaceModel, sampler: &SetSampler, u: &Point, tol: f64) -> Result<Point> {
    const K: usize = 64;
    let mut best: Option<(f64, Point)> = None;
    for p in &sampler.pieces {
        let mut bounds = vec![(0.0, 1.0); p.dims];
        let mut width = 1.0f64;
        let mut local: (f64, Vec<f64>) = (f64::INFINITY, vec![]);
        for _ in 0..200 {
            for params in grid(&bounds, K) {
                let d = space.dist(u, &(p.map)(&params)?)?;
                if d < local.0 {
                    local = (d, params);
                }
            }
            let step = width / K as f64;
            if p.dims == 0 || step * p.scale < tol {
                break;
            }
            width = 4.0 * step;
            bounds = local.1.iter().map(|c| ((c - 2.0 * step).max(0.0), (c + 2.0 * step).min(1.0))).collect();
        }
        if local.1.len() == p.dims && best.as_ref().is_none_or(|b| local.0 < b.0) {
            best = Some((local.0, (p.map)(&local.1)?));
        }
    }
    best.map(|b| b.1).ok_or_else(|| Error::usage("empty sampler"))
}

/// Outcome of the variational test of a candidate projection.
#[derive(Clone, Debug, Serialize)]
pub struct VariationalReport {
    pub holds: bool,
    /// `max_y ⟨→u Pu, →y Pu⟩` over the samples.
    pub worst: f64,
    pub samples: usize,
}

/// `Pu` is the projection of `u` onto a convex `S` iff
/// `⟨→u Pu, →y Pu⟩ ≤ 0` for every `y ∈ S`; checked on `samples` up to `tol`.
pub fn check_projection_variational(
    space: &SpaceModel,
    samples: &[Point],
    u: &Point,
    pu: &Point,
    tol: f64,
) -> Result<VariationalReport> {
    let mut worst = f64::NEG_INFINITY;
    for y in samples {
        worst = worst.max(space.quasilin(u, pu, y, pu)?);
    }
    Ok(VariationalReport { holds: worst <= tol, worst, samples: samples.len() })
}
