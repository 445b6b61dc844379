//! Small named (HM) instances with known fixed-point sets.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::geometry::{Point, SpaceModel};
use crate::operators::{ConvexSet, NonexpansiveMap};

use super::HMProblem;

/// Names accepted by [`fixture`].
pub const FIXTURES: [&str; 4] = ["E1", "E2", "T1", "H1"];

/// An (HM) instance with `F = Fix T ∩ Fix U` known as a convex set, and the
/// strong limit `P_F(u)`.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub problem: HMProblem,
    pub fix_set: ConvexSet,
    pub limit: Point,
}

pub fn fixture(name: &str) -> Result<Fixture> {
    match name {
        "E1" => e1(),
        "E2" => e2(),
        "T1" => t1(),
        "H1" => h1(),
        _ => Err(Error::usage(format!("unknown fixture {name:?}; known: {}", FIXTURES.join(", ")))),
    }
}

/// ℝ¹, `T = U = proj[0,1]`, `u = 2`, `x₀ = 3`.
fn e1() -> Result<Fixture> {
    let space = SpaceModel::euclidean(1);
    let set = ConvexSet::Interval { lo: 0.0, hi: 1.0 };
    let proj = NonexpansiveMap::projection(space.clone(), set.clone())?;
    let problem = HMProblem::new(space, proj.clone(), proj, Point::scalar(2.0), Point::scalar(3.0), Point::scalar(1.0), 2)?;
    Ok(Fixture { name: "E1", problem, fix_set: set, limit: Point::scalar(1.0) })
}

/// ℝ², `T` the quarter rotation, `U` the projection onto the unit ball.
fn e2() -> Result<Fixture> {
    let space = SpaceModel::euclidean(2);
    let origin = Point::vector([0.0, 0.0]);
    let ball = ConvexSet::Ball { center: origin.clone(), radius: 1.0 };
    let problem = HMProblem::new(
        space.clone(),
        NonexpansiveMap::rotation(FRAC_PI_2),
        NonexpansiveMap::projection(space, ball)?,
        Point::vector([1.0, 0.0]),
        Point::vector([0.0, 2.0]),
        origin.clone(),
        2,
    )?;
    Ok(Fixture { name: "E2", problem, fix_set: ConvexSet::Singleton { point: origin.clone() }, limit: origin })
}

/// Three-legged spider; `T` projects onto legs 0 and 1 (to arclength 2),
/// `U` onto the unit ball at the junction.
fn t1() -> Result<Fixture> {
    let space = SpaceModel::spider();
    let legs = ConvexSet::TreeLegs { legs: vec![0, 1], max_t: 2.0 };
    let ball = ConvexSet::Ball { center: Point::junction(), radius: 1.0 };
    let problem = HMProblem::new(
        space.clone(),
        NonexpansiveMap::projection(space.clone(), legs)?,
        NonexpansiveMap::projection(space, ball)?,
        Point::tree(2, 2.0),
        Point::tree(0, 3.0),
        Point::junction(),
        4,
    )?;
    let fix_set = ConvexSet::Segment { a: Point::tree(0, 1.0), b: Point::tree(1, 1.0) };
    Ok(Fixture { name: "T1", problem, fix_set, limit: Point::junction() })
}

fn geodesic_point(s: f64) -> Point {
    Point::hyperbolic_polar(s.abs(), if s < 0.0 { std::f64::consts::PI } else { 0.0 })
}

/// H²; `T` projects onto the geodesic `{x₂ = 0}`, `U` onto a unit ball
/// centred on it, so `F` is a geodesic segment of length 2.
fn h1() -> Result<Fixture> {
    let space = SpaceModel::Hyperboloid;
    let line = ConvexSet::Geodesic { normal: [0.0, 0.0, 1.0] };
    let ball = ConvexSet::Ball { center: geodesic_point(0.5), radius: 1.0 };
    let fix_set = ConvexSet::Segment { a: geodesic_point(-0.5), b: geodesic_point(1.5) };
    let anchor = Point::hyperbolic_polar(2.0, 2.0);
    let x0 = Point::hyperbolic_polar(1.0, -1.0);
    let p = space.base_point();
    let n = HMProblem::minimal_n(&space, &anchor, &x0, &p)?;
    let limit = fix_set.project(&space, &anchor)?;
    let problem = HMProblem::new(
        space.clone(),
        NonexpansiveMap::projection(space.clone(), line)?,
        NonexpansiveMap::projection(space, ball)?,
        anchor,
        x0,
        p,
        n,
    )?;
    Ok(Fixture { name: "H1", problem, fix_set, limit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GeodesicSpace;

    #[test]
    fn all_fixtures_build() {
        for name in FIXTURES {
            let f = fixture(name).unwrap();
            let sp = &f.problem.space;
            assert!(f.fix_set.contains(sp, &f.limit, 1e-9).unwrap(), "{name}");
            assert!(f.fix_set.contains(sp, &f.problem.p, 1e-9).unwrap(), "{name}");
        }
        assert!(fixture("nope").is_err());
    }

    #[test]
    fn h1_limit_is_nearest_in_segment() {
        let f = fixture("H1").unwrap();
        let sp = &f.problem.space;
        let d = sp.dist(&f.problem.anchor, &f.limit).unwrap();
        for i in 0..=200 {
            let s = -0.5 + 2.0 * i as f64 / 200.0;
            assert!(sp.dist(&f.problem.anchor, &geodesic_point(s)).unwrap() >= d - 1e-12);
        }
    }
}
