//! A spider: `legs` copies of [0, ∞) glued at 0.

use crate::error::{Error, Result};

use super::Point;

/// All representations of the junction collapse to leg 0.
pub(super) fn canonical(leg: usize, t: f64) -> Point {
    if t == 0.0 {
        Point::Tree(0, 0.0)
    } else {
        Point::Tree(leg, t)
    }
}

pub(super) fn validate(legs: usize, leg: usize, t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::usage(format!("tree arclength {t} must be finite and >= 0")));
    }
    if leg >= legs {
        return Err(Error::usage(format!("leg {leg} out of range for {legs} legs")));
    }
    Ok(())
}

pub(super) fn dist((la, ta): (usize, f64), (lb, tb): (usize, f64)) -> f64 {
    if la == lb || ta == 0.0 || tb == 0.0 {
        (ta - tb).abs()
    } else {
        ta + tb
    }
}

pub(super) fn combine((la, ta): (usize, f64), (lb, tb): (usize, f64), lambda: f64) -> (usize, f64) {
    if la == lb || ta == 0.0 || tb == 0.0 {
        // Both on one closed leg (the junction belongs to every leg).
        let leg = if ta == 0.0 { lb } else { la };
        return (leg, (1.0 - lambda) * ta + lambda * tb);
    }
    // Walk from a towards the junction, then out along b's leg.
    let s = lambda * (ta + tb);
    if s <= ta {
        (la, ta - s)
    } else {
        (lb, (s - ta).min(tb))
    }
}
