//! Generators for the alternating Halpern–Mann iteration and its relatives.
//!
//! Index conventions: a run of `steps` produces `steps + 1` iterates. For
//! (HM) the index counts half-updates, so `x_{2n+1}` is the Halpern step and
//! `x_{2n+2}` the Mann step of round `n`.

pub mod fixtures;
mod trajectory;

use std::fmt;
use std::sync::Arc;

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GeodesicSpace, Point, SpaceModel};
use crate::operators::NonexpansiveMap;
use crate::rates::Moduli;

pub use fixtures::{fixture, Fixture, FIXTURES};
pub use trajectory::{Residual, Trajectory};

/// A real sequence `n ↦ a_n`.
#[derive(Clone)]
pub struct Sequence {
    label: String,
    f: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
}

impl Sequence {
    pub fn from_fn(label: impl Into<String>, f: impl Fn(u64) -> f64 + Send + Sync + 'static) -> Self {
        Sequence { label: label.into(), f: Arc::new(f) }
    }

    pub fn constant(c: f64) -> Self {
        Sequence::from_fn(format!("{c}"), move |_| c)
    }

    /// `1/(n+1)`.
    pub fn harmonic() -> Self {
        Sequence::from_fn("1/(n+1)", |n| 1.0 / (n as f64 + 1.0))
    }

    pub fn eval(&self, n: u64) -> f64 {
        (self.f)(n)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `n ↦ g(a_n)`.
    pub fn map(&self, label: impl Into<String>, g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Sequence {
        let f = self.f.clone();
        Sequence::from_fn(label, move |n| g(f(n)))
    }
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sequence({})", self.label)
    }
}

/// Serializable description of a [`Sequence`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceSpec {
    Constant { value: f64 },
    /// `1/(n+1)`.
    Harmonic,
    /// `n/(n+1)`.
    OneMinusHarmonic,
    /// `scale/(n+1)^exponent`.
    Power { scale: f64, exponent: f64 },
    /// `scale·ratio^n`.
    Geometric { scale: f64, ratio: f64 },
}

impl SequenceSpec {
    pub fn build(&self) -> Sequence {
        match *self {
            SequenceSpec::Constant { value } => Sequence::constant(value),
            SequenceSpec::Harmonic => Sequence::harmonic(),
            SequenceSpec::OneMinusHarmonic => Sequence::from_fn("n/(n+1)", |n| n as f64 / (n as f64 + 1.0)),
            SequenceSpec::Power { scale, exponent } => {
                Sequence::from_fn(format!("{scale}/(n+1)^{exponent}"), move |n| scale / (n as f64 + 1.0).powf(exponent))
            }
            SequenceSpec::Geometric { scale, ratio } => {
                Sequence::from_fn(format!("{scale}*{ratio}^n"), move |n| scale * ratio.powi(n.min(i32::MAX as u64) as i32))
            }
        }
    }
}

/// How many indices are probed when checking a band condition.
pub const BAND_PROBE: u64 = 1000;

/// The parameter sequences `(α_n)`, `(β_n)`, optionally with moduli.
#[derive(Clone, Debug)]
pub struct Schedule {
    pub alpha: Sequence,
    pub beta: Sequence,
    pub moduli: Option<Moduli>,
}

impl Schedule {
    pub fn new(alpha: Sequence, beta: Sequence) -> Self {
        Schedule { alpha, beta, moduli: None }
    }

    /// `α_n = 1/(n+1)`, `β_n ≡ β`, with the matching moduli.
    pub fn harmonic(beta: f64) -> Result<Self> {
        let b = Rational::from_f64(beta).ok_or_else(|| Error::usage("beta must be finite"))?;
        let m = Moduli::harmonic(b)?;
        Schedule::new(Sequence::harmonic(), Sequence::constant(beta)).with_moduli(m)
    }

    /// Attaches moduli after checking `γ ≤ β_n ≤ 1 − γ` on the first
    /// [`BAND_PROBE`] indices.
    pub fn with_moduli(mut self, m: Moduli) -> Result<Self> {
        for n in 0..BAND_PROBE {
            let b = self.beta.eval(n);
            let q = Rational::from_f64(b).ok_or_else(|| Error::usage("beta_n must be finite"))?;
            if q < m.gamma || q > Rational::from(1 - &m.gamma) {
                return Err(Error::usage(format!("beta_{n} = {b} outside [gamma, 1 - gamma] with gamma = {}", m.gamma)));
            }
        }
        self.moduli = Some(m);
        Ok(self)
    }

    /// Builds from specs; attaches the harmonic moduli when `α` is
    /// harmonic and `β` a constant in `(0, 1)`.
    pub fn from_specs(alpha: &SequenceSpec, beta: &SequenceSpec) -> Result<Self> {
        match (alpha, beta) {
            (SequenceSpec::Harmonic, SequenceSpec::Constant { value }) if *value > 0.0 && *value < 1.0 => {
                Schedule::harmonic(*value)
            }
            _ => Ok(Schedule::new(alpha.build(), beta.build())),
        }
    }

    pub fn moduli(&self) -> Result<&Moduli> {
        self.moduli.as_ref().ok_or_else(|| Error::usage("schedule carries no moduli"))
    }
}

fn unit(v: f64, what: &str, n: u64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(Error::usage(format!("{what}_{n} = {v} outside [0,1]")))
    }
}

/// Slack allowed in the fixed-point and bound checks.
pub const WITNESS_TOL: f64 = 1e-9;

/// Data of one (HM) instance. `p` witnesses `F = Fix T ∩ Fix U ≠ ∅` and
/// `n` bounds `max{d(x₀, p), 2d(u, p)}`.
#[derive(Clone, Debug)]
pub struct HMProblem {
    pub space: SpaceModel,
    pub t: NonexpansiveMap,
    pub u: NonexpansiveMap,
    pub anchor: Point,
    pub x0: Point,
    pub p: Point,
    pub n: u64,
}

impl HMProblem {
    pub fn new(
        space: SpaceModel,
        t: NonexpansiveMap,
        u: NonexpansiveMap,
        anchor: Point,
        x0: Point,
        p: Point,
        n: u64,
    ) -> Result<Self> {
        for q in [&anchor, &x0, &p] {
            space.validate(q)?;
        }
        for (m, name) in [(&t, "T"), (&u, "U")] {
            let d = space.dist(&m.eval(&p)?, &p)?;
            if d > WITNESS_TOL {
                return Err(Error::usage(format!("p is not fixed by {name}: d({name}p, p) = {d}")));
            }
        }
        let need = space.dist(&x0, &p)?.max(2.0 * space.dist(&anchor, &p)?);
        if n == 0 || (n as f64) + WITNESS_TOL < need {
            return Err(Error::usage(format!("N = {n} must be a positive natural >= {need}")));
        }
        Ok(HMProblem { space, t, u, anchor, x0, p, n })
    }

    /// The smallest admissible `N` for the given data.
    pub fn minimal_n(space: &SpaceModel, anchor: &Point, x0: &Point, p: &Point) -> Result<u64> {
        let need = space.dist(x0, p)?.max(2.0 * space.dist(anchor, p)?);
        Ok((need - WITNESS_TOL).ceil().max(1.0) as u64)
    }
}

/// Output controls shared by the runners.
#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    /// Keep every `stride`-th iterate.
    pub stride: usize,
    /// Record `d(T(x_n), x_n)` and `d(U(x_n), x_n)`.
    pub residuals: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { stride: 1, residuals: true }
    }
}

fn check_steps(steps: usize) -> Result<()> {
    if steps == 0 {
        return Err(Error::usage("steps must be at least 1"));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn hm_kernel(
    space: &SpaceModel,
    t: &NonexpansiveMap,
    u: &NonexpansiveMap,
    anchor: &Point,
    x0: &Point,
    schedule: &Schedule,
    steps: usize,
    opts: &RunOptions,
    mut perturb: impl FnMut(usize, Point) -> Result<Point>,
) -> Result<Trajectory> {
    check_steps(steps)?;
    let mut traj = Trajectory::start("x", space, x0.clone(), opts.stride, opts.residuals, opts.residuals);
    let mut x = x0.clone();
    for k in 0..=steps {
        let n = (k / 2) as u64;
        let even = k % 2 == 0;
        let tx = if even || opts.residuals { Some(t.eval(&x)?) } else { None };
        let ux = if !even || opts.residuals { Some(u.eval(&x)?) } else { None };
        if opts.residuals {
            let dt = space.dist(tx.as_ref().expect("computed"), &x)?;
            let du = space.dist(ux.as_ref().expect("computed"), &x)?;
            traj.set_residuals(Some(dt), Some(du));
        }
        if k == steps {
            break;
        }
        let next = if k % 2 == 0 {
            let a = unit(schedule.alpha.eval(n), "alpha", n)?;
            space.combine(tx.as_ref().expect("even step"), anchor, a)?
        } else {
            let b = unit(schedule.beta.eval(n), "beta", n)?;
            space.combine(ux.as_ref().expect("odd step"), &x, b)?
        };
        let next = perturb(k, next)?;
        let d = space.dist(&x, &next)?;
        traj.push(next.clone(), d);
        x = next;
    }
    Ok(traj)
}

/// `x_0, …, x_steps` of (HM).
pub fn run_hm(problem: &HMProblem, schedule: &Schedule, steps: usize) -> Result<Trajectory> {
    run_hm_with(problem, schedule, steps, &RunOptions::default())
}

pub fn run_hm_with(problem: &HMProblem, schedule: &Schedule, steps: usize, opts: &RunOptions) -> Result<Trajectory> {
    let p = problem;
    hm_kernel(&p.space, &p.t, &p.u, &p.anchor, &p.x0, schedule, steps, opts, |_, x| Ok(x))
}

type Displace = dyn Fn(&SpaceModel, &Point, f64, usize) -> Result<Point> + Send + Sync;

/// Where (HM_e) places `x′` inside the δ-ball around the exact update.
#[derive(Clone, Default)]
pub enum Perturbation {
    /// A fixed direction: `+δ·e₁` in ℝᵈ, otherwise a geodesic step of
    /// length δ towards a far point in a fixed direction (leg 0 on a spider).
    #[default]
    Fixed,
    /// `(space, exact update, δ, half-step index) ↦ x′`.
    Custom(Arc<Displace>),
}

impl fmt::Debug for Perturbation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Perturbation::Fixed => write!(f, "Fixed"),
            Perturbation::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Perturbation {
    pub fn displace(&self, space: &SpaceModel, x: &Point, delta: f64, k: usize) -> Result<Point> {
        if delta == 0.0 {
            return Ok(x.clone());
        }
        match self {
            Perturbation::Custom(f) => f(space, x, delta, k),
            Perturbation::Fixed => match x {
                Point::Euclidean(v) => {
                    let mut v = v.clone();
                    v[0] += delta;
                    Ok(Point::Euclidean(v))
                }
                _ => {
                    let far = match space {
                        SpaceModel::Hyperboloid => Point::hyperbolic_polar(space.dist(x, &space.base_point())? + 4.0, 0.0),
                        _ => Point::tree(0, 1e9),
                    };
                    let d = space.dist(x, &far)?;
                    if d == 0.0 {
                        return Ok(x.clone());
                    }
                    space.combine(x, &far, (delta / d).min(1.0))
                }
            },
        }
    }
}

/// (HM_e): every update is displaced by at most `δ_k` (`k` the half-step
/// index, so `δ_{2n}` for the Halpern step and `δ_{2n+1}` for the Mann step).
pub fn run_hm_errors(
    problem: &HMProblem,
    schedule: &Schedule,
    deltas: &Sequence,
    rule: &Perturbation,
    steps: usize,
) -> Result<Trajectory> {
    let p = problem;
    let opts = RunOptions::default();
    hm_kernel(&p.space, &p.t, &p.u, &p.anchor, &p.x0, schedule, steps, &opts, |k, x| {
        let d = deltas.eval(k as u64);
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::usage(format!("delta_{k} = {d} must be a finite nonnegative real")));
        }
        rule.displace(&p.space, &x, d, k)
    })
}

/// (H): `y_{n+1} = (1−α_n)T(y_n) ⊕ α_n u`.
pub fn run_halpern(
    space: &SpaceModel,
    t: &NonexpansiveMap,
    anchor: &Point,
    y0: &Point,
    alpha: &Sequence,
    steps: usize,
) -> Result<Trajectory> {
    check_steps(steps)?;
    let mut traj = Trajectory::start("y", space, y0.clone(), 1, true, false);
    let mut y = y0.clone();
    for n in 0..=steps {
        let ty = t.eval(&y)?;
        traj.set_residuals(Some(space.dist(&ty, &y)?), None);
        if n == steps {
            break;
        }
        let a = unit(alpha.eval(n as u64), "alpha", n as u64)?;
        let next = space.combine(&ty, anchor, a)?;
        traj.push(next.clone(), space.dist(&y, &next)?);
        y = next;
    }
    Ok(traj)
}

/// (KM): `x_{n+1} = (1−β_n)U(x_n) ⊕ β_n x_n`.
pub fn run_km(space: &SpaceModel, u: &NonexpansiveMap, x0: &Point, beta: &Sequence, steps: usize) -> Result<Trajectory> {
    check_steps(steps)?;
    let mut traj = Trajectory::start("x", space, x0.clone(), 1, false, true);
    let mut x = x0.clone();
    for n in 0..=steps {
        let ux = u.eval(&x)?;
        traj.set_residuals(None, Some(space.dist(&ux, &x)?));
        if n == steps {
            break;
        }
        let b = unit(beta.eval(n as u64), "beta", n as u64)?;
        let next = space.combine(&ux, &x, b)?;
        traj.push(next.clone(), space.dist(&x, &next)?);
        x = next;
    }
    Ok(traj)
}

/// (T-KM): `x_{n+1} = (1−β_n)U(γ_n x_n) + β_n γ_n x_n`, realized as the even
/// iterates of (HM) with `T = Id`, `u = 0`, `α_n = 1 − γ_n`.
pub fn run_tkm(
    space: &SpaceModel,
    u: &NonexpansiveMap,
    x0: &Point,
    beta: &Sequence,
    gamma: &Sequence,
    steps: usize,
) -> Result<Trajectory> {
    let SpaceModel::Euclidean { dim } = space else {
        return Err(Error::usage("(T-KM) needs a linear model for the zero vector"));
    };
    check_steps(steps)?;
    for n in 0..=steps as u64 {
        let g = gamma.eval(n);
        if !(g > 0.0 && g <= 1.0) {
            return Err(Error::usage(format!("gamma_{n} = {g} outside (0,1]")));
        }
    }
    let alpha = gamma.map("1 - gamma_n", |g| 1.0 - g);
    let schedule = Schedule::new(alpha, beta.clone());
    let zero = Point::Euclidean(vec![0.0; *dim]);
    let opts = RunOptions { stride: 1, residuals: false };
    let full = hm_kernel(space, &NonexpansiveMap::identity(), u, &zero, x0, &schedule, 2 * steps, &opts, |_, x| Ok(x))?;
    full.subsequence(2, 0, "x")
}
