//! Strongly convergent forward-backward (GFB) and Douglas–Rachford (GDR)
//! iterations in ℝᵈ, and their reduction to (HM) with `T = Id`.

use crate::error::{Error, Result};
use crate::geometry::{GeodesicSpace, Point, SpaceModel};
use crate::operators::{reflected_resolvent, resolvent, ConvexSet, MonotoneOpSpec, NonexpansiveMap};
use crate::schemes::{hm_kernel, RunOptions, Schedule, Sequence, Trajectory, BAND_PROBE};

/// Data of a splitting problem `0 ∈ U₁x + U₂x`.
#[derive(Clone, Debug)]
pub struct SplitProblem {
    pub u1: MonotoneOpSpec,
    pub u2: MonotoneOpSpec,
    pub c: f64,
    pub anchor: Point,
    pub x0: Point,
    /// Band parameter for `(β_n)`; when set, the band is checked on the
    /// first [`BAND_PROBE`] indices.
    pub gamma: Option<f64>,
}

impl SplitProblem {
    pub fn new(u1: MonotoneOpSpec, u2: MonotoneOpSpec, c: f64, anchor: Point, x0: Point) -> Result<Self> {
        u1.validate()?;
        u2.validate()?;
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::usage(format!("step c = {c} must be positive")));
        }
        let (Point::Euclidean(a), Point::Euclidean(x)) = (&anchor, &x0) else {
            return Err(Error::usage("splitting runs in the Euclidean model"));
        };
        if a.len() != x.len() {
            return Err(Error::usage("u and x0 have different dimensions"));
        }
        Ok(SplitProblem { u1, u2, c, anchor, x0, gamma: None })
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::usage(format!("band parameter {gamma} outside (0, 1]")));
        }
        self.gamma = Some(gamma);
        Ok(self)
    }

    pub fn space(&self) -> SpaceModel {
        SpaceModel::euclidean(self.x0.flat_coords().len())
    }

    /// Cocoercivity constant of `U₂`; `None` for the zero operator.
    fn delta(&self) -> Result<Option<f64>> {
        match (&self.u2, self.u2.cocoercivity()) {
            (MonotoneOpSpec::Zero, _) => Ok(None),
            (_, Some(d)) => Ok(Some(d)),
            _ => Err(Error::usage("the forward operator U2 must be single-valued and cocoercive")),
        }
    }

    /// Averagedness `2δ/(4δ − c)` of `J_{cU₁}∘(Id − cU₂)`, checking `c ≤ 2δ`.
    pub fn gfb_alpha(&self) -> Result<f64> {
        match self.delta()? {
            None => Ok(0.5),
            Some(d) => {
                if self.c > 2.0 * d * (1.0 + 1e-12) {
                    return Err(Error::usage(format!("step c = {} exceeds 2δ = {}", self.c, 2.0 * d)));
                }
                Ok((2.0 * d / (4.0 * d - self.c)).min(1.0))
            }
        }
    }

    /// `J_{cU₁}∘(Id − cU₂)`.
    pub fn forward_backward_map(&self) -> Result<NonexpansiveMap> {
        self.gfb_alpha()?;
        let (u1, u2, c) = (self.u1.clone(), self.u2.clone(), self.c);
        NonexpansiveMap::new("J[U1](Id - cU2)", 1.0, move |x| {
            let v = x.coords()?;
            let g = u2.apply(v)?;
            let f: Vec<f64> = v.iter().zip(&g).map(|(a, b)| a - c * b).collect();
            Ok(Point::Euclidean(resolvent(&u1, c, &f)?))
        })
    }

    /// `R_{cU₁}∘R_{cU₂}`.
    pub fn reflection_map(&self) -> NonexpansiveMap {
        let (u1, u2, c) = (self.u1.clone(), self.u2.clone(), self.c);
        NonexpansiveMap::new("R[U1]R[U2]", 1.0, move |x| {
            let r2 = reflected_resolvent(&u2, c, x.coords()?)?;
            Ok(Point::Euclidean(reflected_resolvent(&u1, c, &r2)?))
        })
        .expect("valid certificate")
    }

    fn check_band(&self, beta: &Sequence, lo: f64) -> Result<()> {
        let Some(g) = self.gamma else { return Ok(()) };
        for n in 0..BAND_PROBE {
            let b = beta.eval(n);
            if b < lo + g - 1e-15 || b > 1.0 - g + 1e-15 {
                return Err(Error::usage(format!("beta_{n} = {b} outside [{}, {}]", lo + g, 1.0 - g)));
            }
        }
        Ok(())
    }
}

/// `β̃_n = 1 − α + αβ_n`: the Mann parameters after writing an α-averaged
/// `U = (1−α)Id + αU′` in terms of `U′`.
pub fn averaged_reduce(beta: &Sequence, alpha: f64) -> Result<Sequence> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::usage(format!("averaging parameter {alpha} outside (0, 1]")));
    }
    Ok(beta.map(format!("1 - {alpha} + {alpha}*beta_n"), move |b| 1.0 - alpha + alpha * b))
}

fn in_unit(v: f64, what: &str, n: u64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::usage(format!("{what}_{n} = {v} outside [0,1]")))
    }
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect()
}

fn check_steps(steps: usize, min: usize) -> Result<()> {
    if steps < min {
        return Err(Error::usage(format!("steps must be at least {min}")));
    }
    Ok(())
}

/// (GFB): `x_{2n+1} = (1−α_n)x_{2n} + α_n u`,
/// `x_{2n+2} = (1−β_n)J_{cU₁}(x_{2n+1} − cU₂x_{2n+1}) + β_n x_{2n+1}`.
///
/// `β_n` may be negative down to `1 − (4δ−c)/(2δ)`; only the reduced
/// `β̃_n` must lie in `[0, 1]`.
pub fn run_gfb(problem: &SplitProblem, schedule: &Schedule, steps: usize) -> Result<Trajectory> {
    check_steps(steps, 1)?;
    let a = problem.gfb_alpha()?;
    problem.check_band(&schedule.beta, 1.0 - 1.0 / a)?;
    let space = problem.space();
    let fb = problem.forward_backward_map()?;
    let u = problem.anchor.coords()?.to_vec();
    let mut traj = Trajectory::start("x", &space, problem.x0.clone(), 1, false, true);
    let mut x = problem.x0.coords()?.to_vec();
    for k in 0..=steps {
        let px = Point::Euclidean(x.clone());
        let ux = fb.eval(&px)?;
        traj.set_residuals(None, Some(space.dist(&ux, &px)?));
        if k == steps {
            break;
        }
        let n = (k / 2) as u64;
        let next = if k % 2 == 0 {
            let al = schedule.alpha.eval(n);
            in_unit(al, "alpha", n)?;
            lerp(&x, &u, al)
        } else {
            let b = schedule.beta.eval(n);
            in_unit(1.0 - a + a * b, "beta~", n)?;
            lerp(ux.coords()?, &x, b)
        };
        let next = Point::Euclidean(next);
        traj.push(next.clone(), space.dist(&px, &next)?);
        x = next.coords()?.to_vec();
    }
    Ok(traj)
}

/// The same run as [`run_gfb`], generated as (HM) with `T = Id`,
/// `U = U′` the nonexpansive part of `J_{cU₁}∘(Id − cU₂)`, and `β̃_n`.
pub fn run_gfb_via_hm(problem: &SplitProblem, schedule: &Schedule, steps: usize) -> Result<Trajectory> {
    let a = problem.gfb_alpha()?;
    let fb = problem.forward_backward_map()?;
    let inner = NonexpansiveMap::new("U'", 1.0, move |x| {
        let v = x.coords()?;
        let f = fb.eval(x)?;
        Ok(Point::Euclidean(f.coords()?.iter().zip(v).map(|(fi, vi)| (fi - (1.0 - a) * vi) / a).collect()))
    })?;
    let reduced = Schedule::new(schedule.alpha.clone(), averaged_reduce(&schedule.beta, a)?);
    let opts = RunOptions { stride: 1, residuals: false };
    let sp = problem.space();
    hm_kernel(&sp, &NonexpansiveMap::identity(), &inner, &problem.anchor, &problem.x0, &reduced, steps, &opts, |_, x| Ok(x))
}

/// The three streams of a (GDR) run.
#[derive(Clone, Debug)]
pub struct GdrRun {
    /// `x_0, …, x_steps` (half-step indexing as in (HM)).
    pub x: Trajectory,
    /// `y_n = J_{cU₂}(x_{2n+1})`.
    pub y: Trajectory,
    /// `z_n = J_{cU₁}(2y_n − x_{2n+1})`.
    pub z: Trajectory,
}

/// (GDR): `x_{2n+1} = (1−α_n)x_{2n} + α_n u`, `y_n = J_{cU₂}(x_{2n+1})`,
/// `z_n = J_{cU₁}(2y_n − x_{2n+1})`, `x_{2n+2} = x_{2n+1} + (1−β_n)(z_n − y_n)`.
pub fn run_gdr(problem: &SplitProblem, schedule: &Schedule, steps: usize) -> Result<GdrRun> {
    check_steps(steps, 2)?;
    problem.check_band(&schedule.beta, -1.0)?;
    let space = problem.space();
    let r = problem.reflection_map();
    let (u1, u2, c) = (&problem.u1, &problem.u2, problem.c);
    let u = problem.anchor.coords()?.to_vec();
    let mut xt = Trajectory::start("x", &space, problem.x0.clone(), 1, false, true);
    let mut yt: Option<Trajectory> = None;
    let mut zt: Option<Trajectory> = None;
    let mut x = problem.x0.coords()?.to_vec();
    let extend = |t: &mut Option<Trajectory>, name: &str, p: Vec<f64>| -> Result<()> {
        let p = Point::Euclidean(p);
        match t {
            None => *t = Some(Trajectory::start(name, &space, p, 1, false, false)),
            Some(t) => {
                let d = space.dist(t.last(), &p)?;
                t.push(p, d);
            }
        }
        Ok(())
    };
    for k in 0..=steps {
        let px = Point::Euclidean(x.clone());
        xt.set_residuals(None, Some(space.dist(&r.eval(&px)?, &px)?));
        if k == steps {
            break;
        }
        let n = (k / 2) as u64;
        let next = if k % 2 == 0 {
            let al = schedule.alpha.eval(n);
            in_unit(al, "alpha", n)?;
            lerp(&x, &u, al)
        } else {
            let b = schedule.beta.eval(n);
            in_unit((1.0 + b) / 2.0, "beta~", n)?;
            let y = resolvent(u2, c, &x)?;
            let refl: Vec<f64> = y.iter().zip(&x).map(|(yi, xi)| 2.0 * yi - xi).collect();
            let z = resolvent(u1, c, &refl)?;
            let next = x.iter().zip(z.iter().zip(&y)).map(|(xi, (zi, yi))| xi + (1.0 - b) * (zi - yi)).collect();
            extend(&mut yt, "y", y)?;
            extend(&mut zt, "z", z)?;
            next
        };
        let next = Point::Euclidean(next);
        xt.push(next.clone(), space.dist(&px, &next)?);
        x = next.coords()?.to_vec();
    }
    Ok(GdrRun { x: xt, y: yt.expect("steps >= 2"), z: zt.expect("steps >= 2") })
}

/// The `x`-stream of [`run_gdr`] generated as (HM) with `T = Id`,
/// `U = R_{cU₁}∘R_{cU₂}` and `β̃_n = (1 + β_n)/2`.
pub fn run_gdr_via_hm(problem: &SplitProblem, schedule: &Schedule, steps: usize) -> Result<Trajectory> {
    let reduced = Schedule::new(schedule.alpha.clone(), averaged_reduce(&schedule.beta, 0.5)?);
    let opts = RunOptions { stride: 1, residuals: false };
    let sp = problem.space();
    hm_kernel(&sp, &NonexpansiveMap::identity(), &problem.reflection_map(), &problem.anchor, &problem.x0, &reduced, steps, &opts, |_, x| Ok(x))
}

/// Named splitting instances with a closed-form `zer(U₁ + U₂)`.
#[derive(Clone, Debug)]
pub struct SplitFixture {
    pub name: &'static str,
    pub problem: SplitProblem,
    pub zeros: ConvexSet,
    /// `P_{zer}(u)` where the limit is pinned down.
    pub limit: Option<Point>,
}

pub const SPLIT_FIXTURES: [&str; 2] = ["S1", "S2"];

pub fn split_fixture(name: &str) -> Result<SplitFixture> {
    match name {
        // U₁ = ∂ι_[0,1], U₂ = ∇(x−3)²/2 (δ = 1), c = 1, u = x₀ = 0.
        "S1" => Ok(SplitFixture {
            name: "S1",
            problem: SplitProblem::new(
                MonotoneOpSpec::normal_cone_interval(0.0, 1.0),
                MonotoneOpSpec::quadratic_1d(3.0),
                1.0,
                Point::scalar(0.0),
                Point::scalar(0.0),
            )?,
            zeros: ConvexSet::Singleton { point: Point::scalar(1.0) },
            limit: Some(Point::scalar(1.0)),
        }),
        // U₁ = ∂ι_[0,1], U₂ = ∂ι_[0.5,2], c = 1, u = x₀ = 3.
        "S2" => Ok(SplitFixture {
            name: "S2",
            problem: SplitProblem::new(
                MonotoneOpSpec::normal_cone_interval(0.0, 1.0),
                MonotoneOpSpec::normal_cone_interval(0.5, 2.0),
                1.0,
                Point::scalar(3.0),
                Point::scalar(3.0),
            )?,
            zeros: ConvexSet::Interval { lo: 0.5, hi: 1.0 },
            limit: None,
        }),
        _ => Err(Error::usage(format!("unknown splitting fixture {name:?}; known: S1, S2"))),
    }
}
