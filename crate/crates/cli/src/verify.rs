//! `hm verify`: named verification suites.

use hm_core::geometry::{GeodesicSpace, Point, SpaceModel};
use hm_core::rates::{ar_rates_rho, meta_mu, CounterFn, Real};
use hm_core::schemes::{fixture, run_hm, Residual, Schedule, FIXTURES};
use hm_core::verify::{
    check_projection_variational, empirical_metastability, run_axiom_suite, set_net, threshold_of, BrokenCombine,
    ThresholdReport,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::SCHEMA_VERSION;
use crate::{usage, CliResult};

pub const SUITES: [&str; 7] =
    ["axioms:euclidean", "axioms:hyperboloid", "axioms:tree", "negative:broken-W2", "projection", "soundness", "all"];

pub const AXIOM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub suite: String,
    pub samples: usize,
    pub seed: u64,
    pub passed: bool,
    pub results: Vec<SuiteResult>,
}

fn axioms(name: &str, space: &dyn GeodesicSpace, samples: usize, seed: u64) -> CliResult<SuiteResult> {
    let r = run_axiom_suite(space, samples, AXIOM_TOL, seed)?;
    Ok(SuiteResult { suite: name.into(), passed: r.all_passed(), detail: serde_json::to_value(&r)? })
}

/// The oracle limit of every fixture satisfies the variational inequality
/// over a net of its fixed-point set, and a displaced candidate does not.
pub fn projection_suite(samples: usize) -> CliResult<SuiteResult> {
    let mut rows = Vec::new();
    let mut passed = true;
    for name in FIXTURES {
        let f = fixture(name)?;
        let sp = &f.problem.space;
        let ys = set_net(sp, &f.fix_set, samples)?;
        let good = check_projection_variational(sp, &ys, &f.problem.anchor, &f.limit, AXIOM_TOL)?;
        let wrong = perturbed_candidate(sp, &f.limit, &f.problem.anchor, &ys)?;
        let bad = check_projection_variational(sp, &ys, &f.problem.anchor, &wrong, AXIOM_TOL)?;
        passed &= good.holds && !bad.holds;
        rows.push(json!({
            "fixture": name,
            "samples": good.samples,
            "oracle_holds": good.holds,
            "oracle_worst": good.worst,
            "perturbed_candidate": wrong.to_string(),
            "perturbed_holds": bad.holds,
            "perturbed_worst": bad.worst,
        }));
    }
    Ok(SuiteResult { suite: "projection".into(), passed, detail: Value::Array(rows) })
}

/// A point of the set well away from `limit` (the sample farthest from it),
/// moved a third of the way back toward `limit` so it stays in the set.
/// For a one-point set in ℝᵈ, the reflection of `anchor` half-way through it.
fn perturbed_candidate(sp: &SpaceModel, limit: &Point, anchor: &Point, ys: &[Point]) -> CliResult<Point> {
    let mut far = limit.clone();
    let mut best = 0.0;
    for y in ys {
        let d = sp.dist(limit, y)?;
        if d > best {
            best = d;
            far = y.clone();
        }
    }
    if best == 0.0 {
        let (p, u) = (limit.coords().map_err(|_| usage("no perturbed candidate for a one-point set"))?, anchor.coords()?);
        return Ok(Point::vector(p.iter().zip(u).map(|(p, u)| p - 0.5 * (u - p)).collect::<Vec<_>>()));
    }
    Ok(sp.combine(limit, &far, 2.0 / 3.0)?)
}

pub const SOUNDNESS_HORIZON: usize = 100_000;
pub const SOUNDNESS_EPS: [&str; 3] = ["1/2", "1/10", "1/100"];

/// E1 with `α_n = 1/(n+1)`, `β_n ≡ ½`: empirical thresholds against
/// `ρ₁`–`ρ₃` and the metastability index for `f(n) = 2n` against `μ`.
pub fn soundness_reports(horizon: usize) -> CliResult<Vec<ThresholdReport>> {
    let f = fixture("E1")?;
    let schedule = Schedule::harmonic(0.5)?;
    let m = schedule.moduli()?;
    let n = f.problem.n;
    let tr = run_hm(&f.problem, &schedule, horizon + 1)?;
    let rho = ar_rates_rho(m, n)?;
    let steps = &tr.residual(Residual::Prev).expect("always recorded")[1..];
    let du = tr.residual(Residual::U).expect("recorded by run_hm");
    let dt = tr.residual(Residual::T).expect("recorded by run_hm");
    let mut out = Vec::new();
    for eps in SOUNDNESS_EPS {
        let e = Real::parse(eps)?;
        let ef = e.to_f64_upper();
        for (label, col, rate) in [
            ("d(x_{n+1},x_n) vs rho1", steps, &rho.rho1),
            ("d(U x_n,x_n) vs rho2", du, &rho.rho2),
            ("d(T x_n,x_n) vs rho3", dt, &rho.rho3),
        ] {
            let col = &col[..=horizon.min(col.len() - 1)];
            out.push(ThresholdReport::new(label, eps, threshold_of(col, ef), rate.eval(&e)?, col.len() - 1));
        }
    }
    let g = CounterFn::affine(2, 0);
    let e = Real::parse("1/2")?;
    let xs = tr.points()?;
    let idx = empirical_metastability(&tr.space, xs, 0.5, &g, horizon)?;
    out.push(ThresholdReport::new("metastability f(n)=2n vs mu", "1/2", idx, meta_mu(m, n)?.eval(&e, &g)?, horizon));
    Ok(out)
}

fn soundness_suite() -> CliResult<SuiteResult> {
    let reports = soundness_reports(SOUNDNESS_HORIZON)?;
    let passed = reports.iter().all(|r| r.sound);
    Ok(SuiteResult { suite: "soundness".into(), passed, detail: serde_json::to_value(&reports)? })
}

fn run_one(name: &str, samples: usize, seed: u64) -> CliResult<SuiteResult> {
    match name {
        "axioms:euclidean" => axioms(name, &SpaceModel::euclidean(2), samples, seed),
        "axioms:hyperboloid" => axioms(name, &SpaceModel::Hyperboloid, samples, seed),
        "axioms:tree" => axioms(name, &SpaceModel::spider(), samples, seed),
        "negative:broken-W2" => axioms(name, &BrokenCombine(SpaceModel::euclidean(2)), samples, seed),
        "projection" => projection_suite(samples),
        "soundness" => soundness_suite(),
        _ => Err(usage(format!("unknown suite {name:?}; known: {}", SUITES.join(", ")))),
    }
}

/// Runs `suite` (`all` means every suite except the negative control).
pub fn cmd_verify(suite: &str, samples: usize, seed: u64) -> CliResult<VerifyReport> {
    if samples == 0 {
        return Err(usage("samples must be at least 1"));
    }
    let names: Vec<&str> = match suite {
        "all" => SUITES.iter().copied().filter(|s| *s != "all" && !s.starts_with("negative:")).collect(),
        s if SUITES.contains(&s) => vec![s],
        s => return Err(usage(format!("unknown suite {s:?}; known: {}", SUITES.join(", ")))),
    };
    let results = names.into_iter().map(|n| run_one(n, samples, seed)).collect::<CliResult<Vec<_>>>()?;
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        suite: suite.into(),
        samples,
        seed,
        passed: results.iter().all(|r| r.passed),
        results,
    })
}
