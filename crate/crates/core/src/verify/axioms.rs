//! Randomized checks of the W-hyperbolic axioms, CN⁺, uniform convexity and
//! the quasi-linearization laws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::{GeodesicSpace, Point, SpaceModel};

/// One named check: `worst` is the largest violation seen (≤ 0 when every
/// sample satisfied it with room to spare).
#[derive(Clone, Debug, Serialize)]
pub struct AxiomCheck {
    pub name: String,
    pub passed: bool,
    pub worst_violation: f64,
    pub failures: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub space: String,
    pub samples: usize,
    pub tol: f64,
    pub seed: u64,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

const CHECKS: [&str; 13] = [
    "metric", "W1", "W2", "W3", "W4", "CN+", "CN-", "uniform_convexity", "quasilin_i", "quasilin_ii", "quasilin_iii",
    "quasilin_iv", "cauchy_schwarz",
];

/// Largest violations of one sample, indexed like `CHECKS`.
fn sample_violations(space: &dyn GeodesicSpace, rng: &mut ChaCha8Rng, radius: f64) -> Result<[f64; 13]> {
    let [x, y, z, w] = [0; 4].map(|_| space.sample(rng, radius));
    let lam: f64 = rng.gen();
    let lam2: f64 = rng.gen();
    let d = |a: &Point, b: &Point| space.dist(a, b);
    let q = |a: &Point, b: &Point, c: &Point, e: &Point| space.quasilin(a, b, c, e);
    let m = space.combine(&x, &y, lam)?;
    let mut v = [f64::NEG_INFINITY; 13];

    let (xy, yz, xz) = (d(&x, &y)?, d(&y, &z)?, d(&x, &z)?);
    v[0] = [xz - xy - yz, (xy - d(&y, &x)?).abs(), d(&x, &x)?].into_iter().fold(f64::NEG_INFINITY, f64::max);
    v[1] = d(&z, &m)? - (1.0 - lam) * xz - lam * yz;
    v[2] = (d(&m, &space.combine(&x, &y, lam2)?)? - (lam - lam2).abs() * xy).abs();
    v[3] = d(&m, &space.combine(&y, &x, 1.0 - lam)?)?;
    v[4] = d(&m, &space.combine(&z, &w, lam)?)? - (1.0 - lam) * xz - lam * d(&y, &w)?;
    v[5] = -space.cn_plus_gap(&z, &x, &y, lam)?;
    v[6] = -space.cn_plus_gap(&z, &x, &y, 0.5)?;

    // d(x,a), d(y,a) ≤ r and d(x,y) = εr ⇒ d(mid, a) ≤ (1 − ε²/8) r.
    let r = xz.max(yz);
    if r > 1e-9 {
        let eps = (xy / r).min(2.0);
        v[7] = d(&space.combine(&x, &y, 0.5)?, &z)? - (1.0 - eps * eps / 8.0) * r;
    }

    v[8] = (q(&x, &y, &x, &y)? - xy * xy).abs();
    v[9] = (q(&x, &y, &z, &w)? - q(&z, &w, &x, &y)?).abs();
    v[10] = (q(&y, &x, &z, &w)? + q(&x, &y, &z, &w)?).abs();
    v[11] = (q(&x, &y, &z, &w)? + q(&x, &y, &w, &m)? - q(&x, &y, &z, &m)?).abs();
    v[12] = q(&x, &y, &z, &w)?.abs() - xy * d(&z, &w)?;
    Ok(v)
}

/// Samples `n_samples` configurations (in parallel, reproducibly from
/// `seed`) and records the worst violation of each check.
pub fn run_axiom_suite(space: &dyn GeodesicSpace, n_samples: usize, tol: f64, seed: u64) -> Result<AxiomReport> {
    const RADIUS: f64 = 3.0;
    let per_sample: Vec<[f64; 13]> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            sample_violations(space, &mut rng, RADIUS)
        })
        .collect::<Result<_>>()?;
    let checks = CHECKS
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let worst = per_sample.iter().map(|v| v[k]).fold(f64::NEG_INFINITY, f64::max);
            let failures = per_sample.iter().filter(|v| !(v[k] <= tol)).count();
            AxiomCheck { name: name.to_string(), passed: failures == 0, worst_violation: worst, failures }
        })
        .collect();
    Ok(AxiomReport { space: space.name(), samples: n_samples, tol, seed, checks })
}

/// Negative control: a model whose convexity function uses `λ²` in place
/// of `λ`, so points still lie on geodesics but (W2) fails.
#[derive(Clone, Debug)]
pub struct BrokenCombine(pub SpaceModel);

impl GeodesicSpace for BrokenCombine {
    fn name(&self) -> String {
        format!("broken combine on {}", self.0.name())
    }

    fn validate(&self, p: &Point) -> Result<()> {
        self.0.validate(p)
    }

    fn dist(&self, a: &Point, b: &Point) -> Result<f64> {
        self.0.dist(a, b)
    }

    fn combine(&self, a: &Point, b: &Point, lambda: f64) -> Result<Point> {
        self.0.combine(a, b, lambda * lambda)
    }

    fn sample(&self, rng: &mut dyn rand::RngCore, radius: f64) -> Point {
        self.0.sample(rng, radius)
    }
}
