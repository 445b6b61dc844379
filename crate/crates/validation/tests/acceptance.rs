//! Acceptance criteria 1–9. Runs as a plain binary so every criterion
//! prints its verdict line regardless of outcome; exits nonzero if any fail.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use hm_cli::verify::{projection_suite, soundness_reports};
use hm_cli::{cmd_run, RunConfig};
use hm_core::geometry::{GeodesicSpace, Point, SpaceModel};
use hm_core::operators::NonexpansiveMap;
use hm_core::rates::{
    ar_rates, ar_rates_rho, closed_form, error_rates, meta_mu, splitting_rates, CounterFn, Moduli, Natural, RateFn,
    Real, SplitRate,
};
use hm_core::schemes::{
    fixture, run_halpern, run_hm, run_hm_errors, run_tkm, HMProblem, Perturbation, Schedule, Sequence, FIXTURES,
};
use hm_core::splitting::{averaged_reduce, run_gdr, run_gdr_via_hm, run_gfb, run_gfb_via_hm, split_fixture};
use hm_core::verify::{
    brute_force_projection, run_axiom_suite, threshold_of, BrokenCombine, SetSampler,
};
use rug::Rational;

/// One verdict: `Ok(detail)` passes, `Err(detail)` fails.
type Verdict = Result<String, String>;

fn ensure(ok: bool, failures: &mut Vec<String>, msg: impl Into<String>) {
    if !ok {
        failures.push(msg.into());
    }
}

fn verdict(failures: Vec<String>, pass_detail: String) -> Verdict {
    if failures.is_empty() {
        Ok(pass_detail)
    } else {
        Err(failures.join("; "))
    }
}

fn within(elapsed: Duration, limit_s: u64, failures: &mut Vec<String>) {
    ensure(elapsed.as_secs_f64() < limit_s as f64, failures, format!("runtime {elapsed:.2?} exceeds {limit_s} s"));
}

fn q(p: i64, d: i64) -> Rational {
    Rational::from((p, d))
}

fn real(p: i64, d: i64) -> Real {
    Real::positive(q(p, d)).unwrap()
}

fn le(a: &Natural, b: &Natural) -> bool {
    a.le_certified(b) == Some(true)
}

fn x(p: &Point) -> f64 {
    p.coords().unwrap()[0]
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut failures = Vec::new();
    let spaces: [(&str, Box<dyn GeodesicSpace>); 3] = [
        ("euclidean R^2", Box::new(SpaceModel::euclidean(2))),
        ("hyperboloid H^2", Box::new(SpaceModel::Hyperboloid)),
        ("3-leg tree", Box::new(SpaceModel::spider())),
    ];
    let mut worst = Vec::new();
    for (name, sp) in &spaces {
        let r = run_axiom_suite(sp.as_ref(), 10_000, 1e-9, 1).unwrap();
        for c in &r.checks {
            ensure(c.passed, &mut failures, format!("{name}: {} fails ({} samples, worst {:e})", c.name, c.failures, c.worst_violation));
        }
        let w = r.checks.iter().map(|c| c.worst_violation).fold(f64::NEG_INFINITY, f64::max);
        worst.push(format!("{name} worst {w:.1e}"));
    }
    let neg = run_axiom_suite(&BrokenCombine(SpaceModel::euclidean(2)), 10_000, 1e-9, 1).unwrap();
    ensure(!neg.all_passed(), &mut failures, "negative control passed");
    ensure(neg.check("W2").is_some_and(|c| !c.passed), &mut failures, "negative control does not violate W2");
    let elapsed = start.elapsed();
    within(elapsed, 30, &mut failures);
    verdict(failures, format!("13 checks x 3 models x 10^4 samples, {}; negative control fails; {elapsed:.2?}", worst.join(", ")))
}

/// `⌊e^x⌋ + c` checked against `f64` exp: exactly where the double is
/// unambiguous, by logarithm elsewhere.
fn closed_form_oracle(v: &Natural, x: f64, c: u64) -> bool {
    let e = x.exp();
    if e < 2f64.powi(40) && (e - e.floor()).min(e.ceil() - e) > 1e-3 {
        return v.to_u64() == Some(e.floor() as u64 + c);
    }
    match v.lower_int() {
        Some(i) if v.is_exact() => {
            let (m, exp) = i.to_f64_exp();
            ((m.ln() + exp as f64 * std::f64::consts::LN_2) - x).abs() < 1e-9 * x.max(1.0)
        }
        _ => (v.log2_lower() - x / std::f64::consts::LN_2).abs() < 1e-6 * x,
    }
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let mut failures = Vec::new();
    let m = Moduli::harmonic(q(1, 2)).unwrap();
    ensure(m.gamma1.at(q(1, 4)).unwrap() == Natural::from_u64(4), &mut failures, "Gamma1(0.25) != 4");
    ensure(m.gamma2.at(2).unwrap() == Natural::from_u64(7), &mut failures, "Gamma2(2) != 7");

    let (mut eq_fail, mut dom_fail, mut oracle_fail, mut total) = (Vec::new(), Vec::new(), Vec::new(), 0);
    for n in [1u64, 2, 4] {
        for gamma in [q(1, 4), q(1, 2)] {
            let m = Moduli::harmonic(gamma.clone()).unwrap();
            let theta = ar_rates(&m, n).unwrap();
            let rho = ar_rates_rho(&m, n).unwrap();
            for eps in [q(4, 1), q(1, 1), q(1, 4)] {
                total += 1;
                let e = Real::positive(eps.clone()).unwrap();
                let (ef, gf, nf) = (eps.to_f64(), gamma.to_f64(), n as f64);
                let at = format!("N={n} gamma={gamma} eps={eps}");

                let t1 = theta.theta1.eval(&e).unwrap();
                let t1c = closed_form::theta1(n, &eps).unwrap();
                if !closed_form_oracle(&t1c, 12.0 * nf / ef + 2.0, 1) {
                    oracle_fail.push(format!("theta1 closed form at {at}"));
                }
                if t1 != t1c {
                    eq_fail.push(format!("{at}: {t1} vs {t1c}"));
                }
                if !le(&t1, &t1c) {
                    dom_fail.push(format!("theta1 at {at}"));
                }

                let s20 = (20.0 * nf / (gf * ef)).powi(2);
                let s14 = (14.0 * nf / (gf * ef)).powi(2);
                for (name, r, c, x, plus) in [
                    ("rho1", &rho.rho1, closed_form::rho1(n, &gamma, &eps).unwrap(), s20 + 3.0, 2),
                    ("rho2", &rho.rho2, closed_form::rho2(n, &gamma, &eps).unwrap(), s14 + 3.0, 3),
                    ("rho3", &rho.rho3, closed_form::rho3(n, &gamma, &eps).unwrap(), s20 + 3.0, 3),
                ] {
                    if !closed_form_oracle(&c, x, plus) {
                        oracle_fail.push(format!("{name} closed form at {at}"));
                    }
                    let v = r.eval(&e).unwrap();
                    if !le(&v, &c) {
                        dom_fail.push(format!("{name} at {at}"));
                    }
                }
            }
        }
    }
    let mut lines = Vec::new();
    lines.push(format!("Gamma1(1/4)=4, Gamma2(2)=7: {}", if failures.is_empty() { "ok" } else { "FAIL" }));
    lines.push(format!("closed forms vs f64 oracle: {}/{} values agree", 4 * total - oracle_fail.len(), 4 * total));
    lines.push(format!("theta1 == displayed closed form: {}/{total} grid points", total - eq_fail.len()));
    lines.push(format!("theta1/rho1/rho2/rho3 <= displayed closed forms: {}/{} comparisons certified", 4 * total - dom_fail.len(), 4 * total));
    for l in &lines {
        println!("    {l}");
    }
    if !oracle_fail.is_empty() {
        failures.push(format!("closed-form evaluation disagrees with f64 oracle: {}", oracle_fail.join(", ")));
    }
    if !eq_fail.is_empty() {
        failures.push(format!("theta1 recipe differs from displayed closed form at {} grid points (e.g. {})", eq_fail.len(), eq_fail[0]));
    }
    if !dom_fail.is_empty() {
        failures.push(format!("not dominated by displayed closed form: {}", dom_fail.join(", ")));
    }
    let elapsed = start.elapsed();
    within(elapsed, 5, &mut failures);
    verdict(failures, format!("{}; {elapsed:.2?}", lines.join("; ")))
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut detail = Vec::new();
    for name in FIXTURES {
        let f = fixture(name).unwrap();
        let p = &f.problem;
        let sampler = SetSampler::for_set(&p.space, &f.fix_set).unwrap();
        let oracle = brute_force_projection(&p.space, &sampler, &p.anchor, 1e-12).unwrap();
        let agree = p.space.dist(&oracle, &f.limit).unwrap();
        ensure(agree < 1e-6, &mut failures, format!("{name}: brute-force and closed-form projections differ by {agree:e}"));
        let tr = run_hm(p, &Schedule::harmonic(0.5).unwrap(), 100_000).unwrap();
        let d = p.space.dist(tr.last(), &oracle).unwrap();
        ensure(d <= 0.05, &mut failures, format!("{name}: d(x_100000, P_F u) = {d:e}"));
        detail.push(format!("{name} {d:.1e}"));
    }
    let elapsed = start.elapsed();
    within(elapsed, 60, &mut failures);
    verdict(failures, format!("d(x_100000, P_F u): {}; {elapsed:.2?}", detail.join(", ")))
}

fn criterion_4() -> Verdict {
    let mut failures = Vec::new();
    let reports = soundness_reports(100_000).unwrap();
    for r in &reports {
        println!("    {}", abbreviate(&r.line()));
        ensure(r.sound, &mut failures, format!("unsound: {}", abbreviate(&r.line())));
        ensure(r.empirical_index.is_some(), &mut failures, format!("{} eps={} not reached within 10^5", r.label, r.eps));
    }
    ensure(reports.len() == 10, &mut failures, format!("expected 10 reports, got {}", reports.len()));
    verdict(failures, format!("{} reports sound (rho1-3 at eps 1/2, 1/10, 1/100; mu at 1/2, f(n)=2n)", reports.len()))
}

fn abbreviate(line: &str) -> String {
    let mut out = String::new();
    for word in line.split(' ') {
        if !out.is_empty() {
            out.push(' ');
        }
        if word.len() > 24 && word.bytes().all(|b| b.is_ascii_digit()) {
            out.push_str(&format!("{}...({} digits)", &word[..12], word.len()));
        } else {
            out.push_str(word);
        }
    }
    out
}

fn criterion_5() -> Verdict {
    const TOL: f64 = 1e-12;
    let mut failures = Vec::new();
    let mut worst = [0.0f64; 5];
    let steps = 1000;

    // Halpern = even subsequence of HM with U = Id.
    for name in FIXTURES {
        let f = fixture(name).unwrap();
        let p = &f.problem;
        let h = run_halpern(&p.space, &p.t, &p.anchor, &p.x0, &Sequence::harmonic(), steps).unwrap();
        let reduced = HMProblem { u: NonexpansiveMap::identity(), ..p.clone() };
        let hm = run_hm(&reduced, &Schedule::harmonic(0.5).unwrap(), 2 * steps).unwrap();
        for n in 0..=steps {
            worst[0] = worst[0].max(p.space.dist(h.get(n).unwrap(), hm.get(2 * n).unwrap()).unwrap());
        }
    }

    // T-KM = even subsequence of HM with T = Id, u = 0, α_n = 1 − γ_n.
    let f = fixture("E1").unwrap();
    let p = &f.problem;
    let gamma = Sequence::from_fn("1-1/(n+2)", |n| 1.0 - 1.0 / (n as f64 + 2.0));
    let beta = Sequence::constant(0.3);
    let tkm = run_tkm(&p.space, &p.u, &p.x0, &beta, &gamma, steps).unwrap();
    let reduced = HMProblem { t: NonexpansiveMap::identity(), anchor: Point::scalar(0.0), ..p.clone() };
    let g = gamma.clone();
    let alpha = Sequence::from_fn("gamma complement", move |n| 1.0 - g.eval(n));
    let hm = run_hm(&reduced, &Schedule::new(alpha, beta), 2 * steps).unwrap();
    for n in 0..=steps {
        worst[1] = worst[1].max(p.space.dist(tkm.get(n).unwrap(), hm.get(2 * n).unwrap()).unwrap());
    }

    // GFB on S1 against HM with the averaged reduction; GDR on S2 against
    // HM with β̃_n = (1 + β_n)/2.
    let s1 = split_fixture("S1").unwrap();
    let s2 = split_fixture("S2").unwrap();
    for b in [0.0, 0.4] {
        let s = Schedule::new(Sequence::harmonic(), Sequence::constant(b));
        let (a, v) = (run_gfb(&s1.problem, &s, steps).unwrap(), run_gfb_via_hm(&s1.problem, &s, steps).unwrap());
        for (p, q) in a.points().unwrap().iter().zip(v.points().unwrap()) {
            worst[2] = worst[2].max((x(p) - x(q)).abs());
        }
    }
    for b in [0.0, 0.3, -0.5] {
        let s = Schedule::new(Sequence::harmonic(), Sequence::constant(b));
        let run = run_gdr(&s2.problem, &s, 2 * steps).unwrap();
        let via = run_gdr_via_hm(&s2.problem, &s, 2 * steps).unwrap();
        for (p, q) in run.x.points().unwrap().iter().zip(via.points().unwrap()) {
            worst[3] = worst[3].max((x(p) - x(q)).abs());
        }
        let reduced = averaged_reduce(&Sequence::constant(b), 0.5).unwrap();
        worst[3] = worst[3].max((reduced.eval(0) - (1.0 + b) / 2.0).abs());
    }
    for (i, what) in ["Halpern", "T-KM", "GFB", "GDR"].iter().enumerate() {
        ensure(worst[i] <= TOL, &mut failures, format!("{what} reduction off by {:e}", worst[i]));
    }

    // Band mapping: a ≥ σ and 1 − 1/a + γ ≤ β ≤ 1 − γ put β̃ in [σγ, 1 − σγ];
    // −1 + γ ≤ β ≤ 1 − γ puts (1 + β)/2 in [γ/2, 1 − γ/2].
    for sigma in [0.25f64, 0.5, 0.75] {
        for a in [sigma, (sigma + 1.0) / 2.0, 1.0] {
            for gamma in [0.1, 0.5 / sigma.max(0.5), 0.3f64.min(0.5 / sigma)] {
                let (lo, hi) = (1.0 - 1.0 / a + gamma, 1.0 - gamma);
                if lo > hi {
                    continue;
                }
                for t in 0..=20 {
                    let b = lo + (hi - lo) * t as f64 / 20.0;
                    let bt = averaged_reduce(&Sequence::constant(b), a).unwrap().eval(0);
                    let band = sigma * gamma;
                    if !(bt >= band - TOL && bt <= 1.0 - band + TOL) {
                        failures.push(format!("averaged band: a={a} sigma={sigma} gamma={gamma} beta={b} -> {bt}"));
                    }
                }
            }
        }
    }
    for gamma in [0.1, 0.5, 1.0] {
        for t in 0..=20 {
            let b = -1.0 + gamma + (2.0 - 2.0 * gamma) * t as f64 / 20.0;
            let bt = averaged_reduce(&Sequence::constant(b), 0.5).unwrap().eval(0);
            worst[4] = worst[4].max((bt - (1.0 + b) / 2.0).abs());
            if !(bt >= gamma / 2.0 - TOL && bt <= 1.0 - gamma / 2.0 + TOL) {
                failures.push(format!("GDR band: gamma={gamma} beta={b} -> {bt}"));
            }
        }
    }
    // The splitting rates are μ evaluated at exactly those band constants.
    let toy = Moduli::toy(q(1, 2)).unwrap();
    let f0 = CounterFn::affine(1, 1);
    let eps = real(4, 1);
    let mu_at = |g: Rational| meta_mu(&toy.with_gamma(g).unwrap(), 1).unwrap().eval(&eps, &f0).unwrap();
    let (sigma, gamma) = (q(1, 2), q(1, 1));
    let pairs = [
        (SplitRate::Averaged { sigma: sigma.clone() }, Rational::from(&sigma * &gamma)),
        (SplitRate::ForwardBackward, Rational::from(&gamma / 2u32)),
        (SplitRate::DouglasRachford, Rational::from(&gamma / 2u32)),
    ];
    for (which, band) in pairs {
        let got = splitting_rates(&toy, 1, &gamma, &which).unwrap().eval(&eps, &f0).unwrap();
        ensure(got == mu_at(band.clone()), &mut failures, format!("{which:?} is not mu at gamma={band}"));
    }
    verdict(
        failures,
        format!(
            "max deviations: Halpern {:.1e}, T-KM {:.1e}, GFB {:.1e}, GDR {:.1e}; bands sigma*gamma and gamma/2 hold",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn criterion_6() -> Verdict {
    let mut failures = Vec::new();
    let zero = Schedule::new(Sequence::harmonic(), Sequence::constant(0.0));

    // KKT for min (x−3)²/2 on [0,1], anchored at 0: the zero set is {clamp(3)}.
    let kkt = 3.0f64.clamp(0.0, 1.0);
    let s1 = split_fixture("S1").unwrap();
    let tr = run_gfb(&s1.problem, &zero, 100_000).unwrap();
    let gfb_err = (x(tr.last()) - kkt).abs();
    ensure(gfb_err <= 0.05, &mut failures, format!("GFB |x_100000 - 1| = {gfb_err:e}"));

    // zer(N_[0,1] + N_[0.5,2]) = [0,1] ∩ [0.5,2].
    let (lo, hi) = (0.0f64.max(0.5), 1.0f64.min(2.0));
    let s2 = split_fixture("S2").unwrap();
    let run = run_gdr(&s2.problem, &zero, 200_002).unwrap();
    let (ys, zs, xs) = (run.y.points().unwrap(), run.z.points().unwrap(), run.x.points().unwrap());
    let (y, z) = (x(&ys[100_000]), x(&zs[100_000]));
    ensure((y - z).abs() <= 1e-3, &mut failures, format!("|y_n - z_n| = {:e} at n = 10^5", (y - z).abs()));
    for v in [y, z] {
        ensure((lo - 5e-2..=hi + 5e-2).contains(&v), &mut failures, format!("limit {v} outside [{lo}, {hi}] + 5e-2"));
    }
    let mut worst: f64 = 0.0;
    for n in 0..ys.len() {
        let lhs = (x(&zs[n]) - x(&ys[n])).abs();
        let rhs = (x(&xs[2 * n + 2]) - x(&xs[2 * n + 1])).abs() / (1.0 - 0.0);
        worst = worst.max((lhs - rhs).abs());
    }
    ensure(worst <= 1e-12, &mut failures, format!("z-y identity off by {worst:e}"));
    verdict(failures, format!("GFB error {gfb_err:.1e}; GDR y={y:.6} z={z:.6}; identity max deviation {worst:.1e}"))
}

fn criterion_7() -> Verdict {
    let mut failures = Vec::new();
    let f = fixture("E1").unwrap();
    let schedule = Schedule::harmonic(0.5).unwrap();
    let steps = 10_000;
    let deltas = Sequence::from_fn("2^-n", |n| 0.5f64.powi(n.min(2000) as i32));
    let exact = run_hm(&f.problem, &schedule, steps).unwrap();
    let pert = run_hm_errors(&f.problem, &schedule, &deltas, &Perturbation::Fixed, steps).unwrap();
    let sp = &f.problem.space;
    let gap: Vec<f64> = (0..=steps).map(|n| sp.dist(exact.get(n).unwrap(), pert.get(n).unwrap()).unwrap()).collect();
    ensure(gap[steps] <= 1e-3, &mut failures, format!("d(x'_n, x_n) = {:e} at n = 10^4", gap[steps]));
    let d = deltas.clone();
    let nu = error_rates(&schedule.moduli().unwrap().gamma2, Some(&RateFn::ceil_log2_recip()), None, &|n| d.eval(n), &|_| 0.0)
        .unwrap();
    let bound = nu.nu.eval(&real(1, 10)).unwrap();
    let idx = threshold_of(&gap, 0.1);
    let ok = idx.is_some_and(|i| le(&Natural::from_u64(i as u64), &bound));
    ensure(ok, &mut failures, format!("threshold {idx:?} vs nu_hat(0.1) = {}", abbreviate(&bound.to_string())));
    verdict(
        failures,
        format!("d(x'_n,x_n) = {:.1e} at n = 10^4; threshold at 0.1 is {idx:?} <= nu_hat(0.1) = {}", gap[steps], abbreviate(&bound.to_string())),
    )
}

fn criterion_8() -> Verdict {
    let r = projection_suite(1000).unwrap();
    let detail = serde_json::to_string(&r.detail).unwrap();
    if r.passed {
        Ok(format!("{} fixtures: oracle projections satisfy the inequality, perturbed candidates violate it", FIXTURES.len()))
    } else {
        Err(detail)
    }
}

fn criterion_9() -> Verdict {
    let mut failures = Vec::new();
    let configs = [
        r#"{"fixture":"E1","scheme":"hm","steps":5000,"eps_grid":[0.5,"1/10"],"checks":["rho1","rho2","rho3"],"counter":{"a":2,"b":0},"seed":3}"#,
        r#"{"fixture":"H1","scheme":"hm","steps":3000,"stride":7,"seed":3}"#,
        r#"{"fixture":"T1","scheme":"halpern","steps":3000,"eps_grid":[0.5],"seed":3}"#,
        r#"{"fixture":"E1","scheme":"hm_errors","steps":3000,"eps_grid":[0.1],"errors":{"kind":"geometric","scale":1.0,"ratio":0.5},"seed":3}"#,
        r#"{"fixture":"S2","scheme":"gdr","steps":3000,"schedule":{"beta":{"kind":"constant","value":0.0}},"seed":3}"#,
    ];
    for text in configs {
        let cfg = RunConfig::from_json(text).unwrap();
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let fa = cmd_run(&cfg, a.path()).unwrap().files;
        cmd_run(&cfg, b.path()).unwrap();
        for path in fa {
            let name = path.file_name().unwrap();
            let (x, y) = (std::fs::read(&path).unwrap(), std::fs::read(b.path().join(name)).unwrap());
            ensure(!x.is_empty() && x == y, &mut failures, format!("{} {}: outputs differ", cfg.fixture, name.to_string_lossy()));
        }
    }
    verdict(failures, format!("{} configs run twice; every CSV/JSONL/JSON byte-identical", configs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("axiom suites", criterion_1),
        ("rate regression", criterion_2),
        ("strong convergence", criterion_3),
        ("soundness of rates", criterion_4),
        ("specialization equalities", criterion_5),
        ("splitting limits", criterion_6),
        ("error tolerance", criterion_7),
        ("projection characterization", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
