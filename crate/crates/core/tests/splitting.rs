use approx::assert_abs_diff_eq;
use hm_core::geometry::{GeodesicSpace, Point};
use hm_core::operators::{MonotoneOpSpec, NonexpansiveMap};
use hm_core::schemes::{fixture, run_hm, Schedule, Sequence};
use hm_core::splitting::{averaged_reduce, run_gdr, run_gdr_via_hm, run_gfb, run_gfb_via_hm, split_fixture, SplitProblem};

fn x(p: &Point) -> f64 {
    p.coords().unwrap()[0]
}

fn harmonic_zero() -> Schedule {
    Schedule::new(Sequence::harmonic(), Sequence::constant(0.0))
}

#[test]
fn averaged_reduce_examples() {
    let b = averaged_reduce(&Sequence::constant(0.3), 1.0).unwrap();
    assert_abs_diff_eq!(b.eval(7), 0.3);
    assert_abs_diff_eq!(averaged_reduce(&Sequence::constant(0.0), 0.5).unwrap().eval(0), 0.5);
    assert_abs_diff_eq!(averaged_reduce(&Sequence::constant(-1.0), 0.5).unwrap().eval(0), 0.0);
    assert!(averaged_reduce(&Sequence::constant(0.0), 0.0).is_err());
}

#[test]
fn gfb_on_s1_reaches_the_kkt_point() {
    let f = split_fixture("S1").unwrap();
    let tr = run_gfb(&f.problem, &harmonic_zero(), 100_000).unwrap();
    assert!((x(tr.last()) - 1.0).abs() <= 0.05);
}

#[test]
fn gfb_matches_its_hm_reduction() {
    let f = split_fixture("S1").unwrap();
    for s in [harmonic_zero(), Schedule::new(Sequence::harmonic(), Sequence::constant(0.4))] {
        let a = run_gfb(&f.problem, &s, 1000).unwrap();
        let b = run_gfb_via_hm(&f.problem, &s, 1000).unwrap();
        for (p, q) in a.points().unwrap().iter().zip(b.points().unwrap()) {
            assert!((x(p) - x(q)).abs() <= 1e-12);
        }
    }
}

#[test]
fn gfb_without_forward_part_is_e1() {
    let p = SplitProblem::new(
        MonotoneOpSpec::normal_cone_interval(0.0, 1.0),
        MonotoneOpSpec::Zero,
        1.0,
        Point::scalar(2.0),
        Point::scalar(3.0),
    )
    .unwrap();
    // The forward step vanishes, so U is the projection of E1.
    let fb = p.forward_backward_map().unwrap();
    let e1 = fixture("E1").unwrap();
    for i in -20..=20 {
        let q = Point::scalar(i as f64 / 4.0);
        assert_eq!(fb.eval(&q).unwrap(), e1.problem.u.eval(&q).unwrap());
    }
    let s = Schedule::new(Sequence::harmonic(), Sequence::constant(0.5));
    let a = run_gfb(&p, &s, 100_000).unwrap();
    let b = run_hm(&e1.problem, &s, 100_000).unwrap();
    assert!((x(a.last()) - 1.0).abs() <= 0.05);
    assert!((x(b.last()) - 1.0).abs() <= 0.05);
}

#[test]
fn gfb_without_anchoring_is_forward_backward() {
    let f = split_fixture("S1").unwrap();
    let s = Schedule::new(Sequence::constant(0.0), Sequence::constant(0.0));
    let tr = run_gfb(&f.problem, &s, 200).unwrap();
    // Classical x ↦ P_[0,1](x − (x − 3)) = P_[0,1](3) = 1.
    let pts = tr.points().unwrap();
    for n in 1..=100 {
        assert_abs_diff_eq!(x(&pts[2 * n]), 1.0, epsilon = 1e-12);
    }
}

#[test]
fn gfb_step_bound() {
    let f = split_fixture("S1").unwrap();
    let mut p = f.problem.clone();
    p.c = 2.0;
    assert!(run_gfb(&p, &harmonic_zero(), 4).is_ok());
    p.c = 2.5;
    assert!(run_gfb(&p, &harmonic_zero(), 4).is_err());
    assert!(SplitProblem::new(MonotoneOpSpec::Zero, MonotoneOpSpec::Zero, 0.0, Point::scalar(0.0), Point::scalar(0.0)).is_err());
}

#[test]
fn gdr_on_s2() {
    let f = split_fixture("S2").unwrap();
    let s = harmonic_zero();
    let run = run_gdr(&f.problem, &s, 200_000).unwrap();
    assert_eq!(run.y.stream, "y");
    assert_eq!(run.z.stream, "z");
    assert_eq!(run.y.len(), 100_000);
    let (y, z) = (x(run.y.last()), x(run.z.last()));
    assert!((y - z).abs() <= 1e-3);
    for v in [y, z] {
        assert!((0.5 - 5e-2..=1.0 + 5e-2).contains(&v), "{v}");
    }
}

#[test]
fn gdr_identity_and_reduction() {
    let f = split_fixture("S2").unwrap();
    for beta in [0.0, 0.3, -0.5] {
        let s = Schedule::new(Sequence::harmonic(), Sequence::constant(beta));
        let run = run_gdr(&f.problem, &s, 2000).unwrap();
        let xs = run.x.points().unwrap();
        let (ys, zs) = (run.y.points().unwrap(), run.z.points().unwrap());
        for n in 0..ys.len() {
            let lhs = (x(&zs[n]) - x(&ys[n])).abs();
            let rhs = (x(&xs[2 * n + 2]) - x(&xs[2 * n + 1])).abs() / (1.0 - beta);
            assert!((lhs - rhs).abs() <= 1e-12);
        }
        let via = run_gdr_via_hm(&f.problem, &s, 2000).unwrap();
        for (p, q) in xs.iter().zip(via.points().unwrap()) {
            assert!((x(p) - x(q)).abs() <= 1e-12);
        }
    }
}

#[test]
fn gdr_with_zero_operators() {
    let p = SplitProblem::new(MonotoneOpSpec::Zero, MonotoneOpSpec::Zero, 1.0, Point::scalar(1.0), Point::scalar(5.0)).unwrap();
    let run = run_gdr(&p, &harmonic_zero(), 20).unwrap();
    let xs = run.x.points().unwrap();
    for (n, (y, z)) in run.y.points().unwrap().iter().zip(run.z.points().unwrap()).enumerate() {
        assert_eq!(x(y), x(&xs[2 * n + 1]));
        assert_eq!(x(z), x(&xs[2 * n + 1]));
        assert_eq!(x(&xs[2 * n + 2]), x(&xs[2 * n + 1]));
    }
}

#[test]
fn gdr_without_anchoring_is_douglas_rachford() {
    let f = split_fixture("S2").unwrap();
    let s = Schedule::new(Sequence::constant(0.0), Sequence::constant(-1.0));
    let run = run_gdr(&f.problem, &s, 40).unwrap();
    let r = f.problem.reflection_map();
    let xs = run.x.points().unwrap();
    for n in 0..20 {
        let expect = r.eval(&xs[2 * n]).unwrap();
        assert_abs_diff_eq!(x(&xs[2 * n + 2]), x(&expect), epsilon = 1e-12);
    }
}

#[test]
fn zeros_are_resolvent_images_of_fixed_points() {
    // zer(U₁+U₂) = J_{cU₂}[Fix(R_{cU₁}R_{cU₂})] on S2, sampled on a grid.
    let f = split_fixture("S2").unwrap();
    let r = f.problem.reflection_map();
    let j2 = NonexpansiveMap::resolvent(f.problem.u2.clone(), f.problem.c).unwrap();
    let sp = f.problem.space();
    let mut hit = Vec::new();
    for i in 0..=4000 {
        let p = Point::scalar(-3.0 + 6.0 * i as f64 / 4000.0);
        if sp.dist(&r.eval(&p).unwrap(), &p).unwrap() <= 1e-12 {
            let q = j2.eval(&p).unwrap();
            assert!(f.zeros.contains(&sp, &q, 1e-12).unwrap());
            hit.push(x(&q));
        }
    }
    let lo = hit.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = hit.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert_abs_diff_eq!(lo, 0.5, epsilon = 2e-3);
    assert_abs_diff_eq!(hi, 1.0, epsilon = 2e-3);
}
