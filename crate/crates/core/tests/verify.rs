use hm_core::geometry::{GeodesicSpace, Point, SpaceModel};
use hm_core::operators::ConvexSet;
use hm_core::rates::CounterFn;
use hm_core::schemes::{fixture, run_hm, Schedule, FIXTURES};
use hm_core::verify::{
    brute_force_projection, check_f_n_membership, check_projection_variational, empirical_metastability, set_net, SetSampler,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn proj(space: &SpaceModel, set: &ConvexSet, u: &Point) -> Point {
    let sampler = SetSampler::for_set(space, set).unwrap();
    brute_force_projection(space, &sampler, u, 1e-12).unwrap()
}

#[test]
fn brute_force_examples() {
    let r1 = SpaceModel::euclidean(1);
    let p = proj(&r1, &ConvexSet::Interval { lo: 0.0, hi: 1.0 }, &Point::scalar(2.0));
    assert!(r1.dist(&p, &Point::scalar(1.0)).unwrap() < 1e-12);

    let r2 = SpaceModel::euclidean(2);
    let ball = ConvexSet::Ball { center: Point::vector([0.0, 0.0]), radius: 1.0 };
    let p = proj(&r2, &ball, &Point::vector([2.0, 0.0]));
    assert!(r2.dist(&p, &Point::vector([1.0, 0.0])).unwrap() < 1e-6);

    let tree = SpaceModel::spider();
    let p = proj(&tree, &ConvexSet::TreeLegs { legs: vec![0], max_t: 5.0 }, &Point::tree(1, 1.0));
    assert_eq!(p, Point::junction());

    assert!(brute_force_projection(&r1, &SetSampler::new(), &Point::scalar(0.0), 1e-9).is_err());
}

#[test]
fn brute_force_agrees_with_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cases = [
        (SpaceModel::euclidean(1), ConvexSet::Interval { lo: -1.0, hi: 0.5 }),
        (SpaceModel::euclidean(2), ConvexSet::Ball { center: Point::vector([0.5, -0.5]), radius: 1.0 }),
        (SpaceModel::Hyperboloid, ConvexSet::Ball { center: Point::hyperbolic_polar(0.5, 0.0), radius: 1.0 }),
        (SpaceModel::spider(), ConvexSet::TreeLegs { legs: vec![0, 2], max_t: 1.5 }),
        (SpaceModel::spider(), ConvexSet::Ball { center: Point::tree(1, 0.5), radius: 1.0 }),
    ];
    for (sp, set) in cases {
        let sampler = SetSampler::for_set(&sp, &set).unwrap();
        for _ in 0..10 {
            let u = sp.sample(&mut rng, 3.0);
            let bf = brute_force_projection(&sp, &sampler, &u, 1e-12).unwrap();
            let cf = set.project(&sp, &u).unwrap();
            let err = sp.dist(&bf, &cf).unwrap();
            assert!(err < 1e-6, "{} {set:?} at {u}: {err}", sp.name());
        }
    }
}

#[test]
fn variational_examples() {
    let r1 = SpaceModel::euclidean(1);
    let ys: Vec<Point> = (0..=100).map(|i| Point::scalar(i as f64 / 100.0)).collect();
    let ok = check_projection_variational(&r1, &ys, &Point::scalar(2.0), &Point::scalar(1.0), 0.0).unwrap();
    assert!(ok.holds && ok.worst <= 0.0);
    let inside = check_projection_variational(&r1, &ys, &Point::scalar(0.3), &Point::scalar(0.3), 0.0).unwrap();
    assert!(inside.holds);
    let wrong = check_projection_variational(&r1, &ys, &Point::scalar(2.0), &Point::scalar(0.5), 1e-9).unwrap();
    assert!(!wrong.holds);
    assert!((wrong.worst - 0.75).abs() < 1e-12);
}

#[test]
fn fixture_limits_satisfy_variational_inequality() {
    for name in FIXTURES {
        let f = fixture(name).unwrap();
        let sp = &f.problem.space;
        let ys = set_net(sp, &f.fix_set, 1000).unwrap();
        let r = check_projection_variational(sp, &ys, &f.problem.anchor, &f.limit, 1e-9).unwrap();
        assert!(r.holds, "{name}: {}", r.worst);
    }
}

#[test]
fn f_n_membership_examples() {
    let f = fixture("E1").unwrap();
    let p = &f.problem;
    let sp = &p.space;
    assert!(check_f_n_membership(sp, &p.p, &p.t, &p.u, &p.p, 2.0, 0.0, 1e-12).unwrap());
    assert!(!check_f_n_membership(sp, &Point::scalar(1.5), &p.t, &p.u, &p.p, 2.0, 0.4, 1e-12).unwrap());
    assert!(check_f_n_membership(sp, &Point::scalar(1.2), &p.t, &p.u, &p.p, 2.0, 0.25, 1e-12).unwrap());
}

#[test]
fn metastability_is_monotone_in_eps() {
    for name in FIXTURES {
        let f = fixture(name).unwrap();
        let tr = run_hm(&f.problem, &Schedule::harmonic(0.5).unwrap(), 4000).unwrap();
        let xs = tr.points().unwrap();
        let g = CounterFn::affine(2, 0);
        let mut prev = None;
        for eps in [0.05, 0.1, 0.2, 0.5, 1.0] {
            let n = empirical_metastability(&tr.space, xs, eps, &g, 4000).unwrap();
            if let (Some(a), Some(b)) = (prev, n) {
                assert!(b <= a, "{name}: eps={eps}");
            }
            if n.is_some() {
                prev = n;
            }
        }
    }
}
