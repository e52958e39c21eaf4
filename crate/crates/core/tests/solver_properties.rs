mod common;

use center_of_mass::{
    check_admissible_ball, frechet_value, initial_guess, solve_center, BallCheck, Isometry, ModelSpace,
    NormFlavor, SolverConfig, Status, WeightedSample,
};
use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn space_at(i: usize) -> ModelSpace {
    let all = solver_spaces();
    all[i % all.len()]
}

fn rz(theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0])
}

fn solve(space: &ModelSpace, s: &WeightedSample) -> center_of_mass::ConvergenceReport {
    let r = solve_center(space, s, &SolverConfig::default(), None).unwrap();
    assert!(r.converged(), "{:?}: {:?} {:?}", space.kind(), r.status, r.detail);
    r
}

#[test]
fn single_point_is_its_own_center() {
    for space in solver_spaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_anchor(&space, 1.0, &mut rng);
        let s = WeightedSample::uniform(&space, vec![p.clone()]).unwrap();
        let r = solve(&space, &s);
        assert_eq!(r.iterations, 0);
        assert_eq!(r.center, p);
    }
}

#[test]
fn center_is_a_fixed_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for space in solver_spaces() {
        let s = random_sample(&space, &mut rng);
        let c = solve(&space, &s).center;
        let again = solve_center(&space, &s, &SolverConfig::default(), Some(&c)).unwrap();
        assert!(again.converged());
        assert!(again.iterations <= 1);
        assert!(space.dist(&again.center, &c) < 1e-10);
    }
}

#[test]
fn euclidean_center_in_one_step() {
    let e = euclidean(4);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let s = sample_around(&e, &e.origin(), 10.0, 8, &mut rng);
        let r = solve(&e, &s);
        assert_eq!(r.iterations, 1);
        assert!((r.center.vector() - s.ambient_mean()).amax() <= 1e-12);
    }
}

#[test]
fn two_points_on_a_great_circle_meet_halfway() {
    let s2 = sphere(2);
    let a = s2.point(vec![1.0, 0.0, 0.0]).unwrap();
    let b = s2.point(vec![0.6f64.cos(), 0.6f64.sin(), 0.0]).unwrap();
    let s = WeightedSample::uniform(&s2, vec![a, b]).unwrap();
    let c = solve(&s2, &s).center;
    let mid = s2.point(vec![0.3f64.cos(), 0.3f64.sin(), 0.0]).unwrap();
    assert!(s2.dist(&c, &mid) < 1e-10);
}

#[test]
fn spread_out_sample_is_a_ball_violation() {
    let s2 = sphere(2);
    let pts = vec![s2.point(vec![1.0, 0.0, 0.0]).unwrap(), s2.point(vec![0.0, 1.0, 0.0]).unwrap()];
    let s = WeightedSample::uniform(&s2, pts).unwrap();
    let r = solve_center(&s2, &s, &SolverConfig::default(), None).unwrap();
    assert_eq!(r.status, Status::BallViolation);
    assert_eq!(r.iterations, 0);
    assert!(!r.ball.unwrap().ok);

    let warn = SolverConfig {
        ball_check: BallCheck::Warn,
        ..SolverConfig::default()
    };
    let r = solve_center(&s2, &s, &warn, None).unwrap();
    assert!(r.converged());
    assert_eq!(r.warnings.len(), 1);
}

#[test]
fn antipodal_pair_hits_the_cut_locus() {
    let s2 = sphere(2);
    let pts = vec![s2.point(vec![1.0, 0.0, 0.0]).unwrap(), s2.point(vec![-1.0, 0.0, 0.0]).unwrap()];
    let s = WeightedSample::uniform(&s2, pts).unwrap();
    let skip = SolverConfig {
        ball_check: BallCheck::Skip,
        ..SolverConfig::default()
    };
    let r = solve_center(&s2, &s, &skip, None).unwrap();
    assert_eq!(r.status, Status::CutLocus);
    assert!(r.detail.is_some());
}

#[test]
fn iteration_budget_is_honored() {
    let s2 = sphere(2);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let s = random_sample(&s2, &mut rng);
    let tight = SolverConfig {
        max_iterations: 1,
        tolerance: 1e-300,
        ..SolverConfig::default()
    };
    let r = solve_center(&s2, &s, &tight, None).unwrap();
    assert_eq!(r.status, Status::MaxIterationsReached);
    assert_eq!(r.iterations, 1);
}

#[test]
fn so3_operator_flavor_accepts_what_frobenius_rejects() {
    let frob = so(3);
    let op = frob.with_flavor(NormFlavor::Operator).unwrap();
    let pts = vec![frob.origin(), frob.rotation(&rz(2.0)).unwrap()];
    let s = WeightedSample::uniform(&frob, pts).unwrap();
    let guess = initial_guess(&frob, &s);
    assert!(!check_admissible_ball(&frob, &s, &guess, None).ok);
    assert!(check_admissible_ball(&op, &s, &guess, None).ok);

    let r = solve(&op, &s);
    let expected = frob.rotation(&rz(1.0)).unwrap();
    assert!(frob.dist(&r.center, &expected) < 1e-10);
}

#[test]
fn so3_center_is_metric_independent() {
    let frob = so(3);
    let op = frob.with_flavor(NormFlavor::Operator).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let s = random_sample(&frob, &mut rng);
        let a = solve(&frob, &s).center;
        let b = solve(&op, &s).center;
        assert!(frob.dist(&a, &b) <= 1e-9);
    }
}

#[test]
fn step_scale_below_one_still_converges() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for space in [sphere(2), hyperboloid(2), so(3)] {
        let s = random_sample(&space, &mut rng);
        let full = solve(&space, &s);
        let half = solve_center(
            &space,
            &s,
            &SolverConfig {
                step_scale: 0.5,
                ..SolverConfig::default()
            },
            None,
        )
        .unwrap();
        assert!(half.converged());
        assert!(half.iterations > full.iterations);
        assert!(space.dist(&half.center, &full.center) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn descent_is_monotone_and_contracting(seed in any::<u64>(), which in 0usize..7) {
        let space = space_at(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_sample(&space, &mut rng);
        let r = solve(&space, &s);
        for w in r.trace.windows(2) {
            prop_assert!(w[1].frechet_value <= w[0].frechet_value + 1e-14);
        }
        let d: Vec<f64> = r.iterates.iter().map(|x| space.dist(x, &r.center)).collect();
        for w in d.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12, "{w:?}");
        }
        prop_assert_eq!(r.step_halvings, 0);
    }

    #[test]
    fn center_commutes_with_isometries(seed in any::<u64>(), which in 0usize..7) {
        let space = space_at(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_sample(&space, &mut rng);
        let g = Isometry::random(&space, &mut rng);
        let c = solve(&space, &s).center;
        let gc = solve(&space, &s.map_points(|p| g.apply(p))).center;
        prop_assert!(space.dist(&gc, &g.apply(&c)) <= 1e-8);
    }

    #[test]
    fn center_ignores_sample_order(seed in any::<u64>(), which in 0usize..7) {
        let space = space_at(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_sample(&space, &mut rng);
        let mut order: Vec<usize> = (0..s.len()).collect();
        order.shuffle(&mut rng);
        let points = order.iter().map(|&i| s.points()[i].clone()).collect();
        let masses = order.iter().map(|&i| s.masses()[i]).collect();
        let shuffled = WeightedSample::new(&space, points, Some(masses)).unwrap();
        let a = solve(&space, &s).center;
        let b = solve(&space, &shuffled).center;
        prop_assert!(space.dist(&a, &b) <= 1e-14);
    }

    #[test]
    fn center_beats_every_sample_point(seed in any::<u64>(), which in 0usize..7) {
        let space = space_at(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_sample(&space, &mut rng);
        let c = solve(&space, &s).center;
        let fc = frechet_value(&space, &s, &c);
        for p in s.points() {
            prop_assert!(fc <= frechet_value(&space, &s, p) + 1e-14);
        }
    }
}
