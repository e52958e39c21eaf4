mod common;

use center_of_mass::verification::gradient_check;
use center_of_mass::{
    frechet_value, mass_vector_field, numerical_covariant_differential, AmbientPoint, Error,
    ModelSpace, WeightedSample,
};
use common::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn space_at(i: usize) -> ModelSpace {
    let all = solver_spaces();
    all[i % all.len()]
}

/// A point inside the sample's hull region, close to the anchor.
fn nearby<R: Rng>(space: &ModelSpace, sample: &WeightedSample, rng: &mut R) -> AmbientPoint {
    let p = &sample.points()[0];
    let v = space.random_unit_tangent(p, rng).scale(0.3 * sample_radius(space));
    space.exp(&v)
}

/// Riemannian Hessian of `f` at `x` from second differences of `f ∘ expₓ`
/// in the orthonormal tangent basis.
fn hessian_oracle(space: &ModelSpace, sample: &WeightedSample, x: &AmbientPoint, h: f64) -> DMatrix<f64> {
    let basis = space.tangent_basis(x);
    let k = basis.len();
    let f = |a: &[(usize, f64)]| {
        let mut v = space.zero_tangent(x);
        for &(i, c) in a {
            v = v.axpy(c, &basis[i]);
        }
        frechet_value(space, sample, &space.exp(&v))
    };
    let f0 = f(&[]);
    DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            (f(&[(i, h)]) - 2.0 * f0 + f(&[(i, -h)])) / (h * h)
        } else {
            (f(&[(i, h), (j, h)]) - f(&[(i, h), (j, -h)]) - f(&[(i, -h), (j, h)]) + f(&[(i, -h), (j, -h)]))
                / (4.0 * h * h)
        }
    })
}

#[test]
fn field_vanishes_on_a_single_point() {
    for space in solver_spaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_anchor(&space, 1.0, &mut rng);
        let s = WeightedSample::uniform(&space, vec![p.clone()]).unwrap();
        assert!(space.norm(&mass_vector_field(&space, &s, &p).unwrap()) < 1e-15);
        assert_eq!(frechet_value(&space, &s, &p), 0.0);
    }
}

#[test]
fn euclidean_field_points_to_the_centroid() {
    let e = euclidean(3);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let s = sample_around(&e, &e.origin(), 5.0, 6, &mut rng);
        let x = e.random_point_in_ball(&e.origin(), 5.0, &mut rng).unwrap();
        let v = mass_vector_field(&e, &s, &x).unwrap();
        let expected = s.ambient_mean() - x.vector();
        assert!((v.vector() - expected).amax() < 1e-13);
        let f: f64 = s
            .points()
            .iter()
            .zip(s.masses())
            .map(|(p, m)| 0.5 * m * (p.vector() - x.vector()).norm_squared())
            .sum();
        assert!((frechet_value(&e, &s, &x) - f).abs() < 1e-12);
    }
}

#[test]
fn cut_locus_is_reported_with_the_point_index() {
    let s2 = sphere(2);
    let x = s2.point(vec![0.0, 0.0, 1.0]).unwrap();
    let pts = vec![s2.point(vec![1.0, 0.0, 0.0]).unwrap(), s2.point(vec![0.0, 0.0, -1.0]).unwrap()];
    let sample = WeightedSample::uniform(&s2, pts).unwrap();
    match mass_vector_field(&s2, &sample, &x) {
        Err(Error::CutLocus { index: Some(i), .. }) => assert_eq!(sample.points()[i].coords(), &[0.0, 0.0, -1.0]),
        other => panic!("expected a cut-locus error, got {other:?}"),
    }
}

#[test]
fn gradient_identity_at_two_step_sizes() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for space in solver_spaces() {
        for _ in 0..5 {
            let s = random_sample(&space, &mut rng);
            let x = nearby(&space, &s, &mut rng);
            let e4 = gradient_check(&space, &s, &x, 1e-4).unwrap();
            let e5 = gradient_check(&space, &s, &x, 1e-5).unwrap();
            assert!(e4 <= 1e-6, "{:?}: {e4:e}", space.kind());
            assert!(e5 <= 1e-6, "{:?}: {e5:e}", space.kind());
        }
    }
}

#[test]
fn gradient_error_is_second_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for space in [sphere(2), hyperboloid(2), so(3)] {
        let s = random_sample(&space, &mut rng);
        let x = nearby(&space, &s, &mut rng);
        let coarse = gradient_check(&space, &s, &x, 1e-3).unwrap();
        let fine = gradient_check(&space, &s, &x, 2e-4).unwrap();
        // 25 for an exactly quadratic error; allow rounding and higher-order terms
        let ratio = coarse / fine;
        assert!((15.0..=35.0).contains(&ratio), "{:?}: ratio {ratio}", space.kind());
    }
}

#[test]
fn covariant_differential_is_minus_identity_on_euclidean_space() {
    let e = euclidean(3);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = sample_around(&e, &e.origin(), 2.0, 5, &mut rng);
    let d = numerical_covariant_differential(&e, &s, &e.point(vec![0.3, -0.2, 0.1]).unwrap(), 1e-4).unwrap();
    assert!((d + DMatrix::identity(3, 3)).amax() < 1e-10);
}

#[test]
fn covariant_differential_matches_hessian_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for space in [sphere(2), sphere(3), hyperboloid(2), so(3)] {
        for _ in 0..3 {
            let s = random_sample(&space, &mut rng);
            let x = nearby(&space, &s, &mut rng);
            let dv = numerical_covariant_differential(&space, &s, &x, 1e-4).unwrap();
            let hess = hessian_oracle(&space, &s, &x, 1e-3);
            let err = (&dv + &hess).amax();
            assert!(err < 1e-5, "{:?}: {err:e}\n{dv}\n{hess}", space.kind());
            assert!((&dv - dv.transpose()).amax() < 1e-7);
        }
    }
}

#[test]
fn three_point_s2_corridor_at_small_steps() {
    let s2 = sphere(2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let anchor = random_anchor(&s2, 1.0, &mut rng);
        let s = sample_around(&s2, &anchor, 0.3, 3, &mut rng);
        let x = s2.random_point_in_ball(&anchor, 0.3, &mut rng).unwrap();
        let d5 = numerical_covariant_differential(&s2, &s, &x, 1e-5).unwrap();
        let d6 = numerical_covariant_differential(&s2, &s, &x, 1e-6).unwrap();
        assert!((&d5 - &d6).amax() < 1e-7);
        assert!((&d5 + hessian_oracle(&s2, &s, &x, 1e-3)).amax() < 1e-5);
        let m = -(&d5 + d5.transpose()) * 0.5;
        for e in nalgebra::SymmetricEigen::new(m).eigenvalues.iter() {
            assert!((0.6f64.cos() * 0.9..=1.1).contains(e), "eigenvalue {e}");
        }
    }
}

#[test]
fn covariant_differential_rejects_bad_steps() {
    let s2 = sphere(2);
    let s = WeightedSample::uniform(&s2, vec![s2.origin()]).unwrap();
    assert!(numerical_covariant_differential(&s2, &s, &s2.origin(), 0.0).is_err());
    assert!(numerical_covariant_differential(&s2, &s, &s2.origin(), 1e-2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_is_tangent(seed in any::<u64>(), which in 0usize..7) {
        let space = space_at(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_sample(&space, &mut rng);
        let x = nearby(&space, &s, &mut rng);
        let v = mass_vector_field(&space, &s, &x).unwrap();
        let scale = x.vector().amax().max(1.0);
        prop_assert!(space.tangency_residual(&v) <= 1e-10 * scale * scale);
    }

    #[test]
    fn field_is_linear_in_the_masses(seed in any::<u64>(), which in 0usize..7, a in 0.0f64..1.0) {
        let space = space_at(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s1 = random_sample(&space, &mut rng);
        let s2 = s1.with_masses(&space, random_masses(s1.len(), &mut rng)).unwrap();
        let mixed: Vec<f64> = s1.masses().iter().zip(s2.masses()).map(|(m1, m2)| a * m1 + (1.0 - a) * m2).collect();
        let s3 = s1.with_masses(&space, mixed).unwrap();
        let x = nearby(&space, &s1, &mut rng);
        let v1 = mass_vector_field(&space, &s1, &x).unwrap();
        let v2 = mass_vector_field(&space, &s2, &x).unwrap();
        let v3 = mass_vector_field(&space, &s3, &x).unwrap();
        let expected: DVector<f64> = v1.vector() * a + v2.vector() * (1.0 - a);
        prop_assert!((v3.vector() - expected).amax() <= 1e-12 * x.vector().amax().max(1.0));
    }

    #[test]
    fn field_is_the_negative_frechet_gradient(seed in any::<u64>(), which in 0usize..7) {
        let space = space_at(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_sample(&space, &mut rng);
        let x = nearby(&space, &s, &mut rng);
        prop_assert!(gradient_check(&space, &s, &x, 1e-4).unwrap() <= 1e-6);
    }
}
