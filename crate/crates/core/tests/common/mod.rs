#![allow(dead_code)]

use center_of_mass::{AmbientPoint, ModelSpace, NormFlavor, WeightedSample};
use rand::Rng;

pub fn euclidean(n: usize) -> ModelSpace {
    ModelSpace::euclidean(n).unwrap()
}

pub fn sphere(n: usize) -> ModelSpace {
    ModelSpace::sphere(n).unwrap()
}

pub fn hyperboloid(n: usize) -> ModelSpace {
    ModelSpace::hyperboloid(n).unwrap()
}

pub fn so(n: usize) -> ModelSpace {
    ModelSpace::special_orthogonal(n, NormFlavor::Frobenius).unwrap()
}

/// Spaces exercised by the solver suites.
pub fn solver_spaces() -> Vec<ModelSpace> {
    vec![euclidean(3), sphere(2), sphere(4), hyperboloid(2), hyperboloid(3), so(3), so(4)]
}

/// Spaces the grid oracle supports.
pub fn oracle_spaces() -> Vec<ModelSpace> {
    vec![euclidean(2), euclidean(3), sphere(2), hyperboloid(2), so(3)]
}

/// Sample spread: every pairwise distance stays below the admissible radius.
pub fn sample_radius(space: &ModelSpace) -> f64 {
    let r = space.riemannian().admissible_radius();
    if r.is_finite() {
        0.45 * r
    } else {
        1.0
    }
}

/// A point reached from the origin by a random geodesic of length ≤ `spread`.
pub fn random_anchor<R: Rng>(space: &ModelSpace, spread: f64, rng: &mut R) -> AmbientPoint {
    let o = space.origin();
    let v = space.random_unit_tangent(&o, rng).scale(rng.random_range(0.0..=spread));
    space.exp(&v)
}

pub fn random_masses<R: Rng>(count: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..count).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|m| m / total).collect()
}

/// `count` points within `radius` of `anchor`, with random masses.
pub fn sample_around<R: Rng>(
    space: &ModelSpace,
    anchor: &AmbientPoint,
    radius: f64,
    count: usize,
    rng: &mut R,
) -> WeightedSample {
    let points = (0..count)
        .map(|_| space.random_point_in_ball(anchor, radius, rng).unwrap())
        .collect();
    let masses = random_masses(count, rng);
    WeightedSample::new(space, points, Some(masses)).unwrap()
}

/// A random admissible sample of 3 to 7 points.
pub fn random_sample<R: Rng>(space: &ModelSpace, rng: &mut R) -> WeightedSample {
    let anchor = random_anchor(space, 1.0, rng);
    let count = rng.random_range(3..=7);
    sample_around(space, &anchor, sample_radius(space), count, rng)
}
