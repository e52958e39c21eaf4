//! Independent checks on the solver: exhaustive Fréchet minimization over a
//! normal-coordinate lattice, and central-difference gradient checks.
//!
//! Nothing here calls the Euler iteration.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::manifold::{frechet_value, mass_vector_field, max_point_distance, AmbientPoint, WeightedSample};
use crate::solver::initial_guess;
use crate::spaces::{ModelSpace, SpaceKind};

pub const MIN_RESOLUTION: usize = 16;

/// Lattice of `resolution` points per tangent axis spanning
/// `[−search_radius, search_radius]` in normal coordinates at `center_hint`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleGrid {
    pub resolution: usize,
    pub search_radius: f64,
    pub center_hint: AmbientPoint,
}

impl OracleGrid {
    pub fn new(
        space: &ModelSpace,
        resolution: usize,
        search_radius: f64,
        center_hint: AmbientPoint,
    ) -> Result<Self> {
        if resolution < MIN_RESOLUTION {
            return Err(Error::InvalidParameter(format!(
                "oracle resolution {resolution} below {MIN_RESOLUTION}"
            )));
        }
        let limit = space.riemannian().admissible_radius();
        if !(search_radius >= 0.0 && search_radius <= limit) {
            return Err(Error::InvalidParameter(format!(
                "search radius {search_radius} outside [0, {limit}]"
            )));
        }
        Ok(Self {
            resolution,
            search_radius,
            center_hint,
        })
    }

    /// Hint at the argmin-f sample point; radius reaches the farthest mass
    /// point, capped at the admissible radius.
    pub fn around_sample(space: &ModelSpace, sample: &WeightedSample, resolution: usize) -> Result<Self> {
        let riem = space.riemannian();
        let hint = initial_guess(&riem, sample);
        let radius = max_point_distance(&riem, sample, &hint).min(riem.admissible_radius());
        Self::new(space, resolution, radius, hint)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub point: AmbientPoint,
    pub f_value: f64,
    /// Fine-lattice spacing; the true center is within twice this.
    pub resolution_bound: f64,
}

fn check_supported(space: &ModelSpace) -> Result<()> {
    let dim = space.intrinsic_dim();
    let ok = match space.kind() {
        SpaceKind::Euclidean => dim <= 3,
        SpaceKind::Sphere | SpaceKind::Hyperboloid => dim == 2,
        SpaceKind::SpecialOrthogonal => space.matrix_size() == Some(3),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "grid oracle supports Euclidean dim <= 3, S2, H2 and SO(3); got {} of dimension {dim}",
            space.kind().name()
        )))
    }
}

/// Best lattice point `(index, f)`, ties to the lowest index.
fn lattice_min(
    space: &ModelSpace,
    sample: &WeightedSample,
    center: &AmbientPoint,
    half_width: f64,
    resolution: usize,
) -> (AmbientPoint, f64) {
    let basis = space.tangent_basis(center);
    let k = basis.len();
    let spacing = 2.0 * half_width / (resolution - 1) as f64;
    let total = resolution.pow(k as u32);
    let lattice_point = |idx: usize| {
        let mut rem = idx;
        let c: Vec<f64> = (0..k)
            .map(|_| {
                let i = rem % resolution;
                rem /= resolution;
                -half_width + i as f64 * spacing
            })
            .collect();
        space.exp(&space.combine(center, &basis, &c))
    };
    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|idx| frechet_value(space, sample, &lattice_point(idx)))
        .collect();
    let (best, f) = values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    (lattice_point(best), f)
}

/// Exhaustive minimization of the Fréchet function: a coarse lattice over
/// the search ball, then one fine lattice of half-width two coarse cells
/// around the coarse winner.
pub fn grid_oracle_center(
    space: &ModelSpace,
    sample: &WeightedSample,
    grid: &OracleGrid,
) -> Result<OracleResult> {
    check_supported(space)?;
    let n = grid.resolution;
    let coarse_spacing = 2.0 * grid.search_radius / (n - 1) as f64;
    let (coarse, _) = lattice_min(space, sample, &grid.center_hint, grid.search_radius, n);
    let fine_half = 2.0 * coarse_spacing;
    let (point, f_value) = lattice_min(space, sample, &coarse, fine_half, n);
    Ok(OracleResult {
        point,
        f_value,
        resolution_bound: 2.0 * fine_half / (n - 1) as f64,
    })
}

/// Max over the tangent basis at `x` of
/// `|(f(expₓ(h·u)) − f(expₓ(−h·u)))/2h + ⟨V(x), u⟩|`.
pub fn gradient_check(space: &ModelSpace, sample: &WeightedSample, x: &AmbientPoint, h: f64) -> Result<f64> {
    if !(1e-6..=1e-3).contains(&h) {
        return Err(Error::InvalidParameter(format!("step h = {h} outside [1e-6, 1e-3]")));
    }
    let space = space.riemannian();
    let v = mass_vector_field(&space, sample, x)?;
    let worst = space
        .tangent_basis(x)
        .iter()
        .map(|u| {
            let fp = frechet_value(&space, sample, &space.exp(&u.scale(h)));
            let fm = frechet_value(&space, sample, &space.exp(&u.scale(-h)));
            ((fp - fm) / (2.0 * h) + space.inner(&v, u)).abs()
        })
        .fold(0.0, f64::max);
    Ok(worst)
}
