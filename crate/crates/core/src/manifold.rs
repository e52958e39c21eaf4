//! Points, tangent vectors, weighted samples, and the two objects everything
//! else is built on: the averaged logarithm field `V(x) = Σ mᵢ·logₓ(pᵢ)` and
//! the Fréchet function `f(x) = ½ Σ mᵢ·d(x, pᵢ)²`, whose gradient is `−V`.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spaces::{matrix_from_flat, ModelSpace, SpaceKind};

/// Tolerance on `|Σ mᵢ − 1|` below which masses are silently renormalized.
pub const MASS_SUM_TOLERANCE: f64 = 1e-6;

/// A manifold point in ambient coordinates, tagged with its model space.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientPoint {
    kind: SpaceKind,
    coords: DVector<f64>,
}

impl AmbientPoint {
    /// Unvalidated constructor; use [`ModelSpace::point`] for checked input.
    pub fn new(kind: SpaceKind, coords: DVector<f64>) -> Self {
        Self { kind, coords }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn coords(&self) -> &[f64] {
        self.coords.as_slice()
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.coords
    }

    /// Square matrix view of SO(n) coordinates (stored row-major).
    pub fn matrix(&self) -> DMatrix<f64> {
        matrix_from_flat(&self.coords, square_side(self.coords.len()))
    }
}

fn square_side(len: usize) -> usize {
    let n = (len as f64).sqrt().round() as usize;
    debug_assert_eq!(n * n, len, "coordinates are not a square matrix");
    n
}

/// A tangent vector: its base point and ambient coordinates of the same shape.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: AmbientPoint,
    coords: DVector<f64>,
}

impl TangentVector {
    /// Unvalidated constructor; use [`ModelSpace::tangent`] for checked input.
    pub fn new(base: AmbientPoint, coords: DVector<f64>) -> Self {
        Self { base, coords }
    }

    pub fn base(&self) -> &AmbientPoint {
        &self.base
    }

    pub fn coords(&self) -> &[f64] {
        self.coords.as_slice()
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        matrix_from_flat(&self.coords, square_side(self.coords.len()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.base.clone(), &self.coords * s)
    }

    /// `self + a·other`, keeping `self`'s base.
    pub fn axpy(&self, a: f64, other: &TangentVector) -> Self {
        let mut coords = self.coords.clone();
        coords.axpy(a, &other.coords, 1.0);
        Self::new(self.base.clone(), coords)
    }
}

/// Result of [`ModelSpace::validate_point`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointCheck {
    Ok,
    Violation {
        invariant: &'static str,
        residual: f64,
    },
}

impl PointCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, PointCheck::Ok)
    }
}

impl fmt::Display for PointCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointCheck::Ok => write!(f, "ok"),
            PointCheck::Violation { invariant, residual } => {
                write!(f, "violates {invariant} (residual {residual:e})")
            }
        }
    }
}

/// Sectional curvature bounds and injectivity radius of a model space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureData {
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub injectivity_radius: f64,
}

impl CurvatureData {
    pub fn new(kappa_min: f64, kappa_max: f64, injectivity_radius: f64) -> Self {
        debug_assert!(kappa_min <= kappa_max && injectivity_radius > 0.0);
        Self {
            kappa_min,
            kappa_max,
            injectivity_radius,
        }
    }

    /// `min(inj/2, π/(4√κ_max))` for positive `κ_max`, `inj/2` otherwise.
    pub fn admissible_radius(&self) -> f64 {
        let half_inj = 0.5 * self.injectivity_radius;
        if self.kappa_max > 0.0 {
            half_inj.min(PI / (4.0 * self.kappa_max.sqrt()))
        } else {
            half_inj
        }
    }
}

/// Mass points `pᵢ` with positive weights `mᵢ`, `Σ mᵢ = 1`.
///
/// Sums over the sample run in a canonical order (lexicographic in the
/// coordinates, then mass) so results do not depend on input order.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    points: Vec<AmbientPoint>,
    masses: Vec<f64>,
    order: Vec<usize>,
}

impl WeightedSample {
    /// Validates every point on `space`. `masses = None` means uniform.
    /// Masses off from unit sum by at most 1e-6 are renormalized.
    pub fn new(
        space: &ModelSpace,
        points: Vec<AmbientPoint>,
        masses: Option<Vec<f64>>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySample);
        }
        let masses = masses.unwrap_or_else(|| vec![1.0 / points.len() as f64; points.len()]);
        if masses.len() != points.len() {
            return Err(Error::LengthMismatch {
                points: points.len(),
                masses: masses.len(),
            });
        }
        for (i, p) in points.iter().enumerate() {
            let check = space.validate_point(p);
            if !check.is_ok() {
                return Err(Error::InvalidPoint {
                    index: Some(i),
                    reason: check.to_string(),
                });
            }
        }
        if let Some((index, &value)) = masses
            .iter()
            .enumerate()
            .find(|(_, m)| !(m.is_finite() && **m > 0.0))
        {
            return Err(Error::InvalidMass { index, value });
        }
        let sum: f64 = masses.iter().sum();
        if (sum - 1.0).abs() > MASS_SUM_TOLERANCE {
            return Err(Error::MassSum { sum });
        }
        let masses = masses.into_iter().map(|m| m / sum).collect();
        Ok(Self::from_parts(points, masses))
    }

    pub fn uniform(space: &ModelSpace, points: Vec<AmbientPoint>) -> Result<Self> {
        Self::new(space, points, None)
    }

    fn from_parts(points: Vec<AmbientPoint>, masses: Vec<f64>) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| {
            points[a]
                .coords()
                .iter()
                .zip(points[b].coords())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
                .then(masses[a].total_cmp(&masses[b]))
                .then(a.cmp(&b))
        });
        Self {
            points,
            masses,
            order,
        }
    }

    pub fn points(&self) -> &[AmbientPoint] {
        &self.points
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `(input index, point, mass)` in canonical order.
    pub fn canonical(&self) -> impl Iterator<Item = (usize, &AmbientPoint, f64)> + '_ {
        self.order
            .iter()
            .map(move |&i| (i, &self.points[i], self.masses[i]))
    }

    /// Same masses, points mapped through `f` (e.g. an isometry).
    pub fn map_points(&self, f: impl Fn(&AmbientPoint) -> AmbientPoint) -> Self {
        Self::from_parts(self.points.iter().map(f).collect(), self.masses.clone())
    }

    /// Same points with new masses (validated and renormalized as in [`WeightedSample::new`]).
    pub fn with_masses(&self, space: &ModelSpace, masses: Vec<f64>) -> Result<Self> {
        Self::new(space, self.points.clone(), Some(masses))
    }

    /// `Σ mᵢ·pᵢ` in ambient coordinates.
    pub fn ambient_mean(&self) -> DVector<f64> {
        let mut mu = DVector::zeros(self.points[0].coords().len());
        for (_, p, m) in self.canonical() {
            mu.axpy(m, p.vector(), 1.0);
        }
        mu
    }
}

/// `V(x) = Σ mᵢ·logₓ(pᵢ)`. A cut-locus failure names the offending point.
pub fn mass_vector_field(
    space: &ModelSpace,
    sample: &WeightedSample,
    x: &AmbientPoint,
) -> Result<TangentVector> {
    let mut acc = DVector::zeros(x.coords().len());
    for (i, p, m) in sample.canonical() {
        let l = space.log(x, p).map_err(|e| e.with_index(i))?;
        acc.axpy(m, l.vector(), 1.0);
    }
    Ok(TangentVector::new(x.clone(), acc))
}

/// `f(x) = ½ Σ mᵢ·d(x, pᵢ)²` with the space's distance.
pub fn frechet_value(space: &ModelSpace, sample: &WeightedSample, x: &AmbientPoint) -> f64 {
    0.5 * sample
        .canonical()
        .map(|(_, p, m)| {
            let d = space.dist(x, p);
            m * d * d
        })
        .sum::<f64>()
}

/// Largest `d(x, pᵢ)`.
pub fn max_point_distance(space: &ModelSpace, sample: &WeightedSample, x: &AmbientPoint) -> f64 {
    sample
        .canonical()
        .map(|(_, p, _)| space.dist(x, p))
        .fold(0.0, f64::max)
}

/// Finite-difference estimate of the covariant differential `DV` at `x`,
/// as a matrix in the orthonormal basis from [`ModelSpace::tangent_basis`].
///
/// Column `j` is `(P V(expₓ(h·eⱼ)) − P V(expₓ(−h·eⱼ))) / 2h`, where `P` is
/// parallel transport back to `x`. Always uses the Riemannian structure.
pub fn numerical_covariant_differential(
    space: &ModelSpace,
    sample: &WeightedSample,
    x: &AmbientPoint,
    h: f64,
) -> Result<DMatrix<f64>> {
    let space = space.riemannian();
    if !(h > 0.0 && h <= 1e-3) {
        return Err(Error::InvalidParameter(format!("step h = {h} outside (0, 1e-3]")));
    }
    let slack = space.admissible_radius() - max_point_distance(&space, sample, x);
    if h >= slack {
        return Err(Error::InvalidParameter(format!(
            "step h = {h} too large: admissible radius slack at x is {slack}"
        )));
    }
    let basis = space.tangent_basis(x);
    let k = basis.len();
    let mut out = DMatrix::zeros(k, k);
    for (j, e) in basis.iter().enumerate() {
        let mut diff = space.zero_tangent(x);
        for sign in [1.0, -1.0] {
            let y = space.exp(&e.scale(sign * h));
            let v = mass_vector_field(&space, sample, &y)?;
            diff = diff.axpy(sign, &space.transport(&v, x)?);
        }
        let col = space.coordinates(&basis, &diff) / (2.0 * h);
        out.set_column(j, &col);
    }
    Ok(out)
}
