use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use super::{flat_from_matrix, ModelSpace, SpaceKind, ROTATION_TOLERANCE};
use crate::error::{Error, Result};
use crate::manifold::{AmbientPoint, TangentVector};

/// An isometry of one of the model spaces, acting on ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum Isometry {
    /// `x ↦ A·x + t`, `A` orthogonal.
    Euclidean {
        rotation: DMatrix<f64>,
        translation: DVector<f64>,
    },
    /// `x ↦ A·x`, `A ∈ O(n+1)`.
    Sphere { rotation: DMatrix<f64> },
    /// `x ↦ Λ·x`, `Λ` preserving the Minkowski form and the upper sheet.
    Hyperboloid { lorentz: DMatrix<f64> },
    /// `Q ↦ L·Q·R` with `L, R ∈ SO(n)`.
    SpecialOrthogonal { left: DMatrix<f64>, right: DMatrix<f64> },
}

fn orthogonality_residual(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    (a.transpose() * a - DMatrix::identity(n, n)).norm()
}

fn minkowski_metric(len: usize) -> DMatrix<f64> {
    let mut j = DMatrix::identity(len, len);
    j[(0, 0)] = -1.0;
    j
}

fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R, proper: bool) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if proper && q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

impl Isometry {
    pub fn identity(space: &ModelSpace) -> Self {
        let len = space.ambient_len();
        match space.kind() {
            SpaceKind::Euclidean => Isometry::Euclidean {
                rotation: DMatrix::identity(len, len),
                translation: DVector::zeros(len),
            },
            SpaceKind::Sphere => Isometry::Sphere {
                rotation: DMatrix::identity(len, len),
            },
            SpaceKind::Hyperboloid => Isometry::Hyperboloid {
                lorentz: DMatrix::identity(len, len),
            },
            SpaceKind::SpecialOrthogonal => {
                let n = space.matrix_size().expect("SO(n) has a matrix size");
                Isometry::SpecialOrthogonal {
                    left: DMatrix::identity(n, n),
                    right: DMatrix::identity(n, n),
                }
            }
        }
    }

    /// Boost of rapidity `s` mixing the time axis with spatial axis `axis ≥ 1`.
    pub fn boost(dim: usize, axis: usize, rapidity: f64) -> Self {
        let mut lorentz = DMatrix::identity(dim + 1, dim + 1);
        let (sh, ch) = (rapidity.sinh(), rapidity.cosh());
        lorentz[(0, 0)] = ch;
        lorentz[(axis, axis)] = ch;
        lorentz[(0, axis)] = sh;
        lorentz[(axis, 0)] = sh;
        Isometry::Hyperboloid { lorentz }
    }

    /// A seeded random isometry: Haar-style orthogonal factors, translations
    /// in `[−2, 2]ⁿ`, boosts of rapidity in `[−1, 1]`.
    pub fn random<R: Rng + ?Sized>(space: &ModelSpace, rng: &mut R) -> Self {
        let len = space.ambient_len();
        match space.kind() {
            SpaceKind::Euclidean => {
                let u = Uniform::new(-2.0, 2.0).expect("valid range");
                Isometry::Euclidean {
                    rotation: random_orthogonal(len, rng, false),
                    translation: DVector::from_fn(len, |_, _| u.sample(rng)),
                }
            }
            SpaceKind::Sphere => Isometry::Sphere {
                rotation: random_orthogonal(len, rng, false),
            },
            SpaceKind::Hyperboloid => {
                let dim = len - 1;
                let spatial = |rng: &mut R| {
                    let mut m = DMatrix::identity(len, len);
                    m.view_mut((1, 1), (dim, dim))
                        .copy_from(&random_orthogonal(dim, rng, false));
                    m
                };
                let a = spatial(rng);
                let b = spatial(rng);
                let s = Uniform::new(-1.0, 1.0).expect("valid range").sample(rng);
                let Isometry::Hyperboloid { lorentz: boost } = Isometry::boost(dim, 1, s) else {
                    unreachable!()
                };
                Isometry::Hyperboloid {
                    lorentz: a * boost * b,
                }
            }
            SpaceKind::SpecialOrthogonal => {
                let n = space.matrix_size().expect("SO(n) has a matrix size");
                Isometry::SpecialOrthogonal {
                    left: random_orthogonal(n, rng, true),
                    right: random_orthogonal(n, rng, true),
                }
            }
        }
    }

    pub fn kind(&self) -> SpaceKind {
        match self {
            Isometry::Euclidean { .. } => SpaceKind::Euclidean,
            Isometry::Sphere { .. } => SpaceKind::Sphere,
            Isometry::Hyperboloid { .. } => SpaceKind::Hyperboloid,
            Isometry::SpecialOrthogonal { .. } => SpaceKind::SpecialOrthogonal,
        }
    }

    /// Checks the defining matrix identities to 1e-10.
    pub fn validate(&self, space: &ModelSpace) -> Result<()> {
        if self.kind() != space.kind() {
            return Err(Error::InvalidIsometry(format!(
                "{} isometry applied to {}",
                self.kind().name(),
                space.kind().name()
            )));
        }
        let len = space.ambient_len();
        let square = |m: &DMatrix<f64>, n: usize| -> Result<()> {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::InvalidIsometry(format!(
                    "expected {n}x{n} matrix, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            Ok(())
        };
        let orthogonal = |m: &DMatrix<f64>| -> Result<()> {
            let r = orthogonality_residual(m);
            if r > ROTATION_TOLERANCE {
                return Err(Error::InvalidIsometry(format!("not orthogonal, residual {r:e}")));
            }
            Ok(())
        };
        match self {
            Isometry::Euclidean { rotation, translation } => {
                square(rotation, len)?;
                if translation.len() != len {
                    return Err(Error::InvalidIsometry("translation length".into()));
                }
                orthogonal(rotation)
            }
            Isometry::Sphere { rotation } => {
                square(rotation, len)?;
                orthogonal(rotation)
            }
            Isometry::Hyperboloid { lorentz } => {
                square(lorentz, len)?;
                let j = minkowski_metric(len);
                let scale = lorentz.norm_squared().max(1.0);
                let r = (lorentz.transpose() * &j * lorentz - &j).norm();
                if r > ROTATION_TOLERANCE * scale {
                    return Err(Error::InvalidIsometry(format!(
                        "does not preserve the Minkowski form, residual {r:e}"
                    )));
                }
                if lorentz[(0, 0)] <= 0.0 {
                    return Err(Error::InvalidIsometry("reverses time orientation".into()));
                }
                Ok(())
            }
            Isometry::SpecialOrthogonal { left, right } => {
                let n = space.matrix_size().expect("SO(n) has a matrix size");
                square(left, n)?;
                square(right, n)?;
                orthogonal(left)?;
                orthogonal(right)?;
                if left.determinant() <= 0.0 || right.determinant() <= 0.0 {
                    return Err(Error::InvalidIsometry("factors must have det +1".into()));
                }
                Ok(())
            }
        }
    }

    /// Image of a point. Assumes `self` has been validated against the point's space.
    pub fn apply(&self, q: &AmbientPoint) -> AmbientPoint {
        let x = q.vector();
        let coords = match self {
            Isometry::Euclidean { rotation, translation } => rotation * x + translation,
            Isometry::Sphere { rotation } => rotation * x,
            Isometry::Hyperboloid { lorentz } => lorentz * x,
            Isometry::SpecialOrthogonal { left, right } => {
                flat_from_matrix(&(left * q.matrix() * right))
            }
        };
        AmbientPoint::new(q.kind(), coords)
    }

    /// Differential of the isometry acting on a tangent vector.
    pub fn push_forward(&self, v: &TangentVector) -> TangentVector {
        let w = v.vector();
        let coords = match self {
            Isometry::Euclidean { rotation, .. } => rotation * w,
            Isometry::Sphere { rotation } => rotation * w,
            Isometry::Hyperboloid { lorentz } => lorentz * w,
            Isometry::SpecialOrthogonal { left, right } => {
                flat_from_matrix(&(left * v.matrix() * right))
            }
        };
        TangentVector::new(self.apply(v.base()), coords)
    }
}
