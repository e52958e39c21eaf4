//! The four model spaces: Euclidean ℝⁿ, the sphere Sⁿ, hyperbolic space Hⁿ
//! in the hyperboloid model, and SO(n) with its bi-invariant metric.
//!
//! Points and tangent vectors live in ambient coordinates: ℝⁿ for ℝⁿ, ℝⁿ⁺¹
//! for Sⁿ and Hⁿ, row-major n×n matrices for SO(n). A tangent vector at
//! `Q ∈ SO(n)` is stored as `Q·Ω` with `Ω` skew-symmetric.

mod hyperboloid;
mod isometry;
pub mod rotation;
mod sphere;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

pub use hyperboloid::minkowski;
pub use isometry::Isometry;

use crate::error::{Error, Result};
use crate::manifold::{AmbientPoint, CurvatureData, PointCheck, TangentVector};

/// Principal angles (or sphere separations) closer than this to π are
/// treated as cut-locus points.
pub const CUT_LOCUS_MARGIN: f64 = 1e-6;

pub const POINT_TOLERANCE: f64 = 1e-12;
pub const ROTATION_TOLERANCE: f64 = 1e-10;
pub const TANGENT_TOLERANCE: f64 = 1e-10;

/// Largest supported matrix size for SO(n).
pub const MAX_ROTATION_SIZE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpaceKind {
    Euclidean,
    Sphere,
    Hyperboloid,
    SpecialOrthogonal,
}

impl SpaceKind {
    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::Euclidean => "euclidean",
            SpaceKind::Sphere => "sphere",
            SpaceKind::Hyperboloid => "hyperboloid",
            SpaceKind::SpecialOrthogonal => "special_orthogonal",
        }
    }
}

/// Which norm measures tangent vectors on SO(n). Exp and log come from the
/// bi-invariant connection and are the same for both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum NormFlavor {
    /// `‖V‖² = tr(VᵀV)`, the bi-invariant Riemannian metric.
    #[default]
    Frobenius,
    /// Spectral norm of `Ω = QᵀV`, a bi-invariant Finsler metric.
    Operator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpace {
    kind: SpaceKind,
    /// intrinsic dimension, or matrix size for SO(n)
    n: usize,
    flavor: NormFlavor,
}

impl ModelSpace {
    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::new(SpaceKind::Euclidean, dim, NormFlavor::Frobenius)
    }

    pub fn sphere(dim: usize) -> Result<Self> {
        Self::new(SpaceKind::Sphere, dim, NormFlavor::Frobenius)
    }

    pub fn hyperboloid(dim: usize) -> Result<Self> {
        Self::new(SpaceKind::Hyperboloid, dim, NormFlavor::Frobenius)
    }

    /// SO(n) for `2 ≤ n ≤ 8`.
    pub fn special_orthogonal(n: usize, flavor: NormFlavor) -> Result<Self> {
        Self::new(SpaceKind::SpecialOrthogonal, n, flavor)
    }

    /// `dim` is the intrinsic dimension, except for SO(n) where it is the matrix size `n`.
    pub fn new(kind: SpaceKind, dim: usize, flavor: NormFlavor) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        if kind == SpaceKind::SpecialOrthogonal && !(2..=MAX_ROTATION_SIZE).contains(&dim) {
            return Err(Error::Unsupported(format!(
                "SO({dim}): matrix size must be in 2..={MAX_ROTATION_SIZE}"
            )));
        }
        if kind != SpaceKind::SpecialOrthogonal && flavor != NormFlavor::Frobenius {
            return Err(Error::InvalidParameter(
                "norm_flavor only applies to special_orthogonal".into(),
            ));
        }
        Ok(Self { kind, n: dim, flavor })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn flavor(&self) -> NormFlavor {
        self.flavor
    }

    /// Same space with the Riemannian (Frobenius) norm.
    pub fn riemannian(&self) -> Self {
        Self { flavor: NormFlavor::Frobenius, ..*self }
    }

    pub fn with_flavor(&self, flavor: NormFlavor) -> Result<Self> {
        Self::new(self.kind, self.n, flavor)
    }

    pub fn intrinsic_dim(&self) -> usize {
        match self.kind {
            SpaceKind::SpecialOrthogonal => self.n * (self.n - 1) / 2,
            _ => self.n,
        }
    }

    /// Matrix size `n` for SO(n); `None` for the other spaces.
    pub fn matrix_size(&self) -> Option<usize> {
        (self.kind == SpaceKind::SpecialOrthogonal).then_some(self.n)
    }

    pub fn ambient_len(&self) -> usize {
        match self.kind {
            SpaceKind::Euclidean => self.n,
            SpaceKind::Sphere | SpaceKind::Hyperboloid => self.n + 1,
            SpaceKind::SpecialOrthogonal => self.n * self.n,
        }
    }

    pub fn curvature(&self) -> CurvatureData {
        match (self.kind, self.flavor) {
            (SpaceKind::Euclidean, _) => CurvatureData::new(0.0, 0.0, f64::INFINITY),
            (SpaceKind::Sphere, _) => CurvatureData::new(1.0, 1.0, PI),
            (SpaceKind::Hyperboloid, _) => CurvatureData::new(-1.0, -1.0, f64::INFINITY),
            // The sharp bound for tr(AᵀB) is 1/8 (attained inside any so(3)); 1/4 is kept
            // as a conservative upper bound. See the curvature tests below.
            (SpaceKind::SpecialOrthogonal, NormFlavor::Frobenius) => {
                CurvatureData::new(0.0, 0.25, PI * 2f64.sqrt())
            }
            // operator-norm lengths of a one-parameter subgroup are its largest angle rate
            (SpaceKind::SpecialOrthogonal, NormFlavor::Operator) => {
                CurvatureData::new(0.0, 0.25, PI)
            }
        }
    }

    /// Radius of the ball around a guess inside which the center is unique.
    ///
    /// Operator-norm SO(n) uses π/2 times the Frobenius radius, measured in
    /// operator-norm length.
    pub fn admissible_radius(&self) -> f64 {
        match self.flavor {
            NormFlavor::Frobenius => self.curvature().admissible_radius(),
            NormFlavor::Operator => 0.5 * PI * self.riemannian().admissible_radius(),
        }
    }

    // ---- points ------------------------------------------------------------

    /// A validated point.
    pub fn point(&self, coords: impl Into<Vec<f64>>) -> Result<AmbientPoint> {
        let q = AmbientPoint::new(self.kind, DVector::from_vec(coords.into()));
        match self.validate_point(&q) {
            PointCheck::Ok => Ok(q),
            violation => Err(Error::InvalidPoint {
                index: None,
                reason: violation.to_string(),
            }),
        }
    }

    /// A validated SO(n) point from a rotation matrix.
    pub fn rotation(&self, m: &DMatrix<f64>) -> Result<AmbientPoint> {
        self.point(m.transpose().as_slice().to_vec())
    }

    /// Sⁿ / Hⁿ base point `(1, 0, …, 0)`, the origin of ℝⁿ, or the identity of SO(n).
    pub fn origin(&self) -> AmbientPoint {
        let coords = match self.kind {
            SpaceKind::Euclidean => DVector::zeros(self.n),
            SpaceKind::Sphere | SpaceKind::Hyperboloid => {
                let mut c = DVector::zeros(self.n + 1);
                c[0] = 1.0;
                c
            }
            SpaceKind::SpecialOrthogonal => {
                let id = DMatrix::<f64>::identity(self.n, self.n);
                DVector::from_column_slice(id.as_slice())
            }
        };
        AmbientPoint::new(self.kind, coords)
    }

    pub fn validate_point(&self, q: &AmbientPoint) -> PointCheck {
        if q.kind() != self.kind {
            return PointCheck::Violation {
                invariant: "manifold tag",
                residual: f64::NAN,
            };
        }
        let x = q.vector();
        if x.len() != self.ambient_len() {
            return PointCheck::Violation {
                invariant: "ambient length",
                residual: (x.len() as f64 - self.ambient_len() as f64).abs(),
            };
        }
        if x.iter().any(|c| !c.is_finite()) {
            return PointCheck::Violation {
                invariant: "finite coordinates",
                residual: f64::INFINITY,
            };
        }
        match self.kind {
            SpaceKind::Euclidean => PointCheck::Ok,
            SpaceKind::Sphere => {
                let residual = x.norm() - 1.0;
                if residual.abs() <= POINT_TOLERANCE {
                    PointCheck::Ok
                } else {
                    PointCheck::Violation { invariant: "unit norm", residual }
                }
            }
            SpaceKind::Hyperboloid => {
                if x[0] <= 0.0 {
                    return PointCheck::Violation {
                        invariant: "upper sheet x0 > 0",
                        residual: x[0],
                    };
                }
                let residual = minkowski(x, x) + 1.0;
                // rounding in the form grows with x0²
                if residual.abs() <= POINT_TOLERANCE * x[0] * x[0] {
                    PointCheck::Ok
                } else {
                    PointCheck::Violation {
                        invariant: "minkowski norm <x,x> = -1",
                        residual,
                    }
                }
            }
            SpaceKind::SpecialOrthogonal => {
                let m = q.matrix();
                let residual = (m.transpose() * &m - DMatrix::identity(self.n, self.n)).norm();
                if residual > ROTATION_TOLERANCE {
                    return PointCheck::Violation {
                        invariant: "orthogonality Q^T Q = I",
                        residual,
                    };
                }
                let det = m.determinant();
                if det <= 0.0 {
                    return PointCheck::Violation {
                        invariant: "det Q > 0",
                        residual: det,
                    };
                }
                PointCheck::Ok
            }
        }
    }

    // ---- tangent vectors -----------------------------------------------------

    pub fn zero_tangent(&self, x: &AmbientPoint) -> TangentVector {
        TangentVector::new(x.clone(), DVector::zeros(x.vector().len()))
    }

    /// A tangent vector at `x`, rejected if it violates the tangency condition.
    pub fn tangent(&self, x: &AmbientPoint, coords: impl Into<Vec<f64>>) -> Result<TangentVector> {
        let v = TangentVector::new(x.clone(), DVector::from_vec(coords.into()));
        if v.vector().len() != x.vector().len() {
            return Err(Error::InvalidTangent("length differs from base point".into()));
        }
        let residual = self.tangency_residual(&v);
        if residual > TANGENT_TOLERANCE {
            return Err(Error::InvalidTangent(format!("tangency residual {residual:e}")));
        }
        Ok(v)
    }

    /// How far `v` is from the tangent space at its base, scaled by the
    /// magnitudes involved.
    pub fn tangency_residual(&self, v: &TangentVector) -> f64 {
        let x = v.base().vector();
        let w = v.vector();
        let scale = (x.norm() * w.norm()).max(1.0);
        match self.kind {
            SpaceKind::Euclidean => 0.0,
            SpaceKind::Sphere => x.dot(w).abs() / scale,
            SpaceKind::Hyperboloid => minkowski(x, w).abs() / scale,
            SpaceKind::SpecialOrthogonal => {
                let xi = v.base().matrix().transpose() * v.matrix();
                (&xi + xi.transpose()).norm() / scale
            }
        }
    }

    /// Orthogonal projection of an ambient vector onto `Tₓ`.
    pub fn project_tangent(&self, x: &AmbientPoint, ambient: DVector<f64>) -> TangentVector {
        let p = x.vector();
        let coords = match self.kind {
            SpaceKind::Euclidean => ambient,
            SpaceKind::Sphere => {
                let c = p.dot(&ambient);
                ambient - p * c
            }
            SpaceKind::Hyperboloid => {
                let c = minkowski(p, &ambient);
                ambient + p * c
            }
            SpaceKind::SpecialOrthogonal => {
                let q = x.matrix();
                let a = matrix_from_flat(&ambient, self.n);
                flat_from_matrix(&(&q * rotation::skew_part(&(q.transpose() * a))))
            }
        };
        TangentVector::new(x.clone(), coords)
    }

    /// Riemannian inner product of two tangent vectors at the same base.
    pub fn inner(&self, u: &TangentVector, v: &TangentVector) -> f64 {
        match self.kind {
            SpaceKind::Hyperboloid => minkowski(u.vector(), v.vector()),
            _ => u.vector().dot(v.vector()),
        }
    }

    /// Tangent norm in this space's flavor.
    pub fn norm(&self, v: &TangentVector) -> f64 {
        match (self.kind, self.flavor) {
            (SpaceKind::Hyperboloid, _) => hyperboloid::spacelike_norm(v.vector()),
            (SpaceKind::SpecialOrthogonal, NormFlavor::Operator) => {
                let xi = v.base().matrix().transpose() * v.matrix();
                xi.singular_values().max()
            }
            _ => v.vector().norm(),
        }
    }

    /// Deterministic orthonormal basis of `Tₓ`: pivoted Gram–Schmidt over
    /// the projected ambient coordinate directions, picking at each round the
    /// candidate with the largest residual (lowest index on ties).
    pub fn tangent_basis(&self, x: &AmbientPoint) -> Vec<TangentVector> {
        if self.kind == SpaceKind::Euclidean {
            return (0..self.n)
                .map(|i| {
                    let mut e = DVector::zeros(self.n);
                    e[i] = 1.0;
                    TangentVector::new(x.clone(), e)
                })
                .collect();
        }
        let len = self.ambient_len();
        let mut candidates: Vec<TangentVector> = (0..len)
            .map(|i| {
                let mut e = DVector::zeros(len);
                e[i] = 1.0;
                self.project_tangent(x, e)
            })
            .collect();
        let mut basis: Vec<TangentVector> = Vec::with_capacity(self.intrinsic_dim());
        while basis.len() < self.intrinsic_dim() {
            let (best, norm) = candidates
                .iter()
                .enumerate()
                .map(|(i, c)| (i, self.inner(c, c).max(0.0).sqrt()))
                .fold((0, -1.0), |acc, (i, n)| if n > acc.1 { (i, n) } else { acc });
            let b = candidates[best].scale(1.0 / norm);
            for c in candidates.iter_mut() {
                let a = self.inner(c, &b);
                *c = c.axpy(-a, &b);
            }
            basis.push(b);
        }
        basis
    }

    /// Coordinates of `v` in `basis`.
    pub fn coordinates(&self, basis: &[TangentVector], v: &TangentVector) -> DVector<f64> {
        DVector::from_iterator(basis.len(), basis.iter().map(|b| self.inner(b, v)))
    }

    /// `Σ cⱼ bⱼ`.
    pub fn combine(&self, x: &AmbientPoint, basis: &[TangentVector], c: &[f64]) -> TangentVector {
        let mut acc = DVector::zeros(x.vector().len());
        for (b, &cj) in basis.iter().zip(c) {
            acc.axpy(cj, b.vector(), 1.0);
        }
        TangentVector::new(x.clone(), acc)
    }

    // ---- geometry ------------------------------------------------------------

    /// `exp_x(v)` where `x` is the base of `v`.
    pub fn exp(&self, v: &TangentVector) -> AmbientPoint {
        let x = v.base().vector();
        let w = v.vector();
        let coords = match self.kind {
            SpaceKind::Euclidean => x + w,
            SpaceKind::Sphere => sphere::exp(x, w),
            SpaceKind::Hyperboloid => hyperboloid::exp(x, w),
            SpaceKind::SpecialOrthogonal => {
                let q = v.base().matrix();
                let omega = rotation::skew_part(&(q.transpose() * v.matrix()));
                flat_from_matrix(&(q * rotation::exp_skew(&omega)))
            }
        };
        AmbientPoint::new(self.kind, coords)
    }

    /// `logₓ(p) = exp⁻¹ₓ(p)`; fails with [`Error::CutLocus`] when `p` is in the cut locus of `x`.
    pub fn log(&self, x: &AmbientPoint, p: &AmbientPoint) -> Result<TangentVector> {
        let cut = || Error::CutLocus {
            index: None,
            base: x.coords().to_vec(),
            target: p.coords().to_vec(),
        };
        let (a, b) = (x.vector(), p.vector());
        let coords = match self.kind {
            SpaceKind::Euclidean => b - a,
            SpaceKind::Sphere => sphere::log(a, b).ok_or_else(cut)?,
            SpaceKind::Hyperboloid => hyperboloid::log(a, b),
            SpaceKind::SpecialOrthogonal => {
                let q = x.matrix();
                let omega = rotation::log_rotation(&(q.transpose() * p.matrix())).ok_or_else(cut)?;
                flat_from_matrix(&(q * omega))
            }
        };
        Ok(TangentVector::new(x.clone(), coords))
    }

    /// Geodesic distance in this space's flavor. Total: defined on the cut locus too.
    pub fn dist(&self, x: &AmbientPoint, p: &AmbientPoint) -> f64 {
        let (a, b) = (x.vector(), p.vector());
        match self.kind {
            SpaceKind::Euclidean => (b - a).norm(),
            SpaceKind::Sphere => sphere::dist(a, b),
            SpaceKind::Hyperboloid => hyperboloid::dist(a, b),
            SpaceKind::SpecialOrthogonal => {
                let angles = rotation::rotation_angles(&(x.matrix().transpose() * p.matrix()));
                match self.flavor {
                    NormFlavor::Frobenius => {
                        (2.0 * angles.iter().map(|t| t * t).sum::<f64>()).sqrt()
                    }
                    NormFlavor::Operator => angles.into_iter().fold(0.0, f64::max),
                }
            }
        }
    }

    /// Parallel transport of `v` along the minimizing geodesic to `target`.
    pub fn transport(&self, v: &TangentVector, target: &AmbientPoint) -> Result<TangentVector> {
        let x = v.base();
        let cut = || Error::CutLocus {
            index: None,
            base: x.coords().to_vec(),
            target: target.coords().to_vec(),
        };
        let (a, b, w) = (x.vector(), target.vector(), v.vector());
        let coords = match self.kind {
            SpaceKind::Euclidean => w.clone(),
            SpaceKind::Sphere => sphere::transport(a, b, w).ok_or_else(cut)?,
            SpaceKind::Hyperboloid => hyperboloid::transport(a, b, w),
            SpaceKind::SpecialOrthogonal => {
                // left-trivialized: ξ ↦ exp(−Ω/2)·ξ·exp(Ω/2) with y = x·exp(Ω)
                let q = x.matrix();
                let y = target.matrix();
                let omega = rotation::log_rotation(&(q.transpose() * &y)).ok_or_else(cut)?;
                let half = rotation::exp_skew(&(omega * 0.5));
                let xi = q.transpose() * v.matrix();
                flat_from_matrix(&(y * half.transpose() * xi * half))
            }
        };
        Ok(TangentVector::new(target.clone(), coords))
    }

    pub fn apply_isometry(&self, g: &Isometry, q: &AmbientPoint) -> Result<AmbientPoint> {
        g.validate(self)?;
        Ok(g.apply(q))
    }

    /// `exp(center, v)` for `v` uniform in the tangent ball of Riemannian
    /// radius `r`: a uniform direction times `r·U^(1/dim)`.
    pub fn random_point_in_ball<R: Rng + ?Sized>(
        &self,
        center: &AmbientPoint,
        r: f64,
        rng: &mut R,
    ) -> Result<AmbientPoint> {
        Ok(self.exp(&self.random_tangent_in_ball(center, r, rng)?))
    }

    pub fn random_tangent_in_ball<R: Rng + ?Sized>(
        &self,
        center: &AmbientPoint,
        r: f64,
        rng: &mut R,
    ) -> Result<TangentVector> {
        let limit = self.riemannian().admissible_radius();
        if !(r > 0.0 && r.is_finite() && r <= limit) {
            return Err(Error::InvalidParameter(format!(
                "ball radius {r} outside (0, {limit}]"
            )));
        }
        let k = self.intrinsic_dim();
        let mut dir: Vec<f64> = (0..k).map(|_| StandardNormal.sample(rng)).collect();
        let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
        let u: f64 = Uniform::new(0.0, 1.0).expect("valid range").sample(rng);
        let radius = r * u.powf(1.0 / k as f64);
        dir.iter_mut().for_each(|d| *d *= radius / norm);
        let basis = self.tangent_basis(center);
        Ok(self.combine(center, &basis, &dir))
    }

    /// Uniformly distributed unit tangent vector at `x`.
    pub fn random_unit_tangent<R: Rng + ?Sized>(&self, x: &AmbientPoint, rng: &mut R) -> TangentVector {
        let k = self.intrinsic_dim();
        let mut dir: Vec<f64> = (0..k).map(|_| StandardNormal.sample(rng)).collect();
        let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
        dir.iter_mut().for_each(|d| *d /= norm);
        self.combine(x, &self.tangent_basis(x), &dir)
    }
}

pub(crate) fn matrix_from_flat(v: &DVector<f64>, n: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, n, v.as_slice())
}

pub(crate) fn flat_from_matrix(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(m.len(), m.transpose().iter().copied())
}
