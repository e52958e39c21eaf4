//! Explicit centers on the constant-curvature spaces: average in the
//! ambient ℝⁿ⁺¹ (Euclidean or Minkowski) and project back, plus the
//! cos-adapted field on Sⁿ whose zero is that projected mean.

use crate::error::{Error, Result};
use crate::manifold::{AmbientPoint, TangentVector, WeightedSample};
use crate::solver::{iterate_field, CenterField, ConvergenceReport, SolverConfig};
use crate::spaces::{minkowski, ModelSpace, SpaceKind};

/// Below this ambient norm the sphere projection is undefined.
pub const DEGENERATE_MEAN_NORM: f64 = 1e-12;

fn require_kind(sample: &WeightedSample, kind: SpaceKind) -> Result<usize> {
    let p = &sample.points()[0];
    if p.kind() != kind {
        return Err(Error::Unsupported(format!(
            "expected {} points, got {}",
            kind.name(),
            p.kind().name()
        )));
    }
    Ok(p.coords().len() - 1)
}

/// `μ/‖μ‖` for `μ = Σ mᵢpᵢ`.
pub fn embed_project_center_sphere(sample: &WeightedSample) -> Result<AmbientPoint> {
    require_kind(sample, SpaceKind::Sphere)?;
    let mu = sample.ambient_mean();
    let norm = mu.norm();
    if norm <= DEGENERATE_MEAN_NORM {
        return Err(Error::DegenerateMean { norm });
    }
    Ok(AmbientPoint::new(SpaceKind::Sphere, mu / norm))
}

/// `μ/√(−⟨μ,μ⟩ₘ)` for `μ = Σ mᵢpᵢ`; a convex combination of future unit
/// timelike vectors is always timelike.
pub fn embed_project_center_hyperbolic(sample: &WeightedSample) -> Result<AmbientPoint> {
    require_kind(sample, SpaceKind::Hyperboloid)?;
    let mu = sample.ambient_mean();
    let form = minkowski(&mu, &mu);
    if form.is_nan() || form >= 0.0 || mu[0] <= 0.0 {
        return Err(Error::NonTimelikeMean { form });
    }
    Ok(AmbientPoint::new(SpaceKind::Hyperboloid, mu / (-form).sqrt()))
}

/// `Σ mᵢ(1 − cos d(x, pᵢ)) = 1 − ⟨x, μ⟩` as a center field: its negative
/// gradient is the tangential part of `μ`. Smooth on all of Sⁿ.
pub struct CosAdaptedField {
    mu: nalgebra::DVector<f64>,
}

impl CosAdaptedField {
    pub fn new(sample: &WeightedSample) -> Result<Self> {
        require_kind(sample, SpaceKind::Sphere)?;
        Ok(Self {
            mu: sample.ambient_mean(),
        })
    }

    pub fn mean_norm(&self) -> f64 {
        self.mu.norm()
    }
}

impl CenterField for CosAdaptedField {
    fn field(&self, x: &AmbientPoint) -> Result<TangentVector> {
        let c = x.vector().dot(&self.mu);
        Ok(TangentVector::new(x.clone(), &self.mu - x.vector() * c))
    }

    fn energy(&self, x: &AmbientPoint) -> f64 {
        1.0 - x.vector().dot(&self.mu)
    }
}

/// `μ − ⟨x,μ⟩x`, the negative gradient of the cos-adapted cost at `x`.
pub fn cos_adapted_field_sphere(sample: &WeightedSample, x: &AmbientPoint) -> Result<TangentVector> {
    CosAdaptedField::new(sample)?.field(x)
}

/// Euler iteration of the cos-adapted field, started from the sample point
/// with the largest `⟨pᵢ, μ⟩`.
///
/// The field norm at angle `φ` from `μ/‖μ‖` is `‖μ‖·sin φ`, so the run stops
/// once it drops below `tolerance·‖μ‖`, putting the center within about
/// `tolerance` of the projected mean.
pub fn cos_center_sphere(sample: &WeightedSample, config: &SolverConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    let dim = require_kind(sample, SpaceKind::Sphere)?;
    let space = ModelSpace::sphere(dim)?;
    let field = CosAdaptedField::new(sample)?;
    let norm = field.mean_norm();
    if norm <= DEGENERATE_MEAN_NORM {
        return Err(Error::DegenerateMean { norm });
    }
    let mut best: Option<(&AmbientPoint, f64)> = None;
    for (_, p, _) in sample.canonical() {
        let e = field.energy(p);
        if best.is_none_or(|(_, eb)| e < eb) {
            best = Some((p, e));
        }
    }
    let start = best.expect("samples are never empty").0.clone();
    let scaled = SolverConfig {
        tolerance: config.tolerance * norm,
        ..config.clone()
    };
    Ok(iterate_field(&space, &field, &start, &scaled, None))
}
