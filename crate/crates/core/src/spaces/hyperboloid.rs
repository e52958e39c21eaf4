//! Hyperboloid model of Hⁿ: `{x ∈ ℝⁿ⁺¹ : ⟨x,x⟩ₘ = −1, x₀ > 0}`.

use nalgebra::DVector;

/// Minkowski form `−x₀y₀ + Σᵢ≥1 xᵢyᵢ`.
pub fn minkowski(x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    x.dot(y) - 2.0 * x[0] * y[0]
}

/// `arccosh(1 + t)` for `t ≥ 0` without forming `1 + t`.
pub(crate) fn acosh1p(t: f64) -> f64 {
    let t = t.max(0.0);
    (t + (t * (t + 2.0)).sqrt()).ln_1p()
}

/// `sinh(t)/t`, accurate near zero.
fn sinhc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 + t2 / 6.0 + t2 * t2 / 120.0
    } else {
        t.sinh() / t
    }
}

/// Minkowski norm of a spacelike (tangent) vector.
pub(crate) fn spacelike_norm(v: &DVector<f64>) -> f64 {
    minkowski(v, v).max(0.0).sqrt()
}

/// Re-solve the time coordinate so the point sits exactly on the upper sheet.
fn lift(mut y: DVector<f64>) -> DVector<f64> {
    let spatial2: f64 = y.iter().skip(1).map(|c| c * c).sum();
    y[0] = (1.0 + spatial2).sqrt();
    y
}

pub(crate) fn exp(x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let t = spacelike_norm(v);
    lift(x * t.cosh() + v * sinhc(t))
}

/// `−⟨x,p⟩ₘ − 1`, computed from the chord `p − x` (`⟨p−x,p−x⟩ₘ = 2(−⟨x,p⟩ₘ − 1)`).
fn cosh_minus_one(x: &DVector<f64>, p: &DVector<f64>) -> f64 {
    let w = p - x;
    (0.5 * minkowski(&w, &w)).max(0.0)
}

pub(crate) fn dist(x: &DVector<f64>, p: &DVector<f64>) -> f64 {
    acosh1p(cosh_minus_one(x, p))
}

pub(crate) fn log(x: &DVector<f64>, p: &DVector<f64>) -> DVector<f64> {
    let t = cosh_minus_one(x, p);
    let d = acosh1p(t);
    // p + ⟨x,p⟩ₘ·x rewritten as (p − x) − t·x
    let mut u = (p - x) - x * t;
    let drift = minkowski(x, &u);
    u += x * drift;
    let s = spacelike_norm(&u);
    if s == 0.0 || d == 0.0 {
        return DVector::zeros(x.len());
    }
    u * (d / s)
}

/// Parallel transport of `w ∈ TₓHⁿ` to `T_yHⁿ` along the geodesic.
pub(crate) fn transport(x: &DVector<f64>, y: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
    let u = log(x, y);
    let theta = spacelike_norm(&u);
    if theta == 0.0 {
        return w.clone();
    }
    let dir = u / theta;
    let a = minkowski(&dir, w);
    w + (&dir * (theta.cosh() - 1.0) + x * theta.sinh()) * a
}
