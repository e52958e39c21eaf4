//! Unit sphere Sⁿ ⊂ ℝⁿ⁺¹ with the round metric.

use nalgebra::DVector;

use super::CUT_LOCUS_MARGIN;

/// `sin(t)/t`, accurate near zero.
pub(crate) fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        t.sin() / t
    }
}

pub(crate) fn exp(x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
    let t = v.norm();
    let y = x * t.cos() + v * sinc(t);
    let n = y.norm();
    y / n
}

/// Geodesic distance, `2·atan2(|p−x|, |p+x|)`; equal to `arccos⟨x,p⟩` but
/// keeps full precision at both ends of `[0, π]`.
pub(crate) fn dist(x: &DVector<f64>, p: &DVector<f64>) -> f64 {
    2.0 * (p - x).norm().atan2((p + x).norm())
}

/// Component of `p` orthogonal to `x`, computed as `(p−x) + ½|p−x|²·x` to
/// avoid the cancellation in `p − ⟨x,p⟩x` when `p ≈ x`.
fn orthogonal_part(x: &DVector<f64>, p: &DVector<f64>) -> DVector<f64> {
    let w = p - x;
    let half_chord2 = 0.5 * w.norm_squared();
    let u = &w + x * half_chord2;
    // re-project; the formula above is exact only for unit x, p
    let c = x.dot(&u);
    u - x * c
}

pub(crate) fn log(x: &DVector<f64>, p: &DVector<f64>) -> Option<DVector<f64>> {
    let theta = dist(x, p);
    if std::f64::consts::PI - theta < CUT_LOCUS_MARGIN {
        return None;
    }
    let u = orthogonal_part(x, p);
    let s = u.norm();
    if s == 0.0 {
        return Some(DVector::zeros(x.len()));
    }
    Some(u * (theta / s))
}

/// Parallel transport of `w ∈ TₓSⁿ` to `T_ySⁿ` along the minimizing geodesic.
pub(crate) fn transport(
    x: &DVector<f64>,
    y: &DVector<f64>,
    w: &DVector<f64>,
) -> Option<DVector<f64>> {
    let u = log(x, y)?;
    let theta = u.norm();
    if theta == 0.0 {
        return Some(w.clone());
    }
    let dir = u / theta;
    let a = dir.dot(w);
    Some(w + (&dir * (theta.cos() - 1.0) - x * theta.sin()) * a)
}
