//! Matrix exponential and principal logarithm on SO(n).
//!
//! n = 2, 3 use closed forms (planar angle, Rodrigues). For 4 ≤ n ≤ 8 the
//! logarithm goes through the eigendecomposition of the symmetric part.

use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen, Vector3};

use super::sphere::sinc;
use super::CUT_LOCUS_MARGIN;

pub(crate) fn skew_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m - m.transpose()) * 0.5
}

/// `(1 − cos t)/t²`, accurate near zero.
fn versinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let t2 = t * t;
        0.5 - t2 / 24.0 + t2 * t2 / 720.0
    } else {
        (1.0 - t.cos()) / (t * t)
    }
}

fn vee3(m: &DMatrix<f64>) -> Vector3<f64> {
    Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
}

fn hat3(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

fn planar(theta: f64) -> DMatrix<f64> {
    let (s, c) = theta.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// Exponential of a skew-symmetric matrix.
pub fn exp_skew(omega: &DMatrix<f64>) -> DMatrix<f64> {
    match omega.nrows() {
        1 => DMatrix::identity(1, 1),
        2 => planar(omega[(1, 0)]),
        3 => {
            let w = vee3(omega);
            let theta = w.norm();
            let k = hat3(&w);
            let r = Matrix3::identity() + k * sinc(theta) + k * k * versinc(theta);
            DMatrix::from_iterator(3, 3, r.iter().copied())
        }
        _ => omega.exp(),
    }
}

/// Rotation angle of a 3×3 rotation and the matching `θ / sin θ` weight on its
/// skew part.
fn angle3(r: &DMatrix<f64>) -> (f64, Vector3<f64>) {
    let s = vee3(&skew_part(r));
    let c = 0.5 * (r.trace() - 1.0);
    (s.norm().atan2(c), s)
}

/// Eigenvectors `qₖ` of the symmetric part of `r` with their angles
/// `θₖ = atan2(‖S qₖ‖, λₖ)`, `S` the skew part. The two parts commute, so
/// every invariant plane of angle `θ` contributes two eigenvectors.
fn eigen_angles(r: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let s = skew_part(r);
    let eig = SymmetricEigen::new((r + r.transpose()) * 0.5);
    let angles = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(&c, q)| (&s * q).norm().atan2(c))
        .collect();
    (eig.eigenvectors, angles)
}

/// Principal angles `θₖ ∈ [0, π]` of a rotation, one per invariant 2-plane
/// (⌊n/2⌋ entries, zeros included). Total: never fails, even at `θ = π`.
pub fn rotation_angles(r: &DMatrix<f64>) -> Vec<f64> {
    match r.nrows() {
        1 => vec![],
        2 => vec![r[(1, 0)].atan2(r[(0, 0)]).abs()],
        3 => vec![angle3(r).0],
        _ => {
            let (_, mut angles) = eigen_angles(r);
            angles.sort_by(|a, b| b.total_cmp(a));
            angles.into_iter().step_by(2).take(r.nrows() / 2).collect()
        }
    }
}

/// Principal logarithm of a rotation. `None` when some principal angle is
/// within [`CUT_LOCUS_MARGIN`] of π.
pub fn log_rotation(r: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let near_pi = |a: f64| std::f64::consts::PI - a.abs() < CUT_LOCUS_MARGIN;
    let n = r.nrows();
    match n {
        1 => Some(DMatrix::zeros(1, 1)),
        2 => {
            let theta = r[(1, 0)].atan2(r[(0, 0)]);
            if near_pi(theta) {
                return None;
            }
            Some(DMatrix::from_row_slice(2, 2, &[0.0, -theta, theta, 0.0]))
        }
        3 => {
            let (theta, s) = angle3(r);
            if near_pi(theta) {
                return None;
            }
            let sin = s.norm();
            let w = if sin == 0.0 { s } else { s * (theta / sin) };
            let k = hat3(&w);
            Some(DMatrix::from_iterator(3, 3, k.iter().copied()))
        }
        _ => {
            // log R = S·Σ (θₖ / sin θₖ) qₖqₖᵀ
            let (q, angles) = eigen_angles(r);
            if angles.iter().any(|&a| near_pi(a)) {
                return None;
            }
            let weights = DVector::from_iterator(n, angles.iter().map(|&a| 1.0 / sinc(a)));
            let f = &q * DMatrix::from_diagonal(&weights) * q.transpose();
            Some(skew_part(&(skew_part(r) * f)))
        }
    }
}
