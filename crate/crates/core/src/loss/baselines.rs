//! Baseline pose-regression losses: PoseNet, homoscedastic uncertainty,
//! geometric reprojection and MaxError.

use nalgebra::Vector3;

use crate::diff::Real;
use crate::error::{Error, Result};
use crate::geometry::{project, project_camera_point, Intrinsics, Pose, Projection};

fn l2<T: Real>(v: &Vector3<T>) -> T {
    (v.x * v.x + v.y * v.y + v.z * v.z).sqrt()
}

fn l1<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, x| acc + x.abs())
}

/// `‖t̂ - t‖₂ + β ‖q̂ - q/‖q‖‖₂`. The estimate's quaternion is used raw, the
/// ground truth's is normalized.
pub fn posenet_loss<T: Real>(est: &Pose<T>, gt: &Pose, beta: f64) -> Result<T> {
    let q = gt.q.normalized()?.lift::<T>();
    let dt = est.t - gt.t.map(T::cst);
    let dq = Vector4Diff::new(&est.q.as_array(), &q.as_array());
    Ok(l2(&dt) + T::cst(beta) * dq.norm())
}

/// `‖t̂ - t‖₁ e^{-ŝ_t} + ŝ_t + ‖q - q̂/‖q̂‖‖₁ e^{-ŝ_q} + ŝ_q`.
pub fn homoscedastic_loss<T: Real>(est: &Pose<T>, gt: &Pose, s_t: T, s_q: T) -> Result<T> {
    let qn = est.q.normalized()?;
    let dt = est.t - gt.t.map(T::cst);
    let q = gt.q.lift::<T>();
    let dq = [q.w - qn.w, q.x - qn.x, q.y - qn.y, q.z - qn.z];
    Ok(l1(&[dt.x, dt.y, dt.z]) * (-s_t).exp() + s_t + l1(&dq) * (-s_q).exp() + s_q)
}

/// Mean over `points` of `min(clip, ‖π(gt, P) - π(est, P)‖₁)`.
///
/// A point projecting to infinity under either pose contributes exactly
/// `clip`; with `clip = ∞` the loss is then infinite. Clipped points carry
/// zero gradient.
pub fn geometric_loss<T: Real>(
    est: &Pose<T>,
    gt: &Pose,
    points: &[Vector3<f64>],
    k: &Intrinsics,
    clip: f64,
) -> Result<T> {
    if points.is_empty() {
        return Err(Error::invalid("geometric loss needs at least one point"));
    }
    if !(clip > 0.0) {
        return Err(Error::invalid("reprojection clip must be positive"));
    }
    let clip_t = T::cst(clip);
    let r_est_t = crate::geometry::quat_to_rotmat(&est.q)?.transpose();
    let mut sum = T::zero();
    for p in points {
        let target = project(gt, k, p)?.pixel();
        let pc = r_est_t * (p.map(T::cst) - est.t);
        let term = match (target, project_camera_point(k, &pc)) {
            (Some(a), Projection::Finite { pixel, .. }) => {
                let d = (pixel.x - T::cst(a.x)).abs() + (pixel.y - T::cst(a.y)).abs();
                d.min_val(clip_t)
            }
            _ => clip_t,
        };
        sum += term;
    }
    Ok(sum / T::cst(points.len() as f64))
}

/// `max(∠(q, q̂) in degrees, ‖t̂ - t‖ in cm) + w (‖q̂‖ - 1)²`.
///
/// The angle is scale invariant in `q̂` and evaluates to zero for a zero
/// estimate, so the null quaternion is only penalized by the regularizer.
/// Exact ties take the translation branch.
pub fn max_error_loss<T: Real>(est: &Pose<T>, gt: &Pose, reg_weight: f64) -> Result<T> {
    let q = gt.q.normalized()?.lift::<T>();
    let d = q.conj_mul(&est.q);
    let v = (d.x * d.x + d.y * d.y + d.z * d.z).sqrt();
    let angle = T::cst(360.0 / std::f64::consts::PI) * v.atan2(d.w.abs());
    let trans_cm = T::cst(100.0) * l2(&(est.t - gt.t.map(T::cst)));
    let mut dn = est.q.norm() - T::one();
    if dn.val().abs() <= 4.0 * f64::EPSILON {
        dn += T::cst(-dn.val());
    }
    Ok(trans_cm.max_val(angle) + T::cst(reg_weight) * dn * dn)
}

struct Vector4Diff<T>([T; 4]);

impl<T: Real> Vector4Diff<T> {
    fn new(a: &[T; 4], b: &[T; 4]) -> Self {
        Self([a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]])
    }

    fn norm(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, x| acc + *x * *x).sqrt()
    }
}
