//! Poses, quaternions, pinhole projection and plane-induced homographies.
//!
//! Conventions:
//! - A [`Pose`] is world-from-camera: `t` is the camera centre in world
//!   coordinates and `q` rotates camera-frame vectors into the world frame.
//! - Quaternions are stored `(w, x, y, z)`.
//! - Camera frame: `z` along the optical axis, `x` right, `y` down.

use nalgebra::{Matrix3, Vector2, Vector3};

use crate::diff::Real;
use crate::error::{Error, Result};

/// Camera-frame depth below which a point is treated as projecting to
/// infinity.
pub const AT_INFINITY_DEPTH: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quat<T = f64> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Quat<T> {
    pub fn new(w: T, x: T, y: T, z: T) -> Self {
        Self { w, x, y, z }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::zero())
    }

    pub fn as_array(&self) -> [T; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn from_array(a: [T; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn norm_squared(&self) -> T {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn dot(&self, o: &Self) -> T {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    /// Unit quaternion in the same direction; errors on a zero quaternion.
    ///
    /// Inputs already unit to within a few ulps keep their values exactly
    /// (derivatives still flow through the normalization).
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n.val() > 0.0) {
            return Err(Error::invalid("zero-norm quaternion"));
        }
        let mut inv = T::one() / n;
        if (n.val() - 1.0).abs() <= 4.0 * f64::EPSILON {
            inv += T::cst(1.0 - inv.val());
        }
        Ok(self.scale(inv))
    }

    /// Hamilton product `self ⊗ o`.
    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = (self, o);
        Self::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }

    /// `conj(self) ⊗ o`, grouped so that equal inputs give an exactly zero
    /// vector part.
    pub fn conj_mul(&self, o: &Self) -> Self {
        let (a, b) = (self, o);
        Self::new(
            a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z,
            (a.w * b.x - b.w * a.x) - (a.y * b.z - a.z * b.y),
            (a.w * b.y - b.w * a.y) - (a.z * b.x - a.x * b.z),
            (a.w * b.z - b.w * a.z) - (a.x * b.y - a.y * b.x),
        )
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> Quat<U> {
        Quat::new(f(self.w), f(self.x), f(self.y), f(self.z))
    }
}

impl Quat<f64> {
    /// Rotation of `angle` radians about `axis` (normalized internally).
    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64) -> Self {
        let a = axis.normalize();
        let (s, c) = (0.5 * angle).sin_cos();
        Self::new(c, a.x * s, a.y * s, a.z * s)
    }

    /// Unit norm with non-negative scalar part.
    ///
    /// Already-unit inputs (within a few ulps) are kept bit-for-bit, so
    /// canonicalization is idempotent.
    pub fn canonical(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::invalid("zero-norm quaternion"));
        }
        let q = if (n - 1.0).abs() <= 4.0 * f64::EPSILON {
            *self
        } else {
            self.scale(1.0 / n)
        };
        Ok(if q.w < 0.0 { q.scale(-1.0) } else { q })
    }

    pub fn lift<T: Real>(&self) -> Quat<T> {
        self.map(T::cst)
    }
}

/// Camera pose `(t, q)`, world-from-camera.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose<T = f64> {
    pub t: Vector3<T>,
    pub q: Quat<T>,
}

impl<T: Real> Pose<T> {
    pub fn new(t: Vector3<T>, q: Quat<T>) -> Self {
        Self { t, q }
    }

    /// Flat parameter view `(tx, ty, tz, qw, qx, qy, qz)`.
    pub fn params(&self) -> [T; 7] {
        [
            self.t.x, self.t.y, self.t.z, self.q.w, self.q.x, self.q.y, self.q.z,
        ]
    }

    pub fn from_params(p: &[T]) -> Self {
        Self::new(
            Vector3::new(p[0], p[1], p[2]),
            Quat::new(p[3], p[4], p[5], p[6]),
        )
    }

    /// Maps a world point into this camera's frame.
    pub fn world_to_camera(&self, p: &Vector3<T>) -> Result<Vector3<T>> {
        let r = quat_to_rotmat(&self.q)?;
        Ok(r.transpose() * (p - self.t))
    }
}

impl Pose<f64> {
    pub fn identity() -> Self {
        Self::new(Vector3::zeros(), Quat::identity())
    }

    pub fn lift<T: Real>(&self) -> Pose<T> {
        Pose::new(self.t.map(T::cst), self.q.lift())
    }

    /// `self ∘ delta`: `delta` is expressed in this camera's frame.
    pub fn compose(&self, delta: &Pose) -> Result<Pose> {
        let r = quat_to_rotmat(&self.q)?;
        Ok(Pose::new(
            self.t + r * delta.t,
            self.q.normalized()?.mul(&delta.q.normalized()?),
        ))
    }

    /// Copy with a unit, non-negative-scalar quaternion.
    pub fn canonical(&self) -> Result<Pose> {
        Ok(Pose::new(self.t, self.q.canonical()?))
    }
}

/// Ground-truth camera expressed in the estimated camera frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativePose<T = f64> {
    pub r: Matrix3<T>,
    pub t: Vector3<T>,
}

impl<T: Real> RelativePose<T> {
    pub fn identity() -> Self {
        Self {
            r: Matrix3::identity(),
            t: Vector3::zeros(),
        }
    }
}

impl RelativePose<f64> {
    /// Relative pose with the given rotation (as a quaternion) and translation.
    pub fn from_quat(q: &Quat, t: Vector3<f64>) -> Result<Self> {
        Ok(Self {
            r: quat_to_rotmat(q)?,
            t,
        })
    }
}

/// Pinhole intrinsics. `width`/`height` are the sensor extent: pixels for
/// dataset cameras, normalized units when integrating over the sensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: f64,
    pub height: f64,
}

impl Intrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, width: f64, height: f64) -> Result<Self> {
        if !(fx > 0.0 && fy > 0.0 && width > 0.0 && height > 0.0) {
            return Err(Error::invalid(
                "intrinsics require fx, fy, width, height > 0",
            ));
        }
        Ok(Self {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
        })
    }

    /// Centered camera with the given horizontal field of view in degrees.
    pub fn from_fov(width: f64, height: f64, hfov_deg: f64) -> Result<Self> {
        let f = 0.5 * width / (0.5 * hfov_deg.to_radians()).tan();
        Self::new(f, f, 0.5 * width, 0.5 * height, width, height)
    }

    pub fn contains(&self, px: &Vector2<f64>) -> bool {
        px.x >= 0.0 && px.x <= self.width && px.y >= 0.0 && px.y <= self.height
    }
}

/// Plane-induced homography, stored unnormalized (`H = R - t nᵀ / x`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography<T = f64> {
    pub h: Matrix3<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Projection<T = f64> {
    Finite { pixel: Vector2<T>, depth: T },
    /// `|depth| < AT_INFINITY_DEPTH`; the point lies in the camera's x-y plane.
    AtInfinity { depth: T },
}

impl<T: Real> Projection<T> {
    pub fn pixel(&self) -> Option<Vector2<T>> {
        match self {
            Projection::Finite { pixel, .. } => Some(*pixel),
            Projection::AtInfinity { .. } => None,
        }
    }

    pub fn depth(&self) -> T {
        match self {
            Projection::Finite { depth, .. } | Projection::AtInfinity { depth } => *depth,
        }
    }
}

/// Rotation matrix of `q` (normalized first).
pub fn quat_to_rotmat<T: Real>(q: &Quat<T>) -> Result<Matrix3<T>> {
    let Quat { w, x, y, z } = q.normalized()?;
    let one = T::one();
    let two = T::cst(2.0);
    Ok(Matrix3::new(
        one - two * (y * y + z * z),
        two * (x * y - w * z),
        two * (x * z + w * y),
        two * (x * y + w * z),
        one - two * (x * x + z * z),
        two * (y * z - w * x),
        two * (x * z - w * y),
        two * (y * z + w * x),
        one - two * (x * x + y * y),
    ))
}

/// Quaternion of a rotation matrix (Shepperd's method), canonicalized to a
/// non-negative scalar part.
pub fn rotmat_to_quat(m: &Matrix3<f64>) -> Quat {
    let tr = m.trace();
    let q = if tr > 0.0 {
        let s = 2.0 * (tr + 1.0).sqrt();
        Quat::new(0.25 * s, (m[(2, 1)] - m[(1, 2)]) / s, (m[(0, 2)] - m[(2, 0)]) / s, (m[(1, 0)] - m[(0, 1)]) / s)
    } else if m[(0, 0)] > m[(1, 1)] && m[(0, 0)] > m[(2, 2)] {
        let s = 2.0 * (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt();
        Quat::new((m[(2, 1)] - m[(1, 2)]) / s, 0.25 * s, (m[(0, 1)] + m[(1, 0)]) / s, (m[(0, 2)] + m[(2, 0)]) / s)
    } else if m[(1, 1)] > m[(2, 2)] {
        let s = 2.0 * (1.0 + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]).sqrt();
        Quat::new((m[(0, 2)] - m[(2, 0)]) / s, (m[(0, 1)] + m[(1, 0)]) / s, 0.25 * s, (m[(1, 2)] + m[(2, 1)]) / s)
    } else {
        let s = 2.0 * (1.0 + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).sqrt();
        Quat::new((m[(1, 0)] - m[(0, 1)]) / s, (m[(0, 2)] + m[(2, 0)]) / s, (m[(1, 2)] + m[(2, 1)]) / s, 0.25 * s)
    };
    let q = q.scale(1.0 / q.norm());
    if q.w < 0.0 {
        q.scale(-1.0)
    } else {
        q
    }
}

/// `R = R̂ᵀ R_gt`, `t = R̂ᵀ (t_gt - t̂)`.
pub fn relative_pose<T: Real>(gt: &Pose<T>, est: &Pose<T>) -> Result<RelativePose<T>> {
    let q_rel = est.q.normalized()?.conj_mul(&gt.q.normalized()?);
    let r_est_t = quat_to_rotmat(&est.q)?.transpose();
    Ok(RelativePose {
        r: quat_to_rotmat(&q_rel)?,
        t: r_est_t * (gt.t - est.t),
    })
}

/// Pinhole projection of world point `p`. Points behind the camera project
/// normally and report a negative depth.
pub fn project<T: Real>(pose: &Pose<T>, k: &Intrinsics, p: &Vector3<f64>) -> Result<Projection<T>> {
    let pc = pose.world_to_camera(&p.map(T::cst))?;
    Ok(project_camera_point(k, &pc))
}

pub(crate) fn project_camera_point<T: Real>(k: &Intrinsics, pc: &Vector3<T>) -> Projection<T> {
    let depth = pc.z;
    if depth.val().abs() < AT_INFINITY_DEPTH {
        return Projection::AtInfinity { depth };
    }
    let pixel = Vector2::new(
        T::cst(k.fx) * pc.x / depth + T::cst(k.cx),
        T::cst(k.fy) * pc.y / depth + T::cst(k.cy),
    );
    Projection::Finite { pixel, depth }
}

/// Homography induced by the plane `nᵀX = -x` of the ground-truth camera
/// frame: `H = R - t nᵀ / x`.
pub fn homography<T: Real>(rel: &RelativePose<T>, n: &Vector3<f64>, x: f64) -> Result<Homography<T>> {
    if !(x > 0.0) {
        return Err(Error::InvalidDepth(x));
    }
    let n = n.map(T::cst);
    Ok(Homography {
        h: rel.r - rel.t * n.transpose() / T::cst(x),
    })
}

/// Geodesic angle between the rotations of `q1` and `q2`, in degrees.
///
/// Equal to `2 acos(min(1, |<q1, q2>|))` for unit inputs, evaluated as
/// `2 atan2(|v|, |w|)` of the relative quaternion, which stays exact (and
/// differentiable) near zero.
pub fn angle_between<T: Real>(q1: &Quat<T>, q2: &Quat<T>) -> Result<T> {
    let d = q1.normalized()?.conj().mul(&q2.normalized()?);
    let v = (d.x * d.x + d.y * d.y + d.z * d.z).sqrt();
    Ok(T::cst(2.0 * 180.0 / std::f64::consts::PI) * v.atan2(d.w.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    pub(crate) fn random_unit_quat(rng: &mut impl Rng) -> Quat {
        loop {
            let q = Quat::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let n = q.norm();
            if n > 0.1 && n <= 1.0 {
                return q.scale(1.0 / n);
            }
        }
    }

    fn random_pose(rng: &mut impl Rng) -> Pose {
        Pose::new(
            Vector3::new(
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
            ),
            random_unit_quat(rng),
        )
    }

    #[test]
    fn identity_quaternion_is_identity_matrix() {
        let r = quat_to_rotmat(&Quat::<f64>::identity()).unwrap();
        assert_eq!(r, Matrix3::identity());
    }

    #[test]
    fn quarter_turn_about_z() {
        let r = quat_to_rotmat(&Quat::new(FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2)).unwrap();
        let expected = Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        assert!((r - expected).norm() < 1e-15);
    }

    #[test]
    fn zero_quaternion_is_rejected() {
        let q = Quat::new(0.0, 0.0, 0.0, 0.0);
        assert!(matches!(quat_to_rotmat(&q), Err(Error::InvalidInput(_))));
        assert!(angle_between(&q, &Quat::identity()).is_err());
    }

    #[test]
    fn random_rotations_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let m = quat_to_rotmat(&random_unit_quat(&mut rng)).unwrap();
            assert!((m * m.transpose() - Matrix3::identity()).norm() < 1e-12);
            assert!((m.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rotmat_quat_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            let q = random_unit_quat(&mut rng).canonical().unwrap();
            let back = rotmat_to_quat(&quat_to_rotmat(&q).unwrap());
            assert!(angle_between(&q, &back).unwrap() < 1e-6);
            assert!((q.dot(&back) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn relative_pose_of_identical_poses() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_pose(&mut rng);
        let rel = relative_pose(&p, &p).unwrap();
        assert!((rel.r - Matrix3::identity()).norm() < 1e-14);
        assert!(rel.t.norm() < 1e-14);
    }

    #[test]
    fn relative_pose_pure_translation_sign() {
        let gt = Pose::identity();
        let est = Pose::new(Vector3::new(0.0, 0.0, 1.0), Quat::identity());
        let rel = relative_pose(&gt, &est).unwrap();
        assert_eq!(rel.r, Matrix3::identity());
        assert_eq!(rel.t, Vector3::new(0.0, 0.0, -1.0));
    }

    #[test]
    fn composing_estimate_with_relative_pose_recovers_gt() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let gt = random_pose(&mut rng);
            let est = random_pose(&mut rng);
            let rel = relative_pose(&gt, &est).unwrap();
            let r_est = quat_to_rotmat(&est.q).unwrap();
            let r_gt = quat_to_rotmat(&gt.q).unwrap();
            assert!((r_est * rel.r - r_gt).norm() < 1e-12);
            assert!((est.t + r_est * rel.t - gt.t).norm() < 1e-12);
            assert!((rel.r * rel.r.transpose() - Matrix3::identity()).norm() < 1e-12);
            assert!((rel.r.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn relative_pose_recovers_composed_delta() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let gt = random_pose(&mut rng);
            let delta = random_pose(&mut rng);
            // est = gt ∘ delta, so gt seen from est is delta⁻¹.
            let est = gt.compose(&delta).unwrap();
            let rel = relative_pose(&gt, &est).unwrap();
            let r_delta = quat_to_rotmat(&delta.q).unwrap();
            assert!((rel.r - r_delta.transpose()).norm() < 1e-12);
            assert!((rel.t + r_delta.transpose() * delta.t).norm() < 1e-11);
        }
    }

    #[test]
    fn on_axis_point_projects_to_principal_point() {
        let k = Intrinsics::new(500.0, 500.0, 320.0, 240.0, 640.0, 480.0).unwrap();
        let pr = project(&Pose::identity(), &k, &Vector3::new(0.0, 0.0, 4.0)).unwrap();
        assert_eq!(
            pr,
            Projection::Finite {
                pixel: Vector2::new(320.0, 240.0),
                depth: 4.0
            }
        );
    }

    #[test]
    fn backside_points_keep_negative_depth() {
        let k = Intrinsics::new(500.0, 500.0, 320.0, 240.0, 640.0, 480.0).unwrap();
        let pr = project(&Pose::identity(), &k, &Vector3::new(1.0, 0.5, -2.0)).unwrap();
        match pr {
            Projection::Finite { pixel, depth } => {
                assert_eq!(depth, -2.0);
                assert_eq!(pixel, Vector2::new(320.0 - 250.0, 240.0 - 125.0));
            }
            _ => panic!("expected finite projection"),
        }
    }

    #[test]
    fn point_in_camera_plane_is_at_infinity() {
        let k = Intrinsics::new(500.0, 500.0, 320.0, 240.0, 640.0, 480.0).unwrap();
        let pr = project(&Pose::identity(), &k, &Vector3::new(1.0, 2.0, 0.0)).unwrap();
        assert!(matches!(pr, Projection::AtInfinity { .. }));
    }

    #[test]
    fn homography_examples() {
        let n = Vector3::new(0.0, 0.0, -1.0);
        let id = RelativePose::<f64>::identity();
        for x in [0.1, 1.0, 37.0] {
            assert_eq!(homography(&id, &Vector3::new(0.3, -0.2, 0.9), x).unwrap().h, Matrix3::identity());
        }

        let tau = 0.3;
        let rel = RelativePose {
            r: Matrix3::identity(),
            t: Vector3::new(0.0, 0.0, tau),
        };
        let h = homography(&rel, &n, 2.0).unwrap().h;
        let mut expected = Matrix3::identity();
        expected[(2, 2)] = 1.0 + tau / 2.0;
        assert!((h - expected).norm() < 1e-15);

        let rz = RelativePose::from_quat(
            &Quat::from_axis_angle(&Vector3::z(), 0.7),
            Vector3::zeros(),
        )
        .unwrap();
        assert_eq!(homography(&rz, &n, 5.0).unwrap().h, rz.r);

        assert_eq!(homography(&rel, &n, 0.0), Err(Error::InvalidDepth(0.0)));
        assert_eq!(homography(&rel, &n, -1.0), Err(Error::InvalidDepth(-1.0)));
    }

    #[test]
    fn plane_points_map_through_homography() {
        // Points on the plane Z = x of the gt camera, seen by both cameras,
        // must satisfy p_est ~ H p_gt in normalized coordinates.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = Vector3::new(0.0, 0.0, -1.0);
        let k = Intrinsics::new(1.0, 1.0, 0.0, 0.0, 1.0, 1.0).unwrap();
        for _ in 0..100 {
            let gt = random_pose(&mut rng);
            let delta = Pose::new(
                Vector3::new(
                    rng.random_range(-0.5..0.5),
                    rng.random_range(-0.5..0.5),
                    rng.random_range(-0.5..0.5),
                ),
                Quat::from_axis_angle(
                    &Vector3::new(
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                    ),
                    rng.random_range(-0.3..0.3),
                ),
            );
            let est = gt.compose(&delta).unwrap();
            let x = rng.random_range(2.0..20.0);
            let rel = relative_pose(&gt, &est).unwrap();
            let h = homography(&rel, &n, x).unwrap().h;
            let r_gt = quat_to_rotmat(&gt.q).unwrap();
            for _ in 0..20 {
                let pc = Vector3::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), x);
                let pw = gt.t + r_gt * pc;
                let a = project(&gt, &k, &pw).unwrap().pixel().unwrap();
                let b = project(&est, &k, &pw).unwrap().pixel().unwrap();
                let m = h * Vector3::new(a.x, a.y, 1.0);
                let mapped = Vector2::new(m.x / m.z, m.y / m.z);
                assert!((mapped - b).norm() < 1e-9, "{mapped} vs {b}");
            }
        }
    }

    #[test]
    fn angle_between_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = random_unit_quat(&mut rng);
        assert_eq!(angle_between(&q, &q).unwrap(), 0.0);
        assert!(angle_between(&q, &q.scale(-1.0)).unwrap().abs() < 1e-12);
        let rz = Quat::from_axis_angle(&Vector3::z(), PI / 2.0);
        assert!((angle_between(&Quat::identity(), &rz).unwrap() - 90.0).abs() < 1e-12);
    }

    #[test]
    fn angle_between_matches_acos_form_and_ignores_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..1000 {
            let a = random_unit_quat(&mut rng);
            let b = random_unit_quat(&mut rng);
            let acos_form = 2.0 * a.dot(&b).abs().min(1.0).acos() * 180.0 / PI;
            let ang = angle_between(&a, &b).unwrap();
            assert!((ang - acos_form).abs() < 1e-6);
            assert!((0.0..=180.0).contains(&ang));
            assert_eq!(ang, angle_between(&a.scale(-1.0), &b).unwrap());
            assert_eq!(ang, angle_between(&a, &b.scale(-1.0)).unwrap());
        }
    }
}
