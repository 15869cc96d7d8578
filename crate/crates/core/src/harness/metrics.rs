use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geometry::{angle_between, project, Intrinsics, Pose, Projection};
use crate::scene::Scene;

/// Per-point clip of the mean reprojection distance, pixels.
pub const DEFAULT_MRD_CLIP: f64 = 1000.0;

/// `(meters, degrees)` threshold pairs.
pub const OUTDOOR_THRESHOLDS: [(f64, f64); 2] = [(2.0, 2.0), (3.0, 5.0)];
pub const INDOOR_THRESHOLDS: [(f64, f64); 2] = [(0.25, 10.0), (0.5, 15.0)];

/// Mean over visible points of `min(clip, ‖π_gt - π_est‖₂)` for one frame.
/// Points at or behind the estimated camera, and every point of an
/// estimate with a degenerate quaternion, count as `clip`.
pub fn frame_reproj_distance(est: &Pose, gt: &Pose, points: &[Vector3<f64>], k: &Intrinsics, clip: f64) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let total: f64 = points
        .iter()
        .map(|p| {
            let a = project::<f64>(gt, k, p);
            let b = project::<f64>(est, k, p);
            match (a, b) {
                (Ok(Projection::Finite { pixel: pa, .. }), Ok(Projection::Finite { pixel: pb, depth })) if depth > 0.0 => {
                    clip.min((pa - pb).norm())
                }
                _ => clip,
            }
        })
        .sum();
    total / points.len() as f64
}

/// Mean over frames of [`frame_reproj_distance`].
pub fn mean_reproj_distance(est: &[Pose], scene: &Scene, clip: f64) -> Result<f64> {
    if est.len() != scene.frames.len() {
        return Err(Error::invalid(format!(
            "{} estimates for {} frames",
            est.len(),
            scene.frames.len()
        )));
    }
    let sum: f64 = est
        .iter()
        .zip(&scene.frames)
        .enumerate()
        .map(|(i, (e, f))| frame_reproj_distance(e, &f.gt_pose, &scene.visible_points(i), &scene.intrinsics, clip))
        .sum();
    Ok(sum / est.len() as f64)
}

/// Translation error in meters and rotation error in degrees.
pub fn pose_errors(est: &Pose, gt: &Pose) -> (f64, f64) {
    let dt = (est.t - gt.t).norm();
    let dr = angle_between(&est.q, &gt.q).unwrap_or(f64::NAN);
    (dt, dr)
}

/// Fraction of frames with translation error `≤ t_thresh` and rotation
/// error `≤ r_thresh`.
pub fn pct_within(est: &[Pose], gt: &[Pose], t_thresh: f64, r_thresh: f64) -> Result<f64> {
    if est.len() != gt.len() {
        return Err(Error::invalid(format!("{} estimates for {} poses", est.len(), gt.len())));
    }
    if est.is_empty() {
        return Err(Error::invalid("no poses to evaluate"));
    }
    let ok = est
        .iter()
        .zip(gt)
        .filter(|(e, g)| {
            let (dt, dr) = pose_errors(e, g);
            dt <= t_thresh && dr <= r_thresh
        })
        .count();
    Ok(ok as f64 / est.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Quat;
    use crate::scene::{synth_scene, Frame, SynthParams};

    fn one_point_scene() -> Scene {
        let k = Intrinsics::new(100.0, 100.0, 320.0, 240.0, 640.0, 480.0).unwrap();
        let frames = vec![Frame {
            id: "f".into(),
            gt_pose: Pose::identity(),
            visible: vec![0],
        }];
        Scene::new(vec![Vector3::new(0.0, 0.0, 10.0)], frames, k).unwrap()
    }

    #[test]
    fn zero_at_ground_truth() {
        let s = synth_scene(&SynthParams::default()).unwrap();
        assert_eq!(mean_reproj_distance(&s.gt_poses(), &s, DEFAULT_MRD_CLIP).unwrap(), 0.0);
    }

    #[test]
    fn l2_pixel_distance() {
        let s = one_point_scene();
        // 0.3 m and 0.4 m at 10 m depth with f = 100 px.
        let est = Pose::new(Vector3::new(-0.3, -0.4, 0.0), Quat::identity());
        let d = mean_reproj_distance(&[est], &s, DEFAULT_MRD_CLIP).unwrap();
        assert!((d - 5.0).abs() < 1e-9, "{d}");
    }

    #[test]
    fn behind_camera_saturates() {
        let s = synth_scene(&SynthParams::default()).unwrap();
        let est: Vec<Pose> = s
            .frames
            .iter()
            .map(|f| {
                let flip = Quat::from_axis_angle(&Vector3::y(), std::f64::consts::PI);
                Pose::new(f.gt_pose.t, f.gt_pose.q.mul(&flip))
            })
            .collect();
        assert_eq!(mean_reproj_distance(&est, &s, 250.0).unwrap(), 250.0);
        let zero = vec![Pose::new(Vector3::zeros(), Quat::new(0.0, 0.0, 0.0, 0.0)); s.frames.len()];
        assert_eq!(mean_reproj_distance(&zero, &s, 7.0).unwrap(), 7.0);
    }

    #[test]
    fn monotone_in_clip() {
        let s = synth_scene(&SynthParams::default()).unwrap();
        let est: Vec<Pose> = s
            .frames
            .iter()
            .map(|f| Pose::new(f.gt_pose.t + Vector3::new(0.5, -0.2, 0.1), f.gt_pose.q))
            .collect();
        let mut prev = 0.0;
        for clip in [1.0, 5.0, 20.0, 100.0, 1000.0] {
            let v = mean_reproj_distance(&est, &s, clip).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn threshold_fractions() {
        let gt = vec![Pose::identity(), Pose::identity()];
        assert_eq!(pct_within(&gt, &gt, 0.25, 10.0).unwrap(), 1.0);
        let rot = Pose::new(Vector3::zeros(), Quat::from_axis_angle(&Vector3::z(), 20f64.to_radians()));
        assert_eq!(pct_within(&[Pose::identity(), rot], &gt, 0.25, 10.0).unwrap(), 0.5);
        let edge = Pose::new(Vector3::new(0.25, 0.0, 0.0), Quat::identity());
        assert_eq!(pct_within(&[edge], &gt[..1], 0.25, 10.0).unwrap(), 1.0);
        assert!(pct_within(&gt[..1], &gt, 1.0, 1.0).is_err());
    }
}
