//! Scenes, per-frame depth statistics and slab bounds.

mod io;
mod synth;

use std::collections::{BTreeMap, HashSet};

use nalgebra::Vector3;

pub use io::{parse_points, parse_pose_list, write_points, write_pose_list, PointsFile};
pub use synth::{synth_scene, SynthParams};

use crate::error::{Error, Result};
use crate::geometry::{Intrinsics, Pose};
use crate::loss::SlabParams;

/// Default slab percentiles (2.5th and 97.5th).
pub const DEFAULT_PERCENTILES: (f64, f64) = (0.025, 0.975);

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub id: String,
    pub gt_pose: Pose,
    /// Sorted, deduplicated indices into [`Scene::points`].
    pub visible: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub points: Vec<Vector3<f64>>,
    pub frames: Vec<Frame>,
    pub intrinsics: Intrinsics,
}

impl Scene {
    /// Validates the scene: at least one frame, unique frame ids, visibility
    /// indices in range, unit ground-truth quaternions.
    pub fn new(points: Vec<Vector3<f64>>, mut frames: Vec<Frame>, intrinsics: Intrinsics) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::invalid("scene needs at least one frame"));
        }
        let mut ids = HashSet::new();
        for f in &mut frames {
            if !ids.insert(f.id.clone()) {
                return Err(Error::invalid(format!("duplicate frame id '{}'", f.id)));
            }
            if let Some(&bad) = f.visible.iter().find(|&&i| i >= points.len()) {
                return Err(Error::Frame {
                    frame: f.id.clone(),
                    msg: format!("visibility index {bad} out of range ({} points)", points.len()),
                });
            }
            f.visible.sort_unstable();
            f.visible.dedup();
            f.gt_pose = f.gt_pose.canonical().map_err(|e| Error::Frame {
                frame: f.id.clone(),
                msg: e.to_string(),
            })?;
        }
        Ok(Self {
            points,
            frames,
            intrinsics,
        })
    }

    /// Builds a scene from a parsed pose list and points file, matching
    /// visibility lines to poses by frame id.
    pub fn from_parts(poses: Vec<(String, Pose)>, points: PointsFile, intrinsics: Intrinsics) -> Result<Self> {
        let mut vis: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let known: HashSet<&str> = poses.iter().map(|(id, _)| id.as_str()).collect();
        for v in points.visibility {
            if !known.contains(v.frame.as_str()) {
                return Err(Error::Parse {
                    line: v.line,
                    msg: format!("visibility for unknown frame '{}'", v.frame),
                });
            }
            vis.entry(v.frame).or_default().extend(v.indices);
        }
        let frames = poses
            .into_iter()
            .map(|(id, gt_pose)| Frame {
                visible: vis.remove(&id).unwrap_or_default(),
                id,
                gt_pose,
            })
            .collect();
        Self::new(points.points, frames, intrinsics)
    }

    pub fn visible_points(&self, frame: usize) -> Vec<Vector3<f64>> {
        self.frames[frame].visible.iter().map(|&i| self.points[i]).collect()
    }

    pub fn gt_poses(&self) -> Vec<Pose> {
        self.frames.iter().map(|f| f.gt_pose).collect()
    }
}

/// Camera-frame `z` of world point `p`: signed distance along the optical
/// axis.
pub fn point_depth(pose: &Pose, p: &Vector3<f64>) -> f64 {
    let q = pose.q.normalized().unwrap_or_else(|_| crate::geometry::Quat::identity());
    // Third row of Rᵀ is the optical axis in world coordinates.
    let axis = Vector3::new(
        2.0 * (q.x * q.z + q.w * q.y),
        2.0 * (q.y * q.z - q.w * q.x),
        1.0 - 2.0 * (q.x * q.x + q.y * q.y),
    );
    axis.dot(&(p - pose.t))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameDepths {
    /// Depths of visible points in front of the camera, sorted ascending.
    pub positive: Vec<f64>,
    /// Visible points at or behind the camera plane, excluded from
    /// histograms.
    pub excluded: usize,
}

pub fn frame_depths(scene: &Scene, frame: usize) -> FrameDepths {
    let f = &scene.frames[frame];
    let mut positive = Vec::with_capacity(f.visible.len());
    let mut excluded = 0;
    for &i in &f.visible {
        let d = point_depth(&f.gt_pose, &scene.points[i]);
        if d > 0.0 {
            positive.push(d);
        } else {
            excluded += 1;
        }
    }
    positive.sort_by(f64::total_cmp);
    FrameDepths { positive, excluded }
}

/// Percentile `p ∈ [0, 1]` of ascending `sorted` by linear interpolation
/// between order statistics (rank `p (n - 1)`).
pub fn percentile(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::invalid("percentile of an empty sample"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("percentile {p} outside [0, 1]")));
    }
    let rank = p * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = rank - lo as f64;
    Ok(sorted[lo] + frac * (sorted[hi] - sorted[lo]))
}

fn check_percentiles(lo: f64, hi: f64) -> Result<()> {
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(Error::invalid(format!(
            "percentiles must satisfy 0 <= lo < hi <= 1 (got {lo}, {hi})"
        )));
    }
    Ok(())
}

fn slab_from_depths(depths: &[f64], lo: f64, hi: f64) -> Result<SlabParams> {
    if depths.len() < 2 {
        return Err(Error::invalid(format!(
            "{} positive-depth points, need at least 2",
            depths.len()
        )));
    }
    SlabParams::new(percentile(depths, lo)?, percentile(depths, hi)?)
}

/// Slab of a single frame from its visible-point depth percentiles.
pub fn frame_slab(scene: &Scene, frame: usize, lo: f64, hi: f64) -> Result<SlabParams> {
    check_percentiles(lo, hi)?;
    slab_from_depths(&frame_depths(scene, frame).positive, lo, hi).map_err(|e| Error::Frame {
        frame: scene.frames[frame].id.clone(),
        msg: e.to_string(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlabMode {
    Local,
    Global,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SlabAssignment {
    PerFrame(BTreeMap<String, SlabParams>),
    Shared(SlabParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DepthSlab {
    pub mode: SlabMode,
    /// Percentiles the bounds were derived from; `None` for manual bounds.
    pub percentiles: Option<(f64, f64)>,
    pub slabs: SlabAssignment,
}

impl DepthSlab {
    pub fn for_frame(&self, id: &str) -> Option<SlabParams> {
        match &self.slabs {
            SlabAssignment::PerFrame(m) => m.get(id).copied(),
            SlabAssignment::Shared(s) => Some(*s),
        }
    }
}

/// Per-frame slabs (local homography loss).
pub fn local_slabs(scene: &Scene, lo: f64, hi: f64) -> Result<DepthSlab> {
    check_percentiles(lo, hi)?;
    let per_frame = (0..scene.frames.len())
        .map(|i| Ok((scene.frames[i].id.clone(), frame_slab(scene, i, lo, hi)?)))
        .collect::<Result<_>>()?;
    Ok(DepthSlab {
        mode: SlabMode::Local,
        percentiles: Some((lo, hi)),
        slabs: SlabAssignment::PerFrame(per_frame),
    })
}

/// Shared slab from manually chosen bounds.
pub fn global_slab_manual(x_min: f64, x_max: f64) -> Result<DepthSlab> {
    Ok(DepthSlab {
        mode: SlabMode::Global,
        percentiles: None,
        slabs: SlabAssignment::Shared(SlabParams::new(x_min, x_max)?),
    })
}

/// Shared slab from the depth percentiles pooled across all frames.
pub fn global_slab(scene: &Scene, lo: f64, hi: f64) -> Result<DepthSlab> {
    check_percentiles(lo, hi)?;
    let mut pooled: Vec<f64> = (0..scene.frames.len())
        .flat_map(|i| frame_depths(scene, i).positive)
        .collect();
    pooled.sort_by(f64::total_cmp);
    Ok(DepthSlab {
        mode: SlabMode::Global,
        percentiles: Some((lo, hi)),
        slabs: SlabAssignment::Shared(slab_from_depths(&pooled, lo, hi)?),
    })
}

/// Cumulative depth histogram of a frame: `(bin upper edge, count ≤ edge)`.
pub fn cumulative_histogram(depths: &[f64], bins: usize) -> Vec<(f64, usize)> {
    if depths.is_empty() || bins == 0 {
        return Vec::new();
    }
    let (lo, hi) = depths
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &d| (a.min(d), b.max(d)));
    let width = (hi - lo) / bins as f64;
    (1..=bins)
        .map(|b| {
            let edge = if b == bins { hi } else { lo + width * b as f64 };
            (edge, depths.iter().filter(|&&d| d <= edge).count())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Quat;

    fn k() -> Intrinsics {
        Intrinsics::new(500.0, 500.0, 320.0, 240.0, 640.0, 480.0).unwrap()
    }

    fn scene_with_depths(frames: &[&[f64]]) -> Scene {
        let mut points = Vec::new();
        let mut fr = Vec::new();
        for (i, depths) in frames.iter().enumerate() {
            let start = points.len();
            points.extend(depths.iter().map(|&d| Vector3::new(0.01 * i as f64, 0.0, d)));
            fr.push(Frame {
                id: format!("f{i}"),
                gt_pose: Pose::identity(),
                visible: (start..points.len()).collect(),
            });
        }
        Scene::new(points, fr, k()).unwrap()
    }

    #[test]
    fn depth_examples() {
        let id = Pose::identity();
        assert_eq!(point_depth(&id, &Vector3::new(0.0, 0.0, 5.0)), 5.0);
        let shifted = Pose::new(Vector3::new(0.0, 0.0, 5.0), Quat::identity());
        assert_eq!(point_depth(&shifted, &Vector3::new(0.0, 0.0, 5.0)), 0.0);
    }

    #[test]
    fn depth_is_invariant_to_roll() {
        let base = Pose::new(
            Vector3::new(1.0, -2.0, 0.5),
            Quat::from_axis_angle(&Vector3::new(0.2, 1.0, 0.3), 0.8),
        );
        let p = Vector3::new(3.0, 1.0, 6.0);
        let d0 = point_depth(&base, &p);
        for k in 0..50 {
            let roll = Pose::new(Vector3::zeros(), Quat::from_axis_angle(&Vector3::z(), 0.13 * k as f64));
            let rolled = base.compose(&roll).unwrap();
            assert!((point_depth(&rolled, &p) - d0).abs() < 1e-12);
        }
    }

    #[test]
    fn depth_matches_world_to_camera() {
        let pose = Pose::new(
            Vector3::new(0.4, 0.2, -1.0),
            Quat::from_axis_angle(&Vector3::new(1.0, -0.5, 0.25), 1.3),
        );
        let p = Vector3::new(-2.0, 0.7, 3.3);
        let pc = pose.world_to_camera(&p).unwrap();
        assert!((point_depth(&pose, &p) - pc.z).abs() < 1e-14);
    }

    #[test]
    fn percentile_of_one_to_hundred() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert!((percentile(&v, 0.025).unwrap() - 3.475).abs() < 1e-12);
        assert!((percentile(&v, 0.975).unwrap() - 97.525).abs() < 1e-12);
        assert_eq!(percentile(&v, 0.0).unwrap(), 1.0);
        assert_eq!(percentile(&v, 1.0).unwrap(), 100.0);
        assert!(percentile(&[], 0.5).is_err());
        assert!(percentile(&v, 1.5).is_err());
    }

    #[test]
    fn local_slab_examples() {
        let depths: Vec<f64> = (1..=100).map(f64::from).collect();
        let scene = scene_with_depths(&[&depths]);
        let slab = local_slabs(&scene, 0.025, 0.975).unwrap();
        let s = slab.for_frame("f0").unwrap();
        assert!((s.x_min - 3.475).abs() < 1e-12 && (s.x_max - 97.525).abs() < 1e-12);

        let s = local_slabs(&scene, 0.0, 1.0).unwrap().for_frame("f0").unwrap();
        assert_eq!((s.x_min, s.x_max), (1.0, 100.0));

        let flat = scene_with_depths(&[&[4.0, 4.0, 4.0]]);
        assert!(matches!(local_slabs(&flat, 0.025, 0.975), Err(Error::Frame { frame, .. }) if frame == "f0"));

        let sparse = scene_with_depths(&[&[4.0, 5.0], &[3.0, -1.0]]);
        assert!(matches!(local_slabs(&sparse, 0.025, 0.975), Err(Error::Frame { frame, .. }) if frame == "f1"));
        assert_eq!(frame_depths(&sparse, 1).excluded, 1);
    }

    #[test]
    fn global_slab_examples() {
        let a: Vec<f64> = (1..=10).map(f64::from).collect();
        let b: Vec<f64> = (90..=100).map(f64::from).collect();
        let scene = scene_with_depths(&[&a, &b]);
        let g = global_slab(&scene, 0.025, 0.975).unwrap();
        let s = g.for_frame("anything").unwrap();
        // Brute force over the pooled sorted list of 21 values.
        let mut pooled: Vec<f64> = a.iter().chain(&b).copied().collect();
        pooled.sort_by(f64::total_cmp);
        let r_lo = 0.025 * 20.0;
        let r_hi = 0.975 * 20.0;
        let lo = pooled[0] + (r_lo - 0.0) * (pooled[1] - pooled[0]);
        let hi = pooled[19] + (r_hi - 19.0) * (pooled[20] - pooled[19]);
        assert!((s.x_min - lo).abs() < 1e-12 && (s.x_max - hi).abs() < 1e-12);
        assert!(s.x_min < 10.0 && s.x_max > 90.0);

        let m = global_slab_manual(1.0, 50.0).unwrap();
        assert_eq!(m.for_frame("f0").unwrap().x_max, 50.0);
        assert!(global_slab_manual(50.0, 1.0).is_err());

        let single = scene_with_depths(&[&a]);
        assert_eq!(
            global_slab(&single, 0.1, 0.9).unwrap().for_frame("f0"),
            local_slabs(&single, 0.1, 0.9).unwrap().for_frame("f0")
        );
    }

    #[test]
    fn cumulative_histogram_is_monotone() {
        let d = [1.0, 2.0, 2.5, 7.0, 9.0, 9.5];
        let h = cumulative_histogram(&d, 4);
        assert_eq!(h.len(), 4);
        assert!(h.windows(2).all(|w| w[0].1 <= w[1].1));
        assert_eq!(h.last().unwrap().1, d.len());
    }

    #[test]
    fn scene_validation() {
        let f = |id: &str, vis: Vec<usize>| Frame {
            id: id.into(),
            gt_pose: Pose::identity(),
            visible: vis,
        };
        let pts = vec![Vector3::new(0.0, 0.0, 1.0); 3];
        assert!(Scene::new(pts.clone(), vec![], k()).is_err());
        assert!(Scene::new(pts.clone(), vec![f("a", vec![0, 3])], k()).is_err());
        assert!(Scene::new(pts.clone(), vec![f("a", vec![0]), f("a", vec![1])], k()).is_err());
        let s = Scene::new(pts, vec![f("a", vec![2, 0, 2])], k()).unwrap();
        assert_eq!(s.frames[0].visible, vec![0, 2]);
    }
}
