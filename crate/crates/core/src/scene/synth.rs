//! Deterministic desk-scale synthetic scenes.

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Frame, Scene};
use crate::error::{Error, Result};
use crate::geometry::{project, rotmat_to_quat, Intrinsics, Pose};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    pub seed: u64,
    pub n_points: usize,
    pub n_frames: usize,
    /// Near and far depth of the visible band, meters.
    pub depth_range: (f64, f64),
    /// Horizontal field of view, degrees.
    pub fov_deg: f64,
    pub width: f64,
    pub height: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            seed: 0,
            n_points: 400,
            n_frames: 24,
            depth_range: (2.0, 12.0),
            fov_deg: 60.0,
            width: 640.0,
            height: 480.0,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_points < 10 {
            return Err(Error::invalid("synthetic scene needs at least 10 points"));
        }
        if self.n_frames < 1 {
            return Err(Error::invalid("synthetic scene needs at least 1 frame"));
        }
        let (near, far) = self.depth_range;
        if !(near > 0.0 && near < far && far.is_finite()) {
            return Err(Error::invalid(format!(
                "depth range must satisfy 0 < near < far (got {near}, {far})"
            )));
        }
        if !(self.fov_deg > 0.0 && self.fov_deg < 180.0) {
            return Err(Error::invalid("field of view must lie in (0, 180) degrees"));
        }
        Ok(())
    }
}

fn in_unit_ball<R: Rng>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n2 = v.norm_squared();
        if n2 <= 1.0 && n2 > 1e-6 {
            return v;
        }
    }
}

/// Camera-to-world rotation with optical axis `z` and a random roll.
fn look_rotation<R: Rng>(rng: &mut R, z: &Vector3<f64>) -> Matrix3<f64> {
    let up = if z.y.abs() < 0.9 { Vector3::y() } else { Vector3::x() };
    let x0 = up.cross(z).normalize();
    let y0 = z.cross(&x0);
    let roll = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    let (s, c) = roll.sin_cos();
    let x = x0 * c + y0 * s;
    let y = z.cross(&x);
    Matrix3::from_columns(&[x, y, *z])
}

/// Points fill a cube centred on the origin; cameras sit on a sphere around
/// it, aimed at a jittered point near the centre. A point is visible when it
/// projects inside the image with depth inside `depth_range`.
pub fn synth_scene(params: &SynthParams) -> Result<Scene> {
    params.validate()?;
    let (near, far) = params.depth_range;
    let k = Intrinsics::from_fov(params.width, params.height, params.fov_deg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let radius = 0.5 * (far - near);
    let half = radius / 3f64.sqrt();
    let points: Vec<Vector3<f64>> = (0..params.n_points)
        .map(|_| {
            Vector3::new(
                rng.random_range(-half..half),
                rng.random_range(-half..half),
                rng.random_range(-half..half),
            )
        })
        .collect();

    let dist = 0.5 * (near + far);
    let mut frames = Vec::with_capacity(params.n_frames);
    for i in 0..params.n_frames {
        let dir = in_unit_ball(&mut rng).normalize();
        let center = dir * dist;
        let target = in_unit_ball(&mut rng) * (0.25 * half);
        let z = (target - center).normalize();
        let r = look_rotation(&mut rng, &z);
        let pose = Pose::new(center, rotmat_to_quat(&r));
        let mut visible = Vec::new();
        for (j, p) in points.iter().enumerate() {
            let proj = project::<f64>(&pose, &k, p)?;
            let d = proj.depth();
            if d >= near && d <= far && proj.pixel().is_some_and(|px| k.contains(&px)) {
                visible.push(j);
            }
        }
        let id = format!("frame_{i:04}");
        if visible.len() < 2 {
            return Err(Error::Frame {
                frame: id,
                msg: format!("only {} visible points", visible.len()),
            });
        }
        frames.push(Frame {
            id,
            gt_pose: pose,
            visible,
        });
    }
    Scene::new(points, frames, k)
}
