//! Seeded gradient-check samples for every loss kind.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diff::{grad_check, GradReport};
use crate::error::Result;
use crate::geometry::{Intrinsics, Pose, Quat};
use crate::loss::{LossContext, LossHyperParams, LossKind, SlabParams};

/// Default finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-6;
/// Default pass threshold on [`GradReport::max_rel_err`].
pub const DEFAULT_TOLERANCE: f64 = 1e-5;

/// One `(est, gt, scene)` triple.
#[derive(Debug, Clone, PartialEq)]
pub struct GradSample {
    pub gt: Pose,
    /// 7 pose parameters, or 9 for the homoscedastic loss.
    pub params: Vec<f64>,
    pub points: Vec<Vector3<f64>>,
    pub intrinsics: Intrinsics,
    pub slab: SlabParams,
    pub hyper: LossHyperParams,
}

impl GradSample {
    pub fn ctx(&self) -> LossContext<'_> {
        LossContext::new(self.gt)
            .with_points(&self.points, self.intrinsics)
            .with_slab(self.slab)
            .with_hyper(self.hyper)
    }
}

fn unit<R: Rng>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n <= 1.0 && n > 1e-3 {
            return v / n;
        }
    }
}

/// `n` seeded samples for `kind`. Estimates are offset by up to 0.3 m and
/// 20° from the ground truth and carry a non-unit quaternion. With
/// `include_identity` the first sample has `est = gt`.
pub fn gradcheck_samples(kind: LossKind, n: usize, seed: u64, include_identity: bool) -> Result<Vec<GradSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = Intrinsics::from_fov(640.0, 480.0, 60.0)?;
    (0..n)
        .map(|i| {
            let gt_q = Quat::from_axis_angle(&unit(&mut rng), rng.random_range(0.0..std::f64::consts::PI));
            let gt = Pose::new(
                Vector3::new(
                    rng.random_range(-2.0..2.0),
                    rng.random_range(-2.0..2.0),
                    rng.random_range(-2.0..2.0),
                ),
                gt_q,
            );
            let points = (0..20)
                .map(|_| {
                    let z = rng.random_range(2.0..10.0);
                    let local = Vector3::new(rng.random_range(-0.4..0.4) * z, rng.random_range(-0.3..0.3) * z, z);
                    gt.compose(&Pose::new(local, Quat::identity())).map(|p| p.t)
                })
                .collect::<Result<Vec<_>>>()?;
            let x_min = rng.random_range(0.5..3.0);
            let slab = SlabParams::new(x_min, x_min + rng.random_range(1.0..20.0))?;
            let offset = Pose::new(
                unit(&mut rng) * rng.random_range(0.0..0.3),
                Quat::from_axis_angle(&unit(&mut rng), rng.random_range(0.0..20f64.to_radians())),
            );
            let est = if include_identity && i == 0 {
                gt
            } else {
                let e = gt.compose(&offset)?;
                Pose::new(e.t, e.q.scale(rng.random_range(0.7..1.3)))
            };
            let mut params = est.params().to_vec();
            if kind == LossKind::Homoscedastic {
                params.push(rng.random_range(-3.0..1.0));
                params.push(rng.random_range(-3.0..1.0));
            }
            Ok(GradSample {
                gt,
                params,
                points,
                intrinsics: k,
                slab,
                hyper: LossHyperParams::default(),
            })
        })
        .collect()
}

/// Gradient check of every sample; a sample whose probe hits an error case
/// yields `Err`.
pub fn gradcheck_suite(kind: LossKind, samples: &[GradSample], step: f64) -> Vec<Result<GradReport>> {
    samples
        .iter()
        .map(|s| grad_check(kind, &s.params, &s.ctx(), step))
        .collect()
}
