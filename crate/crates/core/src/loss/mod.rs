//! Pose losses and a uniform entry point over them.

mod baselines;
mod homography;

use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;

pub use baselines::{geometric_loss, homoscedastic_loss, max_error_loss, posenet_loss};
pub use homography::{
    homography_loss_closed, homography_loss_numeric, reprojection_grid, scalar_form_oracle,
    sensor_weighted_reproj, single_plane_error, ReprojectionModel,
};

use crate::diff::Real;
use crate::error::{Error, Result};
use crate::geometry::{relative_pose, Intrinsics, Pose};

/// Slab of planes `Z ∈ [x_min, x_max]` in the ground-truth camera frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabParams {
    pub n: Vector3<f64>,
    pub x_min: f64,
    pub x_max: f64,
}

impl SlabParams {
    /// Planes parallel to the sensor, `n = (0, 0, -1)`.
    pub fn new(x_min: f64, x_max: f64) -> Result<Self> {
        Self::with_normal(Vector3::new(0.0, 0.0, -1.0), x_min, x_max)
    }

    pub fn with_normal(n: Vector3<f64>, x_min: f64, x_max: f64) -> Result<Self> {
        let s = Self { n, x_min, x_max };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min > 0.0 && self.x_min < self.x_max && self.x_max.is_finite()) {
            return Err(Error::invalid(format!(
                "slab bounds must satisfy 0 < x_min < x_max (got {}, {})",
                self.x_min, self.x_max
            )));
        }
        if !((self.n.norm() - 1.0).abs() < 1e-9) {
            return Err(Error::invalid("slab normal must be a unit vector"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossHyperParams {
    /// Rotation weight of the PoseNet loss.
    pub beta: f64,
    /// Log-variances used by the homoscedastic loss when they are not
    /// optimized alongside the pose.
    pub s_t: f64,
    pub s_q: f64,
    /// Per-point clip of the geometric loss, in pixels.
    pub reproj_clip: f64,
    /// Weight of the `(‖q̂‖ - 1)²` term of MaxError.
    pub quat_reg_weight: f64,
}

impl Default for LossHyperParams {
    fn default() -> Self {
        Self {
            beta: 500.0,
            s_t: 0.0,
            s_q: -3.0,
            reproj_clip: 100.0,
            quat_reg_weight: 1.0,
        }
    }
}

impl LossHyperParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) {
            return Err(Error::invalid("beta must be positive"));
        }
        if !(self.reproj_clip > 0.0) {
            return Err(Error::invalid("reprojection clip must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LossKind {
    PoseNet,
    Homoscedastic,
    Geometric,
    MaxError,
    HomographyLocal,
    HomographyGlobal,
}

impl LossKind {
    pub const ALL: [LossKind; 6] = [
        LossKind::PoseNet,
        LossKind::Homoscedastic,
        LossKind::Geometric,
        LossKind::MaxError,
        LossKind::HomographyLocal,
        LossKind::HomographyGlobal,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            LossKind::PoseNet => "posenet",
            LossKind::Homoscedastic => "homoscedastic",
            LossKind::Geometric => "geometric",
            LossKind::MaxError => "maxerror",
            LossKind::HomographyLocal => "homography_local",
            LossKind::HomographyGlobal => "homography_global",
        }
    }

    /// Number of differentiated parameters: the 7 pose coordinates, plus
    /// `ŝ_t, ŝ_q` for the homoscedastic loss.
    pub fn n_params(&self) -> usize {
        match self {
            LossKind::Homoscedastic => 9,
            _ => 7,
        }
    }

    pub fn is_homography(&self) -> bool {
        matches!(self, LossKind::HomographyLocal | LossKind::HomographyGlobal)
    }

    pub fn needs_points(&self) -> bool {
        matches!(self, LossKind::Geometric)
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "posenet" => LossKind::PoseNet,
            "homoscedastic" => LossKind::Homoscedastic,
            "geometric" => LossKind::Geometric,
            "maxerror" | "max_error" => LossKind::MaxError,
            "homography" | "homography_local" | "local" => LossKind::HomographyLocal,
            "homography_global" | "global" => LossKind::HomographyGlobal,
            other => return Err(Error::invalid(format!("unknown loss kind '{other}'"))),
        })
    }
}

/// Everything a loss needs besides the estimated parameters.
#[derive(Debug, Clone, Copy)]
pub struct LossContext<'a> {
    pub gt: Pose,
    /// Visible scene points (geometric loss).
    pub points: &'a [Vector3<f64>],
    pub intrinsics: Option<Intrinsics>,
    /// Slab bounds (homography losses).
    pub slab: Option<SlabParams>,
    pub hyper: LossHyperParams,
}

impl<'a> LossContext<'a> {
    pub fn new(gt: Pose) -> Self {
        Self {
            gt,
            points: &[],
            intrinsics: None,
            slab: None,
            hyper: LossHyperParams::default(),
        }
    }

    pub fn with_points(mut self, points: &'a [Vector3<f64>], k: Intrinsics) -> Self {
        self.points = points;
        self.intrinsics = Some(k);
        self
    }

    pub fn with_slab(mut self, slab: SlabParams) -> Self {
        self.slab = Some(slab);
        self
    }

    pub fn with_hyper(mut self, hyper: LossHyperParams) -> Self {
        self.hyper = hyper;
        self
    }
}

/// Evaluates `kind` at the flat parameter vector `params`
/// (`tx ty tz qw qx qy qz [ŝ_t ŝ_q]`).
///
/// For the homoscedastic loss, a 7-element vector uses the log-variances
/// from `ctx.hyper`; a 9-element vector supplies them.
pub fn evaluate<T: Real>(kind: LossKind, params: &[T], ctx: &LossContext) -> Result<T> {
    if params.len() != 7 && !(kind == LossKind::Homoscedastic && params.len() == 9) {
        return Err(Error::invalid(format!(
            "{kind} takes {} parameters, got {}",
            kind.n_params(),
            params.len()
        )));
    }
    let est = Pose::from_params(&params[..7]);
    let gt = &ctx.gt;
    match kind {
        LossKind::PoseNet => posenet_loss(&est, gt, ctx.hyper.beta),
        LossKind::Homoscedastic => {
            let (s_t, s_q) = match params.len() {
                9 => (params[7], params[8]),
                _ => (T::cst(ctx.hyper.s_t), T::cst(ctx.hyper.s_q)),
            };
            homoscedastic_loss(&est, gt, s_t, s_q)
        }
        LossKind::Geometric => {
            let k = ctx
                .intrinsics
                .ok_or_else(|| Error::invalid("geometric loss needs intrinsics"))?;
            geometric_loss(&est, gt, ctx.points, &k, ctx.hyper.reproj_clip)
        }
        LossKind::MaxError => max_error_loss(&est, gt, ctx.hyper.quat_reg_weight),
        LossKind::HomographyLocal | LossKind::HomographyGlobal => {
            let slab = ctx
                .slab
                .ok_or_else(|| Error::invalid("homography loss needs slab bounds"))?;
            let rel = relative_pose(&gt.lift(), &est)?;
            homography_loss_closed(&rel, &slab)
        }
    }
}
