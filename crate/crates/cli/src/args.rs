use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "homloss", version, about = "Homography-based camera pose loss toolkit")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = "homloss-out")]
    #[serde(skip)]
    pub out: PathBuf,

    /// Seed of every random draw (synthetic scene, perturbations, batching).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Replay the command recorded in a manifest.
    #[arg(long, global = true, value_name = "FILE")]
    #[serde(skip)]
    pub from_manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Loss values along 1-D or 2-D pose offsets around a ground-truth frame.
    Landscape(LandscapeArgs),
    /// Forward-mode gradients against central finite differences.
    Gradcheck(GradcheckArgs),
    /// Refine perturbed poses under a loss.
    Optimize(OptimizeArgs),
    /// Slab bounds from depth percentiles or manual bounds.
    Slabs(SlabsArgs),
    /// Metrics of estimated poses against the scene ground truth.
    Eval(EvalArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Landscape(_) => "landscape",
            Command::Gradcheck(_) => "gradcheck",
            Command::Optimize(_) => "optimize",
            Command::Slabs(_) => "slabs",
            Command::Eval(_) => "eval",
        }
    }
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct SceneArgs {
    /// Generate a synthetic scene instead of reading files.
    #[arg(long)]
    pub synthetic: bool,
    #[arg(long, default_value_t = 400)]
    pub n_points: usize,
    #[arg(long, default_value_t = 24)]
    pub n_frames: usize,
    #[arg(long, default_value_t = 2.0)]
    pub depth_min: f64,
    #[arg(long, default_value_t = 12.0)]
    pub depth_max: f64,
    /// Horizontal field of view in degrees.
    #[arg(long, default_value_t = 60.0)]
    pub fov: f64,
    #[arg(long, default_value_t = 640.0)]
    pub width: f64,
    #[arg(long, default_value_t = 480.0)]
    pub height: f64,

    /// Ground-truth pose list (`name tx ty tz qw qx qy qz`).
    #[arg(long, value_name = "FILE", conflicts_with = "synthetic")]
    pub poses: Option<PathBuf>,
    /// Points file (`P x y z` / `V frame idx...`).
    #[arg(long, value_name = "FILE", requires = "poses")]
    pub points: Option<PathBuf>,
    /// Camera intrinsics `fx,fy,cx,cy,width,height` for file scenes.
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    pub intrinsics: Option<String>,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct HyperArgs {
    /// PoseNet rotation weight.
    #[arg(long, default_value_t = 500.0)]
    pub beta: f64,
    /// Homoscedastic log-variances.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub s_t: f64,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    pub s_q: f64,
    /// Per-point clip of the geometric loss in pixels (`inf` disables it).
    #[arg(long, default_value_t = 100.0)]
    pub clip: f64,
    /// Weight of the MaxError quaternion-norm regularizer.
    #[arg(long, default_value_t = 1.0)]
    pub quat_reg: f64,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct SlabArgs {
    /// Lower depth percentile (fraction).
    #[arg(long, default_value_t = 0.025)]
    pub lo: f64,
    /// Upper depth percentile (fraction).
    #[arg(long, default_value_t = 0.975)]
    pub hi: f64,
    /// Manual global slab bounds; both must be given.
    #[arg(long, requires = "xmax")]
    pub xmin: Option<f64>,
    #[arg(long, requires = "xmin")]
    pub xmax: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct LandscapeArgs {
    #[command(flatten)]
    pub scene: SceneArgs,
    #[command(flatten)]
    pub hyper: HyperArgs,
    #[command(flatten)]
    pub slab: SlabArgs,
    /// Frame index of the ground-truth pose.
    #[arg(long, default_value_t = 0)]
    pub frame: usize,
    /// Sweep axis: tx, ty, tz (meters) or rotx, roty, rotz (degrees).
    #[arg(long)]
    pub axis: String,
    /// Sweep range `lo:hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub range: String,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    /// Second axis of a 2-D grid.
    #[arg(long, requires_all = ["range2"])]
    pub axis2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub range2: Option<String>,
    #[arg(long)]
    pub steps2: Option<usize>,
    /// Comma-separated loss kinds.
    #[arg(long, default_value = "geometric,homography_local")]
    pub losses: String,
    /// Comma-separated PoseNet weights; each adds a `posenet_beta<β>` curve.
    #[arg(long)]
    pub betas: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct GradcheckArgs {
    /// Comma-separated loss kinds, or `all`.
    #[arg(long, default_value = "all")]
    pub loss: String,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Central-difference step.
    #[arg(long, default_value_t = 1e-6)]
    pub step: f64,
    /// Largest accepted relative error.
    #[arg(long, default_value_t = 1e-5)]
    pub tolerance: f64,
    /// Make the first sample of every loss the ground truth itself.
    #[arg(long)]
    pub include_identity: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub scene: SceneArgs,
    #[command(flatten)]
    pub hyper: HyperArgs,
    #[command(flatten)]
    pub slab: SlabArgs,
    #[arg(long)]
    pub loss: String,
    #[arg(long, default_value_t = 5000)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub lr: f64,
    /// Adam epsilon; defaults to 1e-14 for homography losses, 1e-8 otherwise.
    #[arg(long)]
    pub adam_eps: Option<f64>,
    #[arg(long, default_value_t = 64)]
    pub batch: usize,
    /// Homoscedastic warm-start epochs of geometric runs; defaults to a
    /// tenth of `--epochs`.
    #[arg(long)]
    pub warmstart: Option<usize>,
    /// Initial estimates: `small`, `adversarial` or `file`.
    #[arg(long, default_value = "small")]
    pub init: String,
    /// Pose list used with `--init file`.
    #[arg(long, value_name = "FILE")]
    pub init_poses: Option<PathBuf>,
    /// Largest initial translation offset, meters.
    #[arg(long, default_value_t = 0.05)]
    pub perturb_t: f64,
    /// Largest initial rotation offset, degrees.
    #[arg(long, default_value_t = 2.0)]
    pub perturb_deg: f64,
    /// Per-point clip of the monitored mean reprojection distance, pixels.
    #[arg(long, default_value_t = 1000.0)]
    pub mrd_clip: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SlabsArgs {
    #[command(flatten)]
    pub scene: SceneArgs,
    #[command(flatten)]
    pub slab: SlabArgs,
    /// `local` (per frame) or `global` (shared).
    #[arg(long, default_value = "local")]
    pub mode: String,
    /// Also write a cumulative depth histogram per frame with this many bins.
    #[arg(long)]
    pub histogram_bins: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[command(flatten)]
    pub scene: SceneArgs,
    /// Estimated pose list, matched to the scene by frame id.
    #[arg(long, value_name = "FILE")]
    pub est: PathBuf,
    /// `outdoor` (2 m/2°, 3 m/5°) or `indoor` (0.25 m/10°, 0.5 m/15°).
    #[arg(long, default_value = "outdoor")]
    pub thresholds: String,
    #[arg(long, default_value_t = 1000.0)]
    pub mrd_clip: f64,
}
