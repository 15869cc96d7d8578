//! Pose refinement, evaluation metrics, loss landscapes and gradient-check
//! suites.

mod adam;
mod gradcheck;
mod landscape;
mod metrics;
mod optimize;

pub use adam::{adam_update, AdamConfig, AdamState};
pub use gradcheck::{gradcheck_samples, gradcheck_suite, GradSample, DEFAULT_FD_STEP, DEFAULT_TOLERANCE};
pub use landscape::{
    landscape_sweep, linspace, LandscapeLoss, LandscapeRow, LandscapeTable, SweepAxis, SweepDim,
};
pub use metrics::{
    frame_reproj_distance, mean_reproj_distance, pct_within, pose_errors, DEFAULT_MRD_CLIP,
    INDOOR_THRESHOLDS, OUTDOOR_THRESHOLDS,
};
pub use optimize::{
    adversarial_init, optimize_poses, perturb_poses, EpochRecord, OptimConfig, RunRecord,
    ABORT_FRACTION,
};
