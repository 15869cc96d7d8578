//! Closed-form homography-based camera pose loss, baseline pose losses,
//! exact forward-mode gradients and a small pose-refinement harness.

pub mod diff;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod loss;
pub mod scene;

pub use error::{Error, Result};
pub use geometry::{Intrinsics, Pose, Quat};
pub use loss::{LossContext, LossHyperParams, LossKind, SlabParams};
pub use scene::Scene;

/// Round-trip exact float formatting (17 significant digits).
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}
