//! Homography-based pose loss and the oracles that check its derivation.
//!
//! For each plane `Z = x` of the ground-truth camera (normal `n`), the
//! error is `‖I - H(x)‖_F²`. Averaging over the slab `x ∈ [x_min, x_max]`
//! integrates in closed form to
//!
//! ```text
//! Tr(A + B ln(x_max/x_min) / (x_max - x_min) + C / (x_min x_max))
//! A = (I - R)(I - R)ᵀ
//! B = n tᵀ(I - R) + (n tᵀ(I - R))ᵀ
//! C = n tᵀ (n tᵀ)ᵀ
//! ```
//!
//! [`homography_loss_numeric`] (midpoint quadrature over planes) and
//! [`scalar_form_oracle`] (angle/scalar reduction) are independent routes to
//! the same value and are used only for validation.

use nalgebra::{Matrix3, Vector3};

use super::SlabParams;
use crate::diff::Real;
use crate::error::{Error, Result};
use crate::geometry::{homography, Homography, RelativePose};

/// `‖I - H‖_F²`.
pub fn single_plane_error<T: Real>(h: &Homography<T>) -> T {
    let d = Matrix3::<T>::identity() - h.h;
    d.iter().fold(T::zero(), |acc, v| acc + *v * *v)
}

/// `Tr(diag(h w³/12, w h³/12, w h) (I - H)ᵀ(I - H))`: the linearized
/// reprojection error integrated over a `w × h` sensor centred on the
/// principal point, in normalized image coordinates.
pub fn sensor_weighted_reproj<T: Real>(h: &Homography<T>, width: f64, height: f64) -> Result<T> {
    if !(width > 0.0 && height > 0.0) {
        return Err(Error::invalid("sensor extent must be positive"));
    }
    let d = Matrix3::<T>::identity() - h.h;
    let m = d.transpose() * d;
    let wts = [
        height * width.powi(3) / 12.0,
        width * height.powi(3) / 12.0,
        width * height,
    ];
    Ok((0..3).fold(T::zero(), |acc, i| acc + T::cst(wts[i]) * m[(i, i)]))
}

/// Closed-form slab-averaged homography error.
pub fn homography_loss_closed<T: Real>(rel: &RelativePose<T>, slab: &SlabParams) -> Result<T> {
    slab.validate()?;
    let n = slab.n.map(T::cst);
    let i_minus_r = Matrix3::<T>::identity() - rel.r;
    let a = i_minus_r * i_minus_r.transpose();
    let nt = n * rel.t.transpose();
    let ntr = nt * i_minus_r;
    let b = ntr + ntr.transpose();
    let c = nt * nt.transpose();
    let (lo, hi) = (slab.x_min, slab.x_max);
    let log_w = T::cst((hi / lo).ln() / (hi - lo));
    let inv_w = T::cst(1.0 / (lo * hi));
    Ok(a.trace() + b.trace() * log_w + c.trace() * inv_w)
}

/// Composite-midpoint approximation of
/// `1/(x_max - x_min) ∫ ‖I - H(x)‖_F² dx` with `n_samples` planes.
pub fn homography_loss_numeric(rel: &RelativePose, slab: &SlabParams, n_samples: usize) -> Result<f64> {
    slab.validate()?;
    if n_samples < 2 {
        return Err(Error::invalid("quadrature needs at least two samples"));
    }
    let step = (slab.x_max - slab.x_min) / n_samples as f64;
    let mut sum = 0.0;
    let mut comp = 0.0;
    for i in 0..n_samples {
        let x = slab.x_min + (i as f64 + 0.5) * step;
        let e = single_plane_error(&homography(rel, &slab.n, x)?);
        // Kahan summation keeps 10⁶-term sums at full precision.
        let y = e - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(sum / n_samples as f64)
}

/// `4(1 - cos θ_R) + 2 tᵀ(I - R)n ln(x_max/x_min)/(x_max - x_min) + ‖t‖² ‖n‖² / (x_min x_max)`,
/// with `θ_R` recovered from `R` through its axis-angle decomposition.
pub fn scalar_form_oracle(rel: &RelativePose, slab: &SlabParams) -> Result<f64> {
    slab.validate()?;
    let r = &rel.r;
    let axis = Vector3::new(r[(2, 1)] - r[(1, 2)], r[(0, 2)] - r[(2, 0)], r[(1, 0)] - r[(0, 1)]);
    let theta = (0.5 * axis.norm()).atan2(0.5 * (r.trace() - 1.0));
    // 4(1 - cos θ) = 8 sin²(θ/2)
    let s = (0.5 * theta).sin();
    let rot = 8.0 * s * s;
    let (lo, hi) = (slab.x_min, slab.x_max);
    let cross = 2.0 * (rel.t.dot(&slab.n) - rel.t.dot(&(r * slab.n)));
    let trans = rel.t.norm_squared() * slab.n.norm_squared();
    Ok(rot + cross * (hi / lo).ln() / (hi - lo) + trans / (lo * hi))
}

/// Per-pixel reprojection model used by [`reprojection_grid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReprojectionModel {
    /// `e(p) = ‖p - H p‖²`, the `s ≈ 1` approximation.
    Linearized,
    /// `e(p) = ‖p - H p / s‖²` with `s` the third component of `H p`.
    Exact,
}

/// Midpoint quadrature of the per-pixel reprojection error over a
/// `width × height` sensor sampled on an `n × n` grid, in normalized
/// coordinates `p = (p_x, p_y, 1)`.
///
/// Returns the integral and the range `(s_min, s_max)` of the homogeneous
/// scale over the sampled pixels.
pub fn reprojection_grid(
    h: &Homography,
    width: f64,
    height: f64,
    n: usize,
    model: ReprojectionModel,
) -> (f64, (f64, f64)) {
    let (dx, dy) = (width / n as f64, height / n as f64);
    let mut sum = 0.0;
    let mut s_range = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let px = -0.5 * width + (i as f64 + 0.5) * dx;
        for j in 0..n {
            let py = -0.5 * height + (j as f64 + 0.5) * dy;
            let p = Vector3::new(px, py, 1.0);
            let hp = h.h * p;
            s_range = (s_range.0.min(hp.z), s_range.1.max(hp.z));
            let e = match model {
                ReprojectionModel::Linearized => (p - hp).norm_squared(),
                ReprojectionModel::Exact => (p - hp / hp.z).norm_squared(),
            };
            sum += e;
        }
    }
    (sum * dx * dy, s_range)
}
