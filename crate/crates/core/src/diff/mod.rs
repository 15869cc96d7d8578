//! Exact forward-mode gradients of the pose losses and a finite-difference
//! checker.

mod dual;

pub use dual::{DiffScalar, PoseDual, Real};

use crate::error::{Error, Result};
use crate::loss::{evaluate, LossContext, LossKind};

/// Floor of the relative-error denominator in [`GradReport`].
pub const REL_ERR_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub grad: Vec<f64>,
}

/// Loss value and its exact gradient with respect to `params`
/// (7 pose coordinates, or 9 for the homoscedastic loss with its
/// log-variances).
pub fn evaluate_with_grad(kind: LossKind, params: &[f64], ctx: &LossContext) -> Result<Evaluation> {
    match params.len() {
        7 => eval_dual::<7>(kind, params, ctx),
        9 => eval_dual::<9>(kind, params, ctx),
        n => Err(Error::invalid(format!("unsupported parameter count {n}"))),
    }
}

fn eval_dual<const N: usize>(kind: LossKind, params: &[f64], ctx: &LossContext) -> Result<Evaluation> {
    let vars: [DiffScalar<N>; N] = std::array::from_fn(|i| DiffScalar::variable(params[i], i));
    let out = evaluate(kind, &vars, ctx)?;
    Ok(Evaluation {
        value: out.val,
        grad: out.grad.to_vec(),
    })
}

/// Central differences of `f` at `x`, one coordinate at a time.
pub fn finite_diff_grad<F>(f: F, x: &[f64], step: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if !(step > 0.0) {
        return Err(Error::invalid("finite-difference step must be positive"));
    }
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let wrap = |e| Error::Probe {
                coord: i,
                source: Box::new(e),
            };
            probe[i] = x[i] + step;
            let fp = f(&probe).map_err(wrap)?;
            probe[i] = x[i] - step;
            let fm = f(&probe).map_err(wrap)?;
            probe[i] = x[i];
            Ok((fp - fm) / (2.0 * step))
        })
        .collect()
}

/// [`finite_diff_grad`] of a registered loss.
pub fn loss_finite_diff_grad(kind: LossKind, params: &[f64], ctx: &LossContext, step: f64) -> Result<Vec<f64>> {
    finite_diff_grad(|p| evaluate::<f64>(kind, p, ctx), params, step)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradReport {
    pub analytic: Vec<f64>,
    pub numeric: Vec<f64>,
    /// `max_i |a_i - n_i| / max(1e-8, |a_i| + |n_i|)`.
    pub max_rel_err: f64,
}

impl GradReport {
    pub fn new(analytic: Vec<f64>, numeric: Vec<f64>) -> Self {
        let max_rel_err = analytic
            .iter()
            .zip(&numeric)
            .map(|(a, n)| (a - n).abs() / REL_ERR_FLOOR.max(a.abs() + n.abs()))
            .fold(0.0, f64::max);
        Self {
            analytic,
            numeric,
            max_rel_err,
        }
    }
}

/// Compares the forward-mode gradient against central differences.
pub fn grad_check(kind: LossKind, params: &[f64], ctx: &LossContext, step: f64) -> Result<GradReport> {
    let analytic = evaluate_with_grad(kind, params, ctx)?.grad;
    let numeric = loss_finite_diff_grad(kind, params, ctx, step)?;
    Ok(GradReport::new(analytic, numeric))
}
