//! Direct refinement of per-frame pose parameters under a chosen loss.

use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::Vector3;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::adam::{adam_update, AdamConfig, AdamState};
use super::metrics::{mean_reproj_distance, DEFAULT_MRD_CLIP};
use crate::diff::evaluate_with_grad;
use crate::error::{Error, Result};
use crate::fmt_float;
use crate::geometry::{Pose, Quat};
use crate::loss::{evaluate, LossContext, LossHyperParams, LossKind};
use crate::scene::{DepthSlab, Scene};

/// Fraction of frames that may fail in one epoch before the run aborts.
pub const ABORT_FRACTION: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimConfig {
    pub loss: LossKind,
    pub adam: AdamConfig,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub hyper: LossHyperParams,
    /// Slab bounds, required by the homography kinds.
    pub slab: Option<DepthSlab>,
    /// Homoscedastic pre-phase of geometric runs; `None` uses a tenth of
    /// `epochs`.
    pub warm_start: Option<usize>,
    /// Per-point clip of the monitored mean reprojection distance.
    pub mrd_clip: f64,
}

impl OptimConfig {
    pub fn for_loss(loss: LossKind) -> Self {
        Self {
            loss,
            adam: AdamConfig {
                eps: if loss.is_homography() { 1e-14 } else { 1e-8 },
                ..AdamConfig::default()
            },
            epochs: 5000,
            batch_size: 64,
            seed: 0,
            hyper: LossHyperParams::default(),
            slab: None,
            warm_start: None,
            mrd_clip: DEFAULT_MRD_CLIP,
        }
    }

    pub fn warm_start_epochs(&self) -> usize {
        match (self.loss, self.warm_start) {
            (LossKind::Geometric, None) => self.epochs / 10,
            (LossKind::Geometric, Some(n)) => n,
            _ => 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.adam.validate()?;
        self.hyper.validate()?;
        if self.batch_size == 0 {
            return Err(Error::invalid("batch size must be at least 1"));
        }
        if self.loss.is_homography() && self.slab.is_none() {
            return Err(Error::invalid(format!("{} needs slab bounds", self.loss)));
        }
        if !(self.mrd_clip > 0.0) {
            return Err(Error::invalid("reprojection clip must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean loss over frames whose loss evaluated to a finite value.
    pub mean_loss: f64,
    pub train_mrd_px: f64,
    /// Log-variances of the homoscedastic loss.
    pub s: Option<(f64, f64)>,
    /// Frames whose loss failed during the epoch.
    pub frame_errors: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub loss: LossKind,
    pub warm_start_epochs: usize,
    /// Epoch 0 is the initial state, before any update.
    pub epochs: Vec<EpochRecord>,
    pub final_poses: Vec<(String, Pose)>,
    /// First failure message of every frame that ever failed.
    pub failures: BTreeMap<String, String>,
}

impl RunRecord {
    pub fn last(&self) -> &EpochRecord {
        self.epochs.last().expect("run records hold at least the initial epoch")
    }

    /// `epoch,mean_loss,train_mrd_px[,s_t,s_q]`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let with_s = self.loss == LossKind::Homoscedastic;
        if with_s {
            writeln!(w, "epoch,mean_loss,train_mrd_px,s_t,s_q")?;
        } else {
            writeln!(w, "epoch,mean_loss,train_mrd_px")?;
        }
        for e in &self.epochs {
            write!(w, "{},{},{}", e.epoch, fmt_float(e.mean_loss), fmt_float(e.train_mrd_px))?;
            if let (true, Some((st, sq))) = (with_s, e.s) {
                write!(w, ",{},{}", fmt_float(st), fmt_float(sq))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn final_pose_list(&self) -> &[(String, Pose)] {
        &self.final_poses
    }
}

/// Random offsets of at most `max_t` meters and `max_deg` degrees, applied
/// in each camera's own frame.
pub fn perturb_poses(gt: &[Pose], max_t: f64, max_deg: f64, seed: u64) -> Result<Vec<Pose>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gt.iter()
        .map(|p| {
            let dir = random_unit(&mut rng);
            let axis = random_unit(&mut rng);
            let dt = dir * (max_t * rng.random::<f64>());
            let ang = max_deg.to_radians() * rng.random::<f64>();
            p.compose(&Pose::new(dt, Quat::from_axis_angle(&axis, ang)))
        })
        .collect()
}

/// Each camera turned half a revolution about its own `y` axis, then offset
/// as in [`perturb_poses`] so the start is not an exact stationary point.
pub fn adversarial_init(gt: &[Pose], max_t: f64, max_deg: f64, seed: u64) -> Result<Vec<Pose>> {
    let flip = Pose::new(Vector3::zeros(), Quat::from_axis_angle(&Vector3::y(), std::f64::consts::PI));
    let flipped = gt.iter().map(|p| p.compose(&flip)).collect::<Result<Vec<_>>>()?;
    perturb_poses(&flipped, max_t, max_deg, seed)
}

fn random_unit<R: Rng>(rng: &mut R) -> Vector3<f64> {
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

struct Problem<'a> {
    scene: &'a Scene,
    points: Vec<Vec<Vector3<f64>>>,
    slabs: Vec<Option<crate::loss::SlabParams>>,
    hyper: LossHyperParams,
}

impl<'a> Problem<'a> {
    fn new(scene: &'a Scene, cfg: &OptimConfig) -> Result<Self> {
        let points = (0..scene.frames.len()).map(|i| scene.visible_points(i)).collect();
        let slabs = scene
            .frames
            .iter()
            .map(|f| match (&cfg.slab, cfg.loss.is_homography()) {
                (Some(s), true) => s.for_frame(&f.id).map(Some).ok_or_else(|| Error::Frame {
                    frame: f.id.clone(),
                    msg: "no slab bounds for this frame".into(),
                }),
                _ => Ok(None),
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            scene,
            points,
            slabs,
            hyper: cfg.hyper,
        })
    }

    fn ctx(&self, i: usize) -> LossContext<'_> {
        let mut ctx = LossContext::new(self.scene.frames[i].gt_pose)
            .with_points(&self.points[i], self.scene.intrinsics)
            .with_hyper(self.hyper);
        ctx.slab = self.slabs[i];
        ctx
    }
}

struct State {
    poses: Vec<[f64; 7]>,
    frame_adam: Vec<AdamState>,
    s: [f64; 2],
    s_adam: AdamState,
}

impl State {
    fn params(&self, kind: LossKind, i: usize) -> Vec<f64> {
        let mut p = self.poses[i].to_vec();
        if kind == LossKind::Homoscedastic {
            p.extend_from_slice(&self.s);
        }
        p
    }
}

fn finite(r: Result<f64>) -> Result<f64> {
    match r {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(Error::NonFinite),
        Err(e) => Err(e),
    }
}

/// Runs one phase of mini-batched Adam, appending epoch records when
/// `record` is set.
#[allow(clippy::too_many_arguments)]
fn run_phase(
    kind: LossKind,
    problem: &Problem,
    state: &mut State,
    cfg: &OptimConfig,
    epochs: usize,
    rng: &mut ChaCha8Rng,
    mut record: Option<&mut RunRecord>,
    phase_offset: usize,
) -> Result<()> {
    let n = problem.scene.frames.len();
    let batch = cfg.batch_size.min(n);
    let n_batches = n / batch;
    let mut order: Vec<usize> = (0..n).collect();
    for epoch in 1..=epochs {
        order.shuffle(rng);
        let mut failed = vec![false; n];
        for b in 0..n_batches {
            let idx = &order[b * batch..(b + 1) * batch];
            let evals: Vec<(usize, Result<Vec<f64>>)> = idx
                .par_iter()
                .map(|&i| {
                    let r = evaluate_with_grad(kind, &state.params(kind, i), &problem.ctx(i)).and_then(|ev| {
                        if ev.value.is_finite() && ev.grad.iter().all(|g| g.is_finite()) {
                            Ok(ev.grad)
                        } else {
                            Err(Error::NonFinite)
                        }
                    });
                    (i, r)
                })
                .collect();
            let ok = evals.iter().filter(|(_, r)| r.is_ok()).count();
            if ok == 0 {
                for (i, r) in evals {
                    note_failure(&mut record, problem, &mut failed, i, r.unwrap_err());
                }
                continue;
            }
            let scale = 1.0 / ok as f64;
            let mut s_grad = [0.0; 2];
            for (i, r) in evals {
                match r {
                    Ok(g) => {
                        let g7: Vec<f64> = g[..7].iter().map(|v| v * scale).collect();
                        adam_update(&mut state.poses[i], &g7, &mut state.frame_adam[i], &cfg.adam)?;
                        if g.len() == 9 {
                            s_grad[0] += g[7] * scale;
                            s_grad[1] += g[8] * scale;
                        }
                    }
                    Err(e) => note_failure(&mut record, problem, &mut failed, i, e),
                }
            }
            if kind == LossKind::Homoscedastic {
                adam_update(&mut state.s, &s_grad, &mut state.s_adam, &cfg.adam)?;
            }
        }
        let n_failed = failed.iter().filter(|&&f| f).count();
        if n_failed as f64 > ABORT_FRACTION * n as f64 {
            return Err(Error::Aborted {
                epoch: phase_offset + epoch,
                failed: n_failed,
                total: n,
            });
        }
        if let Some(rec) = record.as_deref_mut() {
            rec.epochs.push(snapshot(kind, problem, state, cfg, epoch, n_failed)?);
        }
    }
    Ok(())
}

fn note_failure(record: &mut Option<&mut RunRecord>, problem: &Problem, failed: &mut [bool], i: usize, e: Error) {
    failed[i] = true;
    if let Some(rec) = record.as_deref_mut() {
        rec.failures
            .entry(problem.scene.frames[i].id.clone())
            .or_insert_with(|| e.to_string());
    }
}

fn snapshot(kind: LossKind, problem: &Problem, state: &State, cfg: &OptimConfig, epoch: usize, frame_errors: usize) -> Result<EpochRecord> {
    let n = problem.scene.frames.len();
    let losses: Vec<Result<f64>> = (0..n)
        .into_par_iter()
        .map(|i| finite(evaluate::<f64>(kind, &state.params(kind, i), &problem.ctx(i))))
        .collect();
    let good: Vec<f64> = losses.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
    let mean_loss = if good.is_empty() {
        f64::NAN
    } else {
        good.iter().sum::<f64>() / good.len() as f64
    };
    let poses: Vec<Pose> = state.poses.iter().map(|p| Pose::from_params(p)).collect();
    Ok(EpochRecord {
        epoch,
        mean_loss,
        train_mrd_px: mean_reproj_distance(&poses, problem.scene, cfg.mrd_clip)?,
        s: (kind == LossKind::Homoscedastic).then_some((state.s[0], state.s[1])),
        frame_errors,
    })
}

/// Mini-batched Adam on the 7 parameters of every frame (plus the shared
/// log-variances of the homoscedastic loss). Quaternions are left
/// unnormalized between steps.
pub fn optimize_poses(scene: &Scene, init: &[Pose], cfg: &OptimConfig) -> Result<RunRecord> {
    cfg.validate()?;
    if init.len() != scene.frames.len() {
        return Err(Error::invalid(format!(
            "{} initial poses for {} frames",
            init.len(),
            scene.frames.len()
        )));
    }
    let problem = Problem::new(scene, cfg)?;
    let n = scene.frames.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let fresh = |poses: Vec<[f64; 7]>| State {
        poses,
        frame_adam: vec![AdamState::new(7); n],
        s: [cfg.hyper.s_t, cfg.hyper.s_q],
        s_adam: AdamState::new(2),
    };
    let mut state = fresh(init.iter().map(|p| p.params()).collect());

    let warm = cfg.warm_start_epochs();
    if warm > 0 {
        let warm_cfg = OptimConfig {
            loss: LossKind::Homoscedastic,
            ..cfg.clone()
        };
        run_phase(LossKind::Homoscedastic, &problem, &mut state, &warm_cfg, warm, &mut rng, None, 0)?;
        state = fresh(state.poses);
    }

    let mut record = RunRecord {
        loss: cfg.loss,
        warm_start_epochs: warm,
        epochs: Vec::with_capacity(cfg.epochs + 1),
        final_poses: Vec::new(),
        failures: BTreeMap::new(),
    };
    record.epochs.push(snapshot(cfg.loss, &problem, &state, cfg, 0, 0)?);
    run_phase(cfg.loss, &problem, &mut state, cfg, cfg.epochs, &mut rng, Some(&mut record), warm)?;
    record.final_poses = scene
        .frames
        .iter()
        .zip(&state.poses)
        .map(|(f, p)| (f.id.clone(), Pose::from_params(p)))
        .collect();
    Ok(record)
}
