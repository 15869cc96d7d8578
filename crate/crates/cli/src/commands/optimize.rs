use homloss::harness::{
    adversarial_init, optimize_poses, pct_within, perturb_poses, pose_errors, OptimConfig, INDOOR_THRESHOLDS,
    OUTDOOR_THRESHOLDS,
};
use homloss::scene::write_pose_list;
use homloss::{LossKind, Pose};

use crate::args::OptimizeArgs;
use crate::run::{CliError, CliResult, RunCtx};
use crate::scene_input::{depth_slab, f, hyper, load_scene, read_pose_list};

/// Runs whose final mean reprojection distance is at least this fraction of
/// the clip are reported as clip-saturated.
pub const SATURATION_FRACTION: f64 = 0.9;

pub fn run(ctx: &mut RunCtx, a: &OptimizeArgs) -> CliResult {
    let loss: LossKind = a.loss.parse().map_err(|e: homloss::Error| CliError::Usage(e.to_string()))?;
    let scene = load_scene(ctx, &a.scene)?;
    let gt = scene.gt_poses();
    // Perturbations draw from a stream separate from the scene and batching.
    let init_seed = ctx.seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let init: Vec<Pose> = match a.init.as_str() {
        "small" => perturb_poses(&gt, a.perturb_t, a.perturb_deg, init_seed)?,
        "adversarial" => adversarial_init(&gt, a.perturb_t, a.perturb_deg, init_seed)?,
        "file" => {
            let path = a
                .init_poses
                .as_ref()
                .ok_or_else(|| CliError::Usage("--init file needs --init-poses FILE".into()))?;
            let list = read_pose_list(ctx, path)?;
            scene
                .frames
                .iter()
                .map(|fr| {
                    list.iter()
                        .find(|(id, _)| id == &fr.id)
                        .map(|(_, p)| *p)
                        .ok_or_else(|| CliError::Data(format!("{}: no pose for frame {}", path.display(), fr.id)))
                })
                .collect::<CliResult<_>>()?
        }
        other => return Err(CliError::Usage(format!("unknown --init '{other}'"))),
    };

    let mut cfg = OptimConfig::for_loss(loss);
    cfg.epochs = a.epochs;
    cfg.batch_size = a.batch;
    cfg.seed = ctx.seed;
    cfg.adam.lr = a.lr;
    if let Some(eps) = a.adam_eps {
        cfg.adam.eps = eps;
    }
    cfg.hyper = hyper(&a.hyper)?;
    cfg.warm_start = a.warmstart;
    cfg.mrd_clip = a.mrd_clip;
    if loss.is_homography() {
        cfg.slab = Some(depth_slab(&scene, &a.slab, loss == LossKind::HomographyGlobal)?);
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let rec = optimize_poses(&scene, &init, &cfg)?;

    let mut csv = Vec::new();
    rec.write_csv(&mut csv).map_err(|e| CliError::Data(e.to_string()))?;
    ctx.write_output("run.csv", &csv)?;
    let mut poses = Vec::new();
    write_pose_list(&mut poses, &rec.final_poses).map_err(|e| CliError::Data(e.to_string()))?;
    ctx.write_output("final_poses.txt", &poses)?;

    let est: Vec<Pose> = rec.final_poses.iter().map(|(_, p)| *p).collect();
    let last = rec.last();
    let max_angle = est
        .iter()
        .zip(&gt)
        .map(|(e, g)| pose_errors(e, g).1)
        .fold(0.0, f64::max);
    let mut line = format!(
        "{}: epochs {} (warm start {}), final mean loss {}, final train MRD {} px, max angle error {} deg",
        loss.name(),
        cfg.epochs,
        rec.warm_start_epochs,
        f(last.mean_loss),
        f(last.train_mrd_px),
        f(max_angle)
    );
    for (t, r) in OUTDOOR_THRESHOLDS.iter().chain(&INDOOR_THRESHOLDS) {
        let p = pct_within(&est, &gt, *t, *r)?;
        line += &format!(", {t}m/{r}deg {:.1}%", 100.0 * p);
    }
    if last.train_mrd_px >= SATURATION_FRACTION * cfg.mrd_clip {
        line += ", clip-saturated plateau";
    }
    if !rec.failures.is_empty() {
        line += &format!(", {} frames had loss failures", rec.failures.len());
    }
    println!("{line}");
    Ok(())
}
