use homloss::harness::{landscape_sweep, LandscapeLoss, SweepAxis, SweepDim};
use homloss::scene::{frame_slab, global_slab, global_slab_manual};
use homloss::{LossContext, LossKind, SlabParams};

use crate::args::LandscapeArgs;
use crate::run::{CliError, CliResult, RunCtx};
use crate::scene_input::{f, hyper, load_scene, parse_range};

fn dim(axis: &str, range: &str, steps: usize, flag: &str) -> CliResult<SweepDim> {
    let axis: SweepAxis = axis.parse().map_err(|e: homloss::Error| CliError::Usage(e.to_string()))?;
    let (lo, hi) = parse_range(range, flag)?;
    SweepDim::new(axis, lo, hi, steps).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn run(ctx: &mut RunCtx, a: &LandscapeArgs) -> CliResult {
    let mut dims = vec![dim(&a.axis, &a.range, a.steps, "--range")?];
    if let Some(axis2) = &a.axis2 {
        let range2 = a.range2.as_deref().unwrap_or_default();
        dims.push(dim(axis2, range2, a.steps2.unwrap_or(a.steps), "--range2")?);
    }
    let base = hyper(&a.hyper)?;
    let mut losses: Vec<LandscapeLoss> = a
        .losses
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<LossKind>()
                .map(|k| LandscapeLoss::new(k, base))
                .map_err(|e| CliError::Usage(e.to_string()))
        })
        .collect::<CliResult<_>>()?;
    if let Some(betas) = &a.betas {
        for b in betas.split(',') {
            let beta: f64 = b
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("--betas: '{b}' is not a number")))?;
            let h = homloss::LossHyperParams { beta, ..base };
            h.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            losses.push(LandscapeLoss::new(LossKind::PoseNet, h).labeled(format!("posenet_beta{beta}")));
        }
    }
    if losses.is_empty() {
        return Err(CliError::Usage("no losses requested".into()));
    }

    let scene = load_scene(ctx, &a.scene)?;
    if a.frame >= scene.frames.len() {
        return Err(CliError::Usage(format!(
            "--frame {} out of range ({} frames)",
            a.frame,
            scene.frames.len()
        )));
    }
    let frame = &scene.frames[a.frame];
    let points = scene.visible_points(a.frame);
    let slab_for = |kind: LossKind| -> CliResult<Option<SlabParams>> {
        let manual = match (a.slab.xmin, a.slab.xmax) {
            (Some(lo), Some(hi)) => Some(global_slab_manual(lo, hi).map_err(|e| CliError::Usage(e.to_string()))?),
            _ => None,
        };
        Ok(match kind {
            LossKind::HomographyLocal => Some(
                frame_slab(&scene, a.frame, a.slab.lo, a.slab.hi).map_err(|e| CliError::Data(e.to_string()))?,
            ),
            LossKind::HomographyGlobal => {
                let s = match manual {
                    Some(s) => s,
                    None => global_slab(&scene, a.slab.lo, a.slab.hi).map_err(|e| CliError::Data(e.to_string()))?,
                };
                s.for_frame(&frame.id)
            }
            _ => None,
        })
    };

    for l in &losses {
        let mut lctx = LossContext::new(frame.gt_pose)
            .with_points(&points, scene.intrinsics)
            .with_hyper(l.hyper);
        lctx.slab = slab_for(l.kind)?;
        let table = landscape_sweep(&lctx, &dims, std::slice::from_ref(l))?;
        let mut buf = Vec::new();
        table
            .write_loss_csv(&mut buf, &l.label)
            .map_err(|e| CliError::Data(e.to_string()))?;
        ctx.write_output(&format!("landscape_{}.csv", l.label), &buf)?;

        let best = table
            .rows
            .iter()
            .filter_map(|r| r.values[0].map(|v| (v, &r.offsets)))
            .min_by(|x, y| x.0.total_cmp(&y.0));
        match best {
            Some((v, offs)) => {
                let offs: Vec<String> = offs.iter().map(|o| o.to_string()).collect();
                println!(
                    "{}: {} cells, min {} at offset ({})",
                    l.label,
                    table.rows.len(),
                    f(v),
                    offs.join(", ")
                );
            }
            None => println!("{}: {} cells, no finite value", l.label, table.rows.len()),
        }
    }
    Ok(())
}
