use homloss::geometry::Intrinsics;
use homloss::scene::{
    global_slab, global_slab_manual, local_slabs, parse_points, parse_pose_list, synth_scene, DepthSlab, PointsFile,
    SynthParams,
};
use homloss::{LossHyperParams, Pose, Scene};

use crate::args::{HyperArgs, SceneArgs, SlabArgs};
use crate::run::{CliError, CliResult, RunCtx};

fn parse_intrinsics(s: &str) -> CliResult<Intrinsics> {
    let v: Vec<f64> = s
        .split(',')
        .map(|f| f.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("--intrinsics '{s}' is not a list of numbers")))?;
    if v.len() != 6 {
        return Err(CliError::Usage("--intrinsics takes fx,fy,cx,cy,width,height".into()));
    }
    Intrinsics::new(v[0], v[1], v[2], v[3], v[4], v[5]).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn read_pose_list(ctx: &mut RunCtx, path: &std::path::Path) -> CliResult<Vec<(String, Pose)>> {
    let bytes = ctx.read_input(path)?;
    parse_pose_list(bytes.as_slice()).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn load_scene(ctx: &mut RunCtx, a: &SceneArgs) -> CliResult<Scene> {
    if a.synthetic {
        let p = SynthParams {
            seed: ctx.seed,
            n_points: a.n_points,
            n_frames: a.n_frames,
            depth_range: (a.depth_min, a.depth_max),
            fov_deg: a.fov,
            width: a.width,
            height: a.height,
        };
        p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        return synth_scene(&p).map_err(|e| CliError::Data(e.to_string()));
    }
    let Some(poses_path) = &a.poses else {
        return Err(CliError::Usage("give --synthetic or --poses FILE".into()));
    };
    let k = parse_intrinsics(
        a.intrinsics
            .as_deref()
            .ok_or_else(|| CliError::Usage("file scenes need --intrinsics fx,fy,cx,cy,width,height".into()))?,
    )?;
    let poses = read_pose_list(ctx, poses_path)?;
    let points = match &a.points {
        Some(p) => {
            let bytes = ctx.read_input(p)?;
            parse_points(bytes.as_slice()).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?
        }
        None => PointsFile::default(),
    };
    Scene::from_parts(poses, points, k).map_err(|e| CliError::Data(e.to_string()))
}

pub fn hyper(a: &HyperArgs) -> CliResult<LossHyperParams> {
    let h = LossHyperParams {
        beta: a.beta,
        s_t: a.s_t,
        s_q: a.s_q,
        reproj_clip: a.clip,
        quat_reg_weight: a.quat_reg,
    };
    h.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(h)
}

/// Manual bounds give a global slab; otherwise percentiles per frame
/// (`local`) or pooled (`global`).
pub fn depth_slab(scene: &Scene, a: &SlabArgs, global: bool) -> CliResult<DepthSlab> {
    if !(0.0 <= a.lo && a.lo < a.hi && a.hi <= 1.0) {
        return Err(CliError::Usage(format!(
            "percentiles must satisfy 0 <= lo < hi <= 1 (got {}, {})",
            a.lo, a.hi
        )));
    }
    match (a.xmin, a.xmax) {
        (Some(lo), Some(hi)) => global_slab_manual(lo, hi).map_err(|e| CliError::Usage(e.to_string())),
        _ if global => global_slab(scene, a.lo, a.hi).map_err(|e| CliError::Data(e.to_string())),
        _ => local_slabs(scene, a.lo, a.hi).map_err(|e| CliError::Data(e.to_string())),
    }
}

/// `lo:hi`.
pub fn parse_range(s: &str, flag: &str) -> CliResult<(f64, f64)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("{flag} expects lo:hi, got '{s}'")))?;
    let p = |v: &str| {
        v.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("{flag}: '{v}' is not a number")))
    };
    Ok((p(a)?, p(b)?))
}

/// Formats a CSV float field.
pub fn f(v: f64) -> String {
    homloss::fmt_float(v)
}
