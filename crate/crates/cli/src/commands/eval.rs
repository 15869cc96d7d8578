use homloss::geometry::Pose;
use homloss::harness::{
    frame_reproj_distance, mean_reproj_distance, pct_within, pose_errors, INDOOR_THRESHOLDS, OUTDOOR_THRESHOLDS,
};

use crate::args::EvalArgs;
use crate::run::{CliError, CliResult, RunCtx};
use crate::scene_input::{f, load_scene, read_pose_list};

/// `metrics.csv` per frame and `summary.csv` with the threshold fractions.
pub fn run(ctx: &mut RunCtx, a: &EvalArgs) -> CliResult {
    let thresholds = match a.thresholds.as_str() {
        "outdoor" => OUTDOOR_THRESHOLDS,
        "indoor" => INDOOR_THRESHOLDS,
        other => {
            return Err(CliError::Usage(format!(
                "--thresholds must be outdoor or indoor, got '{other}'"
            )))
        }
    };
    if !(a.mrd_clip > 0.0) {
        return Err(CliError::Usage("--mrd-clip must be positive".into()));
    }
    let scene = load_scene(ctx, &a.scene)?;
    let list = read_pose_list(ctx, &a.est)?;
    let est: Vec<Pose> = scene
        .frames
        .iter()
        .map(|fr| {
            list.iter()
                .find(|(id, _)| id == &fr.id)
                .map(|(_, p)| *p)
                .ok_or_else(|| CliError::Data(format!("{}: no pose for frame {}", a.est.display(), fr.id)))
        })
        .collect::<CliResult<_>>()?;
    let gt = scene.gt_poses();

    let mut csv = String::from("frame,t_err_m,r_err_deg,mrd_px\n");
    for (i, fr) in scene.frames.iter().enumerate() {
        let (dt, dr) = pose_errors(&est[i], &gt[i]);
        let mrd = frame_reproj_distance(&est[i], &gt[i], &scene.visible_points(i), &scene.intrinsics, a.mrd_clip);
        csv += &format!("{},{},{},{}\n", fr.id, f(dt), f(dr), f(mrd));
    }
    ctx.write_output("metrics.csv", csv.as_bytes())?;

    let mrd = mean_reproj_distance(&est, &scene, a.mrd_clip)?;
    let mut summary = String::from("metric,value\n");
    summary += &format!("mean_reproj_distance_px,{}\n", f(mrd));
    let mut line = format!("mean reprojection distance {} px", f(mrd));
    for (t, r) in thresholds {
        let p = pct_within(&est, &gt, t, r)?;
        summary += &format!("within_{t}m_{r}deg,{}\n", f(p));
        line += &format!(", {t}m/{r}deg {:.1}%", 100.0 * p);
    }
    ctx.write_output("summary.csv", summary.as_bytes())?;
    println!("{line}");
    Ok(())
}
