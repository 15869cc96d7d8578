use homloss::scene::{cumulative_histogram, frame_depths, SlabAssignment};

use crate::args::SlabsArgs;
use crate::run::{CliError, CliResult, RunCtx};
use crate::scene_input::{depth_slab, f, load_scene};

/// `slabs.csv`: `frame,x_min,x_max` (local) or `x_min,x_max` (global).
pub fn run(ctx: &mut RunCtx, a: &SlabsArgs) -> CliResult {
    let global = match a.mode.as_str() {
        "local" => false,
        "global" => true,
        other => return Err(CliError::Usage(format!("--mode must be local or global, got '{other}'"))),
    };
    if !global && (a.slab.xmin.is_some() || a.slab.xmax.is_some()) {
        return Err(CliError::Usage("--xmin/--xmax need --mode global".into()));
    }
    let scene = load_scene(ctx, &a.scene)?;
    let slab = depth_slab(&scene, &a.slab, global)?;
    let csv = match &slab.slabs {
        SlabAssignment::PerFrame(m) => {
            let mut s = String::from("frame,x_min,x_max\n");
            for fr in &scene.frames {
                let b = m[&fr.id];
                s += &format!("{},{},{}\n", fr.id, f(b.x_min), f(b.x_max));
            }
            s
        }
        SlabAssignment::Shared(b) => format!("x_min,x_max\n{},{}\n", f(b.x_min), f(b.x_max)),
    };
    ctx.write_output("slabs.csv", csv.as_bytes())?;

    if let Some(bins) = a.histogram_bins {
        if bins == 0 {
            return Err(CliError::Usage("--histogram-bins must be at least 1".into()));
        }
        for (i, fr) in scene.frames.iter().enumerate() {
            let d = frame_depths(&scene, i);
            if d.excluded > 0 {
                eprintln!("{}: {} visible points at or behind the camera excluded", fr.id, d.excluded);
            }
            let mut s = String::from("depth,cumulative_count\n");
            for (edge, count) in cumulative_histogram(&d.positive, bins) {
                s += &format!("{},{count}\n", f(edge));
            }
            ctx.write_output(&format!("histogram_{}.csv", fr.id), s.as_bytes())?;
        }
    }
    let n_rows = csv.lines().count() - 1;
    println!(
        "{} slab rows written ({} mode{})",
        n_rows,
        a.mode,
        match slab.percentiles {
            Some((lo, hi)) => format!(", percentiles {lo}/{hi}"),
            None => ", manual bounds".into(),
        }
    );
    Ok(())
}
