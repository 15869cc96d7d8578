use homloss::harness::{gradcheck_samples, gradcheck_suite};
use homloss::LossKind;

use crate::args::GradcheckArgs;
use crate::run::{CliError, CliResult, RunCtx};
use crate::scene_input::f;

fn kinds(spec: &str) -> CliResult<Vec<LossKind>> {
    if spec.trim() == "all" {
        return Ok(LossKind::ALL.to_vec());
    }
    spec.split(',')
        .map(|s| s.trim().parse::<LossKind>().map_err(|e| CliError::Usage(e.to_string())))
        .collect()
}

/// One CSV per loss: `sample,max_rel_err,max_abs_analytic,max_abs_numeric,status`,
/// where status is `pass`, `fail`, `probe_error` or `identity`. The
/// `est = gt` sample is reported but not held to the tolerance.
pub fn run(ctx: &mut RunCtx, a: &GradcheckArgs) -> CliResult {
    if !(a.step > 0.0) {
        return Err(CliError::Usage("--step must be positive".into()));
    }
    if !(a.tolerance > 0.0) {
        return Err(CliError::Usage("--tolerance must be positive".into()));
    }
    let mut failures = 0;
    for kind in kinds(&a.loss)? {
        let samples = gradcheck_samples(kind, a.samples, ctx.seed, a.include_identity)?;
        let reports = gradcheck_suite(kind, &samples, a.step);
        let mut csv = String::from("sample,max_rel_err,max_abs_analytic,max_abs_numeric,status\n");
        let (mut worst, mut fails, mut probe_errors) = (0.0f64, 0, 0);
        for (i, r) in reports.iter().enumerate() {
            match r {
                Ok(rep) => {
                    let abs_max = |v: &[f64]| v.iter().fold(0.0f64, |m, g| m.max(g.abs()));
                    let status = if a.include_identity && i == 0 {
                        "identity"
                    } else if rep.max_rel_err < a.tolerance {
                        worst = worst.max(rep.max_rel_err);
                        "pass"
                    } else {
                        worst = worst.max(rep.max_rel_err);
                        fails += 1;
                        "fail"
                    };
                    csv += &format!(
                        "{i},{},{},{},{status}\n",
                        f(rep.max_rel_err),
                        f(abs_max(&rep.analytic)),
                        f(abs_max(&rep.numeric))
                    );
                }
                Err(_) => {
                    probe_errors += 1;
                    csv += &format!("{i},,,,probe_error\n");
                }
            }
        }
        ctx.write_output(&format!("gradcheck_{}.csv", kind.name()), csv.as_bytes())?;
        println!(
            "{}: {} samples, worst max_rel_err {}, {} over tolerance, {} probe errors",
            kind.name(),
            reports.len(),
            f(worst),
            fails,
            probe_errors
        );
        failures += fails;
    }
    if failures > 0 {
        return Err(CliError::Tolerance(format!(
            "{failures} samples exceed tolerance {}",
            a.tolerance
        )));
    }
    Ok(())
}
