//! Loss values along 1-D and 2-D pose offsets around the ground truth.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fmt_float;
use crate::geometry::{Pose, Quat};
use crate::loss::{evaluate, LossContext, LossHyperParams, LossKind};

/// Offset direction in the ground-truth camera frame. Translations are in
/// meters, rotations in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Tx,
    Ty,
    Tz,
    RotX,
    RotY,
    RotZ,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Tx => "tx",
            SweepAxis::Ty => "ty",
            SweepAxis::Tz => "tz",
            SweepAxis::RotX => "rotx",
            SweepAxis::RotY => "roty",
            SweepAxis::RotZ => "rotz",
        }
    }

    /// Pose offset of `amount` along this axis.
    pub fn delta(&self, amount: f64) -> Pose {
        let rot = |axis: Vector3<f64>| Pose::new(Vector3::zeros(), Quat::from_axis_angle(&axis, amount.to_radians()));
        let shift = |v: Vector3<f64>| Pose::new(v * amount, Quat::identity());
        match self {
            SweepAxis::Tx => shift(Vector3::x()),
            SweepAxis::Ty => shift(Vector3::y()),
            SweepAxis::Tz => shift(Vector3::z()),
            SweepAxis::RotX => rot(Vector3::x()),
            SweepAxis::RotY => rot(Vector3::y()),
            SweepAxis::RotZ => rot(Vector3::z()),
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "tx" => SweepAxis::Tx,
            "ty" => SweepAxis::Ty,
            "tz" => SweepAxis::Tz,
            "rotx" | "rx" => SweepAxis::RotX,
            "roty" | "ry" => SweepAxis::RotY,
            "rotz" | "rz" => SweepAxis::RotZ,
            other => return Err(Error::invalid(format!("unknown sweep axis '{other}'"))),
        })
    }
}

/// `n ≥ 2` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::invalid("a sweep needs at least 2 steps"));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::invalid(format!("sweep range must satisfy lo < hi (got {lo}, {hi})")));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepDim {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

impl SweepDim {
    pub fn new(axis: SweepAxis, lo: f64, hi: f64, n: usize) -> Result<Self> {
        Ok(Self {
            axis,
            values: linspace(lo, hi, n)?,
        })
    }
}

/// One curve of a sweep: a loss kind with its own hyper-parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeLoss {
    pub label: String,
    pub kind: LossKind,
    pub hyper: LossHyperParams,
}

impl LandscapeLoss {
    pub fn new(kind: LossKind, hyper: LossHyperParams) -> Self {
        Self {
            label: kind.name().to_string(),
            kind,
            hyper,
        }
    }

    pub fn labeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeRow {
    pub offsets: Vec<f64>,
    /// One entry per loss; `None` where evaluation failed.
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeTable {
    pub axes: Vec<SweepAxis>,
    pub labels: Vec<String>,
    /// Row-major over the grid, last axis fastest.
    pub rows: Vec<LandscapeRow>,
}

impl LandscapeTable {
    pub fn column(&self, label: &str) -> Option<Vec<Option<f64>>> {
        let j = self.labels.iter().position(|l| l == label)?;
        Some(self.rows.iter().map(|r| r.values[j]).collect())
    }

    /// `offset[,offset2],loss_value` for one loss; failed cells are empty.
    pub fn write_loss_csv<W: Write>(&self, mut w: W, label: &str) -> std::io::Result<()> {
        let j = self
            .labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::NotFound, format!("no loss '{label}'")))?;
        let header: Vec<String> = if self.axes.len() == 1 {
            vec!["offset".into()]
        } else {
            (1..=self.axes.len())
                .map(|i| if i == 1 { "offset".into() } else { format!("offset{i}") })
                .collect()
        };
        writeln!(w, "{},loss_value", header.join(","))?;
        for r in &self.rows {
            let offs: Vec<String> = r.offsets.iter().map(|&o| fmt_float(o)).collect();
            let v = r.values[j].map(fmt_float).unwrap_or_default();
            writeln!(w, "{},{v}", offs.join(","))?;
        }
        Ok(())
    }
}

/// Evaluates every loss at `gt ∘ offset` for each grid cell. `ctx.gt` is
/// the ground truth; per-loss hyper-parameters replace `ctx.hyper`.
pub fn landscape_sweep(ctx: &LossContext, dims: &[SweepDim], losses: &[LandscapeLoss]) -> Result<LandscapeTable> {
    if dims.is_empty() || dims.len() > 2 {
        return Err(Error::invalid("sweeps are 1-D or 2-D"));
    }
    if losses.is_empty() {
        return Err(Error::invalid("no losses to sweep"));
    }
    for d in dims {
        if d.values.len() < 2 {
            return Err(Error::invalid("a sweep needs at least 2 steps"));
        }
    }
    let cells: Vec<Vec<f64>> = match dims {
        [a] => a.values.iter().map(|&x| vec![x]).collect(),
        [a, b] => a
            .values
            .iter()
            .flat_map(|&x| b.values.iter().map(move |&y| vec![x, y]))
            .collect(),
        _ => unreachable!(),
    };
    let rows = cells
        .into_par_iter()
        .map(|offsets| {
            let mut est = ctx.gt;
            for (d, &o) in dims.iter().zip(&offsets) {
                est = est.compose(&d.axis.delta(o))?;
            }
            let params = est.params();
            let values = losses
                .iter()
                .map(|l| evaluate::<f64>(l.kind, &params, &ctx.with_hyper(l.hyper)).ok())
                .collect();
            Ok(LandscapeRow { offsets, values })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LandscapeTable {
        axes: dims.iter().map(|d| d.axis).collect(),
        labels: losses.iter().map(|l| l.label.clone()).collect(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Intrinsics;
    use crate::loss::SlabParams;

    #[test]
    fn linspace_hits_endpoints_and_zero() {
        let v = linspace(-180.0, 180.0, 361).unwrap();
        assert_eq!(v.len(), 361);
        assert_eq!(v[0], -180.0);
        assert_eq!(v[180], 0.0);
        assert_eq!(v[360], 180.0);
        assert!(linspace(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn minimum_at_zero_offset() {
        let gt = Pose::new(Vector3::new(1.0, -0.5, 2.0), Quat::new(0.9, 0.1, -0.3, 0.2).normalized().unwrap());
        let pts: Vec<Vector3<f64>> = (0..30)
            .map(|i| {
                let f = i as f64;
                gt.compose(&Pose::new(Vector3::new((f * 0.37).sin(), (f * 0.71).cos(), 3.0 + f * 0.2), Quat::identity()))
                    .unwrap()
                    .t
            })
            .collect();
        let k = Intrinsics::from_fov(640.0, 480.0, 60.0).unwrap();
        let ctx = LossContext::new(gt)
            .with_points(&pts, k)
            .with_slab(SlabParams::new(3.0, 9.0).unwrap());
        let losses: Vec<LandscapeLoss> = LossKind::ALL
            .iter()
            .map(|&k| {
                LandscapeLoss::new(
                    k,
                    LossHyperParams {
                        s_q: 0.0,
                        ..Default::default()
                    },
                )
            })
            .collect();
        for axis in [SweepAxis::Tx, SweepAxis::Tz, SweepAxis::RotY, SweepAxis::RotZ] {
            let t = landscape_sweep(&ctx, &[SweepDim::new(axis, -10.0, 10.0, 21).unwrap()], &losses).unwrap();
            for l in &t.labels {
                let col = t.column(l).unwrap();
                let zero = col[10].unwrap();
                assert!(zero.abs() < 1e-12, "{l} {axis}");
                assert!(col.iter().flatten().all(|&v| v >= zero), "{l} {axis}");
            }
        }
    }

    #[test]
    fn grid_csv_layout() {
        let ctx = LossContext::new(Pose::identity());
        let losses = [LandscapeLoss::new(LossKind::PoseNet, LossHyperParams::default()).labeled("pn")];
        let dims = [
            SweepDim::new(SweepAxis::Tz, -1.0, 1.0, 3).unwrap(),
            SweepDim::new(SweepAxis::RotY, -5.0, 5.0, 2).unwrap(),
        ];
        let t = landscape_sweep(&ctx, &dims, &losses).unwrap();
        let mut buf = Vec::new();
        t.write_loss_csv(&mut buf, "pn").unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 7);
        assert!(text.starts_with("offset,offset2,loss_value\n"));
        assert!(t.write_loss_csv(Vec::new(), "nope").is_err());
    }

    #[test]
    fn failed_cells_are_missing() {
        let ctx = LossContext::new(Pose::identity());
        let losses = [LandscapeLoss::new(LossKind::HomographyLocal, LossHyperParams::default())];
        let t = landscape_sweep(&ctx, &[SweepDim::new(SweepAxis::Tx, 0.0, 1.0, 2).unwrap()], &losses).unwrap();
        assert!(t.rows.iter().all(|r| r.values[0].is_none()));
    }
}
