//! Plain-text pose and point files.
//!
//! Pose list: `name tx ty tz qw qx qy qz` per line.
//! Points: `P x y z` and `V frame_id idx...` lines.
//!
//! `#` lines and blank lines are skipped; CRLF is accepted. Every error
//! carries its 1-based line number.

use std::io::{BufRead, Write};

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::fmt_float;
use crate::geometry::{Pose, Quat};

fn data_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader.lines().enumerate().filter_map(|(i, line)| {
        let line = match line {
            Ok(l) => l,
            Err(e) => {
                return Some(Err(Error::Parse {
                    line: i + 1,
                    msg: e.to_string(),
                }))
            }
        };
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            None
        } else {
            Some(Ok((i + 1, trimmed.to_string())))
        }
    })
}

fn number(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("'{field}' is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            msg: format!("'{field}' is not finite"),
        });
    }
    Ok(v)
}

/// Parses a pose list. Quaternions are normalized and canonicalized to a
/// non-negative scalar part.
pub fn parse_pose_list<R: BufRead>(reader: R) -> Result<Vec<(String, Pose)>> {
    data_lines(reader)
        .map(|l| {
            let (line, text) = l?;
            let fields: Vec<&str> = text.split_whitespace().collect();
            if fields.len() != 8 {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected 8 fields (name tx ty tz qw qx qy qz), got {}", fields.len()),
                });
            }
            let v = fields[1..]
                .iter()
                .map(|f| number(f, line))
                .collect::<Result<Vec<f64>>>()?;
            let q = Quat::new(v[3], v[4], v[5], v[6]).canonical().map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
            Ok((fields[0].to_string(), Pose::new(Vector3::new(v[0], v[1], v[2]), q)))
        })
        .collect()
}

pub fn write_pose_list<W: Write>(mut w: W, poses: &[(String, Pose)]) -> std::io::Result<()> {
    writeln!(w, "# name tx ty tz qw qx qy qz")?;
    for (name, p) in poses {
        let vals = p.params().map(fmt_float).join(" ");
        writeln!(w, "{name} {vals}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Visibility {
    pub frame: String,
    pub indices: Vec<usize>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointsFile {
    pub points: Vec<Vector3<f64>>,
    pub visibility: Vec<Visibility>,
}

pub fn parse_points<R: BufRead>(reader: R) -> Result<PointsFile> {
    let mut out = PointsFile::default();
    for l in data_lines(reader) {
        let (line, text) = l?;
        let fields: Vec<&str> = text.split_whitespace().collect();
        match fields[0] {
            "P" => {
                if fields.len() != 4 {
                    return Err(Error::Parse {
                        line,
                        msg: format!("point line needs 'P x y z', got {} fields", fields.len()),
                    });
                }
                out.points.push(Vector3::new(
                    number(fields[1], line)?,
                    number(fields[2], line)?,
                    number(fields[3], line)?,
                ));
            }
            "V" => {
                if fields.len() < 2 {
                    return Err(Error::Parse {
                        line,
                        msg: "visibility line needs a frame id".into(),
                    });
                }
                let indices = fields[2..]
                    .iter()
                    .map(|f| {
                        f.parse::<usize>().map_err(|_| Error::Parse {
                            line,
                            msg: format!("frame {}: '{f}' is not a point index", fields[1]),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                out.visibility.push(Visibility {
                    frame: fields[1].to_string(),
                    indices,
                    line,
                });
            }
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unknown record type '{other}'"),
                })
            }
        }
    }
    for v in &out.visibility {
        if let Some(&bad) = v.indices.iter().find(|&&i| i >= out.points.len()) {
            return Err(Error::Parse {
                line: v.line,
                msg: format!(
                    "frame {}: point index {bad} out of range ({} points)",
                    v.frame,
                    out.points.len()
                ),
            });
        }
    }
    Ok(out)
}

/// Writes points followed by one visibility line per frame.
pub fn write_points<W: Write>(mut w: W, points: &[Vector3<f64>], visibility: &[(String, Vec<usize>)]) -> std::io::Result<()> {
    writeln!(w, "# P x y z | V frame_id idx...")?;
    for p in points {
        writeln!(w, "P {} {} {}", fmt_float(p.x), fmt_float(p.y), fmt_float(p.z))?;
    }
    for (id, idx) in visibility {
        write!(w, "V {id}")?;
        for i in idx {
            write!(w, " {i}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_pose_line() {
        let poses = parse_pose_list("# header\nimg1 0 0 0 1 0 0 0\n".as_bytes()).unwrap();
        assert_eq!(poses, vec![("img1".to_string(), Pose::identity())]);
    }

    #[test]
    fn canonicalizes_and_accepts_crlf() {
        let poses = parse_pose_list("a 1 2 3 -2 0 0 0\r\n\r\nb 0 0 0 0 0 0 3e0\r\n".as_bytes()).unwrap();
        assert_eq!(poses[0].1.q, Quat::new(1.0, 0.0, 0.0, 0.0));
        assert_eq!(poses[1].1.q, Quat::new(0.0, 0.0, 0.0, 1.0));
    }

    #[test]
    fn malformed_pose_lines_report_line_numbers() {
        let err = parse_pose_list("# h\nok 0 0 0 1 0 0 0\nbad 0 0 0 1 0 0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = parse_pose_list("x 0 0 zero 1 0 0 0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_pose_list("x 0 0 0 0 0 0 0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn pose_list_round_trip() {
        let poses = vec![
            ("a".to_string(), Pose::new(Vector3::new(0.1, -2.5e-7, 1e3), Quat::new(0.5, 0.5, -0.5, 0.5))),
            (
                "b".to_string(),
                Pose::new(
                    Vector3::new(-3.25, 7.0, 1.0 / 3.0),
                    Quat::new(0.9, 0.1, 0.3, -0.2).canonical().unwrap(),
                ),
            ),
        ];
        let mut buf = Vec::new();
        write_pose_list(&mut buf, &poses).unwrap();
        let back = parse_pose_list(buf.as_slice()).unwrap();
        for ((na, pa), (nb, pb)) in poses.iter().zip(&back) {
            assert_eq!(na, nb);
            for (x, y) in pa.params().iter().zip(pb.params()) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn points_and_visibility() {
        let text = "P 0 0 1\nP 1 0 2\nP 0 1 3\nV f 0 2\n";
        let pf = parse_points(text.as_bytes()).unwrap();
        assert_eq!(pf.points.len(), 3);
        assert_eq!(pf.visibility[0].indices, vec![0, 2]);

        let err = parse_points("P 0 0 1\nP 1 0 2\nP 0 1 3\nV f 5\n".as_bytes()).unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 4);
                assert!(msg.contains("frame f") && msg.contains('5'));
            }
            e => panic!("{e:?}"),
        }
        assert!(matches!(
            parse_points("P 0 0\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_points("P 0 0 1\nQ 1 2 3\n".as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
