//! Canonical motion files (`.gmo`).
//!
//! ```text
//! gmo 1
//! skeleton humanml3d-22
//! fps 30
//! source real
//! state centered,scaled
//! frames 2
//! meta normalize.median_kernel=11
//! data
//! <3·J numbers per row, one row per frame>
//! ```
//!
//! Numbers are written in scientific notation with 9 significant digits,
//! so rewriting a parsed file reproduces it byte for byte. A flat CSV
//! variant (`frame,joint,x,y,z`, 1-based, optional `# key=value` header
//! comments for `skeleton`, `fps`, `source` and `state`) is also parsed.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geom::Point3;
use crate::motion::{MotionSequence, NormState, Source};
use crate::skeleton::{SkeletonRegistry, HUMANML3D_22};

pub const FORMAT_VERSION: u32 = 1;

/// Formats a coordinate with 9 significant digits.
pub fn format_coord(v: f64) -> String {
    format!("{v:.8e}")
}

pub fn write_motion(seq: &MotionSequence) -> Vec<u8> {
    let mut out = String::with_capacity(64 + seq.data().len() * 48);
    let _ = writeln!(out, "gmo {FORMAT_VERSION}");
    let _ = writeln!(out, "skeleton {}", seq.skeleton().id());
    let _ = writeln!(out, "fps {}", seq.fps());
    let _ = writeln!(out, "source {}", seq.source());
    let _ = writeln!(out, "state {}", seq.state());
    let _ = writeln!(out, "frames {}", seq.frames());
    for (k, v) in seq.meta() {
        let _ = writeln!(out, "meta {}={}", sanitize_key(k), sanitize_value(v));
    }
    out.push_str("data\n");
    for frame in seq.frame_iter() {
        let mut first = true;
        for p in frame {
            for &v in p {
                if !first {
                    out.push(' ');
                }
                first = false;
                out.push_str(&format_coord(v));
            }
        }
        out.push('\n');
    }
    out.into_bytes()
}

fn sanitize_key(k: &str) -> String {
    k.chars()
        .map(|c| {
            if c.is_whitespace() || c == '=' {
                '_'
            } else {
                c
            }
        })
        .collect()
}

fn sanitize_value(v: &str) -> String {
    v.replace(['\n', '\r'], " ")
}

/// Parses a canonical file (or its CSV variant) against the builtin skeletons.
pub fn parse_motion(bytes: &[u8]) -> Result<MotionSequence> {
    parse_motion_with(bytes, &SkeletonRegistry::default())
}

pub fn parse_motion_with(bytes: &[u8], registry: &SkeletonRegistry) -> Result<MotionSequence> {
    let text =
        std::str::from_utf8(bytes).map_err(|e| Error::parse(1, format!("not UTF-8: {e}")))?;
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'));
    match first {
        Some(l) if l.starts_with("gmo") => parse_canonical(text, registry),
        Some(l) if l.contains(',') => parse_csv(text, registry),
        Some(_) => Err(Error::parse(1, "expected a `gmo <version>` header")),
        None => Err(Error::parse(1, "empty motion file")),
    }
}

fn parse_canonical(text: &str, registry: &SkeletonRegistry) -> Result<MotionSequence> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut header: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    let mut meta = BTreeMap::new();
    let mut data_line = None;
    for (line, body) in lines.by_ref() {
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        if body == "data" {
            data_line = Some(line);
            break;
        }
        let (key, value) = body
            .split_once(char::is_whitespace)
            .map(|(k, v)| (k, v.trim()))
            .ok_or_else(|| Error::parse(line, format!("malformed header line {body:?}")))?;
        if key == "meta" {
            let (k, v) = value
                .split_once('=')
                .ok_or_else(|| Error::parse(line, "meta entry needs key=value"))?;
            meta.insert(k.to_string(), v.to_string());
        } else if header.insert(key, (line, value)).is_some() {
            return Err(Error::parse(line, format!("duplicate header `{key}`")));
        }
    }
    let data_line = data_line.ok_or_else(|| Error::parse(1, "missing `data` line"))?;
    let field = |key: &str| {
        header
            .get(key)
            .copied()
            .ok_or_else(|| Error::parse(data_line, format!("missing header `{key}`")))
    };

    let (line, version) = field("gmo")?;
    let version: u32 = version
        .parse()
        .map_err(|_| Error::parse(line, format!("bad version {version:?}")))?;
    if version != FORMAT_VERSION {
        return Err(Error::parse(
            line,
            format!("unsupported format version {version}, expected {FORMAT_VERSION}"),
        ));
    }
    let (line, skeleton_id) = field("skeleton")?;
    let skeleton = registry
        .get(skeleton_id)
        .ok_or_else(|| Error::parse(line, format!("unknown skeleton id {skeleton_id:?}")))?;
    let (line, fps) = field("fps")?;
    let fps: f64 = fps
        .parse()
        .map_err(|_| Error::parse(line, format!("bad fps {fps:?}")))?;
    let (line, source) = field("source")?;
    let source: Source = source
        .parse()
        .map_err(|e| Error::parse(line, format!("{e}")))?;
    let (line, state) = field("state")?;
    let state: NormState = state
        .parse()
        .map_err(|e| Error::parse(line, format!("{e}")))?;
    let (line, frames) = field("frames")?;
    let frames: usize = frames
        .parse()
        .map_err(|_| Error::parse(line, format!("bad frame count {frames:?}")))?;

    let joints = skeleton.joint_count();
    let mut data: Vec<Point3> = Vec::with_capacity(frames * joints);
    let mut rows = 0usize;
    for (line, body) in lines {
        if body.is_empty() {
            continue;
        }
        rows += 1;
        let mut values = Vec::with_capacity(3 * joints);
        for tok in body.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::parse(line, format!("bad number {tok:?}")))?;
            if !v.is_finite() {
                return Err(Error::Frame {
                    frame: rows,
                    msg: format!("non-finite coordinate {tok:?}"),
                });
            }
            values.push(v);
        }
        if values.len() != 3 * joints {
            return Err(Error::parse(
                line,
                format!("expected {} numbers, found {}", 3 * joints, values.len()),
            ));
        }
        data.extend(values.chunks_exact(3).map(|c| [c[0], c[1], c[2]]));
    }
    if rows != frames {
        return Err(Error::parse(
            data_line,
            format!("header declares {frames} frames but body has {rows}"),
        ));
    }
    let mut seq = MotionSequence::new(skeleton, data, fps, source)?.with_state(state);
    *seq.meta_mut() = meta;
    Ok(seq)
}

fn parse_csv(text: &str, registry: &SkeletonRegistry) -> Result<MotionSequence> {
    let mut skeleton_id = HUMANML3D_22.to_string();
    let mut fps = crate::landmarks::DEFAULT_FPS;
    let mut source = Source::Simulated;
    let mut state = NormState::default();
    let mut rows: Vec<(usize, usize, usize, Point3)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.trim();
        if body.is_empty() {
            continue;
        }
        if let Some(comment) = body.strip_prefix('#') {
            if let Some((k, v)) = comment.trim().split_once('=') {
                let v = v.trim();
                let bad = |what: &str| Error::parse(line, format!("bad {what} {v:?}"));
                match k.trim() {
                    "skeleton" => skeleton_id = v.to_string(),
                    "fps" => fps = v.parse().map_err(|_| bad("fps"))?,
                    "source" => source = v.parse().map_err(|_| bad("source"))?,
                    "state" => state = v.parse().map_err(|_| bad("state"))?,
                    _ => {}
                }
            }
            continue;
        }
        let fields: Vec<&str> = body.split(',').map(str::trim).collect();
        if fields
            .first()
            .is_some_and(|f| f.eq_ignore_ascii_case("frame"))
        {
            continue;
        }
        if fields.len() != 5 {
            return Err(Error::parse(
                line,
                format!("expected 5 fields, found {}", fields.len()),
            ));
        }
        let index = |i: usize| -> Result<usize> {
            fields[i]
                .parse::<usize>()
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| Error::parse(line, format!("bad index {:?}", fields[i])))
        };
        let number = |i: usize| -> Result<f64> {
            fields[i]
                .parse::<f64>()
                .map_err(|_| Error::parse(line, format!("bad number {:?}", fields[i])))
        };
        rows.push((
            line,
            index(0)?,
            index(1)?,
            [number(2)?, number(3)?, number(4)?],
        ));
    }
    let skeleton = registry
        .get(&skeleton_id)
        .ok_or_else(|| Error::parse(1, format!("unknown skeleton id {skeleton_id:?}")))?;
    let joints = skeleton.joint_count();
    let frames = rows.iter().map(|r| r.1).max().unwrap_or(0);
    if frames == 0 {
        return Err(Error::parse(1, "no motion rows"));
    }
    let mut slots: Vec<Option<Point3>> = vec![None; frames * joints];
    for (line, frame, joint, p) in rows {
        if joint > joints {
            return Err(Error::parse(
                line,
                format!("joint {joint} out of range 1..={joints}"),
            ));
        }
        let slot = &mut slots[(frame - 1) * joints + joint - 1];
        if slot.replace(p).is_some() {
            return Err(Error::parse(
                line,
                format!("duplicate joint {joint} in frame {frame}"),
            ));
        }
    }
    if let Some(missing) = slots.iter().position(Option::is_none) {
        return Err(Error::Frame {
            frame: missing / joints + 1,
            msg: format!("joint {} missing", missing % joints + 1),
        });
    }
    let data = slots.into_iter().map(|p| p.expect("checked")).collect();
    Ok(MotionSequence::new(skeleton, data, fps, source)?.with_state(state))
}

/// Flat CSV rendering (`frame,joint,x,y,z`) with header comments.
pub fn write_motion_csv(seq: &MotionSequence) -> Vec<u8> {
    let mut out = String::new();
    let _ = writeln!(out, "# skeleton={}", seq.skeleton().id());
    let _ = writeln!(out, "# fps={}", seq.fps());
    let _ = writeln!(out, "# source={}", seq.source());
    let _ = writeln!(out, "# state={}", seq.state());
    out.push_str("frame,joint,x,y,z\n");
    for (t, frame) in seq.frame_iter().enumerate() {
        for (j, p) in frame.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                t + 1,
                j + 1,
                format_coord(p[0]),
                format_coord(p[1]),
                format_coord(p[2])
            );
        }
    }
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skeleton::SkeletonSpec;
    use proptest::prelude::*;

    fn sample(frames: usize) -> MotionSequence {
        let data = (0..frames * 22)
            .map(|i| [i as f64 * 0.125, -(i as f64) / 3.0, 1e-7 * i as f64])
            .collect();
        MotionSequence::new(SkeletonSpec::humanml3d_22(), data, 20.0, Source::Benchmark)
            .unwrap()
            .with_state(NormState {
                centered: true,
                scaled: true,
                ..Default::default()
            })
            .with_meta("normalize.median_kernel", "11")
    }

    #[test]
    fn header_restored() {
        let seq = sample(3);
        let parsed = parse_motion(&write_motion(&seq)).unwrap();
        assert_eq!(parsed.fps(), 20.0);
        assert_eq!(parsed.source(), Source::Benchmark);
        assert_eq!(parsed.state(), seq.state());
        assert_eq!(parsed.meta(), seq.meta());
        assert_eq!(parsed.frames(), 3);
    }

    #[test]
    fn frame_count_mismatch() {
        let text = String::from_utf8(write_motion(&sample(2)))
            .unwrap()
            .replace("frames 2", "frames 3");
        let err = parse_motion(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("declares 3 frames"), "{err}");
    }

    #[test]
    fn version_and_skeleton_checks() {
        let good = String::from_utf8(write_motion(&sample(1))).unwrap();
        assert!(parse_motion(good.replace("gmo 1", "gmo 2").as_bytes()).is_err());
        let err = parse_motion(good.replace("humanml3d-22", "smpl-24").as_bytes()).unwrap_err();
        assert!(err.to_string().contains("unknown skeleton"), "{err}");
    }

    #[test]
    fn row_arity() {
        let good = String::from_utf8(write_motion(&sample(1))).unwrap();
        let (head, body) = good.split_once("data\n").unwrap();
        let short: Vec<&str> = body.split_whitespace().skip(1).collect();
        let text = format!("{head}data\n{}\n", short.join(" "));
        let err = parse_motion(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("expected 66 numbers"), "{err}");
    }

    #[test]
    fn csv_variant() {
        let mut text = String::from("frame,joint,x,y,z\n");
        for j in 1..=22 {
            let p = if j == 5 {
                "0.1,0.2,0.3".to_string()
            } else {
                "0,0,0".to_string()
            };
            text.push_str(&format!("1,{j},{p}\n"));
        }
        let seq = parse_motion(text.as_bytes()).unwrap();
        assert_eq!(seq.frames(), 1);
        assert_eq!(seq.joint_trajectory(5).unwrap(), vec![[0.1, 0.2, 0.3]]);
        assert_eq!(seq.source(), Source::Simulated);
    }

    #[test]
    fn csv_missing_joint() {
        let text = "frame,joint,x,y,z\n1,1,0,0,0\n";
        assert!(matches!(
            parse_motion(text.as_bytes()),
            Err(Error::Frame { frame: 1, .. })
        ));
    }

    #[test]
    fn csv_round_trip_matches_canonical() {
        let seq = sample(2);
        let via_csv = parse_motion(&write_motion_csv(&seq)).unwrap();
        let via_gmo = parse_motion(&write_motion(&seq)).unwrap();
        assert_eq!(via_csv.data(), via_gmo.data());
    }

    proptest! {
        #[test]
        fn canonical_bytes_are_a_fixed_point(
            values in proptest::collection::vec(-1e6f64..1e6, 66..=66 * 4),
            fps in 1.0f64..240.0,
        ) {
            let frames = values.len() / 66;
            let data: Vec<Point3> = values[..frames * 66]
                .chunks_exact(3)
                .map(|c| [c[0], c[1], c[2]])
                .collect();
            let seq = MotionSequence::new(SkeletonSpec::humanml3d_22(), data, fps, Source::Real).unwrap();
            let first = write_motion(&seq);
            let parsed = parse_motion(&first).unwrap();
            prop_assert_eq!(parsed.fps(), fps);
            for (a, b) in parsed.data().iter().zip(seq.data()) {
                for k in 0..3 {
                    prop_assert!((a[k] - b[k]).abs() <= 5e-9 * b[k].abs().max(1e-300));
                }
            }
            let second = write_motion(&parsed);
            prop_assert_eq!(first, second);
        }
    }
}
