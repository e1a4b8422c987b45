//! Landmark export (`.mpl`) parsing.
//!
//! Two syntaxes are accepted and told apart by the first significant byte:
//!
//! * structured: `{"fps": 30, "frames": [[{"x":..,"y":..,"z":..,"visibility":..}, ...], ...]}`
//!   or a bare frame array `[[{...}, ...], ...]`;
//! * flat CSV: rows `frame,landmark,x,y,z,visibility` with 1-based frame and
//!   landmark numbers, an optional header row and an optional `# fps=<value>` line.

use std::fmt::Write as _;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::landmarks::{Landmark, LandmarkSequence, DEFAULT_FPS, LANDMARK_COUNT};

pub fn parse_landmark_export(bytes: &[u8]) -> Result<LandmarkSequence> {
    let text =
        std::str::from_utf8(bytes).map_err(|e| Error::parse(1, format!("not UTF-8: {e}")))?;
    match text.trim_start().chars().next() {
        Some('{') | Some('[') => parse_structured(text),
        Some(_) => parse_csv(text),
        None => Err(Error::parse(1, "empty landmark export")),
    }
}

fn parse_structured(text: &str) -> Result<LandmarkSequence> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    let (frames, fps) = match &root {
        Value::Array(frames) => (frames, DEFAULT_FPS),
        Value::Object(obj) => {
            let frames = obj
                .get("frames")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::parse(1, "missing `frames` array"))?;
            let fps = match obj.get("fps") {
                None | Some(Value::Null) => DEFAULT_FPS,
                Some(v) => v
                    .as_f64()
                    .ok_or_else(|| Error::parse(1, "`fps` is not a number"))?,
            };
            (frames, fps)
        }
        _ => return Err(Error::parse(1, "expected an object or a frame array")),
    };
    let mut out = Vec::with_capacity(frames.len());
    for (t, frame) in frames.iter().enumerate() {
        let frame_no = t + 1;
        let records = frame.as_array().ok_or_else(|| Error::Frame {
            frame: frame_no,
            msg: "frame is not an array of landmark records".into(),
        })?;
        if records.len() != LANDMARK_COUNT {
            return Err(Error::Frame {
                frame: frame_no,
                msg: format!(
                    "expected {LANDMARK_COUNT} landmarks, found {}",
                    records.len()
                ),
            });
        }
        let mut landmarks = [Landmark {
            position: [0.0; 3],
            visibility: 0.0,
        }; LANDMARK_COUNT];
        for (k, rec) in records.iter().enumerate() {
            let field = |name: &str| -> Result<f64> {
                rec.get(name)
                    .and_then(Value::as_f64)
                    .ok_or_else(|| Error::Frame {
                        frame: frame_no,
                        msg: format!("landmark {} lacks numeric field `{name}`", k + 1),
                    })
            };
            landmarks[k] = Landmark {
                position: [field("x")?, field("y")?, field("z")?],
                visibility: field("visibility")?,
            };
        }
        out.push(landmarks);
    }
    LandmarkSequence::new(out, fps)
}

fn parse_csv(text: &str) -> Result<LandmarkSequence> {
    let mut fps = DEFAULT_FPS;
    let mut frames: Vec<Vec<Option<Landmark>>> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.trim();
        if body.is_empty() {
            continue;
        }
        if let Some(comment) = body.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("fps=") {
                fps = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad fps {v:?}")))?;
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
        if fields.len() != 6 {
            return Err(Error::parse(
                line,
                format!("expected 6 fields, found {}", fields.len()),
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
        let (frame, landmark) = (index(0)?, index(1)?);
        if landmark > LANDMARK_COUNT {
            return Err(Error::parse(
                line,
                format!("landmark {landmark} out of range 1..={LANDMARK_COUNT}"),
            ));
        }
        if frames.len() < frame {
            frames.resize_with(frame, || vec![None; LANDMARK_COUNT]);
        }
        let slot = &mut frames[frame - 1][landmark - 1];
        if slot.is_some() {
            return Err(Error::parse(
                line,
                format!("duplicate landmark {landmark} in frame {frame}"),
            ));
        }
        *slot = Some(Landmark {
            position: [number(2)?, number(3)?, number(4)?],
            visibility: number(5)?,
        });
    }
    if frames.is_empty() {
        return Err(Error::parse(1, "no landmark rows"));
    }
    let mut out = Vec::with_capacity(frames.len());
    for (t, frame) in frames.into_iter().enumerate() {
        let found = frame.iter().filter(|l| l.is_some()).count();
        if found != LANDMARK_COUNT {
            return Err(Error::Frame {
                frame: t + 1,
                msg: format!("expected {LANDMARK_COUNT} landmarks, found {found}"),
            });
        }
        out.push(std::array::from_fn(|k| frame[k].expect("checked")));
    }
    LandmarkSequence::new(out, fps)
}

/// Writes the structured syntax with shortest round-trip decimals.
pub fn write_landmark_export(seq: &LandmarkSequence) -> Vec<u8> {
    let mut out = String::new();
    let _ = write!(out, "{{\"fps\": {}, \"frames\": [", seq.fps());
    for (t, frame) in seq.frames().iter().enumerate() {
        if t > 0 {
            out.push(',');
        }
        out.push_str("\n [");
        for (k, lm) in frame.iter().enumerate() {
            if k > 0 {
                out.push_str(", ");
            }
            let [x, y, z] = lm.position;
            let _ = write!(
                out,
                "{{\"x\": {x:?}, \"y\": {y:?}, \"z\": {z:?}, \"visibility\": {:?}}}",
                lm.visibility
            );
        }
        out.push(']');
    }
    out.push_str("\n]}\n");
    out.into_bytes()
}
