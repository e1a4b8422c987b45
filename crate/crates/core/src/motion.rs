//! Motion tensors and the evaluation triplet.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point3;
use crate::skeleton::SkeletonSpec;

/// Where a sequence came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// Reference motion extracted from video by a pose estimator.
    Real,
    /// Generated from a human-written prompt.
    Benchmark,
    /// Generated from an enhanced prompt.
    Simulated,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Real => "real",
            Source::Benchmark => "benchmark",
            Source::Simulated => "simulated",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(Source::Real),
            "benchmark" => Ok(Source::Benchmark),
            "simulated" => Ok(Source::Simulated),
            other => Err(Error::invalid(format!("unknown source {other:?}"))),
        }
    }
}

/// Which normalization stages have been applied. Flags are only ever set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormState {
    pub centered: bool,
    pub scaled: bool,
    pub y_flipped: bool,
    pub filtered: bool,
    pub resampled: bool,
}

impl NormState {
    const NAMES: [&'static str; 5] = ["centered", "scaled", "y_flipped", "filtered", "resampled"];

    fn flags(&self) -> [bool; 5] {
        [
            self.centered,
            self.scaled,
            self.y_flipped,
            self.filtered,
            self.resampled,
        ]
    }

    /// Union of both flag sets.
    pub fn merge(self, other: NormState) -> NormState {
        NormState {
            centered: self.centered || other.centered,
            scaled: self.scaled || other.scaled,
            y_flipped: self.y_flipped || other.y_flipped,
            filtered: self.filtered || other.filtered,
            resampled: self.resampled || other.resampled,
        }
    }
}

impl fmt::Display for NormState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set: Vec<&str> = Self::NAMES
            .iter()
            .zip(self.flags())
            .filter_map(|(n, on)| on.then_some(*n))
            .collect();
        if set.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&set.join(","))
        }
    }
}

impl FromStr for NormState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut state = NormState::default();
        let s = s.trim();
        if s == "none" || s.is_empty() {
            return Ok(state);
        }
        for flag in s.split(',') {
            match flag.trim() {
                "centered" => state.centered = true,
                "scaled" => state.scaled = true,
                "y_flipped" => state.y_flipped = true,
                "filtered" => state.filtered = true,
                "resampled" => state.resampled = true,
                other => return Err(Error::invalid(format!("unknown state flag {other:?}"))),
            }
        }
        Ok(state)
    }
}

/// A `T × J × 3` motion tensor on a known skeleton.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionSequence {
    skeleton: Arc<SkeletonSpec>,
    frames: usize,
    data: Vec<Point3>,
    fps: f64,
    source: Source,
    state: NormState,
    meta: BTreeMap<String, String>,
}

impl MotionSequence {
    /// Builds a sequence from frame-major points (`frames * joint_count` entries).
    pub fn new(
        skeleton: Arc<SkeletonSpec>,
        data: Vec<Point3>,
        fps: f64,
        source: Source,
    ) -> Result<Self> {
        let joints = skeleton.joint_count();
        if data.is_empty() {
            return Err(Error::invalid("motion sequence has no frames"));
        }
        if data.len() % joints != 0 {
            return Err(Error::Shape(format!(
                "{} points is not a whole number of {joints}-joint frames",
                data.len()
            )));
        }
        if !(fps.is_finite() && fps > 0.0) {
            return Err(Error::invalid(format!("fps must be positive, got {fps}")));
        }
        if let Some(pos) = data.iter().position(|p| p.iter().any(|v| !v.is_finite())) {
            return Err(Error::Frame {
                frame: pos / joints + 1,
                msg: format!("joint {} has a non-finite coordinate", pos % joints + 1),
            });
        }
        Ok(Self {
            frames: data.len() / joints,
            skeleton,
            data,
            fps,
            source,
            state: NormState::default(),
            meta: BTreeMap::new(),
        })
    }

    /// Builds a sequence from per-frame joint lists.
    pub fn from_frames(
        skeleton: Arc<SkeletonSpec>,
        frames: &[Vec<Point3>],
        fps: f64,
        source: Source,
    ) -> Result<Self> {
        let joints = skeleton.joint_count();
        if let Some(bad) = frames.iter().position(|f| f.len() != joints) {
            return Err(Error::Frame {
                frame: bad + 1,
                msg: format!("expected {joints} joints, found {}", frames[bad].len()),
            });
        }
        let data = frames.iter().flatten().copied().collect();
        Self::new(skeleton, data, fps, source)
    }

    pub fn with_state(mut self, state: NormState) -> Self {
        self.state = self.state.merge(state);
        self
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.meta.insert(key.into(), value.into());
        self
    }

    pub fn with_source(mut self, source: Source) -> Self {
        self.source = source;
        self
    }

    /// Same skeleton, fps, source, state and metadata with new points.
    /// Callers guarantee the length is a multiple of the joint count.
    pub(crate) fn derive(&self, data: Vec<Point3>) -> Self {
        let joints = self.skeleton.joint_count();
        debug_assert!(!data.is_empty() && data.len() % joints == 0);
        Self {
            skeleton: self.skeleton.clone(),
            frames: data.len() / joints,
            data,
            fps: self.fps,
            source: self.source,
            state: self.state,
            meta: self.meta.clone(),
        }
    }

    pub(crate) fn set_fps(&mut self, fps: f64) {
        self.fps = fps;
    }

    pub fn skeleton(&self) -> &Arc<SkeletonSpec> {
        &self.skeleton
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn joints(&self) -> usize {
        self.skeleton.joint_count()
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn state(&self) -> NormState {
        self.state
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    /// All points, frame-major.
    pub fn data(&self) -> &[Point3] {
        &self.data
    }

    pub fn frame(&self, t: usize) -> &[Point3] {
        let j = self.joints();
        &self.data[t * j..(t + 1) * j]
    }

    pub fn frame_iter(&self) -> impl Iterator<Item = &[Point3]> {
        self.data.chunks_exact(self.joints())
    }

    /// Point of joint offset `j0` (0-based) at frame `t`.
    #[inline]
    pub fn point(&self, t: usize, j0: usize) -> Point3 {
        self.data[t * self.joints() + j0]
    }

    /// Per-frame positions of the 1-based joint `index`.
    pub fn joint_trajectory(&self, index: usize) -> Result<Vec<Point3>> {
        let j0 = self.skeleton.zero_based(index)?;
        Ok(self.trajectory0(j0))
    }

    pub(crate) fn trajectory0(&self, j0: usize) -> Vec<Point3> {
        (0..self.frames).map(|t| self.point(t, j0)).collect()
    }

    /// One scalar channel (0-based joint offset, axis 0..3).
    pub fn channel(&self, j0: usize, axis: usize) -> Vec<f64> {
        (0..self.frames).map(|t| self.point(t, j0)[axis]).collect()
    }

    /// Applies `f` to every scalar channel independently and reassembles.
    /// All channels must come back with the same length.
    pub(crate) fn map_channels<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> Result<Vec<f64>>,
    {
        let joints = self.joints();
        let mut out: Option<(usize, Vec<Point3>)> = None;
        for j0 in 0..joints {
            for axis in 0..3 {
                let filtered = f(&self.channel(j0, axis))?;
                let (len, buf) = out.get_or_insert_with(|| {
                    (filtered.len(), vec![[0.0; 3]; filtered.len() * joints])
                });
                debug_assert_eq!(*len, filtered.len());
                for (t, v) in filtered.into_iter().enumerate() {
                    buf[t * joints + j0][axis] = v;
                }
            }
        }
        let (_, data) = out.expect("skeleton has at least one joint");
        Ok(self.derive(data))
    }

    pub(crate) fn state_mut(&mut self) -> &mut NormState {
        &mut self.state
    }

    pub(crate) fn meta_mut(&mut self) -> &mut BTreeMap<String, String> {
        &mut self.meta
    }
}

/// The `(real, benchmark, simulated)` sequences for one task.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalTriplet {
    pub task_id: String,
    pub real: MotionSequence,
    pub benchmark: MotionSequence,
    pub simulated: MotionSequence,
}

impl EvalTriplet {
    pub fn new(
        task_id: impl Into<String>,
        real: MotionSequence,
        benchmark: MotionSequence,
        simulated: MotionSequence,
    ) -> Result<Self> {
        for (label, seq) in [("benchmark", &benchmark), ("simulated", &simulated)] {
            if seq.skeleton() != real.skeleton() {
                return Err(Error::Shape(format!(
                    "{label} skeleton {} does not match real skeleton {}",
                    seq.skeleton().id(),
                    real.skeleton().id()
                )));
            }
        }
        Ok(Self {
            task_id: task_id.into(),
            real,
            benchmark,
            simulated,
        })
    }

    /// Frame counts as `(real, benchmark, simulated)`.
    pub fn frame_counts(&self) -> (usize, usize, usize) {
        (
            self.real.frames(),
            self.benchmark.frames(),
            self.simulated.frames(),
        )
    }

    pub fn skeleton(&self) -> &Arc<SkeletonSpec> {
        self.real.skeleton()
    }
}

/// Per-frame positions of the 1-based joint `index`.
pub fn joint_trajectory(seq: &MotionSequence, index: usize) -> Result<Vec<Point3>> {
    seq.joint_trajectory(index)
}
