use crate::error::{Error, Result};
use crate::geom::Point3;
use crate::motion::{MotionSequence, Source};
use crate::skeleton::SkeletonSpec;

pub const LANDMARK_COUNT: usize = 33;

/// Default frame rate when an export does not state one.
pub const DEFAULT_FPS: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Landmark {
    pub position: Point3,
    /// Detector confidence in `[0, 1]`. Carried along, never used by metrics.
    pub visibility: f64,
}

/// Raw pose-estimator output: `T` frames of 33 landmarks.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkSequence {
    frames: Vec<[Landmark; LANDMARK_COUNT]>,
    fps: f64,
}

impl LandmarkSequence {
    pub fn new(frames: Vec<[Landmark; LANDMARK_COUNT]>, fps: f64) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::invalid("landmark sequence has no frames"));
        }
        if !(fps.is_finite() && fps > 0.0) {
            return Err(Error::invalid(format!("fps must be positive, got {fps}")));
        }
        for (t, frame) in frames.iter().enumerate() {
            for (k, lm) in frame.iter().enumerate() {
                if lm.position.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Frame {
                        frame: t + 1,
                        msg: format!("landmark {} has a non-finite coordinate", k + 1),
                    });
                }
                if !(0.0..=1.0).contains(&lm.visibility) {
                    return Err(Error::Frame {
                        frame: t + 1,
                        msg: format!(
                            "landmark {} visibility {} outside [0, 1]",
                            k + 1,
                            lm.visibility
                        ),
                    });
                }
            }
        }
        Ok(Self { frames, fps })
    }

    pub fn frames(&self) -> &[[Landmark; LANDMARK_COUNT]] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    /// The positions as a 33-joint motion sequence tagged `real`; visibility is dropped.
    pub fn to_motion(&self) -> MotionSequence {
        let data = self
            .frames
            .iter()
            .flat_map(|f| f.iter().map(|lm| lm.position))
            .collect();
        MotionSequence::new(SkeletonSpec::mediapipe_33(), data, self.fps, Source::Real)
            .expect("validated landmark data")
    }

    /// Rebuilds landmarks from a 33-joint sequence, with full visibility.
    pub fn from_motion(seq: &MotionSequence) -> Result<Self> {
        if seq.joints() != LANDMARK_COUNT {
            return Err(Error::Shape(format!(
                "expected a {LANDMARK_COUNT}-landmark sequence, got {} joints",
                seq.joints()
            )));
        }
        let frames = seq
            .frame_iter()
            .map(|f| {
                std::array::from_fn(|k| Landmark {
                    position: f[k],
                    visibility: 1.0,
                })
            })
            .collect();
        Self::new(frames, seq.fps())
    }
}
