//! Fidelity evaluation for generated skeletal motion.
//!
//! The pipeline ingests pose-estimator landmark exports, retargets them to a
//! 22-joint skeleton, normalizes position, scale and noise, resamples the
//! reference and generated sequences to a common length, and scores them
//! with MPJPE, Procrustes-aligned MPJPE and DTW. Per-task scores are then
//! pooled and compared with a paired t-test.
//!
//! Joint, landmark and frame numbers are 1-based in every file format and
//! error message.

pub mod aggregate;
pub mod align;
mod error;
pub mod fixtures;
pub mod geom;
pub mod io;
pub mod landmarks;
pub mod metrics;
pub mod motion;
pub mod normalize;
pub mod quantizer;
pub mod retarget;
pub mod skeleton;
pub mod stats;
pub mod synth;

pub use aggregate::{aggregate, emit, AggregateReport, EmitFormat, MetricAggregate, RunReport};
pub use align::{align_triplet, resample_linear, AlignPlan};
pub use error::{Error, ErrorKind, Result};
pub use geom::{Mat3, Point3};
pub use landmarks::{Landmark, LandmarkSequence};
pub use metrics::{
    compare_sources, CompareOptions, Metric, MetricReport, MetricSelection, PaMode, PaOptions,
};
pub use motion::{EvalTriplet, MotionSequence, NormState, Source};
pub use normalize::{normalize_pipeline, FlipY, NormalizeConfig, ScaleMode};
pub use retarget::{retarget, retarget_33_to_22, RuleSet};
pub use skeleton::{SkeletonRegistry, SkeletonSpec};
