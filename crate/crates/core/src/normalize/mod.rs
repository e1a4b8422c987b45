//! Spatial normalization and smoothing of motion sequences.
//!
//! The pipeline runs root centering, scale normalization, an optional
//! vertical flip, a sliding median and a zero-phase Butterworth low-pass,
//! in that order. Every stage maps an all-zero channel to all zeros, so the
//! center joint stays exactly at the origin.

mod butterworth;
mod median;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use butterworth::Butterworth;
pub use median::median_filter_channel;

use crate::error::{Error, Result};
use crate::geom::{dist, scale, sub};
use crate::motion::{MotionSequence, Source};
use crate::skeleton::HUMANML3D_22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlipY {
    /// Flip only sequences extracted from video.
    #[default]
    Auto,
    Always,
    Never,
}

impl FlipY {
    pub fn as_str(self) -> &'static str {
        match self {
            FlipY::Auto => "auto",
            FlipY::Always => "always",
            FlipY::Never => "never",
        }
    }

    pub fn applies_to(self, source: Source) -> bool {
        match self {
            FlipY::Auto => source == Source::Real,
            FlipY::Always => true,
            FlipY::Never => false,
        }
    }
}

impl fmt::Display for FlipY {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FlipY {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(FlipY::Auto),
            "always" => Ok(FlipY::Always),
            "never" => Ok(FlipY::Never),
            other => Err(Error::invalid(format!(
                "flip mode must be auto, always or never, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleMode {
    /// Divide each frame by its own reference distance.
    #[default]
    PerFrame,
    /// Divide every frame by the median reference distance.
    Median,
}

impl ScaleMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScaleMode::PerFrame => "per-frame",
            ScaleMode::Median => "median",
        }
    }
}

impl FromStr for ScaleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-frame" => Ok(ScaleMode::PerFrame),
            "median" => Ok(ScaleMode::Median),
            other => Err(Error::invalid(format!(
                "scale mode must be per-frame or median, got {other:?}"
            ))),
        }
    }
}

/// Pipeline settings. `None` joints fall back to the skeleton's tagged roles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizeConfig {
    pub center_joint: Option<usize>,
    pub scale_pair: Option<(usize, usize)>,
    pub scale_mode: ScaleMode,
    pub flip_y: FlipY,
    pub median_kernel: usize,
    pub lowpass_cutoff: f64,
    pub lowpass_order: usize,
    pub scale_epsilon: f64,
}

impl Default for NormalizeConfig {
    fn default() -> Self {
        Self {
            center_joint: None,
            scale_pair: None,
            scale_mode: ScaleMode::PerFrame,
            flip_y: FlipY::Auto,
            median_kernel: 11,
            lowpass_cutoff: 0.05,
            lowpass_order: 4,
            scale_epsilon: 1e-6,
        }
    }
}

impl NormalizeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.median_kernel == 0 || self.median_kernel % 2 == 0 {
            return Err(Error::invalid(format!(
                "median kernel must be a positive odd number, got {}",
                self.median_kernel
            )));
        }
        if !(self.lowpass_cutoff > 0.0 && self.lowpass_cutoff < 1.0) {
            return Err(Error::invalid(format!(
                "cutoff must lie strictly between 0 and 1, got {}",
                self.lowpass_cutoff
            )));
        }
        if self.lowpass_order == 0 {
            return Err(Error::invalid("filter order must be at least 1"));
        }
        if !(self.scale_epsilon.is_finite() && self.scale_epsilon > 0.0) {
            return Err(Error::invalid("scale epsilon must be positive"));
        }
        Ok(())
    }
}

/// Subtracts the center joint from every joint, frame by frame.
pub fn root_center(seq: &MotionSequence, center_joint: usize) -> Result<MotionSequence> {
    let c0 = seq.skeleton().zero_based(center_joint)?;
    let data = seq
        .frame_iter()
        .flat_map(|frame| {
            let center = frame[c0];
            frame.iter().map(move |&p| sub(p, center))
        })
        .collect();
    let mut out = seq.derive(data);
    out.state_mut().centered = true;
    Ok(out)
}

/// Per-frame reference distances with sub-epsilon frames filled in from
/// the nearest earlier valid frame (or the first valid one for a leading run).
pub fn frame_scales(seq: &MotionSequence, pair: (usize, usize), epsilon: f64) -> Result<Vec<f64>> {
    let a0 = seq.skeleton().zero_based(pair.0)?;
    let b0 = seq.skeleton().zero_based(pair.1)?;
    let raw: Vec<f64> = seq.frame_iter().map(|f| dist(f[a0], f[b0])).collect();
    let first_valid = raw.iter().copied().find(|&s| s >= epsilon).ok_or_else(|| {
        Error::degenerate(format!(
            "joints {} and {} coincide in every frame; cannot normalize scale",
            pair.0, pair.1
        ))
    })?;
    let mut last = first_valid;
    Ok(raw
        .into_iter()
        .map(|s| {
            if s >= epsilon {
                last = s;
            }
            last
        })
        .collect())
}

pub fn scale_normalize(
    seq: &MotionSequence,
    pair: (usize, usize),
    epsilon: f64,
    mode: ScaleMode,
) -> Result<MotionSequence> {
    let mut scales = frame_scales(seq, pair, epsilon)?;
    if mode == ScaleMode::Median {
        let mut sorted = scales.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let m = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        scales.iter_mut().for_each(|s| *s = m);
    }
    let data = seq
        .frame_iter()
        .zip(&scales)
        .flat_map(|(frame, &s)| frame.iter().map(move |&p| scale(p, 1.0 / s)))
        .collect();
    let mut out = seq.derive(data);
    out.state_mut().scaled = true;
    Ok(out)
}

pub fn flip_y(seq: &MotionSequence) -> MotionSequence {
    let data = seq.data().iter().map(|p| [p[0], -p[1], p[2]]).collect();
    let mut out = seq.derive(data);
    out.state_mut().y_flipped = true;
    out
}

pub fn median_filter(seq: &MotionSequence, kernel: usize) -> Result<MotionSequence> {
    seq.map_channels(|c| median_filter_channel(c, kernel))
}

pub fn lowpass_zero_phase(
    seq: &MotionSequence,
    cutoff: f64,
    order: usize,
) -> Result<MotionSequence> {
    let filter = Butterworth::lowpass(order, cutoff)?;
    let mut out = seq.map_channels(|c| filter.filtfilt(c))?;
    out.state_mut().filtered = true;
    Ok(out)
}

/// Runs every stage and records the settings in the sequence metadata.
pub fn normalize_pipeline(seq: &MotionSequence, cfg: &NormalizeConfig) -> Result<MotionSequence> {
    cfg.validate()?;
    let skeleton = seq.skeleton().clone();
    let center = cfg.center_joint.unwrap_or(skeleton.head_index());
    let pair = cfg.scale_pair.unwrap_or(skeleton.scale_pair());
    skeleton.zero_based(center)?;
    if seq.frames() < 2 {
        return Err(Error::invalid(format!(
            "sequence too short to filter: {} frame(s), need at least 2",
            seq.frames()
        )));
    }

    let mut out = root_center(seq, center)?;
    out = scale_normalize(&out, pair, cfg.scale_epsilon, cfg.scale_mode)?;
    let flipped = cfg.flip_y.applies_to(seq.source());
    if flipped {
        out = flip_y(&out);
    }
    out = median_filter(&out, cfg.median_kernel)?;
    out = lowpass_zero_phase(&out, cfg.lowpass_cutoff, cfg.lowpass_order)?;

    let meta = out.meta_mut();
    let mut put = |k: &str, v: String| {
        meta.insert(format!("normalize.{k}"), v);
    };
    put("center_joint", center.to_string());
    put("scale_pair", format!("{},{}", pair.0, pair.1));
    put("scale_mode", cfg.scale_mode.as_str().into());
    put("scale_epsilon", format!("{:e}", cfg.scale_epsilon));
    put("flip_y", cfg.flip_y.as_str().into());
    put("flipped", flipped.to_string());
    put("median_kernel", cfg.median_kernel.to_string());
    put("cutoff", cfg.lowpass_cutoff.to_string());
    put("order", cfg.lowpass_order.to_string());
    if skeleton.id() == HUMANML3D_22 && pair == (16, 11) {
        put(
            "scale_note",
            "reference distance uses joint 11 (Right Foot); joint 12 is the left foot".into(),
        );
    }
    Ok(out)
}
