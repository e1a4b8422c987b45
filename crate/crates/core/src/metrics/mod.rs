//! Spatial and temporal similarity metrics between two motion sequences.
//!
//! All functions take `(a, b)` where `a` is the sequence under test and `b`
//! the reference. Procrustes rotations are fitted to the reference.

mod dtw;
mod procrustes;
mod report;
pub mod svd;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use dtw::dtw_joint;
pub use procrustes::{procrustes, procrustes_rotation, PaMode, PaOptions, ProcrustesResult};
pub use report::{
    compare_sources, CompareOptions, JointMetrics, MetricReport, OverallMetrics, SourceMetrics,
};

use crate::error::{Error, Result};
use crate::geom::{centroid, dist, mat_vec, scale, sub, Point3};
use crate::motion::MotionSequence;

/// The three scored quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "MPJPE")]
    Mpjpe,
    #[serde(rename = "PA-MPJPE")]
    PaMpjpe,
    #[serde(rename = "DTW")]
    Dtw,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Mpjpe, Metric::PaMpjpe, Metric::Dtw];

    pub fn label(self) -> &'static str {
        match self {
            Metric::Mpjpe => "MPJPE",
            Metric::PaMpjpe => "PA-MPJPE",
            Metric::Dtw => "DTW",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mpjpe" => Ok(Metric::Mpjpe),
            "pa-mpjpe" | "pa_mpjpe" | "pampjpe" => Ok(Metric::PaMpjpe),
            "dtw" => Ok(Metric::Dtw),
            other => Err(Error::invalid(format!("unknown metric {other:?}"))),
        }
    }
}

/// Which metrics to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricSelection {
    pub mpjpe: bool,
    pub pa_mpjpe: bool,
    pub dtw: bool,
}

impl Default for MetricSelection {
    fn default() -> Self {
        Self {
            mpjpe: true,
            pa_mpjpe: true,
            dtw: true,
        }
    }
}

impl MetricSelection {
    pub fn only(metrics: &[Metric]) -> Self {
        Self {
            mpjpe: metrics.contains(&Metric::Mpjpe),
            pa_mpjpe: metrics.contains(&Metric::PaMpjpe),
            dtw: metrics.contains(&Metric::Dtw),
        }
    }

    pub fn contains(&self, metric: Metric) -> bool {
        match metric {
            Metric::Mpjpe => self.mpjpe,
            Metric::PaMpjpe => self.pa_mpjpe,
            Metric::Dtw => self.dtw,
        }
    }
}

fn check_same_shape(a: &MotionSequence, b: &MotionSequence) -> Result<()> {
    if a.joints() != b.joints() {
        return Err(Error::Shape(format!(
            "joint counts differ ({} vs {})",
            a.joints(),
            b.joints()
        )));
    }
    if a.frames() != b.frames() {
        return Err(Error::Shape(format!(
            "frame counts differ ({} vs {}); resample first",
            a.frames(),
            b.frames()
        )));
    }
    Ok(())
}

/// Mean joint position error per joint, averaged over frames.
pub fn mpjpe_per_joint(a: &MotionSequence, b: &MotionSequence) -> Result<Vec<f64>> {
    check_same_shape(a, b)?;
    let joints = a.joints();
    let mut sums = vec![0.0; joints];
    for (fa, fb) in a.frame_iter().zip(b.frame_iter()) {
        for (j, sum) in sums.iter_mut().enumerate() {
            *sum += dist(fa[j], fb[j]);
        }
    }
    let t = a.frames() as f64;
    Ok(sums.into_iter().map(|s| s / t).collect())
}

/// Mean Euclidean distance over all frames and joints.
pub fn mpjpe(a: &MotionSequence, b: &MotionSequence) -> Result<f64> {
    check_same_shape(a, b)?;
    let total: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&p, &q)| dist(p, q))
        .sum();
    Ok(total / a.data().len() as f64)
}

/// Per-joint Procrustes-aligned errors plus the fitted alignments
/// (one per frame, or a single one in global mode).
pub fn pa_mpjpe_detailed(
    a: &MotionSequence,
    b: &MotionSequence,
    opts: &PaOptions,
) -> Result<(Vec<f64>, Vec<ProcrustesResult>)> {
    check_same_shape(a, b)?;
    let joints = a.joints();
    if joints < 3 {
        return Err(Error::invalid("PA-MPJPE needs at least 3 joints"));
    }
    let mut sums = vec![0.0; joints];
    let mut fits = Vec::new();
    match opts.mode {
        PaMode::PerFrame => {
            for (t, (fa, fb)) in a.frame_iter().zip(b.frame_iter()).enumerate() {
                let fit = procrustes(fa, fb, opts).map_err(|e| match e {
                    Error::Degenerate(msg) => Error::degenerate(format!("frame {}: {msg}", t + 1)),
                    other => other,
                })?;
                accumulate(&mut sums, fa, fb, centroid(fa), centroid(fb), &fit);
                fits.push(fit);
            }
        }
        PaMode::Global => {
            let fit = procrustes(a.data(), b.data(), opts)?;
            let (ca, cb) = (centroid(a.data()), centroid(b.data()));
            for (fa, fb) in a.frame_iter().zip(b.frame_iter()) {
                accumulate(&mut sums, fa, fb, ca, cb, &fit);
            }
            fits.push(fit);
        }
    }
    let t = a.frames() as f64;
    Ok((sums.into_iter().map(|s| s / t).collect(), fits))
}

fn accumulate(
    sums: &mut [f64],
    fa: &[Point3],
    fb: &[Point3],
    ca: Point3,
    cb: Point3,
    fit: &ProcrustesResult,
) {
    for (j, sum) in sums.iter_mut().enumerate() {
        let aligned = scale(mat_vec(&fit.rotation, sub(fb[j], cb)), fit.scale);
        *sum += dist(sub(fa[j], ca), aligned);
    }
}

pub fn pa_mpjpe_per_joint(
    a: &MotionSequence,
    b: &MotionSequence,
    opts: &PaOptions,
) -> Result<Vec<f64>> {
    pa_mpjpe_detailed(a, b, opts).map(|(per_joint, _)| per_joint)
}

/// Procrustes-aligned MPJPE.
pub fn pa_mpjpe(a: &MotionSequence, b: &MotionSequence, opts: &PaOptions) -> Result<f64> {
    let per_joint = pa_mpjpe_per_joint(a, b, opts)?;
    Ok(mean(&per_joint))
}

/// DTW cost for every joint trajectory. Frame counts may differ.
pub fn dtw_per_joint(a: &MotionSequence, b: &MotionSequence) -> Result<Vec<f64>> {
    if a.joints() != b.joints() {
        return Err(Error::Shape(format!(
            "joint counts differ ({} vs {})",
            a.joints(),
            b.joints()
        )));
    }
    (0..a.joints())
        .map(|j0| dtw_joint(&a.trajectory0(j0), &b.trajectory0(j0)))
        .collect()
}

/// Mean of the per-joint DTW costs.
pub fn dtw_mean(a: &MotionSequence, b: &MotionSequence) -> Result<f64> {
    Ok(mean(&dtw_per_joint(a, b)?))
}

/// All selected per-joint metrics, in joint order.
pub fn per_joint_metrics(
    a: &MotionSequence,
    b: &MotionSequence,
    selection: &MetricSelection,
    pa: &PaOptions,
) -> Result<Vec<JointMetrics>> {
    check_same_shape(a, b)?;
    let mp = selection.mpjpe.then(|| mpjpe_per_joint(a, b)).transpose()?;
    let pa = selection
        .pa_mpjpe
        .then(|| pa_mpjpe_per_joint(a, b, pa))
        .transpose()?;
    let dt = selection.dtw.then(|| dtw_per_joint(a, b)).transpose()?;
    let skeleton = a.skeleton();
    Ok((0..a.joints())
        .map(|j0| JointMetrics {
            joint: j0 + 1,
            name: skeleton.name(j0 + 1).unwrap_or_default().to_string(),
            mpjpe: mp.as_ref().map(|v| v[j0]),
            pa_mpjpe: pa.as_ref().map(|v| v[j0]),
            dtw: dt.as_ref().map(|v| v[j0]),
        })
        .collect())
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
