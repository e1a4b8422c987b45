use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::align::AlignPlan;
use crate::error::{Error, Result};
use crate::metrics::{mean, per_joint_metrics, Metric, MetricSelection, PaOptions};
use crate::motion::{EvalTriplet, MotionSequence, Source};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointMetrics {
    pub joint: usize,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mpjpe: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pa_mpjpe: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dtw: Option<f64>,
}

impl JointMetrics {
    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Mpjpe => self.mpjpe,
            Metric::PaMpjpe => self.pa_mpjpe,
            Metric::Dtw => self.dtw,
        }
    }

    pub(crate) fn set(&mut self, metric: Metric, value: f64) {
        let slot = match metric {
            Metric::Mpjpe => &mut self.mpjpe,
            Metric::PaMpjpe => &mut self.pa_mpjpe,
            Metric::Dtw => &mut self.dtw,
        };
        *slot = Some(value);
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct OverallMetrics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mpjpe: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pa_mpjpe: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dtw_mean: Option<f64>,
}

impl OverallMetrics {
    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Mpjpe => self.mpjpe,
            Metric::PaMpjpe => self.pa_mpjpe,
            Metric::Dtw => self.dtw_mean,
        }
    }
}

/// Scores of one generated sequence against the reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceMetrics {
    pub overall: OverallMetrics,
    pub joints: Vec<JointMetrics>,
}

impl SourceMetrics {
    /// Overall values as joint means, which is what every metric reduces to.
    pub fn from_joints(joints: Vec<JointMetrics>) -> Self {
        let overall_of = |metric: Metric| {
            let values: Option<Vec<f64>> = joints.iter().map(|j| j.get(metric)).collect();
            values.filter(|v| !v.is_empty()).map(|v| mean(&v))
        };
        Self {
            overall: OverallMetrics {
                mpjpe: overall_of(Metric::Mpjpe),
                pa_mpjpe: overall_of(Metric::PaMpjpe),
                dtw_mean: overall_of(Metric::Dtw),
            },
            joints,
        }
    }
}

/// Per-task result: benchmark-vs-real and simulated-vs-real.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub task_id: String,
    pub skeleton: String,
    pub benchmark: SourceMetrics,
    pub simulated: SourceMetrics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alignment: Option<AlignPlan>,
    /// Echo of the options and any metadata carried by the inputs.
    #[serde(default)]
    pub config: BTreeMap<String, String>,
}

impl MetricReport {
    pub fn source(&self, source: Source) -> Option<&SourceMetrics> {
        match source {
            Source::Benchmark => Some(&self.benchmark),
            Source::Simulated => Some(&self.simulated),
            Source::Real => None,
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("report serializes");
        out.push(b'\n');
        out
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes).map_err(|e| Error::parse(e.line(), e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompareOptions {
    pub metrics: MetricSelection,
    pub pa: PaOptions,
}

fn score(
    a: &MotionSequence,
    real: &MotionSequence,
    opts: &CompareOptions,
) -> Result<SourceMetrics> {
    let joints = per_joint_metrics(a, real, &opts.metrics, &opts.pa)?;
    Ok(SourceMetrics::from_joints(joints))
}

/// Scores the benchmark and simulated members against the real member.
/// The triplet must already share one frame count.
pub fn compare_sources(trip: &EvalTriplet, opts: &CompareOptions) -> Result<MetricReport> {
    let (r, b, s) = trip.frame_counts();
    if r != b || r != s {
        return Err(Error::Shape(format!(
            "triplet is not aligned: frame counts {r}/{b}/{s}"
        )));
    }
    let mut config = BTreeMap::new();
    config.insert("metrics".into(), selection_label(&opts.metrics));
    config.insert("pa.mode".into(), opts.pa.mode.as_str().into());
    config.insert(
        "pa.allow_reflection".into(),
        opts.pa.allow_reflection.to_string(),
    );
    config.insert("pa.scale".into(), opts.pa.with_scale.to_string());
    for (label, seq) in [
        ("real", &trip.real),
        ("benchmark", &trip.benchmark),
        ("simulated", &trip.simulated),
    ] {
        for (k, v) in seq.meta() {
            config.insert(format!("{label}.{k}"), v.clone());
        }
    }
    Ok(MetricReport {
        task_id: trip.task_id.clone(),
        skeleton: trip.skeleton().id().to_string(),
        benchmark: score(&trip.benchmark, &trip.real, opts)?,
        simulated: score(&trip.simulated, &trip.real, opts)?,
        alignment: None,
        config,
    })
}

fn selection_label(sel: &MetricSelection) -> String {
    Metric::ALL
        .iter()
        .filter(|m| sel.contains(**m))
        .map(|m| m.label().to_ascii_lowercase())
        .collect::<Vec<_>>()
        .join(",")
}
