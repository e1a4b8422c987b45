//! Cross-task aggregation and report emission.
//!
//! Each `(task, joint)` cell contributes one pair per metric: `a` is the
//! simulated (enhanced-prompt) value and `b` the benchmark (human-prompt)
//! value. A second, coarser pass pairs the per-joint means across tasks.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::write_table;
use crate::metrics::{Metric, MetricReport, SourceMetrics};
use crate::motion::Source;
use crate::stats::{paired_t_test, shapiro_wilk, PairedSample};

/// Statistics for one metric. Test fields are `None` when the test could not
/// run; the reason is in `diagnostics`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricAggregate {
    pub metric: Metric,
    pub n: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub t: Option<f64>,
    pub df: Option<f64>,
    pub p: Option<f64>,
    pub shapiro_w: Option<f64>,
    pub shapiro_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub tasks: Vec<String>,
    /// One pair per task and joint.
    pub task_joint: Vec<MetricAggregate>,
    /// One pair per joint, each side averaged over tasks.
    pub joint_means: Vec<MetricAggregate>,
}

impl AggregateReport {
    pub fn metric(&self, metric: Metric) -> Option<&MetricAggregate> {
        self.task_joint.iter().find(|m| m.metric == metric)
    }

    pub fn has_diagnostics(&self) -> bool {
        self.task_joint
            .iter()
            .chain(&self.joint_means)
            .any(|m| !m.diagnostics.is_empty())
    }
}

/// Structured output of a whole run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: BTreeMap<String, String>,
    pub tasks: Vec<MetricReport>,
    pub aggregate: AggregateReport,
}

fn stats_for(metric: Metric, sample: &PairedSample) -> MetricAggregate {
    let n = sample.len();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let mut agg = MetricAggregate {
        metric,
        n,
        mean_a: mean(&sample.values_a),
        mean_b: mean(&sample.values_b),
        t: None,
        df: None,
        p: None,
        shapiro_w: None,
        shapiro_p: None,
        diagnostics: Vec::new(),
    };
    match paired_t_test(sample) {
        Ok(r) => {
            agg.t = Some(r.t);
            agg.df = Some(r.df);
            agg.p = Some(r.p);
        }
        Err(e) => agg.diagnostics.push(format!("t-test: {}: {e}", e.kind())),
    }
    match shapiro_wilk(&sample.differences()) {
        Ok(r) => {
            agg.shapiro_w = Some(r.w);
            agg.shapiro_p = Some(r.p);
        }
        Err(e) => agg
            .diagnostics
            .push(format!("shapiro-wilk: {}: {e}", e.kind())),
    }
    agg
}

fn dedupe(reports: &[MetricReport]) -> Result<Vec<&MetricReport>> {
    let mut seen: BTreeMap<&str, &MetricReport> = BTreeMap::new();
    let mut out = Vec::new();
    for rep in reports {
        match seen.get(rep.task_id.as_str()) {
            Some(prev) if *prev == rep => {}
            Some(_) => {
                return Err(Error::invalid(format!(
                    "task {:?} appears twice with different values",
                    rep.task_id
                )))
            }
            None => {
                seen.insert(&rep.task_id, rep);
                out.push(rep);
            }
        }
    }
    Ok(out)
}

/// Builds the paired comparison for every metric present in the reports.
///
/// Identical duplicate reports count once. A metric whose pairs cannot be
/// tested (too few, zero variance) still reports its means and carries a
/// diagnostic instead of failing the whole aggregate.
pub fn aggregate(reports: &[MetricReport]) -> Result<AggregateReport> {
    if reports.is_empty() {
        return Err(Error::invalid("nothing to aggregate: no task reports"));
    }
    let reports = dedupe(reports)?;
    let mut task_joint = Vec::new();
    let mut joint_means = Vec::new();
    for metric in Metric::ALL {
        let mut labels = Vec::new();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        let mut per_joint: BTreeMap<usize, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
        for rep in &reports {
            for (sim, bench) in rep.simulated.joints.iter().zip(&rep.benchmark.joints) {
                if sim.joint != bench.joint {
                    return Err(Error::invalid(format!(
                        "task {}: joint lists of the two sources do not line up",
                        rep.task_id
                    )));
                }
                if let (Some(x), Some(y)) = (sim.get(metric), bench.get(metric)) {
                    labels.push(format!("{}:{}", rep.task_id, sim.joint));
                    a.push(x);
                    b.push(y);
                    let cell = per_joint.entry(sim.joint).or_default();
                    cell.0.push(x);
                    cell.1.push(y);
                }
            }
        }
        if a.is_empty() {
            continue;
        }
        task_joint.push(sample_stats(metric, labels, a, b));

        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let labels = per_joint.keys().map(|j| j.to_string()).collect();
        let (ja, jb) = per_joint.values().map(|(x, y)| (mean(x), mean(y))).unzip();
        joint_means.push(sample_stats(metric, labels, ja, jb));
    }
    if task_joint.is_empty() {
        return Err(Error::invalid("task reports contain no metric values"));
    }
    Ok(AggregateReport {
        tasks: reports.iter().map(|r| r.task_id.clone()).collect(),
        task_joint,
        joint_means,
    })
}

fn sample_stats(metric: Metric, labels: Vec<String>, a: Vec<f64>, b: Vec<f64>) -> MetricAggregate {
    let n = a.len();
    match PairedSample::labeled(labels, a.clone(), b.clone()) {
        Ok(sample) => stats_for(metric, &sample),
        Err(e) => {
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            MetricAggregate {
                metric,
                n,
                mean_a: mean(&a),
                mean_b: mean(&b),
                t: None,
                df: None,
                p: None,
                shapiro_w: None,
                shapiro_p: None,
                diagnostics: vec![format!("{}: {e}", e.kind())],
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    /// Pretty JSON run report.
    Json,
    /// Overall values: one row per metric and source, one column per task.
    TaskSummary,
    /// Per-joint values averaged over tasks.
    JointSummary,
    /// Means and test statistics per metric.
    Significance,
    /// Long table, one row per task, joint, metric and source.
    PlotData,
}

impl FromStr for EmitFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(EmitFormat::Json),
            "tasks" => Ok(EmitFormat::TaskSummary),
            "joints" => Ok(EmitFormat::JointSummary),
            "stats" => Ok(EmitFormat::Significance),
            "plot" => Ok(EmitFormat::PlotData),
            other => Err(Error::invalid(format!(
                "unknown format {other:?}; expected json, tasks, joints, stats or plot"
            ))),
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

fn sci(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6e}")).unwrap_or_default()
}

pub fn emit(report: &RunReport, format: EmitFormat) -> Vec<u8> {
    match format {
        EmitFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
            out.push(b'\n');
            out
        }
        EmitFormat::TaskSummary => task_summary(&report.tasks),
        EmitFormat::JointSummary => joint_summary(&report.tasks),
        EmitFormat::Significance => significance(&report.aggregate),
        EmitFormat::PlotData => write_table(&report.tasks),
    }
}

fn side(t: &MetricReport, source: Source) -> &SourceMetrics {
    if source == Source::Benchmark {
        &t.benchmark
    } else {
        &t.simulated
    }
}

fn task_summary(tasks: &[MetricReport]) -> Vec<u8> {
    let mut out = String::from("metric,source");
    for t in tasks {
        let _ = write!(out, ",{}", t.task_id);
    }
    out.push('\n');
    for metric in Metric::ALL {
        if tasks
            .iter()
            .all(|t| t.simulated.overall.get(metric).is_none())
        {
            continue;
        }
        for source in [Source::Simulated, Source::Benchmark] {
            let _ = write!(out, "{metric},{source}");
            for t in tasks {
                let _ = write!(out, ",{}", opt(side(t, source).overall.get(metric)));
            }
            out.push('\n');
        }
    }
    out.into_bytes()
}

fn joint_summary(tasks: &[MetricReport]) -> Vec<u8> {
    let mut out = String::from("joint,name");
    let present: Vec<Metric> = Metric::ALL
        .into_iter()
        .filter(|m| {
            tasks
                .iter()
                .any(|t| t.simulated.joints.iter().any(|j| j.get(*m).is_some()))
        })
        .collect();
    for m in &present {
        let _ = write!(out, ",{m} simulated,{m} benchmark");
    }
    out.push('\n');
    let joints = tasks
        .iter()
        .map(|t| t.simulated.joints.len())
        .max()
        .unwrap_or(0);
    for j in 0..joints {
        let Some(first) = tasks.iter().find_map(|t| t.simulated.joints.get(j)) else {
            continue;
        };
        let _ = write!(out, "{},{}", first.joint, first.name);
        for &m in &present {
            for source in [Source::Simulated, Source::Benchmark] {
                let vals: Vec<f64> = tasks
                    .iter()
                    .filter_map(|t| side(t, source).joints.get(j).and_then(|r| r.get(m)))
                    .collect();
                let mean = (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64);
                let _ = write!(out, ",{}", opt(mean));
            }
        }
        out.push('\n');
    }
    out.into_bytes()
}

/// The significance table printed by the `aggregate` command.
pub fn significance(agg: &AggregateReport) -> Vec<u8> {
    let mut out = String::from(
        "pairing,metric,n,mean_simulated,mean_benchmark,t,df,p,shapiro_w,shapiro_p,note\n",
    );
    for (pairing, rows) in [
        ("task-joint", &agg.task_joint),
        ("joint-mean", &agg.joint_means),
    ] {
        for m in rows {
            let _ = writeln!(
                out,
                "{pairing},{},{},{:.6},{:.6},{},{},{},{},{},{}",
                m.metric,
                m.n,
                m.mean_a,
                m.mean_b,
                opt(m.t),
                m.df.map(|d| d.to_string()).unwrap_or_default(),
                sci(m.p),
                opt(m.shapiro_w),
                sci(m.shapiro_p),
                m.diagnostics.join("; ").replace(',', ";"),
            );
        }
    }
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::JointMetrics;

    fn report(task: &str, sim: &[f64], bench: &[f64]) -> MetricReport {
        let joints = |v: &[f64]| {
            v.iter()
                .enumerate()
                .map(|(i, &x)| JointMetrics {
                    joint: i + 1,
                    name: format!("j{}", i + 1),
                    mpjpe: Some(x),
                    pa_mpjpe: None,
                    dtw: Some(10.0 * x),
                })
                .collect()
        };
        MetricReport {
            task_id: task.into(),
            skeleton: "test".into(),
            benchmark: SourceMetrics::from_joints(joints(bench)),
            simulated: SourceMetrics::from_joints(joints(sim)),
            alignment: None,
            config: BTreeMap::new(),
        }
    }

    #[test]
    fn pairs_every_task_joint() {
        let r1 = report("a", &[1.0, 2.0, 3.0], &[1.5, 2.1, 3.9]);
        let r2 = report("b", &[0.5, 0.7, 0.2], &[0.4, 1.0, 0.3]);
        let agg = aggregate(&[r1, r2]).unwrap();
        assert_eq!(agg.tasks, vec!["a", "b"]);
        let m = agg.metric(Metric::Mpjpe).unwrap();
        assert_eq!(m.n, 6);
        assert!((m.mean_a - 7.4 / 6.0).abs() < 1e-12);
        assert!((m.mean_b - 9.2 / 6.0).abs() < 1e-12);
        assert!(m.t.unwrap() < 0.0);
        assert!(agg.metric(Metric::PaMpjpe).is_none());
        assert_eq!(agg.joint_means[0].n, 3);
    }

    #[test]
    fn identical_duplicates_collapse() {
        let r1 = report("a", &[1.0, 2.0, 3.0, 4.0], &[1.5, 2.1, 3.9, 4.0]);
        let once = aggregate(std::slice::from_ref(&r1)).unwrap();
        let twice = aggregate(&[r1.clone(), r1.clone()]).unwrap();
        assert_eq!(once, twice);
        let clash = report("a", &[1.0, 2.0, 3.0, 5.0], &[1.5, 2.1, 3.9, 4.0]);
        assert!(aggregate(&[r1, clash]).is_err());
    }

    #[test]
    fn degenerate_metric_gets_diagnostic() {
        let r = report("a", &[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]);
        let agg = aggregate(&[r]).unwrap();
        let m = agg.metric(Metric::Mpjpe).unwrap();
        assert!(m.t.is_none() && m.p.is_none());
        assert!(m.diagnostics.iter().any(|d| d.contains("degenerate")));
        assert!(agg.has_diagnostics());
        let text = String::from_utf8(significance(&agg)).unwrap();
        assert!(text.contains("task-joint,MPJPE,3,2.000000,2.000000,,,"));
    }

    #[test]
    fn empty_input_rejected() {
        assert!(aggregate(&[]).is_err());
    }

    #[test]
    fn emit_layouts() {
        let tasks = vec![
            report("a", &[1.0, 2.0, 3.0], &[1.5, 2.1, 3.9]),
            report("b", &[0.5, 0.7, 0.2], &[0.4, 1.0, 0.3]),
        ];
        let run = RunReport {
            config: BTreeMap::new(),
            aggregate: aggregate(&tasks).unwrap(),
            tasks,
        };
        let t5 = String::from_utf8(emit(&run, EmitFormat::TaskSummary)).unwrap();
        assert_eq!(t5.lines().next().unwrap(), "metric,source,a,b");
        assert_eq!(
            t5.lines().nth(1).unwrap(),
            "MPJPE,simulated,2.000000,0.466667"
        );
        let t6 = String::from_utf8(emit(&run, EmitFormat::JointSummary)).unwrap();
        assert_eq!(
            t6.lines().next().unwrap(),
            "joint,name,MPJPE simulated,MPJPE benchmark,DTW simulated,DTW benchmark"
        );
        assert_eq!(
            t6.lines().nth(1).unwrap(),
            "1,j1,0.750000,0.950000,7.500000,9.500000"
        );
        let json = emit(&run, EmitFormat::Json);
        let back: RunReport = serde_json::from_slice(&json).unwrap();
        assert_eq!(back, run);
        assert_eq!(emit(&run, EmitFormat::PlotData), write_table(&run.tasks));
    }
}
