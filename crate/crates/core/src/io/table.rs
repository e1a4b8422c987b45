//! Long-format metric tables.
//!
//! ```text
//! task,joint,metric,source,value
//! walk_01,1,MPJPE,benchmark,0.300000
//! walk_01,1,MPJPE,simulated,0.290000
//! ```
//!
//! Rows run task by task, then joint, metric (MPJPE, PA-MPJPE, DTW) and
//! source (benchmark before simulated). Joints are 1-based.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::metrics::{JointMetrics, Metric, MetricReport, SourceMetrics};
use crate::motion::Source;
use crate::skeleton::{SkeletonSpec, HUMANML3D_22};

pub const TABLE_HEADER: &str = "task,joint,metric,source,value";

pub fn write_table(reports: &[MetricReport]) -> Vec<u8> {
    let mut out = String::new();
    out.push_str(TABLE_HEADER);
    out.push('\n');
    for rep in reports {
        let joints = rep.benchmark.joints.len().max(rep.simulated.joints.len());
        for j in 0..joints {
            for metric in Metric::ALL {
                for (source, block) in [
                    (Source::Benchmark, &rep.benchmark),
                    (Source::Simulated, &rep.simulated),
                ] {
                    let Some(row) = block.joints.get(j) else {
                        continue;
                    };
                    if let Some(v) = row.get(metric) {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{:.6}",
                            rep.task_id, row.joint, metric, source, v
                        );
                    }
                }
            }
        }
    }
    out.into_bytes()
}

type Cells = BTreeMap<(Source, usize), JointMetrics>;

/// Rebuilds per-task reports from a table. Overall values become joint means.
pub fn parse_table(bytes: &[u8]) -> Result<Vec<MetricReport>> {
    let text =
        std::str::from_utf8(bytes).map_err(|e| Error::parse(1, format!("not UTF-8: {e}")))?;
    let mut order: Vec<String> = Vec::new();
    let mut tasks: BTreeMap<String, Cells> = BTreeMap::new();
    let mut saw_header = false;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        if !saw_header {
            if body != TABLE_HEADER {
                return Err(Error::parse(
                    line,
                    format!("expected header `{TABLE_HEADER}`"),
                ));
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = body.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(Error::parse(
                line,
                format!("expected 5 fields, found {}", fields.len()),
            ));
        }
        let task = fields[0];
        if task.is_empty() {
            return Err(Error::parse(line, "empty task id"));
        }
        let joint: usize = fields[1]
            .parse()
            .ok()
            .filter(|&j| j >= 1)
            .ok_or_else(|| Error::parse(line, format!("bad joint {:?}", fields[1])))?;
        let metric: Metric = fields[2]
            .parse()
            .map_err(|e: Error| Error::parse(line, e.to_string()))?;
        let source: Source = fields[3]
            .parse()
            .map_err(|e: Error| Error::parse(line, e.to_string()))?;
        if source == Source::Real {
            return Err(Error::parse(line, "source must be benchmark or simulated"));
        }
        let value: f64 = fields[4]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite() && *v >= 0.0)
            .ok_or_else(|| Error::parse(line, format!("bad value {:?}", fields[4])))?;
        if !tasks.contains_key(task) {
            order.push(task.to_string());
        }
        let cell = tasks
            .entry(task.to_string())
            .or_default()
            .entry((source, joint))
            .or_insert_with(|| JointMetrics {
                joint,
                name: String::new(),
                mpjpe: None,
                pa_mpjpe: None,
                dtw: None,
            });
        if cell.get(metric).is_some() {
            return Err(Error::parse(
                line,
                format!("duplicate row for {task} joint {joint} {metric} {source}"),
            ));
        }
        cell.set(metric, value);
    }
    if !saw_header {
        return Err(Error::parse(1, "empty table"));
    }
    order
        .into_iter()
        .map(|task| {
            let cells = tasks.remove(&task).unwrap_or_default();
            build_report(task, cells)
        })
        .collect()
}

fn build_report(task: String, cells: Cells) -> Result<MetricReport> {
    let mut blocks: [Vec<JointMetrics>; 2] = [Vec::new(), Vec::new()];
    for ((source, _), row) in cells {
        let slot = if source == Source::Benchmark { 0 } else { 1 };
        blocks[slot].push(row);
    }
    let count = blocks[0].len().max(blocks[1].len());
    if blocks[0].len() != blocks[1].len() {
        return Err(Error::invalid(format!(
            "task {task}: benchmark has {} joints, simulated has {}",
            blocks[0].len(),
            blocks[1].len()
        )));
    }
    for block in &blocks {
        for (i, row) in block.iter().enumerate() {
            if row.joint != i + 1 {
                return Err(Error::invalid(format!(
                    "task {task}: joints must run 1..={count} for both sources"
                )));
            }
        }
    }
    let skeleton = (count == 22).then(SkeletonSpec::humanml3d_22);
    for block in blocks.iter_mut() {
        for row in block.iter_mut() {
            row.name = match &skeleton {
                Some(sk) => sk.name(row.joint)?.to_string(),
                None => format!("joint {}", row.joint),
            };
        }
    }
    let [bench, sim] = blocks;
    Ok(MetricReport {
        task_id: task,
        skeleton: if skeleton.is_some() {
            HUMANML3D_22.to_string()
        } else {
            format!("table-{count}")
        },
        benchmark: SourceMetrics::from_joints(bench),
        simulated: SourceMetrics::from_joints(sim),
        alignment: None,
        config: BTreeMap::new(),
    })
}
