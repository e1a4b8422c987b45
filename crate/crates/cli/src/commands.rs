//! One function per subcommand.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use motionfid_core::io::{
    parse_landmark_export, parse_motion_with, parse_table, read_file, write_landmark_export,
    write_motion, write_motion_csv, write_table,
};
use motionfid_core::synth::{generate, SynthSpec};
use motionfid_core::{
    aggregate, align_triplet, compare_sources, emit, normalize_pipeline, resample_linear, retarget,
    CompareOptions, EvalTriplet, LandmarkSequence, MetricReport, MetricSelection, MotionSequence,
    NormalizeConfig, PaOptions, RuleSet, RunReport, SkeletonRegistry, SkeletonSpec,
};

use crate::fail::{CliError, CliResult, WithPath};
use crate::{
    AggregateArgs, Cli, Command, CompareArgs, Frames, IngestArgs, NormalizeArgs, ResampleArgs,
    RetargetArgs, SkeletonArgs, SynthArgs,
};

pub fn dispatch(cli: &Cli) -> CliResult<()> {
    let out = Output { quiet: cli.quiet };
    match &cli.command {
        Command::Ingest(a) => ingest(a, &out),
        Command::Retarget(a) => retarget_cmd(a, &out),
        Command::Normalize(a) => normalize(a, &out),
        Command::Resample(a) => resample(a, &out),
        Command::Compare(a) => compare(a, &out),
        Command::Aggregate(a) => aggregate_cmd(a, &out),
        Command::Synth(a) => synth(a, &out),
    }
}

struct Output {
    quiet: bool,
}

impl Output {
    fn note(&self, msg: impl std::fmt::Display) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }

    fn write(&self, path: &Path, bytes: &[u8]) -> CliResult<()> {
        std::fs::write(path, bytes).at(path)?;
        self.note(format_args!("wrote {}", path.display()));
        Ok(())
    }
}

/// Absolute form of a path that may not exist yet.
fn resolved(path: &Path) -> PathBuf {
    if let Ok(p) = path.canonicalize() {
        return p;
    }
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    match (parent.canonicalize(), path.file_name()) {
        (Ok(dir), Some(name)) => dir.join(name),
        _ => path.to_path_buf(),
    }
}

/// Outputs must not overwrite an input or each other.
fn check_paths(inputs: &[&Path], outputs: &[&Path]) -> CliResult<()> {
    let ins: Vec<PathBuf> = inputs.iter().map(|p| resolved(p)).collect();
    let mut seen: Vec<PathBuf> = Vec::new();
    for out in outputs {
        let r = resolved(out);
        if ins.contains(&r) {
            return Err(CliError::validation(format!(
                "output {} is also an input",
                out.display()
            )));
        }
        if seen.contains(&r) {
            return Err(CliError::validation(format!(
                "output {} is given twice",
                out.display()
            )));
        }
        seen.push(r);
    }
    Ok(())
}

fn is_ext(path: &Path, ext: &str) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

fn registry(args: &SkeletonArgs) -> CliResult<SkeletonRegistry> {
    let mut reg = SkeletonRegistry::default();
    for path in &args.tables {
        let text = String::from_utf8(read_file(path).at(path)?)
            .map_err(|_| CliError::parse(format!("{}: not UTF-8", path.display())))?;
        reg.register(Arc::new(SkeletonSpec::parse_table(&text).at(path)?));
    }
    Ok(reg)
}

fn read_motion(path: &Path, reg: &SkeletonRegistry) -> CliResult<MotionSequence> {
    let bytes = read_file(path).at(path)?;
    parse_motion_with(&bytes, reg).at(path)
}

fn motion_bytes(path: &Path, seq: &MotionSequence) -> Vec<u8> {
    if is_ext(path, "csv") {
        write_motion_csv(seq)
    } else {
        write_motion(seq)
    }
}

fn read_landmarks(path: &Path) -> CliResult<LandmarkSequence> {
    let bytes = read_file(path).at(path)?;
    if is_ext(path, "mpl") {
        return parse_landmark_export(&bytes).at(path);
    }
    let seq = parse_motion_with(&bytes, &SkeletonRegistry::default()).at(path)?;
    LandmarkSequence::from_motion(&seq).at(path)
}

fn ingest(a: &IngestArgs, out: &Output) -> CliResult<()> {
    check_paths(&[&a.input], &[&a.output])?;
    let mut lm = read_landmarks(&a.input)?;
    if let Some(fps) = a.fps {
        lm = LandmarkSequence::new(lm.frames().to_vec(), fps)?;
    }
    let bytes = if is_ext(&a.output, "mpl") {
        write_landmark_export(&lm)
    } else {
        let seq = lm.to_motion().with_source(a.source);
        motion_bytes(&a.output, &seq)
    };
    out.note(format_args!("{} frames at {} fps", lm.len(), lm.fps()));
    out.write(&a.output, &bytes)
}

fn retarget_cmd(a: &RetargetArgs, out: &Output) -> CliResult<()> {
    let mut inputs = vec![a.input.as_path()];
    if let Some(r) = &a.rules {
        inputs.push(r);
    }
    check_paths(&inputs, &[&a.output])?;
    let rules = match &a.rules {
        Some(path) => {
            let text = String::from_utf8(read_file(path).at(path)?)
                .map_err(|_| CliError::parse(format!("{}: not UTF-8", path.display())))?;
            RuleSet::parse(&text).at(path)?
        }
        None => RuleSet::humanml3d(a.lambda_lumbar, a.lambda_neck)?,
    };
    let lm = read_landmarks(&a.input)?;
    let mut seq = retarget(&lm, &rules)?.with_source(a.source);
    if let Some(path) = &a.rules {
        seq = seq.with_meta("retarget.rules", path.display().to_string());
    }
    out.write(&a.output, &motion_bytes(&a.output, &seq))
}

fn pair(a: Option<usize>, b: Option<usize>) -> CliResult<Option<(usize, usize)>> {
    match (a, b) {
        (None, None) => Ok(None),
        (Some(a), Some(b)) => Ok(Some((a, b))),
        _ => Err(CliError::validation(
            "--scale-a and --scale-b must be given together",
        )),
    }
}

fn normalize(a: &NormalizeArgs, out: &Output) -> CliResult<()> {
    check_paths(&[&a.input], &[&a.output])?;
    let cfg = NormalizeConfig {
        center_joint: a.center_joint,
        scale_pair: pair(a.scale_a, a.scale_b)?,
        scale_mode: a.scale_mode,
        flip_y: a.flip_y,
        median_kernel: a.median_kernel,
        lowpass_cutoff: a.cutoff,
        lowpass_order: a.order,
        scale_epsilon: a.scale_epsilon,
    };
    cfg.validate()?;
    let reg = registry(&a.skeletons)?;
    let seq = read_motion(&a.input, &reg)?;
    let seq = normalize_pipeline(&seq, &cfg).at(&a.input)?;
    out.write(&a.output, &motion_bytes(&a.output, &seq))
}

fn resample(a: &ResampleArgs, out: &Output) -> CliResult<()> {
    if a.inputs.len() != a.outputs.len() {
        return Err(CliError::validation(format!(
            "{} inputs but {} outputs",
            a.inputs.len(),
            a.outputs.len()
        )));
    }
    let ins: Vec<&Path> = a.inputs.iter().map(PathBuf::as_path).collect();
    let outs: Vec<&Path> = a.outputs.iter().map(PathBuf::as_path).collect();
    check_paths(&ins, &outs)?;
    let reg = registry(&a.skeletons)?;
    let seqs = a
        .inputs
        .iter()
        .map(|p| read_motion(p, &reg))
        .collect::<CliResult<Vec<_>>>()?;
    let lengths: Vec<String> = seqs.iter().map(|s| s.frames().to_string()).collect();
    let target = match a.frames {
        Frames::Fixed(n) => n,
        Frames::Auto => seqs.iter().map(MotionSequence::frames).min().unwrap_or(0),
    };
    let auto = a.frames == Frames::Auto;
    for ((seq, input), output) in seqs.iter().zip(&a.inputs).zip(&a.outputs) {
        let res = resample_linear(seq, target)
            .at(input)?
            .with_meta("resample.frames", target.to_string())
            .with_meta("resample.auto", auto.to_string())
            .with_meta("resample.input_frames", lengths.join("/"));
        out.write(output, &motion_bytes(output, &res))?;
    }
    Ok(())
}

fn compare(a: &CompareArgs, out: &Output) -> CliResult<()> {
    let mut outs = vec![a.output.as_path()];
    if let Some(t) = &a.table {
        outs.push(t);
    }
    check_paths(&[&a.real, &a.benchmark, &a.simulated], &outs)?;
    if !a.auto_align && a.frames != Frames::Auto {
        return Err(CliError::validation(
            "--frames only applies with --auto-align",
        ));
    }
    if a.metrics.0.is_empty() {
        return Err(CliError::validation("--metrics selects nothing"));
    }
    let reg = registry(&a.skeletons)?;
    let real = read_motion(&a.real, &reg)?;
    let benchmark = read_motion(&a.benchmark, &reg)?;
    let simulated = read_motion(&a.simulated, &reg)?;
    let task = a.task.clone().unwrap_or_else(|| {
        a.real
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "task".into())
    });
    let trip = EvalTriplet::new(task, real, benchmark, simulated)?;
    let (trip, plan) = if a.auto_align {
        let target = match a.frames {
            Frames::Auto => None,
            Frames::Fixed(n) => Some(n),
        };
        let (t, plan) = align_triplet(&trip, target)?;
        (t, Some(plan))
    } else {
        (trip, None)
    };
    let opts = CompareOptions {
        metrics: MetricSelection::only(&a.metrics.0),
        pa: PaOptions {
            mode: a.pa_mode,
            allow_reflection: a.allow_reflection,
            with_scale: a.pa_scale,
        },
    };
    let mut report = compare_sources(&trip, &opts)?;
    report.alignment = plan;
    out.write(&a.output, &report.to_json())?;
    if let Some(t) = &a.table {
        out.write(t, &write_table(std::slice::from_ref(&report)))?;
    }
    Ok(())
}

fn read_reports(path: &Path) -> CliResult<Vec<MetricReport>> {
    let bytes = read_file(path).at(path)?;
    let first = bytes.iter().find(|b| !b.is_ascii_whitespace());
    if first == Some(&b'{') {
        Ok(vec![MetricReport::from_json(&bytes).at(path)?])
    } else {
        parse_table(&bytes).at(path)
    }
}

fn aggregate_cmd(a: &AggregateArgs, out: &Output) -> CliResult<()> {
    let ins: Vec<&Path> = a.inputs.iter().map(PathBuf::as_path).collect();
    if let Some(o) = &a.output {
        check_paths(&ins, &[o])?;
    }
    let mut reports = Vec::new();
    for path in &a.inputs {
        reports.extend(read_reports(path)?);
    }
    let agg = aggregate(&reports)?;
    for m in agg.task_joint.iter().chain(&agg.joint_means) {
        for d in &m.diagnostics {
            out.note(format_args!("warning: {}: {d}", m.metric));
        }
    }
    let mut config = BTreeMap::new();
    config.insert(
        "inputs".to_string(),
        a.inputs
            .iter()
            .map(|p| p.display().to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    let mut tasks: Vec<MetricReport> = Vec::new();
    for r in reports {
        if !tasks.iter().any(|t| t.task_id == r.task_id) {
            tasks.push(r);
        }
    }
    let run = RunReport {
        config,
        tasks,
        aggregate: agg,
    };
    if let Some(o) = &a.output {
        out.write(o, &emit(&run, motionfid_core::EmitFormat::Json))?;
    }
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(&emit(&run, a.format))
        .and_then(|_| stdout.flush())
        .map_err(|e| CliError::io(format!("stdout: {e}")))
}

fn synth(a: &SynthArgs, out: &Output) -> CliResult<()> {
    let spec = SynthSpec {
        kind: a.kind,
        frames: a.frames,
        fps: a.fps,
        amplitude: a.amplitude,
        seed: a.seed,
        source: a.source,
    };
    let seq = generate(&spec)?;
    out.write(&a.output, &motion_bytes(&a.output, &seq))
}
