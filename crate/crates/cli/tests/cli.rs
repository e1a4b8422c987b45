//! Runs the `motionfid` binary against temporary files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use motionfid_core::io::{parse_motion, write_landmark_export, write_motion};
use motionfid_core::landmarks::{Landmark, LandmarkSequence};
use motionfid_core::synth::{generate, SynthSpec};
use motionfid_core::{MetricReport, Source};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_motionfid"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn fails_with(dir: &Path, args: &[&str], code: i32) -> String {
    let out = run(dir, args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error: "), "{err}");
    err
}

fn landmark_file(dir: &Path, name: &str, frames: usize) -> PathBuf {
    let frames = (0..frames)
        .map(|t| {
            std::array::from_fn(|k| Landmark {
                position: [
                    0.3 + 0.01 * k as f64 + 0.002 * t as f64,
                    0.1 + 0.025 * k as f64,
                    0.05 * ((k * 7 % 5) as f64 - 2.0),
                ],
                visibility: 0.75,
            })
        })
        .collect();
    let seq = LandmarkSequence::new(frames, 25.0).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, write_landmark_export(&seq)).unwrap();
    path
}

fn synth_file(dir: &Path, name: &str, frames: usize, seed: u64, source: Source) {
    let seq = generate(&SynthSpec {
        frames,
        seed,
        source,
        amplitude: 0.2 + 0.05 * seed as f64,
        ..Default::default()
    })
    .unwrap();
    std::fs::write(dir.join(name), write_motion(&seq)).unwrap();
}

#[test]
fn one_frame_landmarks_become_a_22_joint_file() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    landmark_file(d, "one.mpl", 1);
    ok(d, &["ingest", "one.mpl", "-o", "one33.gmo"]);
    let seq = parse_motion(&std::fs::read(d.join("one33.gmo")).unwrap()).unwrap();
    assert_eq!((seq.frames(), seq.joints(), seq.fps()), (1, 33, 25.0));

    ok(d, &["retarget", "one.mpl", "-o", "one22.gmo"]);
    let seq = parse_motion(&std::fs::read(d.join("one22.gmo")).unwrap()).unwrap();
    assert_eq!((seq.frames(), seq.joints()), (1, 22));
    assert_eq!(seq.skeleton().id(), "humanml3d-22");
    // the ingested motion file retargets the same way
    ok(d, &["retarget", "one33.gmo", "-o", "again.gmo"]);
    assert_eq!(
        std::fs::read(d.join("one22.gmo")).unwrap(),
        std::fs::read(d.join("again.gmo")).unwrap()
    );

    ok(d, &["ingest", "one.mpl", "-o", "copy.mpl"]);
    assert_eq!(
        std::fs::read(d.join("one.mpl")).unwrap(),
        std::fs::read(d.join("copy.mpl")).unwrap()
    );
}

#[test]
fn retarget_lambda_and_rule_file() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    landmark_file(d, "m.mpl", 3);
    ok(
        d,
        &[
            "retarget",
            "m.mpl",
            "-o",
            "half.gmo",
            "--lambda-lumbar",
            "0.5",
        ],
    );
    let text = std::fs::read_to_string(d.join("half.gmo")).unwrap();
    assert!(text.contains("0.5"), "{text}");
    fails_with(
        d,
        &["retarget", "m.mpl", "-o", "x.gmo", "--lambda-neck", "1.5"],
        2,
    );

    let rules = motionfid_core::RuleSet::humanml3d(0.25, 0.25)
        .unwrap()
        .to_table();
    std::fs::write(d.join("rules.txt"), rules).unwrap();
    ok(
        d,
        &[
            "retarget",
            "m.mpl",
            "-o",
            "ruled.gmo",
            "--rules",
            "rules.txt",
        ],
    );
    ok(
        d,
        &[
            "retarget",
            "m.mpl",
            "-o",
            "flags.gmo",
            "--lambda-lumbar",
            "0.25",
            "--lambda-neck",
            "0.25",
        ],
    );
    let a = parse_motion(&std::fs::read(d.join("ruled.gmo")).unwrap()).unwrap();
    let b = parse_motion(&std::fs::read(d.join("flags.gmo")).unwrap()).unwrap();
    assert_eq!(a.data(), b.data());
    std::fs::write(d.join("bad.txt"), "skeleton x\n1 | A | | direct BOGUS\n").unwrap();
    fails_with(
        d,
        &["retarget", "m.mpl", "-o", "y.gmo", "--rules", "bad.txt"],
        1,
    );
}

#[test]
fn normalize_defaults_are_echoed() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    synth_file(d, "r.gmo", 40, 1, Source::Real);
    ok(d, &["normalize", "r.gmo", "-o", "n.gmo"]);
    let seq = parse_motion(&std::fs::read(d.join("n.gmo")).unwrap()).unwrap();
    let meta = seq.meta();
    assert_eq!(meta["normalize.median_kernel"], "11");
    assert_eq!(meta["normalize.cutoff"], "0.05");
    assert_eq!(meta["normalize.order"], "4");
    assert_eq!(meta["normalize.center_joint"], "16");
    assert_eq!(meta["normalize.scale_pair"], "16,11");
    // head joint sits at the origin afterwards
    for t in 0..seq.frames() {
        assert_eq!(seq.point(t, 15), [0.0; 3]);
    }

    ok(
        d,
        &[
            "normalize",
            "r.gmo",
            "-o",
            "k5.gmo",
            "--median-kernel",
            "5",
            "--flip-y",
            "never",
            "--scale-mode",
            "median",
        ],
    );
    let k5 = parse_motion(&std::fs::read(d.join("k5.gmo")).unwrap()).unwrap();
    assert_eq!(k5.meta()["normalize.median_kernel"], "5");
    assert_eq!(k5.meta()["normalize.flipped"], "false");

    fails_with(
        d,
        &["normalize", "r.gmo", "-o", "x.gmo", "--cutoff", "1.5"],
        2,
    );
    fails_with(
        d,
        &["normalize", "r.gmo", "-o", "x.gmo", "--scale-a", "16"],
        2,
    );
    fails_with(d, &["normalize", "r.gmo", "-o", "r.gmo"], 2);
    fails_with(d, &["normalize", "nope.gmo", "-o", "x.gmo"], 1);
    std::fs::write(
        d.join("junk.gmo"),
        "gmo 1\nskeleton humanml3d-22\nframes two\n",
    )
    .unwrap();
    fails_with(d, &["normalize", "junk.gmo", "-o", "x.gmo"], 1);

    // every frame collapsed onto one point: no valid scale
    let flat = motionfid_core::MotionSequence::new(
        motionfid_core::SkeletonSpec::humanml3d_22(),
        vec![[0.5, 0.5, 0.5]; 22 * 4],
        30.0,
        Source::Real,
    )
    .unwrap();
    std::fs::write(d.join("flat.gmo"), write_motion(&flat)).unwrap();
    fails_with(d, &["normalize", "flat.gmo", "-o", "x.gmo"], 3);
}

#[test]
fn resample_triplet_to_shortest() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    synth_file(d, "r.gmo", 100, 1, Source::Real);
    synth_file(d, "b.gmo", 80, 2, Source::Benchmark);
    synth_file(d, "s.gmo", 90, 3, Source::Simulated);
    ok(
        d,
        &[
            "resample", "r.gmo", "b.gmo", "s.gmo", "-o", "r2.gmo", "-o", "b2.gmo", "-o", "s2.gmo",
        ],
    );
    for name in ["r2.gmo", "b2.gmo", "s2.gmo"] {
        let seq = parse_motion(&std::fs::read(d.join(name)).unwrap()).unwrap();
        assert_eq!(seq.frames(), 80);
        assert_eq!(seq.meta()["resample.input_frames"], "100/80/90");
    }
    ok(d, &["resample", "r.gmo", "-o", "r50.csv", "--frames", "50"]);
    let seq = parse_motion(&std::fs::read(d.join("r50.csv")).unwrap()).unwrap();
    assert_eq!(seq.frames(), 50);
    fails_with(d, &["resample", "r.gmo", "b.gmo", "-o", "x.gmo"], 2);
    fails_with(d, &["resample", "r.gmo", "-o", "x.gmo", "--frames", "1"], 2);
    fails_with(
        d,
        &["resample", "r.gmo", "-o", "x.gmo", "--frames", "many"],
        2,
    );
}

#[test]
fn compare_reports_and_selection() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    synth_file(d, "r.gmo", 30, 1, Source::Real);
    synth_file(d, "b.gmo", 30, 2, Source::Benchmark);
    let same = std::fs::read(d.join("r.gmo")).unwrap();
    std::fs::write(d.join("s.gmo"), same).unwrap();

    ok(
        d,
        &[
            "compare",
            "--real",
            "r.gmo",
            "--benchmark",
            "b.gmo",
            "--simulated",
            "s.gmo",
            "-o",
            "rep.json",
            "--table",
            "t.csv",
        ],
    );
    let rep = MetricReport::from_json(&std::fs::read(d.join("rep.json")).unwrap()).unwrap();
    assert_eq!(rep.task_id, "r");
    assert_eq!(rep.simulated.overall.mpjpe, Some(0.0));
    assert!(rep.simulated.overall.pa_mpjpe.unwrap() < 1e-12);
    assert_eq!(rep.simulated.overall.dtw_mean, Some(0.0));
    assert!(rep.benchmark.overall.mpjpe.unwrap() > 0.0);
    let table = std::fs::read_to_string(d.join("t.csv")).unwrap();
    assert_eq!(table.lines().count(), 1 + 22 * 3 * 2);

    ok(
        d,
        &[
            "compare",
            "--real",
            "r.gmo",
            "--benchmark",
            "b.gmo",
            "--simulated",
            "s.gmo",
            "-o",
            "dtw.json",
            "--metrics",
            "dtw",
        ],
    );
    let text = std::fs::read_to_string(d.join("dtw.json")).unwrap();
    assert!(!text.contains("mpjpe"), "{text}");
    assert!(text.contains("dtw_mean"));

    // byte-determinism
    ok(
        d,
        &[
            "-q",
            "compare",
            "--real",
            "r.gmo",
            "--benchmark",
            "b.gmo",
            "--simulated",
            "s.gmo",
            "-o",
            "rep2.json",
            "--table",
            "t2.csv",
        ],
    );
    assert_eq!(
        std::fs::read(d.join("rep.json")).unwrap(),
        std::fs::read(d.join("rep2.json")).unwrap()
    );
    assert_eq!(
        std::fs::read(d.join("t.csv")).unwrap(),
        std::fs::read(d.join("t2.csv")).unwrap()
    );

    synth_file(d, "short.gmo", 20, 4, Source::Simulated);
    fails_with(
        d,
        &[
            "compare",
            "--real",
            "r.gmo",
            "--benchmark",
            "b.gmo",
            "--simulated",
            "short.gmo",
            "-o",
            "x.json",
        ],
        2,
    );
    ok(
        d,
        &[
            "compare",
            "--real",
            "r.gmo",
            "--benchmark",
            "b.gmo",
            "--simulated",
            "short.gmo",
            "-o",
            "al.json",
            "--auto-align",
        ],
    );
    let rep = MetricReport::from_json(&std::fs::read(d.join("al.json")).unwrap()).unwrap();
    assert_eq!(rep.alignment.unwrap().target_frames, 20);
    fails_with(
        d,
        &[
            "compare",
            "--real",
            "r.gmo",
            "--benchmark",
            "b.gmo",
            "--simulated",
            "s.gmo",
            "-o",
            "x.json",
            "--metrics",
            "speed",
        ],
        2,
    );
}

#[test]
fn compare_offset_fixture() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let real = generate(&SynthSpec {
        frames: 25,
        source: Source::Real,
        ..Default::default()
    })
    .unwrap();
    let d_off = 0.37;
    let shifted = motionfid_core::synth::apply_rigid(
        &real,
        &motionfid_core::geom::IDENTITY,
        [0.0, 0.0, d_off],
    )
    .unwrap();
    std::fs::write(d.join("r.gmo"), write_motion(&real)).unwrap();
    std::fs::write(d.join("s.gmo"), write_motion(&shifted)).unwrap();
    std::fs::write(d.join("b.gmo"), write_motion(&real)).unwrap();
    ok(
        d,
        &[
            "compare",
            "--real",
            "r.gmo",
            "--benchmark",
            "b.gmo",
            "--simulated",
            "s.gmo",
            "-o",
            "rep.json",
        ],
    );
    let rep = MetricReport::from_json(&std::fs::read(d.join("rep.json")).unwrap()).unwrap();
    for j in &rep.simulated.joints {
        assert!((j.mpjpe.unwrap() - d_off).abs() < 1e-7, "{j:?}");
    }
}

#[test]
fn aggregate_outputs_and_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    std::fs::write(
        d.join("ref.csv"),
        motionfid_core::fixtures::JOINTWISE_REFERENCE_CSV,
    )
    .unwrap();
    let out = ok(d, &["aggregate", "ref.csv", "-o", "run.json"]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("pairing,metric,n,"));
    assert!(
        stdout.contains("task-joint,DTW,22,61.385000,66.980000"),
        "{stdout}"
    );
    let run: serde_json::Value =
        serde_json::from_slice(&std::fs::read(d.join("run.json")).unwrap()).unwrap();
    assert_eq!(run["aggregate"]["tasks"][0], "reference");

    // a duplicated input is counted once
    let twice = ok(d, &["aggregate", "ref.csv", "ref.csv"]);
    assert_eq!(twice.stdout, stdout.as_bytes());

    for fmt in ["tasks", "joints", "plot", "json"] {
        let o = ok(d, &["aggregate", "ref.csv", "--format", fmt]);
        assert!(!o.stdout.is_empty());
    }
    fails_with(d, &["aggregate", "ref.csv", "--format", "xml"], 2);

    // identical sources: zero variance, so the tests are skipped with a warning
    synth_file(d, "r.gmo", 12, 1, Source::Real);
    synth_file(d, "b.gmo", 12, 2, Source::Benchmark);
    std::fs::copy(d.join("b.gmo"), d.join("s.gmo")).unwrap();
    ok(
        d,
        &[
            "compare",
            "--real",
            "r.gmo",
            "--benchmark",
            "b.gmo",
            "--simulated",
            "s.gmo",
            "-o",
            "deg.json",
        ],
    );
    let out = ok(d, &["aggregate", "deg.json"]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("warning:"), "{err}");
    assert!(err.contains("degenerate"), "{err}");

    std::fs::write(
        d.join("bad.csv"),
        "task,joint,metric,source,value\nx,1,MPJPE,real,0.1\n",
    )
    .unwrap();
    fails_with(d, &["aggregate", "bad.csv"], 1);
    let changed =
        motionfid_core::fixtures::JOINTWISE_REFERENCE_CSV.replace("54.750000", "54.760000");
    std::fs::write(d.join("changed.csv"), changed).unwrap();
    let err = fails_with(d, &["aggregate", "ref.csv", "changed.csv"], 2);
    assert!(err.contains("reference"), "{err}");
    std::fs::write(d.join("broken.json"), "{ \"task_id\": ").unwrap();
    fails_with(d, &["aggregate", "broken.json"], 1);
}

#[test]
fn synth_and_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(
        d,
        &[
            "synth",
            "--kind",
            "walk_cycle",
            "--frames",
            "12",
            "--seed",
            "7",
            "-o",
            "a.gmo",
        ],
    );
    ok(
        d,
        &[
            "synth",
            "--kind",
            "walk_cycle",
            "--frames",
            "12",
            "--seed",
            "7",
            "-o",
            "b.gmo",
        ],
    );
    assert_eq!(
        std::fs::read(d.join("a.gmo")).unwrap(),
        std::fs::read(d.join("b.gmo")).unwrap()
    );
    fails_with(d, &["synth", "--kind", "dance", "-o", "c.gmo"], 2);

    std::fs::write(
        d.join("cfg.toml"),
        "[synth]\nframes = 9\nkind = \"noise\"\n",
    )
    .unwrap();
    ok(d, &["--config", "cfg.toml", "synth", "-o", "c.gmo"]);
    let seq = parse_motion(&std::fs::read(d.join("c.gmo")).unwrap()).unwrap();
    assert_eq!(seq.frames(), 9);
    // command line beats the file
    ok(
        d,
        &[
            "synth", "-o", "e.gmo", "--frames", "5", "--config", "cfg.toml",
        ],
    );
    let seq = parse_motion(&std::fs::read(d.join("e.gmo")).unwrap()).unwrap();
    assert_eq!(seq.frames(), 5);

    std::fs::write(d.join("bad.toml"), "[synth\n").unwrap();
    fails_with(d, &["--config", "bad.toml", "synth", "-o", "f.gmo"], 1);
    fails_with(d, &["--config", "missing.toml", "synth", "-o", "f.gmo"], 1);

    let quiet = ok(d, &["synth", "-o", "q.gmo", "--quiet"]);
    assert!(quiet.stderr.is_empty());
}
