//! `motionfid`: retarget, normalize, align and score motion sequences.

mod commands;
mod config;
mod fail;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use motionfid_core::synth::SynthKind;
use motionfid_core::{EmitFormat, FlipY, Metric, PaMode, ScaleMode, Source};

use crate::fail::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "motionfid",
    version,
    about = "Fidelity scoring for generated skeletal motion"
)]
pub struct Cli {
    /// TOML file of flag defaults, one table per subcommand.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Suppress progress messages on stderr.
    #[arg(long, short, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Read a landmark export and write it in canonical form.
    Ingest(IngestArgs),
    /// Map 33 landmarks onto the 22-joint skeleton.
    Retarget(RetargetArgs),
    /// Center, scale, flip and smooth a motion file.
    Normalize(NormalizeArgs),
    /// Resample motion files onto a shared frame count.
    Resample(ResampleArgs),
    /// Score benchmark and simulated motion against real motion.
    Compare(CompareArgs),
    /// Pool task reports and run the paired tests.
    Aggregate(AggregateArgs),
    /// Generate a synthetic 22-joint motion file.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Landmark export (.mpl, structured or CSV syntax).
    pub input: PathBuf,
    /// Output: .gmo or .csv for motion (visibility dropped), .mpl to keep visibility.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Source tag written to motion output.
    #[arg(long, default_value = "real")]
    pub source: Source,
    /// Override the frame rate read from the export.
    #[arg(long)]
    pub fps: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RetargetArgs {
    /// Landmark export (.mpl) or 33-landmark motion file (.gmo, .csv).
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Fraction along hip-center to shoulder-center for the lumbar joint.
    #[arg(long, default_value_t = motionfid_core::retarget::DEFAULT_LAMBDA_LUMBAR)]
    pub lambda_lumbar: f64,
    /// Fraction along shoulder-center to nose for the neck joint.
    #[arg(long, default_value_t = motionfid_core::retarget::DEFAULT_LAMBDA_NECK)]
    pub lambda_neck: f64,
    /// Rule file replacing the builtin mapping (the lambda flags are then ignored).
    #[arg(long, value_name = "FILE")]
    pub rules: Option<PathBuf>,
    #[arg(long, default_value = "real")]
    pub source: Source,
}

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Root joint (1-based). Defaults to the skeleton's head joint.
    #[arg(long)]
    pub center_joint: Option<usize>,
    /// First joint of the scale reference pair. Defaults to the skeleton's tag.
    #[arg(long)]
    pub scale_a: Option<usize>,
    /// Second joint of the scale reference pair.
    #[arg(long)]
    pub scale_b: Option<usize>,
    #[arg(long, default_value = "per-frame", value_name = "per-frame|median")]
    pub scale_mode: ScaleMode,
    #[arg(long, default_value = "auto", value_name = "auto|always|never")]
    pub flip_y: FlipY,
    #[arg(long, default_value_t = 11)]
    pub median_kernel: usize,
    /// Low-pass cutoff as a fraction of Nyquist.
    #[arg(long, default_value_t = 0.05)]
    pub cutoff: f64,
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    /// Frames whose reference distance is below this reuse a neighbouring scale.
    #[arg(long, default_value_t = 1e-6)]
    pub scale_epsilon: f64,
    #[command(flatten)]
    pub skeletons: SkeletonArgs,
}

#[derive(Debug, Args)]
pub struct SkeletonArgs {
    /// Extra skeleton table for motion files on a custom skeleton.
    #[arg(long = "skeleton", value_name = "FILE")]
    pub tables: Vec<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frames {
    Auto,
    Fixed(usize),
}

fn parse_frames(s: &str) -> Result<Frames, String> {
    if s == "auto" {
        return Ok(Frames::Auto);
    }
    s.parse()
        .map(Frames::Fixed)
        .map_err(|_| format!("expected `auto` or a frame count, got {s:?}"))
}

#[derive(Debug, Args)]
pub struct ResampleArgs {
    /// Input motion files, typically real, benchmark and simulated.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// One output per input, in the same order.
    #[arg(short, long = "output", required = true)]
    pub outputs: Vec<PathBuf>,
    /// Target frame count; `auto` takes the shortest input.
    #[arg(long, default_value = "auto", value_parser = parse_frames)]
    pub frames: Frames,
    #[command(flatten)]
    pub skeletons: SkeletonArgs,
}

/// A comma-separated metric list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricList(pub Vec<Metric>);

fn parse_metrics(s: &str) -> Result<MetricList, String> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.parse::<Metric>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()
        .map(MetricList)
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub real: PathBuf,
    #[arg(long)]
    pub benchmark: PathBuf,
    #[arg(long)]
    pub simulated: PathBuf,
    /// Task id recorded in the report. Defaults to the real file's stem.
    #[arg(long)]
    pub task: Option<String>,
    /// JSON report.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Also write the long CSV table.
    #[arg(long, value_name = "FILE")]
    pub table: Option<PathBuf>,
    /// Comma-separated subset of mpjpe, pa-mpjpe, dtw.
    #[arg(long, default_value = "mpjpe,pa-mpjpe,dtw", value_parser = parse_metrics)]
    pub metrics: MetricList,
    #[arg(long, default_value = "per-frame", value_name = "per-frame|global")]
    pub pa_mode: PaMode,
    /// Let the alignment use a reflection when that fits better.
    #[arg(long)]
    pub allow_reflection: bool,
    /// Also fit a uniform scale in the aligned error.
    #[arg(long)]
    pub pa_scale: bool,
    /// Resample the three inputs to a shared length first.
    #[arg(long)]
    pub auto_align: bool,
    /// Target length used with --auto-align.
    #[arg(long, default_value = "auto", value_parser = parse_frames)]
    pub frames: Frames,
    #[command(flatten)]
    pub skeletons: SkeletonArgs,
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    /// Task reports (.json) or metric tables (.csv).
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Write the full JSON run report here.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// What to print on stdout: stats, tasks, joints, plot or json.
    #[arg(long, default_value = "stats")]
    pub format: EmitFormat,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(
        long,
        default_value = "walk_cycle",
        value_name = "constant|linear_ramp|walk_cycle|noise"
    )]
    pub kind: SynthKind,
    #[arg(long, default_value_t = 60)]
    pub frames: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 30.0)]
    pub fps: f64,
    #[arg(long, default_value_t = 0.3)]
    pub amplitude: f64,
    #[arg(long, default_value = "simulated")]
    pub source: Source,
    #[arg(short, long)]
    pub output: PathBuf,
}

fn run(args: Vec<OsString>) -> Result<(), CliError> {
    let args = config::expand_args(args)?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion) {
                let _ = e.print();
                return Ok(());
            }
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or("bad arguments");
            let msg = first.strip_prefix("error: ").unwrap_or(first);
            return Err(CliError::validation(msg.to_string()));
        }
    };
    commands::dispatch(&cli)
}

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
