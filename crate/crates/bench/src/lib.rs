//! Inputs shared by the benchmarks in `benches/`.

use motionfid_core::synth::{generate, SynthKind, SynthSpec};
use motionfid_core::{EvalTriplet, MotionSequence, Source};

pub fn walk(frames: usize, amplitude: f64, source: Source) -> MotionSequence {
    generate(&SynthSpec {
        kind: SynthKind::WalkCycle,
        frames,
        amplitude,
        source,
        ..Default::default()
    })
    .expect("valid synth spec")
}

/// Three walk cycles of slightly different lengths and amplitudes.
pub fn triplet(frames: usize) -> EvalTriplet {
    EvalTriplet::new(
        "bench",
        walk(frames, 0.30, Source::Real),
        walk(frames * 9 / 10, 0.25, Source::Benchmark),
        walk(frames * 11 / 10, 0.35, Source::Simulated),
    )
    .expect("same skeleton")
}

/// A noisy single channel.
pub fn channel(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| {
            let t = n as f64;
            (t * 0.07).sin() + 0.1 * (t * 1.3).sin() + 0.05 * (t * 2.9).cos()
        })
        .collect()
}
