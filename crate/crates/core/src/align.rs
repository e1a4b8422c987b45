//! Temporal resampling onto a shared frame count.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::motion::{EvalTriplet, MotionSequence};

/// Target length and the original lengths it was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignPlan {
    pub target_frames: usize,
    pub real_frames: usize,
    pub benchmark_frames: usize,
    pub simulated_frames: usize,
    /// False when the target came from an explicit override.
    pub auto: bool,
}

impl AlignPlan {
    pub fn new(lengths: (usize, usize, usize), target: Option<usize>) -> Result<Self> {
        let (r, b, s) = lengths;
        let shortest = r.min(b).min(s);
        if shortest < 2 {
            return Err(Error::invalid(format!(
                "every sequence needs at least 2 frames to resample; lengths are {r}/{b}/{s}"
            )));
        }
        let target_frames = target.unwrap_or(shortest);
        if target_frames < 2 {
            return Err(Error::invalid(format!(
                "target frame count must be at least 2, got {target_frames}"
            )));
        }
        Ok(Self {
            target_frames,
            real_frames: r,
            benchmark_frames: b,
            simulated_frames: s,
            auto: target.is_none(),
        })
    }
}

/// Linear interpolation of one channel onto `target` evenly spaced samples.
///
/// Output sample `k` sits at position `k·(T−1)/(target−1)` on the input
/// grid. Samples landing on a knot copy it exactly; others are clamped to the
/// bracketing pair, so outputs never leave the input range.
pub fn resample_channel(x: &[f64], target: usize) -> Result<Vec<f64>> {
    let t = x.len();
    if t < 2 {
        return Err(Error::invalid(format!(
            "resampling needs at least 2 frames, got {t}"
        )));
    }
    if target < 2 {
        return Err(Error::invalid(format!(
            "target frame count must be at least 2, got {target}"
        )));
    }
    let span = (t - 1) as u128;
    let denom = (target - 1) as u128;
    Ok((0..target)
        .map(|k| {
            let num = k as u128 * span;
            let i = (num / denom) as usize;
            let rem = num % denom;
            if rem == 0 {
                return x[i];
            }
            let f = rem as f64 / denom as f64;
            let (a, b) = (x[i], x[i + 1]);
            (a + (b - a) * f).clamp(a.min(b), a.max(b))
        })
        .collect())
}

pub fn resample_linear(seq: &MotionSequence, target: usize) -> Result<MotionSequence> {
    if seq.frames() < 2 {
        return Err(Error::invalid(format!(
            "resampling needs at least 2 frames, got {}",
            seq.frames()
        )));
    }
    let fps = seq.fps() * (target as f64 - 1.0) / (seq.frames() as f64 - 1.0);
    let mut out = seq.map_channels(|c| resample_channel(c, target))?;
    if target != seq.frames() {
        out.set_fps(fps);
    }
    out.state_mut().resampled = true;
    Ok(out)
}

/// Resamples all three members to the plan's target length.
pub fn align_triplet(
    trip: &EvalTriplet,
    target: Option<usize>,
) -> Result<(EvalTriplet, AlignPlan)> {
    let plan = AlignPlan::new(trip.frame_counts(), target)?;
    let n = plan.target_frames;
    let aligned = EvalTriplet {
        task_id: trip.task_id.clone(),
        real: resample_linear(&trip.real, n)?,
        benchmark: resample_linear(&trip.benchmark, n)?,
        simulated: resample_linear(&trip.simulated, n)?,
    };
    Ok((aligned, plan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::Source;
    use crate::skeleton::SkeletonSpec;
    use proptest::prelude::*;

    #[test]
    fn hand_examples() {
        assert_eq!(
            resample_channel(&[0.0, 1.0, 2.0], 2).unwrap(),
            vec![0.0, 2.0]
        );
        assert_eq!(
            resample_channel(&[0.0, 2.0], 3).unwrap(),
            vec![0.0, 1.0, 2.0]
        );
        let x = [0.3, -1.0, 7.5, 2.0];
        assert_eq!(resample_channel(&x, 4).unwrap(), x.to_vec());
        assert!(resample_channel(&[1.0], 4).is_err());
        assert!(resample_channel(&x, 1).is_err());
    }

    fn seq(frames: usize) -> MotionSequence {
        let data = (0..frames * 22)
            .map(|i| [i as f64 * 0.01, (i as f64).sin(), 1.0])
            .collect();
        MotionSequence::new(SkeletonSpec::humanml3d_22(), data, 30.0, Source::Real).unwrap()
    }

    #[test]
    fn triplet_min_rule_and_override() {
        let trip = EvalTriplet::new(
            "t",
            seq(100),
            seq(80).with_source(Source::Benchmark),
            seq(90).with_source(Source::Simulated),
        )
        .unwrap();
        let (out, plan) = align_triplet(&trip, None).unwrap();
        assert_eq!(out.frame_counts(), (80, 80, 80));
        assert_eq!(plan.target_frames, 80);
        assert_eq!(
            (
                plan.real_frames,
                plan.benchmark_frames,
                plan.simulated_frames
            ),
            (100, 80, 90)
        );
        assert!(out.real.state().resampled);
        assert_eq!(out.benchmark.data(), trip.benchmark.data());
        let (out, plan) = align_triplet(&trip, Some(50)).unwrap();
        assert_eq!(out.frame_counts(), (50, 50, 50));
        assert!(!plan.auto);
    }

    #[test]
    fn short_member_rejected() {
        let trip = EvalTriplet::new("t", seq(10), seq(1), seq(10)).unwrap();
        assert!(align_triplet(&trip, None).is_err());
        let trip = EvalTriplet::new("t", seq(10), seq(10), seq(10)).unwrap();
        assert!(align_triplet(&trip, Some(1)).is_err());
    }

    proptest! {
        #[test]
        fn affine_channels_are_exact(
            slope in -10.0f64..10.0,
            offset in -10.0f64..10.0,
            t in 2usize..200,
            target in 2usize..300,
        ) {
            let x: Vec<f64> = (0..t).map(|i| offset + slope * i as f64 / (t - 1) as f64).collect();
            let y = resample_channel(&x, target).unwrap();
            prop_assert_eq!(y[0].to_bits(), x[0].to_bits());
            prop_assert_eq!(y[target - 1].to_bits(), x[t - 1].to_bits());
            for (k, v) in y.iter().enumerate() {
                let expected = offset + slope * k as f64 / (target - 1) as f64;
                prop_assert!((v - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
            }
        }

        #[test]
        fn bounded_and_idempotent(
            x in prop::collection::vec(-100.0f64..100.0, 2..60),
            target in 2usize..90,
        ) {
            let y = resample_channel(&x, target).unwrap();
            let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(y.iter().all(|v| *v >= lo && *v <= hi));
            prop_assert_eq!(resample_channel(&y, target).unwrap(), y);
        }
    }
}
